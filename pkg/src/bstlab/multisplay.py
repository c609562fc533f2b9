"""Multi-splay tree: the tango partition with splay trees as the auxiliary
structure.

Same embedding as the tango tree: one global BST, aux-root marks, locked
depth d with subtree depth bounds a/b (marked children skipped).  Cut and
join avoid split and concatenate entirely: splaying the boundary nodes to
the top of their auxiliary tree exposes the deep part (or the gap) as a
single child slot, so cutting is marking that slot and joining is unmarking
it.  The accessed key is finally splayed to the global root.
"""

import numpy as np
from numba import njit

from .cost_model import FOLLOW, INIT, NULL, MeteredTree, _ab_fix, _rotate_up
from .errors import BstLabError


@njit(cache=True)
def _aux_splay(left, right, parent, d, a, b, auxr, meter, x, stop):
    # Splay x within its aux tree until parent[x] == stop.  The caller moves
    # the aux-root mark; rotations skip marked children when fixing a/b.
    while parent[x] != stop:
        p = parent[x]
        g = parent[p]
        if g == stop:
            _rotate_up(left, right, parent, d, a, b, auxr, True, x, meter)
        elif (left[g] == p) == (left[p] == x):
            _rotate_up(left, right, parent, d, a, b, auxr, True, p, meter)
            _rotate_up(left, right, parent, d, a, b, auxr, True, x, meter)
        else:
            _rotate_up(left, right, parent, d, a, b, auxr, True, x, meter)
            _rotate_up(left, right, parent, d, a, b, auxr, True, x, meter)


@njit(cache=True)
def _cut_bounds(left, right, auxr, d, b, meter, root, dp):
    # As in the tango tree: predecessor and successor of the deep key range.
    u = root
    lpred = NULL
    while True:
        c = left[u]
        if c != NULL and auxr[c] == 0 and b[c] > dp:
            u = c
            meter[FOLLOW] += 1
        elif d[u] > dp:
            break
        else:
            lpred = u
            u = right[u]
            meter[FOLLOW] += 1
    c = left[u]
    if c != NULL and auxr[c] == 0:
        u2 = c
        meter[FOLLOW] += 1
        while True:
            c2 = right[u2]
            if c2 != NULL and auxr[c2] == 0:
                u2 = c2
                meter[FOLLOW] += 1
            else:
                break
        lpred = u2
    u = root
    rsucc = NULL
    while True:
        c = right[u]
        if c != NULL and auxr[c] == 0 and b[c] > dp:
            u = c
            meter[FOLLOW] += 1
        elif d[u] > dp:
            break
        else:
            rsucc = u
            u = left[u]
            meter[FOLLOW] += 1
    c = right[u]
    if c != NULL and auxr[c] == 0:
        u2 = c
        meter[FOLLOW] += 1
        while True:
            c2 = left[u2]
            if c2 != NULL and auxr[c2] == 0:
                u2 = c2
                meter[FOLLOW] += 1
            else:
                break
        rsucc = u2
    return lpred, rsucc


@njit(cache=True)
def _ms_cut(left, right, parent, red, auxr, d, a, b, meter, root, dp):
    """Mark everything deeper than dp as a fresh aux tree.

    Splays l' (pred of the deep range) to the aux root and r' (succ) just
    below it; the deep part is then exactly one child slot.  Returns
    (top_root, detached_root).
    """
    lpred, rsucc = _cut_bounds(left, right, auxr, d, b, meter, root, dp)
    stop = parent[root]
    auxr[root] = 0
    if lpred != NULL:
        _aux_splay(left, right, parent, d, a, b, auxr, meter, lpred, stop)
        auxr[lpred] = 1
        red[lpred] = 0
        top = lpred
        if rsucc != NULL:
            _aux_splay(left, right, parent, d, a, b, auxr, meter, rsucc, lpred)
            dd = left[rsucc]
            auxr[dd] = 1
            red[dd] = 0
            _ab_fix(left, right, d, a, b, auxr, rsucc)
            _ab_fix(left, right, d, a, b, auxr, lpred)
        else:
            dd = right[lpred]
            auxr[dd] = 1
            red[dd] = 0
            _ab_fix(left, right, d, a, b, auxr, lpred)
    else:
        _aux_splay(left, right, parent, d, a, b, auxr, meter, rsucc, stop)
        auxr[rsucc] = 1
        red[rsucc] = 0
        top = rsucc
        dd = left[rsucc]
        auxr[dd] = 1
        red[dd] = 0
        _ab_fix(left, right, d, a, b, auxr, rsucc)
    return top, dd


@njit(cache=True)
def _gap_bounds(left, right, meter, root, v):
    u = root
    lpp = NULL
    rpp = NULL
    while True:
        if v < u:
            c = left[u]
            rpp = u
        else:
            c = right[u]
            lpp = u
        if c == v:
            return lpp, rpp
        u = c
        meter[FOLLOW] += 1


@njit(cache=True)
def _ms_join(left, right, parent, red, auxr, d, a, b, meter, root, v):
    """Unmark the hanging aux tree at v, absorbing it into the tree at root.

    Splays the keys bracketing v's gap to the top so that v becomes a direct
    child slot, then clears its mark.  Returns the new aux root.
    """
    lpp, rpp = _gap_bounds(left, right, meter, root, v)
    stop = parent[root]
    auxr[root] = 0
    if lpp != NULL:
        _aux_splay(left, right, parent, d, a, b, auxr, meter, lpp, stop)
        auxr[lpp] = 1
        red[lpp] = 0
        top = lpp
        if rpp != NULL:
            _aux_splay(left, right, parent, d, a, b, auxr, meter, rpp, lpp)
            auxr[v] = 0
            _ab_fix(left, right, d, a, b, auxr, rpp)
            _ab_fix(left, right, d, a, b, auxr, lpp)
        else:
            auxr[v] = 0
            _ab_fix(left, right, d, a, b, auxr, lpp)
    else:
        _aux_splay(left, right, parent, d, a, b, auxr, meter, rpp, stop)
        auxr[rpp] = 1
        red[rpp] = 0
        top = rpp
        auxr[v] = 0
        _ab_fix(left, right, d, a, b, auxr, rpp)
    return top


@njit(cache=True)
def _ms_access(left, right, parent, red, auxr, d, a, b, meter, root, key):
    meter[INIT] += 1
    barr = np.empty(80, np.int64)
    cur = root
    nb = 0
    while cur != key:
        if key < cur:
            nxt = left[cur]
        else:
            nxt = right[cur]
        if auxr[nxt] == 1:
            barr[nb] = nxt
            nb += 1
        cur = nxt
        meter[FOLLOW] += 1
    m = root
    for i in range(nb):
        v = barr[i]
        dp = a[v] - 1
        if b[m] > dp:
            m, _dd = _ms_cut(left, right, parent, red, auxr, d, a, b, meter,
                             m, dp)
        m = _ms_join(left, right, parent, red, auxr, d, a, b, meter, m, v)
    # bring the accessed key to the global root
    auxr[m] = 0
    _aux_splay(left, right, parent, d, a, b, auxr, meter, key, NULL)
    auxr[key] = 1
    red[key] = 0
    return key


@njit(cache=True)
def _ms_run(left, right, parent, red, auxr, d, a, b, meter, root, keys, costs):
    for i in range(keys.shape[0]):
        before = meter[0] + meter[1] + meter[2]
        root = _ms_access(left, right, parent, red, auxr, d, a, b, meter,
                          root, keys[i])
        costs[i] = meter[0] + meter[1] + meter[2] - before
    return root


class MultiSplayTree(MeteredTree):
    """Multi-splay tree locked over keys 1..n, all-singleton aux trees."""

    uses_depth_bounds = True

    def __init__(self, n):
        super().__init__(n)
        self.auxr[1:] = 1

    def access(self, key):
        """Access a key; returns the unit cost of this access."""
        self._check_key(key)
        before = self.meter.snapshot()
        self.root = int(_ms_access(self.left, self.right, self.parent,
                                   self.red, self.auxr, self.d, self.a,
                                   self.b, self.meter.array, self.root, key))
        return self.meter.snapshot() - before

    def run(self, keys):
        """Access every key in sequence; returns per-access unit costs."""
        keys = np.ascontiguousarray(keys, np.int64)
        if keys.size and (keys.min() < 1 or keys.max() > self.n):
            raise BstLabError("key-out-of-range")
        costs = np.empty(keys.shape[0], np.int64)
        self.root = int(_ms_run(self.left, self.right, self.parent, self.red,
                                self.auxr, self.d, self.a, self.b,
                                self.meter.array, self.root, keys, costs))
        return costs

    def cut(self, aux_root, dprime):
        """Cut the aux tree at aux_root at depth dprime; returns
        (top_root, detached_root)."""
        if int(self.b[aux_root]) <= dprime:
            raise BstLabError("nothing-to-cut",
                              f"no node deeper than {dprime}")
        if int(self.a[aux_root]) > dprime:
            raise BstLabError("nothing-to-cut",
                              "cut would empty the shallow side")
        was_root = aux_root == self.root
        top, dd = _ms_cut(self.left, self.right, self.parent, self.red,
                          self.auxr, self.d, self.a, self.b, self.meter.array,
                          aux_root, dprime)
        top, dd = int(top), int(dd)
        if was_root:
            self.root = top
        return top, dd

    def join(self, top_root, child_root):
        """Merge the hanging aux tree at child_root into the tree at
        top_root; returns the merged root."""
        if int(self.b[top_root]) + 1 != int(self.a[child_root]):
            raise BstLabError("bad-join", "depth intervals are not adjacent")
        was_root = top_root == self.root
        top = int(_ms_join(self.left, self.right, self.parent, self.red,
                           self.auxr, self.d, self.a, self.b,
                           self.meter.array, top_root, child_root))
        if was_root:
            self.root = top
        return top

    # -- test-only, unmetered -------------------------------------------------

    def aux_root_of(self, key):
        u = key
        while int(self.auxr[u]) == 0:
            u = int(self.parent[u])
        return u

    def aux_partition(self):
        """Keys grouped by auxiliary tree, as a set of frozensets."""
        groups = {}
        stack = [(self.root, self.root)]
        while stack:
            u, r = stack.pop()
            if int(self.auxr[u]) == 1:
                r = u
            groups.setdefault(r, []).append(u)
            for c in (int(self.left[u]), int(self.right[u])):
                if c != NULL:
                    stack.append((c, r))
        return {frozenset(v) for v in groups.values()}

    def check_invariants(self):
        self.check_links()
        self.check_inorder()
        if int(self.auxr[self.root]) != 1:
            raise AssertionError("global root is not an aux root")
        for r in range(1, self.n + 1):
            if int(self.auxr[r]) != 1:
                continue
            nodes = []
            stack = [r]
            while stack:
                u = stack.pop()
                nodes.append(u)
                for c in (int(self.left[u]), int(self.right[u])):
                    if c != NULL and int(self.auxr[c]) == 0:
                        stack.append(c)
            ds = sorted(int(self.d[u]) for u in nodes)
            if ds != list(range(ds[0], ds[0] + len(ds))):
                raise AssertionError(
                    f"aux tree {r}: depths not contiguous: {ds}")
            for u in nodes:
                lo = hi = int(self.d[u])
                for c in (int(self.left[u]), int(self.right[u])):
                    if c != NULL and int(self.auxr[c]) == 0:
                        lo = min(lo, int(self.a[c]))
                        hi = max(hi, int(self.b[c]))
                if lo != int(self.a[u]) or hi != int(self.b[u]):
                    raise AssertionError(f"aux tree {r}: stale a/b at {u}")


def lock_multisplay(n):
    """Locked multi-splay tree: complete shape, singleton aux trees."""
    return MultiSplayTree(n)
