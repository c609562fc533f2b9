"""Tango tree: preferred paths stored as depth-augmented red-black trees.

The whole structure is one BST over 1..n.  Auxiliary-tree membership is
encoded by an `aux-root` mark on the top node of each auxiliary tree: a
node's auxiliary tree is its nearest marked ancestor-or-self, and marked
children are treated as absent (black nulls) by the red-black machinery.

Every node carries its locked depth d (depth in the complete reference tree
at lock time) plus a/b, the min/max locked depth within the node's
aux-subtree; a/b steer the search for the cut boundaries.

An access walks from the root to the key with metered follows, recording
each auxiliary-tree boundary crossed, then lazily repairs the partition top
down: for each crossed boundary into a tree rooted at v, the merged top tree
is cut at depth (min depth in v's tree) - 1 and joined with v's tree.  Cut
and join are built from red-black split and concatenate; black heights are
recomputed on demand by walking left spines (metered) rather than stored.
"""

import numpy as np
from numba import njit

from .cost_model import (FOLLOW, INIT, NULL, MeteredTree, _ab_fix, _rotate_up)
from .errors import BstLabError

# -- red-black primitives over embedded auxiliary trees ----------------------


@njit(cache=True)
def _bh_walk(left, red, auxr, meter, u):
    # Black height of a real aux-subtree root: count blacks down the left
    # spine; children rooting other aux trees terminate like nulls.
    h = 0
    while True:
        if red[u] == 0:
            h += 1
        c = left[u]
        if c == NULL or auxr[c] == 1:
            return h
        u = c
        meter[FOLLOW] += 1


@njit(cache=True)
def _rb_fixup(left, right, parent, red, auxr, d, a, b, meter, x):
    # Bottom-up repair after attaching the red node x (insert-style cases).
    # Rotations repair a/b locally; recolors never touch a/b.
    while True:
        p = parent[x]
        if p == NULL or red[p] == 0:
            break
        g = parent[p]   # exists and is black: red p cannot be a piece root
        if left[g] == p:
            u = right[g]
        else:
            u = left[g]
        if u != NULL and auxr[u] == 0 and red[u] == 1:
            red[p] = 0
            red[u] = 0
            red[g] = 1
            x = g
            meter[FOLLOW] += 2
        else:
            if (left[g] == p) != (left[p] == x):
                _rotate_up(left, right, parent, d, a, b, auxr, True, x, meter)
                _rotate_up(left, right, parent, d, a, b, auxr, True, x, meter)
                red[x] = 0
                red[g] = 1
            else:
                _rotate_up(left, right, parent, d, a, b, auxr, True, p, meter)
                red[p] = 0
                red[g] = 1
            break


@njit(cache=True)
def _ab_walk_root(left, right, parent, d, a, b, auxr, meter, x):
    # Repair a/b from x to the top of the detached piece; returns its root.
    while True:
        _ab_fix(left, right, d, a, b, auxr, x)
        p = parent[x]
        if p == NULL:
            return x
        x = p
        meter[FOLLOW] += 1


@njit(cache=True)
def _rb_join(left, right, parent, red, auxr, d, a, b, meter,
             lp, lreal, k, rp, rreal):
    """Concatenate: all keys under lp < k < all keys under rp.

    lp/rp may be virtual: null or the root of a hanging marked subtree whose
    keys fill the adjacent gap.  Returns the root of a valid red-black aux
    tree containing k and both real sides.
    """
    if lreal:
        parent[lp] = NULL
        red[lp] = 0
        bl = _bh_walk(left, red, auxr, meter, lp)
    else:
        bl = 0
    if rreal:
        parent[rp] = NULL
        red[rp] = 0
        br = _bh_walk(left, red, auxr, meter, rp)
    else:
        br = 0
    if bl == br:
        left[k] = lp
        right[k] = rp
        parent[k] = NULL
        if lp != NULL:
            parent[lp] = k
        if rp != NULL:
            parent[rp] = k
        red[k] = 0
        _ab_fix(left, right, d, a, b, auxr, k)
        return k
    if bl > br:
        # descend the right spine of the taller left side
        cur = lp
        h = bl
        while True:
            nx = right[cur]
            if nx == NULL or auxr[nx] == 1:
                # bottom slot; br == 0 here.  nx fills the gap below k.
                right[cur] = k
                parent[k] = cur
                left[k] = nx
                right[k] = rp
                if nx != NULL:
                    parent[nx] = k
                if rp != NULL:
                    parent[rp] = k
                break
            hn = h - (1 if red[cur] == 0 else 0)
            if red[nx] == 0 and hn == br:
                meter[FOLLOW] += 1
                right[cur] = k
                parent[k] = cur
                left[k] = nx
                parent[nx] = k
                right[k] = rp
                if rp != NULL:
                    parent[rp] = k
                break
            cur = nx
            h = hn
            meter[FOLLOW] += 1
    else:
        cur = rp
        h = br
        while True:
            nx = left[cur]
            if nx == NULL or auxr[nx] == 1:
                left[cur] = k
                parent[k] = cur
                right[k] = nx
                left[k] = lp
                if nx != NULL:
                    parent[nx] = k
                if lp != NULL:
                    parent[lp] = k
                break
            hn = h - (1 if red[cur] == 0 else 0)
            if red[nx] == 0 and hn == bl:
                meter[FOLLOW] += 1
                left[cur] = k
                parent[k] = cur
                right[k] = nx
                parent[nx] = k
                left[k] = lp
                if lp != NULL:
                    parent[lp] = k
                break
            cur = nx
            h = hn
            meter[FOLLOW] += 1
    red[k] = 1
    _ab_fix(left, right, d, a, b, auxr, k)
    _rb_fixup(left, right, parent, red, auxr, d, a, b, meter, k)
    root = _ab_walk_root(left, right, parent, d, a, b, auxr, meter, k)
    red[root] = 0
    return root


@njit(cache=True)
def _rb_split(left, right, parent, red, auxr, d, a, b, meter, root, key):
    """Split the aux tree rooted at `root` around `key` (a member).

    Returns (lp, lreal, rp, rreal): the side trees, each either a valid
    red-black aux tree or the virtual gap content adjacent to key.  The key
    node itself is detached; its child fields are dead until reattached.
    """
    pstack = np.empty(64, np.int64)
    pdir = np.empty(64, np.uint8)
    cur = root
    t = 0
    while cur != key:
        pstack[t] = cur
        if key < cur:
            pdir[t] = 1
            cur = left[cur]
        else:
            pdir[t] = 0
            cur = right[cur]
        meter[FOLLOW] += 1
        t += 1
    la = left[key]
    lar = la != NULL and auxr[la] == 0
    ra = right[key]
    rar = ra != NULL and auxr[ra] == 0
    for j in range(t - 1, -1, -1):
        p = pstack[j]
        if pdir[j] == 1:
            # key < p: p and its right subtree join the greater side
            c = right[p]
            creal = c != NULL and auxr[c] == 0
            ra = _rb_join(left, right, parent, red, auxr, d, a, b, meter,
                          ra, rar, p, c, creal)
            rar = True
        else:
            c = left[p]
            creal = c != NULL and auxr[c] == 0
            la = _rb_join(left, right, parent, red, auxr, d, a, b, meter,
                          c, creal, p, la, lar)
            lar = True
    parent[key] = NULL
    return la, lar, ra, rar


# -- cut / join in terms of split and concatenate ----------------------------


@njit(cache=True)
def _cut_bounds(left, right, red, auxr, d, a, b, meter, root, dp):
    """Boundary keys around the deep range of the aux tree at `root`.

    Returns (l', r'): the predecessor of the smallest key with depth > dp and
    the successor of the largest such key (0 where absent).  Steered by the
    a/b depth bounds; assumes at least one node is deeper than dp.
    """
    # leftmost deep node and its predecessor
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
    # rightmost deep node and its successor
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
def _cut(left, right, parent, red, auxr, d, a, b, meter, root, dp):
    """Detach all nodes deeper than dp into their own aux tree.

    Returns (top_root, detached_root).  Caller guarantees b[root] > dp and
    a[root] <= dp (the shallow part is non-empty).
    """
    auxr[root] = 0
    lpred, rsucc = _cut_bounds(left, right, red, auxr, d, a, b, meter, root, dp)
    if lpred != NULL:
        la, lar, m1, m1r = _rb_split(left, right, parent, red, auxr, d, a, b,
                                     meter, root, lpred)
        if rsucc != NULL:
            dd, ddr, r2, r2r = _rb_split(left, right, parent, red, auxr,
                                         d, a, b, meter, m1, rsucc)
            auxr[dd] = 1
            red[dd] = 0
            m2 = _rb_join(left, right, parent, red, auxr, d, a, b, meter,
                          dd, False, rsucc, r2, r2r)
            top = _rb_join(left, right, parent, red, auxr, d, a, b, meter,
                           la, lar, lpred, m2, True)
        else:
            # deep range is the top of the key space
            dd = m1
            auxr[dd] = 1
            red[dd] = 0
            top = _rb_join(left, right, parent, red, auxr, d, a, b, meter,
                           la, lar, lpred, dd, False)
    else:
        dd, ddr, r2, r2r = _rb_split(left, right, parent, red, auxr, d, a, b,
                                     meter, root, rsucc)
        auxr[dd] = 1
        red[dd] = 0
        top = _rb_join(left, right, parent, red, auxr, d, a, b, meter,
                       dd, False, rsucc, r2, r2r)
    auxr[top] = 1
    red[top] = 0
    parent[top] = NULL
    return top, dd


@njit(cache=True)
def _gap_bounds(left, right, meter, root, v):
    # Keys of the top tree adjacent to the gap holding the hanging tree v.
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
def _join_merge(left, right, parent, red, auxr, d, a, b, meter, root, v):
    """Absorb the hanging aux tree rooted at v into the tree at `root`."""
    auxr[root] = 0
    lpp, rpp = _gap_bounds(left, right, meter, root, v)
    if lpp != NULL:
        la, lar, m1, m1r = _rb_split(left, right, parent, red, auxr, d, a, b,
                                     meter, root, lpp)
        if rpp != NULL:
            vv, vvr, r2, r2r = _rb_split(left, right, parent, red, auxr,
                                         d, a, b, meter, m1, rpp)
            auxr[v] = 0
            m2 = _rb_join(left, right, parent, red, auxr, d, a, b, meter,
                          v, True, rpp, r2, r2r)
            top = _rb_join(left, right, parent, red, auxr, d, a, b, meter,
                           la, lar, lpp, m2, True)
        else:
            # v fills the gap above the largest key: m1 is v itself
            auxr[v] = 0
            top = _rb_join(left, right, parent, red, auxr, d, a, b, meter,
                           la, lar, lpp, v, True)
    else:
        vv, vvr, r2, r2r = _rb_split(left, right, parent, red, auxr, d, a, b,
                                     meter, root, rpp)
        auxr[v] = 0
        top = _rb_join(left, right, parent, red, auxr, d, a, b, meter,
                       v, True, rpp, r2, r2r)
    auxr[top] = 1
    red[top] = 0
    parent[top] = NULL
    return top


@njit(cache=True)
def _tango_access(left, right, parent, red, auxr, d, a, b, meter, root, key):
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
            m, _dd = _cut(left, right, parent, red, auxr, d, a, b, meter, m, dp)
        m = _join_merge(left, right, parent, red, auxr, d, a, b, meter, m, v)
    return m


@njit(cache=True)
def _tango_run(left, right, parent, red, auxr, d, a, b, meter, root, keys,
               costs):
    for i in range(keys.shape[0]):
        before = meter[0] + meter[1] + meter[2]
        root = _tango_access(left, right, parent, red, auxr, d, a, b, meter,
                             root, keys[i])
        costs[i] = meter[0] + meter[1] + meter[2] - before
    return root


# -- wrapper -----------------------------------------------------------------


class TangoTree(MeteredTree):
    """Tango tree locked over keys 1..n: every node starts as its own
    auxiliary tree, with locked depth d and a = b = d, all black."""

    uses_depth_bounds = True

    def __init__(self, n):
        super().__init__(n)
        self.auxr[1:] = 1

    def access(self, key):
        """Access a key; returns the unit cost of this access."""
        self._check_key(key)
        before = self.meter.snapshot()
        self.root = int(_tango_access(self.left, self.right, self.parent,
                                      self.red, self.auxr, self.d, self.a,
                                      self.b, self.meter.array, self.root, key))
        return self.meter.snapshot() - before

    def run(self, keys):
        """Access every key in sequence; returns per-access unit costs."""
        keys = np.ascontiguousarray(keys, np.int64)
        if keys.size and (keys.min() < 1 or keys.max() > self.n):
            raise BstLabError("key-out-of-range")
        costs = np.empty(keys.shape[0], np.int64)
        self.root = int(_tango_run(self.left, self.right, self.parent,
                                   self.red, self.auxr, self.d, self.a,
                                   self.b, self.meter.array, self.root, keys,
                                   costs))
        return costs

    # -- direct cut / join / split / concatenate (maintenance and tests) -----

    def cut(self, aux_root, dprime):
        """Cut the aux tree rooted at aux_root at depth dprime.

        Returns (top_root, detached_root).
        """
        if int(self.b[aux_root]) <= dprime:
            raise BstLabError("nothing-to-cut",
                              f"no node deeper than {dprime}")
        if int(self.a[aux_root]) > dprime:
            raise BstLabError("nothing-to-cut",
                              "cut would empty the shallow side")
        was_root = aux_root == self.root
        gp = int(self.parent[aux_root])
        gleft = gp != NULL and int(self.left[gp]) == aux_root
        top, dd = _cut(self.left, self.right, self.parent, self.red, self.auxr,
                       self.d, self.a, self.b, self.meter.array, aux_root,
                       dprime)
        top, dd = int(top), int(dd)
        self._reattach(top, gp, gleft, was_root)
        return top, dd

    def join(self, top_root, child_root):
        """Merge the aux tree at child_root (hanging under top_root's tree)
        into the aux tree at top_root; returns the merged root."""
        if int(self.b[top_root]) + 1 != int(self.a[child_root]):
            raise BstLabError("bad-join", "depth intervals are not adjacent")
        was_root = top_root == self.root
        gp = int(self.parent[top_root])
        gleft = gp != NULL and int(self.left[gp]) == top_root
        top = int(_join_merge(self.left, self.right, self.parent, self.red,
                              self.auxr, self.d, self.a, self.b,
                              self.meter.array, top_root, child_root))
        self._reattach(top, gp, gleft, was_root)
        return top

    def rb_split(self, key):
        """Split the aux tree containing key at key; returns
        (left_root_or_0, right_root_or_0).  Reassemble with rb_concatenate."""
        r = self.aux_root_of(key)
        self._pending = (key, int(self.parent[r]),
                         int(self.parent[r]) != NULL
                         and int(self.left[int(self.parent[r])]) == r,
                         r == self.root)
        self.auxr[r] = 0
        la, lar, ra, rar = _rb_split(self.left, self.right, self.parent,
                                     self.red, self.auxr, self.d, self.a,
                                     self.b, self.meter.array, r, key)
        self._pending_sides = (int(la), bool(lar), int(ra), bool(rar))
        return (int(la) if lar else 0, int(ra) if rar else 0)

    def rb_concatenate(self, left_root, pivot, right_root):
        """Concatenate two aux trees around pivot and reattach into the slot
        recorded by the matching rb_split."""
        key, gp, gleft, was_root = self._pending
        la, lar, ra, rar = self._pending_sides
        if left_root:
            la, lar = left_root, True
        if right_root:
            ra, rar = right_root, True
        top = int(_rb_join(self.left, self.right, self.parent, self.red,
                           self.auxr, self.d, self.a, self.b,
                           self.meter.array, la, lar, pivot, ra, rar))
        self.auxr[top] = 1
        self.red[top] = 0
        self._reattach(top, gp, gleft, was_root)
        del self._pending, self._pending_sides
        return top

    def _reattach(self, top, gp, gleft, was_root):
        self.parent[top] = gp
        if gp != NULL:
            if gleft:
                self.left[gp] = top
            else:
                self.right[gp] = top
        if was_root:
            self.root = top

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

    def _aux_nodes(self, r):
        out = []
        stack = [r]
        while stack:
            u = stack.pop()
            out.append(u)
            for c in (int(self.left[u]), int(self.right[u])):
                if c != NULL and int(self.auxr[c]) == 0:
                    stack.append(c)
        return out

    def check_invariants(self):
        self.check_links()
        self.check_inorder()
        if int(self.auxr[self.root]) != 1:
            raise AssertionError("global root is not an aux root")
        for r in range(1, self.n + 1):
            if int(self.auxr[r]) != 1:
                continue
            self._check_aux_tree(r)

    def _check_aux_tree(self, r):
        if int(self.red[r]) != 0:
            raise AssertionError(f"aux root {r} is red")
        nodes = self._aux_nodes(r)
        # depth interval: contiguous distinct values
        ds = sorted(int(self.d[u]) for u in nodes)
        if ds != list(range(ds[0], ds[0] + len(ds))):
            raise AssertionError(f"aux tree {r}: depths not contiguous: {ds}")
        # red-black: no red-red edge, equal black heights, a/b exact
        def bh(u):
            if u == NULL or int(self.auxr[u]) == 1 and u != r:
                return 0
            l, rr = int(self.left[u]), int(self.right[u])
            lv = bh(l) if l != NULL and int(self.auxr[l]) == 0 else 0
            rv = bh(rr) if rr != NULL and int(self.auxr[rr]) == 0 else 0
            if lv != rv:
                raise AssertionError(f"aux tree {r}: black height mismatch at {u}")
            if int(self.red[u]) == 1:
                for c in (l, rr):
                    if c != NULL and int(self.auxr[c]) == 0 \
                            and int(self.red[c]) == 1:
                        raise AssertionError(f"aux tree {r}: red-red at {u}")
                return lv
            return lv + 1

        bh(r)
        for u in nodes:
            lo = hi = int(self.d[u])
            for c in (int(self.left[u]), int(self.right[u])):
                if c != NULL and int(self.auxr[c]) == 0:
                    lo = min(lo, int(self.a[c]))
                    hi = max(hi, int(self.b[c]))
            if lo != int(self.a[u]) or hi != int(self.b[u]):
                raise AssertionError(f"aux tree {r}: stale a/b at {u}")


def lock_tango(n):
    """Locked tango tree: complete shape, all-singleton aux trees."""
    return TangoTree(n)
