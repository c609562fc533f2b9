"""Static complete reference tree with preferred-child state.

This module keeps the fixed balanced tree P over keys 1..n, replays access
sequences through the preferred-child switching rule, and derives from it:

* the interleave bound of a sequence (replayed and by direct per-node
  alternation counting, which must agree exactly),
* the cost lower bound max(m, IB/2 - n) for any BST on that sequence,
* the preferred-path decomposition used as a structural oracle for the
  tango and multi-splay auxiliary-tree partitions,
* the same-root-leaf-path probability for two random keys (exact count and
  its leading-order approximation 2 lg n / n),
* the unified bound trace of a sequence.

Region convention: an access x contributes to a node v only when x lies in
v's strict subtree (left subtree -> left region, right subtree -> right
region).  Accessing v itself changes nothing at v.  This is the convention
under which the replayed edge-flip count, the direct alternation count, and
the auxiliary-tree partitions of the self-adjusting structures all agree
exactly.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from numba import njit

from .cost_model import complete_tree_arrays
from .errors import BstLabError

PREF_NONE = 0
PREF_LEFT = 1
PREF_RIGHT = 2


@njit(cache=True)
def _replay(pleft, pright, root, pref, keys, incs, firsts):
    """Replay accesses; per-access interleave increments and first-touches."""
    total = 0
    for t in range(keys.shape[0]):
        key = keys[t]
        u = root
        inc = 0
        ft = 0
        while u != key:
            if key < u:
                side = 1
                nxt = pleft[u]
            else:
                side = 2
                nxt = pright[u]
            old = pref[u]
            if old == 0:
                ft += 1
            elif old != side:
                inc += 1
            pref[u] = side
            u = nxt
        incs[t] = inc
        firsts[t] = ft
        total += inc
    return total


class ReferenceModel:
    """Complete tree P on 1..n with per-node preferred-child state."""

    def __init__(self, n):
        if n < 1:
            raise BstLabError("empty-tree", "n must be >= 1")
        self.n = n
        self.left, self.right, self.parent, self.depth, self.root = \
            complete_tree_arrays(n)
        self.pref = np.zeros(n + 1, np.uint8)
        self.ib_total = 0
        self.first_touch_total = 0

    def record_access(self, key):
        """Walk root->key, flipping preferred children; returns IB increment."""
        inc, _ = self.record_access_detail(key)
        return inc

    def record_access_detail(self, key):
        """Like record_access but also returns the none->set first-touch count."""
        if not 1 <= key <= self.n:
            raise BstLabError("key-out-of-range", f"{key} not in 1..{self.n}")
        keys = np.array([key], np.int64)
        incs = np.empty(1, np.int64)
        firsts = np.empty(1, np.int64)
        _replay(self.left, self.right, self.root, self.pref, keys, incs, firsts)
        inc, ft = int(incs[0]), int(firsts[0])
        self.ib_total += inc
        self.first_touch_total += ft
        return inc, ft

    def replay(self, keys):
        """Replay a whole sequence; returns (increments, first_touches)."""
        keys = np.ascontiguousarray(keys, np.int64)
        if keys.size and (keys.min() < 1 or keys.max() > self.n):
            raise BstLabError("key-out-of-range")
        incs = np.empty(keys.shape[0], np.int64)
        firsts = np.empty(keys.shape[0], np.int64)
        total = _replay(self.left, self.right, self.root, self.pref,
                        keys, incs, firsts)
        self.ib_total += int(total)
        self.first_touch_total += int(firsts.sum())
        return incs, firsts

    def preferred_path_decomposition(self):
        """Partition of 1..n into maximal preferred chains (list of lists)."""
        paths = []
        for head in range(1, self.n + 1):
            p = int(self.parent[head])
            if p != 0:
                side = PREF_LEFT if int(self.left[p]) == head else PREF_RIGHT
                if int(self.pref[p]) == side:
                    continue  # head is someone's preferred child
            path = [head]
            u = head
            while True:
                s = int(self.pref[u])
                if s == PREF_NONE:
                    break
                u = int(self.left[u]) if s == PREF_LEFT else int(self.right[u])
                path.append(u)
            paths.append(path)
        return paths

    def root_preferred_path(self):
        """Keys on the chain of preferred children starting at the root."""
        path = [self.root]
        u = self.root
        while True:
            s = int(self.pref[u])
            if s == PREF_NONE:
                break
            u = int(self.left[u]) if s == PREF_LEFT else int(self.right[u])
            path.append(u)
        return path

    def is_leaf(self, key):
        return int(self.left[key]) == 0 and int(self.right[key]) == 0


@dataclass
class InterleaveTrace:
    per_access_increment: list
    total: int = field(init=False)

    def __post_init__(self):
        self.total = int(sum(self.per_access_increment))


def build_reference(n):
    """Fresh reference model: complete tree, no preferred children."""
    return ReferenceModel(n)


def interleave_bound(keys, n):
    """Replay-based interleave bound of a sequence over the universe 1..n."""
    model = ReferenceModel(n)
    incs, _ = model.replay(np.asarray(keys, np.int64))
    return InterleaveTrace(per_access_increment=[int(v) for v in incs])


def interleave_bound_direct(keys, n):
    """Direct-definition interleave bound: per-node alternation counting.

    Independent of the replay path: for every node v, collect the left/right
    region sequence of the accesses falling in v's strict subtree and count
    the switches.
    """
    model = ReferenceModel(n)
    last = [0] * (n + 1)   # last region seen at each node, 0 = none yet
    total = 0
    parent = model.parent
    for key in keys:
        if not 1 <= key <= n:
            raise BstLabError("key-out-of-range")
        u = int(parent[key])
        c = key
        while u != 0:
            side = PREF_LEFT if c < u else PREF_RIGHT
            if last[u] != 0 and last[u] != side:
                total += 1
            last[u] = side
            c = u
            u = int(parent[u])
    return total


def opt_lower_bound(keys, n):
    """Lower bound on any BST's total cost: max(m, IB/2 - n)."""
    m = len(keys)
    ib = interleave_bound(keys, n).total
    return max(float(m), ib / 2.0 - n)


def rho(n):
    """Leading-order probability that two random keys share a root-leaf path."""
    if n < 2:
        raise BstLabError("bad-argument", "n must be >= 2")
    return 2.0 * math.log2(n) / n


# descriptive alias
same_path_probability_leading = rho


def exact_common_path_probability(n):
    """Exact probability that one of two random distinct keys is an ancestor
    of the other in P, as a Fraction."""
    if n < 2:
        raise BstLabError("bad-argument", "n must be >= 2")
    model = ReferenceModel(n)
    pairs = int(model.depth[1:].sum())   # each node contributes its ancestor count
    return Fraction(pairs, n * (n - 1) // 2)


def unified_bound(keys, n):
    """Per-access unified bound values log2(min_i (t_ij + |x_i - x_j| + 2)).

    t_ij counts distinct keys accessed strictly between accesses i and j.
    The first access is assigned log2(n + 2) by convention.
    """
    keys = list(keys)
    if not keys:
        raise BstLabError("bad-argument", "empty sequence")
    out = [math.log2(n + 2)]
    for j in range(1, len(keys)):
        xj = keys[j]
        best = None
        seen = set()
        for i in range(j - 1, -1, -1):
            cand = len(seen) + abs(keys[i] - xj) + 2
            if best is None or cand < best:
                best = cand
            seen.add(keys[i])
            if len(seen) + 2 >= best:
                # distinct-count only grows going further back
                break
        out.append(math.log2(best))
    return out
