"""Classic bottom-up splay tree over the metered substrate.

Search walks down with metered follows; the accessed node is then splayed to
the root with zig / zig-zig / zig-zag steps, each single rotation costing one
unit (a double step costs 2).
"""

import numpy as np
from numba import njit

from .cost_model import FOLLOW, INIT, NULL, MeteredTree, _rotate_up
from .errors import BstLabError


@njit(cache=True)
def _splay_to(left, right, parent, d, a, b, auxr, meter, x, stop_parent):
    # Splay x upward until its parent is stop_parent.
    while parent[x] != stop_parent:
        p = parent[x]
        g = parent[p]
        if g == stop_parent:
            _rotate_up(left, right, parent, d, a, b, auxr, False, x, meter)
        elif (left[g] == p) == (left[p] == x):
            _rotate_up(left, right, parent, d, a, b, auxr, False, p, meter)
            _rotate_up(left, right, parent, d, a, b, auxr, False, x, meter)
        else:
            _rotate_up(left, right, parent, d, a, b, auxr, False, x, meter)
            _rotate_up(left, right, parent, d, a, b, auxr, False, x, meter)
    return x


@njit(cache=True)
def _splay_access(left, right, parent, d, a, b, auxr, meter, root, key):
    meter[INIT] += 1
    cur = root
    while cur != key:
        if key < cur:
            cur = left[cur]
        else:
            cur = right[cur]
        meter[FOLLOW] += 1
    return _splay_to(left, right, parent, d, a, b, auxr, meter, cur, NULL)


@njit(cache=True)
def _splay_run(left, right, parent, d, a, b, auxr, meter, root, keys, costs):
    for i in range(keys.shape[0]):
        before = meter[0] + meter[1] + meter[2]
        root = _splay_access(left, right, parent, d, a, b, auxr, meter,
                             root, keys[i])
        costs[i] = meter[0] + meter[1] + meter[2] - before
    return root


class SplayTree(MeteredTree):
    """Splay tree locked in the balanced complete shape on keys 1..n."""

    def access(self, key):
        """Access a key; returns the unit cost of this access."""
        self._check_key(key)
        before = self.meter.snapshot()
        self.root = int(_splay_access(self.left, self.right, self.parent,
                                      self.d, self.a, self.b, self.auxr,
                                      self.meter.array, self.root, key))
        return self.meter.snapshot() - before

    def run(self, keys):
        """Access every key in sequence; returns per-access unit costs."""
        keys = np.ascontiguousarray(keys, np.int64)
        if keys.size and (keys.min() < 1 or keys.max() > self.n):
            raise BstLabError("key-out-of-range")
        costs = np.empty(keys.shape[0], np.int64)
        self.root = int(_splay_run(self.left, self.right, self.parent,
                                   self.d, self.a, self.b, self.auxr,
                                   self.meter.array, self.root, keys, costs))
        return costs

    def check_invariants(self):
        self.check_links()
        self.check_inorder()


def build_splay(n):
    """Locked splay tree: balanced complete shape, zeroed meter."""
    return SplayTree(n)
