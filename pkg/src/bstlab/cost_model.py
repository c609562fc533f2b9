"""Unit-cost pointer-machine substrate shared by every tree structure.

Nodes live in an index-addressed arena sized n+1 where the node id equals the
key (keys are 1..n) and slot 0 is the null id.  An access starts by
initializing a cursor at the root (cost 1); each link follow and each single
rotation costs 1; reading or writing fields of the node under the cursor is
free.  All structural mutation funnels through the primitives in this module,
so the meter cannot be bypassed.

The hot paths (whole access sequences) run as numba kernels over the same
arrays; the :class:`Cursor` API wraps the identical primitives for unit tests
and single-step use.
"""

import numpy as np
from numba import njit

from .errors import BstLabError

NULL = 0

# meter slots
INIT = 0
FOLLOW = 1
ROT = 2


def heap_left_size(m):
    """Number of nodes in the left subtree of a heap-shaped tree on m nodes."""
    if m <= 1:
        return 0
    h = m.bit_length() - 1          # floor(lg m)
    full_above = (1 << h) - 1       # nodes in the full levels 0..h-1
    last = m - full_above           # nodes in the bottom level
    half = 1 << (h - 1)
    return (half - 1) + min(last, half)


def complete_tree_arrays(n):
    """Build the complete (heap-shaped, in-order labelled) tree on keys 1..n.

    Returns (left, right, parent, depth, root) as int64 arrays sized n+1.
    Every node has two children, a left child only, or none.
    """
    if n < 1:
        raise BstLabError("empty-tree", "n must be >= 1")
    left = np.zeros(n + 1, np.int64)
    right = np.zeros(n + 1, np.int64)
    parent = np.zeros(n + 1, np.int64)
    depth = np.zeros(n + 1, np.int64)
    root = 0
    stack = [(1, n, 0, 0)]
    while stack:
        lo, hi, par, dep = stack.pop()
        key = lo + heap_left_size(hi - lo + 1)
        depth[key] = dep
        parent[key] = par
        if par:
            if key < par:
                left[par] = key
            else:
                right[par] = key
        else:
            root = key
        if key > lo:
            stack.append((lo, key - 1, key, dep + 1))
        if key < hi:
            stack.append((key + 1, hi, key, dep + 1))
    return left, right, parent, depth, root


@njit(cache=True)
def _ab_fix(left, right, d, a, b, auxr, u):
    # Recompute the min/max locked-depth bounds of u from its children,
    # skipping children that root a different auxiliary tree.  Field writes
    # at the cursor are free.
    lo = d[u]
    hi = d[u]
    c = left[u]
    if c != NULL and auxr[c] == 0:
        if a[c] < lo:
            lo = a[c]
        if b[c] > hi:
            hi = b[c]
    c = right[u]
    if c != NULL and auxr[c] == 0:
        if a[c] < lo:
            lo = a[c]
        if b[c] > hi:
            hi = b[c]
    a[u] = lo
    b[u] = hi


@njit(cache=True)
def _rotate_up(left, right, parent, d, a, b, auxr, use_ab, x, meter):
    # Single rotation lifting x above its parent; cost 1.  The depth-bound
    # augmentation is repaired for the two nodes whose subtrees changed.
    p = parent[x]
    g = parent[p]
    if left[p] == x:
        t = right[x]
        left[p] = t
        right[x] = p
    else:
        t = left[x]
        right[p] = t
        left[x] = p
    if t != NULL:
        parent[t] = p
    parent[p] = x
    parent[x] = g
    if g != NULL:
        if left[g] == p:
            left[g] = x
        else:
            right[g] = x
    meter[ROT] += 1
    if use_ab:
        _ab_fix(left, right, d, a, b, auxr, p)
        _ab_fix(left, right, d, a, b, auxr, x)


class CostMeter:
    """Monotone counters for access initializations, link follows, rotations."""

    def __init__(self):
        self._arr = np.zeros(3, np.int64)

    @property
    def access_inits(self):
        return int(self._arr[INIT])

    @property
    def link_follows(self):
        return int(self._arr[FOLLOW])

    @property
    def rotations(self):
        return int(self._arr[ROT])

    @property
    def total_cost(self):
        return int(self._arr.sum())

    def snapshot(self):
        return int(self._arr.sum())

    @property
    def array(self):
        return self._arr


class Cursor:
    """Single live pointer into a tree; all movement and rotation is metered."""

    def __init__(self, tree, node):
        self.tree = tree
        self.node = node

    def move(self, direction):
        t = self.tree
        if direction == "left":
            nxt = int(t.left[self.node])
        elif direction == "right":
            nxt = int(t.right[self.node])
        elif direction == "parent":
            nxt = int(t.parent[self.node])
        else:
            raise BstLabError("bad-direction", direction)
        if nxt == NULL:
            raise BstLabError("null-link", f"no {direction} link at {self.node}")
        t.meter.array[FOLLOW] += 1
        self.node = nxt
        return self

    def has_link(self, direction):
        # Presence checks are free field reads.
        if direction == "left":
            return int(self.tree.left[self.node]) != NULL
        if direction == "right":
            return int(self.tree.right[self.node]) != NULL
        return int(self.tree.parent[self.node]) != NULL

    @property
    def key(self):
        return self.node

    def rotate_up(self):
        t = self.tree
        if int(t.parent[self.node]) == NULL:
            raise BstLabError("rotate-root", "cannot rotate the tree root")
        _rotate_up(t.left, t.right, t.parent, t.d, t.a, t.b, t.auxr,
                   t.uses_depth_bounds, self.node, t.meter.array)
        if int(t.parent[self.node]) == NULL:
            t.root = self.node
        return self


class MeteredTree:
    """Arena-backed BST over keys 1..n with a cost meter.

    Subclasses fill in their access algorithm; this base provides the locked
    balanced shape, the cursor API, and test-only (unmetered) walkers.
    """

    uses_depth_bounds = False

    def __init__(self, n):
        if n < 1:
            raise BstLabError("empty-tree", "n must be >= 1")
        self.n = n
        self.left, self.right, self.parent, self.d, self.root = \
            complete_tree_arrays(n)
        # Depth-bound and color/aux fields; unused slots stay zeroed for
        # structures that do not maintain them.
        self.a = self.d.copy()
        self.b = self.d.copy()
        self.red = np.zeros(n + 1, np.uint8)
        self.auxr = np.zeros(n + 1, np.uint8)
        self.meter = CostMeter()

    def begin_access(self):
        if self.root == NULL:
            raise BstLabError("empty-tree")
        self.meter.array[INIT] += 1
        return Cursor(self, self.root)

    def _check_key(self, key):
        if not 1 <= key <= self.n:
            raise BstLabError("key-out-of-range", f"{key} not in 1..{self.n}")

    # -- test-only, unmetered ------------------------------------------------

    def inorder_keys(self):
        out = []
        stack = []
        cur = self.root
        while stack or cur != NULL:
            while cur != NULL:
                stack.append(cur)
                cur = int(self.left[cur])
            cur = stack.pop()
            out.append(cur)
            cur = int(self.right[cur])
        return out

    def check_links(self):
        for u in range(1, self.n + 1):
            l, r = int(self.left[u]), int(self.right[u])
            if l != NULL and int(self.parent[l]) != u:
                raise AssertionError(f"left link mismatch at {u}")
            if r != NULL and int(self.parent[r]) != u:
                raise AssertionError(f"right link mismatch at {u}")
        p = int(self.parent[self.root])
        if p != NULL:
            raise AssertionError("root has a parent")

    def check_inorder(self):
        keys = self.inorder_keys()
        if keys != list(range(1, self.n + 1)):
            raise AssertionError("in-order traversal is not 1..n")
