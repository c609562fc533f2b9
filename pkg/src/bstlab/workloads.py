"""Deterministic seeded access-sequence generators.

All generators are pure functions of their parameters and a 64-bit seed, and
are bit-exact across platforms: randomness comes from the SplitMix64
recurrence, and the working-set partition uses a Fisher-Yates shuffle driven
by it (j = next() mod (i+1), i = n-1 .. 1).
"""

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import BstLabError

MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class Rng:
    """SplitMix64 generator; 64-bit state, 64-bit outputs."""

    def __init__(self, seed):
        self.state = seed & MASK64

    def next(self):
        self.state = (self.state + _GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * _MIX1) & MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & MASK64
        return z ^ (z >> 31)


@njit(cache=True)
def _sm64_fill_mod(seed, n, out):
    # out[i] = next() mod n + 1, bit-exact with the Rng class.
    state = np.uint64(seed)
    gamma = np.uint64(0x9E3779B97F4A7C15)
    m1 = np.uint64(0xBF58476D1CE4E5B9)
    m2 = np.uint64(0x94D049BB133111EB)
    for i in range(out.shape[0]):
        state = state + gamma
        z = state
        z = (z ^ (z >> np.uint64(30))) * m1
        z = (z ^ (z >> np.uint64(27))) * m2
        z = z ^ (z >> np.uint64(31))
        out[i] = np.int64(z % np.uint64(n)) + 1
    return state


@njit(cache=True)
def _sm64_shuffle(seed, perm):
    # Fisher-Yates with j = next() mod (i+1), i from n-1 down to 1.
    state = np.uint64(seed)
    gamma = np.uint64(0x9E3779B97F4A7C15)
    m1 = np.uint64(0xBF58476D1CE4E5B9)
    m2 = np.uint64(0x94D049BB133111EB)
    for i in range(perm.shape[0] - 1, 0, -1):
        state = state + gamma
        z = state
        z = (z ^ (z >> np.uint64(30))) * m1
        z = (z ^ (z >> np.uint64(27))) * m2
        z = z ^ (z >> np.uint64(31))
        j = np.int64(z % np.uint64(i + 1))
        tmp = perm[i]
        perm[i] = perm[j]
        perm[j] = tmp


@dataclass
class AccessSequence:
    """A generated key sequence plus full provenance."""
    keys: np.ndarray
    n: int
    generator: str
    params: dict
    seed: int = 0

    @property
    def m(self):
        return int(self.keys.shape[0])

    def write(self, path):
        """Newline-delimited text: a header line then one key per line."""
        k = self.params.get("k", 0)
        with open(path, "w") as fh:
            fh.write(f"# gen={self.generator} n={self.n} k={k} "
                     f"seed={self.seed} m={self.m}\n")
            fh.write("\n".join(str(int(x)) for x in self.keys))
            if self.m:
                fh.write("\n")


def read_sequence(path):
    """Parse a sequence file written by AccessSequence.write."""
    with open(path) as fh:
        header = fh.readline().strip()
        if not header.startswith("# gen="):
            raise BstLabError("bad-trace", "missing header line")
        fields = dict(tok.split("=") for tok in header[2:].split())
        keys = np.array([int(line) for line in fh if line.strip()], np.int64)
    return AccessSequence(keys=keys, n=int(fields["n"]), generator=fields["gen"],
                          params={"k": int(fields["k"]), "m": int(fields["m"])},
                          seed=int(fields["seed"]))


def gen_sequential(n, passes=25):
    """1..n repeated `passes` times."""
    if n < 1:
        raise BstLabError("bad-argument", "n must be >= 1")
    keys = np.tile(np.arange(1, n + 1, dtype=np.int64), passes)
    return AccessSequence(keys=keys, n=n, generator="sequential",
                          params={"passes": passes, "m": n * passes})


def gen_random(n, seed, m=None):
    """m uniform keys (default 25n), each next() mod n + 1."""
    if n < 1:
        raise BstLabError("bad-argument", "n must be >= 1")
    if m is None:
        m = 25 * n
    keys = np.empty(m, np.int64)
    _sm64_fill_mod(seed, n, keys)
    return AccessSequence(keys=keys, n=n, generator="random",
                          params={"m": m}, seed=seed)


def gen_working_set(n, k, seed, accesses_per_element=100):
    """Random partition of 1..n into blocks of k keys; for each block in
    turn, round-robin over its keys `accesses_per_element` times.

    When k does not divide n the trailing partial block is dropped (recorded
    in the sequence params).
    """
    if n < 1:
        raise BstLabError("bad-argument", "n must be >= 1")
    if k < 1 or k > n:
        raise BstLabError("bad-argument", f"k={k} not in 1..{n}")
    perm = np.arange(1, n + 1, dtype=np.int64)
    _sm64_shuffle(seed, perm)
    sets = n // k
    used = sets * k
    block = perm[:used].reshape(sets, k)
    keys = np.tile(block, (1, accesses_per_element)).reshape(-1)
    return AccessSequence(keys=keys, n=n, generator="working_set",
                          params={"k": k,
                                  "accesses_per_element": accesses_per_element,
                                  "dropped_keys": n - used,
                                  "m": used * accesses_per_element},
                          seed=seed)


def gen_unified(n, k):
    """Chunked stride sequence exercising combined temporal/key locality.

    Keys 1..n are cut into consecutive chunks of size 2k; chunks are grouped
    into sets of k chunks at uniform stride g = chunk_count // k (set s takes
    chunks s, s+g, s+2g, ...).  Per set, iteration 2i emits the offset-i
    element of each chunk in increasing key order and iteration 2i+1 the
    offset-(k+i) element.  Offsets are 0-based.
    """
    if n < 1:
        raise BstLabError("bad-argument", "n must be >= 1")
    if 2 * k * k > n:
        raise BstLabError("k-too-large", f"need 2*k^2 <= n, got k={k}, n={n}")
    chunk = 2 * k
    chunk_count = n // chunk
    g = chunk_count // k
    out = []
    for s in range(g):
        starts = [1 + (s + t * g) * chunk for t in range(k)]
        for i in range(k):
            for base in starts:
                out.append(base + i)
            for base in starts:
                out.append(base + k + i)
    keys = np.array(out, np.int64)
    return AccessSequence(keys=keys, n=n, generator="unified",
                          params={"k": k, "m": len(out)})
