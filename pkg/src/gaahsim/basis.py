"""Occupation-number bases for U(1) sectors of a hard-core chain.

States are plain integer bitmasks: site j (1-based) occupies bit j-1, so the
leftmost character of a ket string like "1010101010" is site 1. A sector
collects every bitmask with a fixed popcount M, ordered by ascending integer
value, which coincides with colexicographic order on the occupied positions
and admits an O(M) combinadic rank formula.
"""

from math import comb

import numpy as np

MAX_SITES = 30  # bitmasks stay inside a 32-bit word


class SectorBasis:
    """Ordered basis of the M-excitation sector of an L-site chain.

    Attributes
    ----------
    L : int
        Number of sites.
    M : int
        Number of excitations (set bits).
    states : ndarray of int64
        All C(L, M) bitmasks with popcount M, strictly ascending.
    """

    def __init__(self, L, M):
        if not (0 <= M <= L <= MAX_SITES):
            raise ValueError(
                f"need 0 <= M <= L <= {MAX_SITES}, got L={L}, M={M}")
        self.L = int(L)
        self.M = int(M)
        self.states = _enumerate(self.L, self.M)
        self.dim = len(self.states)

    def rank(self, state):
        """Index of `state` in the ascending order, by combinadic sum."""
        state = int(state)
        if state < 0 or state >= (1 << self.L):
            raise ValueError(f"state {state:#x} outside {self.L}-site chain")
        if _popcount(state) != self.M:
            raise ValueError(
                f"state {state:#x} has popcount {_popcount(state)}, "
                f"sector needs {self.M}")
        r = 0
        k = 0
        s = state
        while s:
            p = (s & -s).bit_length() - 1  # lowest set bit position
            k += 1
            r += comb(p, k)
            s &= s - 1
        return r

    def unrank(self, k):
        """Bitmask at index `k`, the inverse of :meth:`rank`."""
        k = int(k)
        if not 0 <= k < self.dim:
            raise ValueError(f"index {k} outside [0, {self.dim})")
        state = 0
        rem = k
        for i in range(self.M, 0, -1):
            # largest position p with C(p, i) <= rem
            p = i - 1
            while comb(p + 1, i) <= rem:
                p += 1
            rem -= comb(p, i)
            state |= 1 << p
        return state

    def __len__(self):
        return self.dim

    def __repr__(self):
        return f"SectorBasis(L={self.L}, M={self.M}, dim={self.dim})"


def enumerate_sector(L, M):
    """Build the :class:`SectorBasis` for M excitations on L sites."""
    return SectorBasis(L, M)


def _popcount(x):
    return bin(x).count("1")


def _enumerate(L, M):
    if M == 0:
        return np.zeros(1, dtype=np.int64)
    # Gosper's hack walks popcount-M masks in ascending order.
    n = comb(L, M)
    out = np.empty(n, dtype=np.int64)
    v = (1 << M) - 1
    for i in range(n):
        out[i] = v
        u = v & -v
        w = v + u
        v = w | (((v ^ w) >> 2) // u)
    assert out[-1] == ((1 << M) - 1) << (L - M)
    return out


def state_from_string(spec):
    """Parse a ket string like "1010101010" into a bitmask.

    The leftmost character is site 1 (bit 0).
    """
    if not spec or any(c not in "01" for c in spec):
        raise ValueError(f"ket string must be nonempty 0/1, got {spec!r}")
    if len(spec) > MAX_SITES:
        raise ValueError(f"ket string longer than {MAX_SITES} sites")
    state = 0
    for j, c in enumerate(spec):
        if c == "1":
            state |= 1 << j
    return state


def state_to_string(state, L):
    """Inverse of :func:`state_from_string`."""
    state = int(state)
    if state < 0 or state >= (1 << L):
        raise ValueError(f"state {state:#x} outside {L}-site chain")
    return "".join("1" if state >> j & 1 else "0" for j in range(L))


def occupation_vectors(basis):
    """(dim, L) float array: entry [i, j] is bit j of basis state i.

    Column j gives the diagonal of the number operator for site j+1.
    """
    shifts = np.arange(basis.L, dtype=np.int64)
    return ((basis.states[:, None] >> shifts[None, :]) & 1).astype(float)
