"""Quasi-periodic chain profiles and Hamiltonian assembly.

The chain couples L sites with hoppings J[j] between sites j, j+1 and on-site
potentials h[j], both modulated by a cosine at irrational frequency alpha:

    J_j = lam * (1 + mu * cos(2*pi*(j + 1/2)*alpha + delta)),  j = 1..L-1
    h_j = lam * V * cos(2*pi*j*alpha + delta),                 j = 1..L

Units: hbar = 1, energies are angular frequencies in rad/ns, time in ns.
The default lam = 2*pi*0.004 rad/ns corresponds to lam/2pi = 4 MHz.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .basis import occupation_vectors

GOLDEN_ALPHA = (math.sqrt(5.0) - 1.0) / 2.0
DEFAULT_LAMBDA = 2.0 * math.pi * 0.004  # rad/ns


def _wrap_phase(delta):
    """Reduce a phase to [-pi, pi)."""
    r = math.remainder(delta, 2.0 * math.pi)
    if r >= math.pi:  # IEEE remainder can land on +pi exactly
        r -= 2.0 * math.pi
    return r


@dataclass(frozen=True)
class ModelParams:
    """Parameters of the quasi-periodic chain.

    delta is canonicalized into [-pi, pi) so that physically identical
    phases compare equal.
    """

    L: int
    mu: float
    V: float
    delta: float = 0.0
    lam: float = DEFAULT_LAMBDA
    alpha: float = GOLDEN_ALPHA

    def __post_init__(self):
        if self.L < 1:
            raise ValueError(f"L must be >= 1, got {self.L}")
        if self.lam <= 0:
            raise ValueError(f"lam must be > 0, got {self.lam}")
        if self.mu < 0:
            raise ValueError(f"mu must be >= 0, got {self.mu}")
        if self.V < 0:
            raise ValueError(f"V must be >= 0, got {self.V}")
        if not np.isfinite(self.delta):
            raise ValueError(f"delta must be finite, got {self.delta}")
        object.__setattr__(self, "delta", _wrap_phase(self.delta))


def coupling_profile(p):
    """Hopping strengths J_1..J_{L-1} in rad/ns."""
    j = np.arange(1, p.L, dtype=float)
    return p.lam * (1.0 + p.mu * np.cos(
        2.0 * np.pi * (j + 0.5) * p.alpha + p.delta))


def onsite_profile(p):
    """On-site potentials h_1..h_L in rad/ns."""
    j = np.arange(1, p.L + 1, dtype=float)
    return p.lam * p.V * np.cos(2.0 * np.pi * j * p.alpha + p.delta)


def build_single_particle(p):
    """Dense symmetric tridiagonal L x L matrix of the one-excitation problem."""
    H = np.diag(onsite_profile(p))
    J = coupling_profile(p)
    idx = np.arange(p.L - 1)
    H[idx, idx + 1] = J
    H[idx + 1, idx] = J
    return H


class SectorHamiltonian:
    """Sparse symmetric Hamiltonian over one U(1) sector.

    The operator is real in the occupation basis; it is stored as float64
    CSR with both triangles present, so matrix action needs no conjugation.
    """

    def __init__(self, basis, matrix, params):
        self.basis = basis
        self.matrix = matrix
        self.params = params
        self.dim = basis.dim

    def toarray(self):
        return self.matrix.toarray()

    def apply(self, psi):
        return self.matrix @ psi

    def gershgorin_bound(self):
        """Upper bound on the sector spectral radius.

        A diagonal entry sums h_j over the M occupied sites; a row has at
        most one hop per bond. Bounding both by their worst case gives
        (sum of the M largest |h_j|) + sum_j |J_j|.
        """
        h = np.sort(np.abs(onsite_profile(self.params)))[::-1]
        J = coupling_profile(self.params)
        return float(h[:self.basis.M].sum() + np.abs(J).sum())

    def __repr__(self):
        return (f"SectorHamiltonian(L={self.basis.L}, M={self.basis.M}, "
                f"dim={self.dim}, nnz={self.matrix.nnz})")


def build_sector_hamiltonian(p, basis):
    """Assemble the hard-core Hamiltonian restricted to `basis`.

    Diagonal entries are sums of h_j over occupied sites; each bond j with
    exactly one excitation on the pair (j, j+1) hops it with amplitude J_j.
    Both triangles come from the same selection, so the matrix is symmetric
    by construction.
    """
    if basis.L != p.L:
        raise ValueError(f"basis is for L={basis.L}, params say L={p.L}")
    J = coupling_profile(p)
    h = onsite_profile(p)
    states = basis.states
    dim = basis.dim
    bits = occupation_vectors(basis)
    diag = bits @ h

    rows = [np.arange(dim, dtype=np.int64)]
    cols = [np.arange(dim, dtype=np.int64)]
    vals = [diag]
    for j in range(p.L - 1):
        pair = (1 << j) | (1 << (j + 1))
        # exactly one of the two sites occupied: states differing on the bond
        sel = np.nonzero(bits[:, j] != bits[:, j + 1])[0]
        if len(sel) == 0:
            continue
        partner = states[sel] ^ pair
        target = np.searchsorted(states, partner)
        rows.append(sel)
        cols.append(target)
        vals.append(np.full(len(sel), J[j]))
    coo = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dim, dim))
    csr = coo.tocsr()
    csr.sum_duplicates()
    return SectorHamiltonian(basis, csr, p)
