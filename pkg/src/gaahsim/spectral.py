"""Eigenanalysis, inverse participation ratio, and phase classification.

The single-particle phase map diagonalizes the L x L tridiagonal problem for
many seeded phase offsets and averages -ln(IPR) over all eigenstates and
draws. The banded divide-and-conquer driver is used for the map kernel: it
is the fastest all-eigenvector route for these matrices across the phase
diagram. Float64 throughout; in the critical phase the spectrum carries
near-degeneracies whose eigenvectors single precision cannot resolve.
"""

import enum
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eig_banded

from .model import (DEFAULT_LAMBDA, GOLDEN_ALPHA, ModelParams,
                    coupling_profile, onsite_profile)
from .seeding import delta_draws


@dataclass(frozen=True)
class EigenSystem:
    """Ascending eigenvalues and orthonormal eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray


class PhaseLabel(enum.Enum):
    EXTENDED = "Extended"
    CRITICAL = "Critical"
    LOCALIZED = "Localized"


def eigendecompose(H, dense_threshold=4096):
    """Full symmetric eigendecomposition of a sector or matrix operand.

    Accepts a SectorHamiltonian, a dense array, or a scipy sparse matrix.
    Refuses dimensions above `dense_threshold`; time evolution at those
    sizes should go through the Krylov propagator in the dynamics module.
    """
    A = getattr(H, "matrix", H)
    if hasattr(A, "toarray"):
        dim = A.shape[0]
        if dim > dense_threshold:
            raise ValueError(
                f"dimension {dim} exceeds dense_threshold={dense_threshold}; "
                "use the Krylov evolve path instead of full eigenanalysis")
        A = A.toarray()
    else:
        A = np.asarray(A)
        dim = A.shape[0]
        if dim > dense_threshold:
            raise ValueError(
                f"dimension {dim} exceeds dense_threshold={dense_threshold}; "
                "use the Krylov evolve path instead of full eigenanalysis")
    values, vectors = np.linalg.eigh(A)
    return EigenSystem(values=values, vectors=vectors)


def ipr(psi):
    """Inverse participation ratio sum_i |psi_i|^4 of a normalized state."""
    psi = np.asarray(psi)
    p = psi.real**2 + psi.imag**2 if np.iscomplexobj(psi) else psi**2
    norm = p.sum()
    if abs(norm - 1.0) > 1e-10:
        raise ValueError(f"state norm^2 = {norm!r}, expected 1 within 1e-10")
    return float((p**2).sum())


def classify_phase(mu, V):
    """Analytic phase label from the modulation amplitudes alone.

    Extended iff V < 2 and mu < 1; Localized iff V > 2*max(1, mu); all
    remaining points, including every boundary equality, are Critical.
    """
    if mu < 0 or V < 0:
        raise ValueError("mu and V must be nonnegative")
    if V < 2.0 and mu < 1.0:
        return PhaseLabel.EXTENDED
    if V > 2.0 * max(1.0, mu):
        return PhaseLabel.LOCALIZED
    return PhaseLabel.CRITICAL


def _tridiag_neg_ln_ipr(L, mu, V, delta, lam, alpha):
    """Per-eigenstate -ln(IPR) of one single-particle realization."""
    p = ModelParams(L=L, mu=mu, V=V, delta=delta, lam=lam, alpha=alpha)
    band = np.zeros((2, L))
    band[0] = onsite_profile(p)
    band[1, :L - 1] = coupling_profile(p)
    _, U = eig_banded(band, lower=True, check_finite=False)
    U *= U  # quartic sum via squared probabilities; ** 4 is far slower
    return -np.log(np.einsum("ij,ij->j", U, U))


def _phase_point(args):
    (idx, mu, V, L, n_delta, seed, lam, alpha, statistic) = args
    deltas = delta_draws(seed, idx, n_delta)
    per_draw = np.empty(n_delta)
    for k, d in enumerate(deltas):
        vals = _tridiag_neg_ln_ipr(L, mu, V, d, lam, alpha)
        if statistic == "neg_ln_mean":
            per_draw[k] = -np.log(np.exp(-vals).mean())
        else:
            per_draw[k] = vals.mean()
    mean = float(per_draw.mean())
    stderr = float(per_draw.std(ddof=1) / np.sqrt(n_delta)) if n_delta > 1 else 0.0
    return idx, mean, stderr


def ipr_phase_map(grid, L, n_delta, seed, lam=None, alpha=None,
                  workers=None, statistic="mean_neg_ln"):
    """Mean -ln(IPR) over eigenstates and seeded phase draws per grid point.

    Parameters
    ----------
    grid : sequence of (mu, V)
    L : chain length
    n_delta : draws per point
    seed : master seed; point index and draw index key the streams, so the
        result is independent of `workers`.
    statistic : "mean_neg_ln" averages -ln(IPR) over eigenstates (default);
        "neg_ln_mean" takes -ln of the eigenstate-averaged IPR instead.

    Returns a list of (mu, V, mean, stderr) in grid order.
    """
    if L < 2:
        raise ValueError("phase map needs L >= 2")
    if n_delta < 1:
        raise ValueError("need at least one delta draw")
    if statistic not in ("mean_neg_ln", "neg_ln_mean"):
        raise ValueError(f"unknown statistic {statistic!r}")
    lam = DEFAULT_LAMBDA if lam is None else lam
    alpha = GOLDEN_ALPHA if alpha is None else alpha
    tasks = [(i, float(mu), float(V), L, int(n_delta), int(seed), lam, alpha,
              statistic) for i, (mu, V) in enumerate(grid)]
    out = [None] * len(tasks)
    if workers is not None and workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for idx, mean, stderr in pool.map(_phase_point, tasks,
                                              chunksize=4):
                out[idx] = (mean, stderr)
    else:
        for t in tasks:
            idx, mean, stderr = _phase_point(t)
            out[idx] = (mean, stderr)
    return [(float(mu), float(V), out[i][0], out[i][1])
            for i, (mu, V) in enumerate(grid)]
