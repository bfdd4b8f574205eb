"""Lindblad master equation with per-qubit relaxation and dephasing.

The density matrix lives in the full 2^L space because relaxation leaves the
U(1) sector; half-filled post-selection is applied to measured probabilities
afterwards, the same way the hardware data are processed. Collapse operators
never materialize as matrices: dephasing and the anticommutator halves of
relaxation act elementwise through a precomputed rate matrix, and the
relaxation gain term is a strided gather per qubit.

Rates implied by the collapse operators K_deph = (1 - 2 n)/sqrt(2 T2) and
K_relax = a/sqrt(T1): populations decay at 1/T1, and a coherence between
states differing on a qubit decays at 1/T2 from dephasing plus half the
population rates of both states.
"""

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
import scipy.sparse as sp
from scipy.integrate import solve_ivp

from .basis import SectorBasis
from .model import ModelParams, coupling_profile, onsite_profile

DEFAULT_T1_NS = 22300.0
DEFAULT_T2_NS = 4000.0

# Measured per-qubit constants of the reference 10-qubit device.
REFERENCE_T1_NS = np.array([14300.0, 14800.0, 33000.0, 17900.0, 30700.0,
                            28100.0, 26300.0, 21500.0, 24400.0, 32900.0])
REFERENCE_T2_NS = np.array([900.0, 1100.0, 1100.0, 1200.0, 1200.0,
                            1100.0, 1200.0, 1600.0, 1200.0, 1300.0])


@dataclass(frozen=True)
class NoiseModel:
    """Per-qubit T1/T2 times in ns; scalars broadcast over the chain."""

    T1: Union[float, np.ndarray] = DEFAULT_T1_NS
    T2: Union[float, np.ndarray] = DEFAULT_T2_NS

    def t1_array(self, L):
        return self._broadcast(self.T1, L, "T1")

    def t2_array(self, L):
        return self._broadcast(self.T2, L, "T2")

    @staticmethod
    def _broadcast(val, L, name):
        arr = np.atleast_1d(np.asarray(val, dtype=float))
        if arr.ndim != 1 or len(arr) not in (1, L):
            raise ValueError(f"{name} must be scalar or length {L}")
        if np.any(arr <= 0):
            raise ValueError(f"{name} entries must be positive")
        return np.full(L, arr[0]) if len(arr) == 1 else arr.copy()


@dataclass
class DensityMatrix:
    """Dense Hermitian density matrix over the full 2^L space."""

    entries: np.ndarray

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=complex)
        n = self.entries.shape[0]
        if self.entries.shape != (n, n) or n & (n - 1):
            raise ValueError("density matrix must be square with 2^L rows")

    @property
    def dim(self):
        return self.entries.shape[0]

    @property
    def n_sites(self):
        return self.dim.bit_length() - 1

    @classmethod
    def from_pure(cls, amps):
        amps = np.asarray(amps, dtype=complex)
        return cls(np.outer(amps, amps.conj()))

    def validate(self, herm_tol=1e-9, trace_tol=1e-7, positivity_tol=1e-7):
        H_err = np.abs(self.entries - self.entries.conj().T).max()
        if H_err > herm_tol:
            raise ValueError(f"hermiticity violated by {H_err:.2e}")
        tr = self.entries.trace().real
        if abs(tr - 1.0) > trace_tol:
            raise ValueError(f"trace drifted to {tr!r}")
        w = np.linalg.eigvalsh(self.entries)
        if w.min() < -positivity_tol:
            raise ValueError(f"negative eigenvalue {w.min():.2e}")
        return self


def build_full_hamiltonian(p):
    """Sparse Hamiltonian over all 2^L occupation states."""
    L = p.L
    if L > 14:
        raise ValueError(f"full-space Hamiltonian capped at L=14, got {L}")
    dim = 1 << L
    J = coupling_profile(p)
    h = onsite_profile(p)
    states = np.arange(dim, dtype=np.int64)
    bits = ((states[:, None] >> np.arange(L)[None, :]) & 1).astype(float)
    rows = [states]
    cols = [states]
    vals = [bits @ h]
    for j in range(L - 1):
        pair = (1 << j) | (1 << (j + 1))
        sel = np.nonzero(bits[:, j] != bits[:, j + 1])[0]
        partner = states[sel] ^ pair
        rows.append(sel)
        cols.append(partner)
        vals.append(np.full(len(sel), J[j]))
    coo = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dim, dim))
    return coo.tocsr()


class LindbladOperator:
    """Precomputed right-hand side of the master equation."""

    def __init__(self, H_full, noise, L):
        dim = H_full.shape[0]
        if dim != 1 << L:
            raise ValueError(
                f"Hamiltonian dimension {dim} does not match L={L}")
        self.L = L
        self.dim = dim
        self.H = H_full.tocsr()
        t1 = noise.t1_array(L)
        t2 = noise.t2_array(L)
        states = np.arange(dim, dtype=np.int64)
        bits = ((states[:, None] >> np.arange(L)[None, :]) & 1)
        # Elementwise decay rate: dephasing counts differing qubits, the
        # relaxation anticommutator adds half the population rates of both
        # row and column states.
        gamma = np.zeros((dim, dim))
        for n in range(L):
            bn = bits[:, n].astype(float)
            differ = np.not_equal.outer(bits[:, n], bits[:, n]).astype(float)
            gamma -= differ / t2[n]
            gamma -= (bn[:, None] + bn[None, :]) / (2.0 * t1[n])
        self.gamma = gamma
        # Gain gathers: indices of states with qubit n excited / relaxed.
        self.gain = []
        for n in range(L):
            hot = states[(states >> n) & 1 == 1]
            cold = hot ^ (1 << n)
            self.gain.append((cold, hot, 1.0 / t1[n]))

    def rhs(self, rho):
        Hr = self.H @ rho
        out = -1j * (Hr - Hr.conj().T)  # H real symmetric
        out += self.gamma * rho
        for cold, hot, rate in self.gain:
            out[np.ix_(cold, cold)] += rate * rho[np.ix_(hot, hot)]
        return out


def lindblad_rhs(rho, H_full, noise):
    """One evaluation of drho/dt; convenience wrapper over the operator."""
    entries = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho)
    L = entries.shape[0].bit_length() - 1
    op = LindbladOperator(H_full, noise, L)
    return op.rhs(entries)


def evolve_lindblad(rho0, H_full, noise, times, tol=1e-8):
    """Integrate the master equation, returning one DensityMatrix per time.

    Uses an adaptive embedded Runge-Kutta (DOP853) with relative local
    error `tol`. Trace and Hermiticity drift budgets are enforced on every
    output state.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or len(times) == 0 or np.any(np.diff(times) < 0):
        raise ValueError("times must be a sorted nonempty sequence")
    entries = rho0.entries if isinstance(rho0, DensityMatrix) else \
        np.asarray(rho0, dtype=complex)
    dim = entries.shape[0]
    L = dim.bit_length() - 1
    op = LindbladOperator(H_full, noise, L)

    def fun(_t, y):
        return op.rhs(y.reshape(dim, dim)).ravel()

    t0 = float(times[0])
    if t0 > 0:
        sol = solve_ivp(fun, (0.0, t0), entries.ravel().astype(complex),
                        method="DOP853", rtol=tol, atol=tol / dim)
        if not sol.success:
            raise RuntimeError(f"integrator failed: {sol.message}")
        y0 = sol.y[:, -1]
    else:
        y0 = entries.ravel().astype(complex)
    if len(times) == 1:
        ys = y0[:, None]
    else:
        sol = solve_ivp(fun, (t0, float(times[-1])), y0, t_eval=times,
                        method="DOP853", rtol=tol, atol=tol / dim)
        if not sol.success:
            raise RuntimeError(f"integrator failed: {sol.message}")
        ys = sol.y
    out = []
    for k in range(len(times)):
        rho = ys[:, k].reshape(dim, dim)
        tr = rho.trace().real
        if abs(tr - 1.0) > 1e-7:
            raise RuntimeError(f"trace drifted to {tr!r} at t={times[k]}")
        herm = np.abs(rho - rho.conj().T).max()
        if herm > 1e-9:
            raise RuntimeError(f"hermiticity drifted to {herm:.2e}")
        out.append(DensityMatrix(rho))
    return out


def post_select(probs, sector):
    """Restrict a full-space distribution to one sector and renormalize.

    probs may be a length-2^L nonnegative vector (e.g. the density-matrix
    diagonal). Returns (sector probabilities, discarded weight).
    """
    if not isinstance(sector, SectorBasis):
        raise TypeError("sector must be a SectorBasis")
    p = np.asarray(probs)
    if np.iscomplexobj(p):
        if np.abs(p.imag).max() > 1e-10:
            raise ValueError("probabilities must be real")
        p = p.real
    if p.ndim != 1 or len(p) != (1 << sector.L):
        raise ValueError(
            f"need a length-2^{sector.L} distribution, got shape {p.shape}")
    if p.min() < -1e-10:
        raise ValueError(f"negative probability {p.min()!r}")
    p = np.clip(p, 0.0, None)
    total = p.sum()
    inside = p[sector.states]
    weight = inside.sum()
    if weight <= 0:
        raise ValueError("all weight lies outside the sector")
    return inside / weight, float(total - weight)


def occupancies_from_rho(rho, L):
    """<n_j> for each site from the density-matrix diagonal."""
    diag = np.clip(np.real(np.diag(
        rho.entries if isinstance(rho, DensityMatrix) else rho)), 0.0, None)
    states = np.arange(1 << L, dtype=np.int64)
    out = np.empty(L)
    for j in range(L):
        out[j] = diag[(states >> j) & 1 == 1].sum()
    return out
