"""Closed-system quench evolution and participation entropies.

Evolution uses a full eigendecomposition whenever the sector dimension fits
under `dense_threshold` (one symmetric solve per disorder realization,
amortized over initial states and output times) and an adaptive Lanczos
exponential propagator above it. The Lanczos stepper sizes its substeps from
the Gershgorin bound of the Hamiltonian and grows the Krylov dimension until
the standard last-component error estimate clears the per-step tolerance.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .basis import SectorBasis, enumerate_sector, state_from_string
from .model import ModelParams, build_sector_hamiltonian

DENSE_THRESHOLD = 4096
KRYLOV_TOL = 1e-10
KRYLOV_M_START = 20
KRYLOV_M_MAX = 96


@dataclass
class PureState:
    """Complex amplitudes over a sector basis."""

    basis: SectorBasis
    amps: np.ndarray

    def __post_init__(self):
        self.amps = np.asarray(self.amps, dtype=complex)
        if self.amps.shape != (self.basis.dim,):
            raise ValueError(
                f"amplitude vector has shape {self.amps.shape}, "
                f"basis dimension is {self.basis.dim}")

    @classmethod
    def from_mask(cls, basis, mask):
        amps = np.zeros(basis.dim, dtype=complex)
        amps[basis.rank(mask)] = 1.0
        return cls(basis, amps)

    def norm(self):
        return float(np.linalg.norm(self.amps))


@dataclass
class TimeSeries:
    """Trajectory-averaged observable on a common time grid.

    mean/stderr are (T,) for scalar observables and (T, L) for occupancies.
    traj optionally keeps the per-trajectory curves (n_traj, T) so that
    window statistics can be computed across trajectory means afterwards.
    """

    times: np.ndarray
    observable: str
    index: int
    mean: np.ndarray
    stderr: np.ndarray
    n_traj: int
    traj: Optional[np.ndarray] = None

    def rows(self):
        """CSV rows: t_ns, observable, index, mean, stderr, n_traj."""
        out = []
        if self.mean.ndim == 1:
            for k, t in enumerate(self.times):
                out.append((float(t), self.observable, self.index,
                            float(self.mean[k]), float(self.stderr[k]),
                            self.n_traj))
        else:
            for k, t in enumerate(self.times):
                for j in range(self.mean.shape[1]):
                    out.append((float(t), self.observable, j + 1,
                                float(self.mean[k, j]),
                                float(self.stderr[k, j]), self.n_traj))
        return out


def _check_hermitian(H):
    A = H.matrix
    d = abs(A - A.T)
    if d.nnz and d.max() > 1e-12:
        raise ValueError("Hamiltonian is not symmetric")


def evolve(H, psi0, times, dense_threshold=DENSE_THRESHOLD,
           krylov_tol=KRYLOV_TOL):
    """Propagate psi0 through exp(-i H t) for every t in `times`.

    times must be sorted and nonnegative. Returns a list of PureState.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or len(times) == 0:
        raise ValueError("times must be a nonempty 1-d sequence")
    if np.any(np.diff(times) < 0) or times[0] < 0:
        raise ValueError("times must be sorted and nonnegative")
    if abs(psi0.norm() - 1.0) > 1e-9:
        raise ValueError(f"initial state norm {psi0.norm()!r} is not 1")
    _check_hermitian(H)
    dim = H.dim
    if dim <= dense_threshold:
        w, Q = np.linalg.eigh(H.toarray())
        c = Q.conj().T @ psi0.amps
        block = Q @ (np.exp(-1j * np.outer(w, times)) * c[:, None])
        return [PureState(H.basis, block[:, k]) for k in range(len(times))]
    out = []
    psi = psi0.amps.copy()
    t_now = 0.0
    rho = H.gershgorin_bound()
    dt_cap = 10.0 / rho if rho > 0 else math.inf
    for t in times:
        gap = t - t_now
        while gap > 1e-12:
            dt = min(gap, dt_cap)
            psi = _lanczos_expv(H.matrix, psi, dt, krylov_tol)
            t_now += dt
            gap = t - t_now
        out.append(PureState(H.basis, psi.copy()))
    return out


def _lanczos_expv(A, v, dt, tol, m_start=KRYLOV_M_START, m_max=KRYLOV_M_MAX):
    """One step w = exp(-i dt A) v with adaptive Krylov dimension.

    Splits the step in half (recursively) if even m_max Lanczos vectors
    cannot push the error estimate under tol.
    """
    beta0 = np.linalg.norm(v)
    if beta0 == 0:
        return v
    dim = v.shape[0]
    m_cap = min(m_max, dim)
    V = np.empty((m_cap + 1, dim), dtype=complex)
    alpha = np.empty(m_cap)
    beta = np.empty(m_cap + 1)
    V[0] = v / beta0
    beta[0] = 0.0
    j = 0
    check_at = min(m_start, m_cap)
    while True:
        w = A @ V[j]
        if j > 0:
            w = w - beta[j] * V[j - 1]
        a = np.real(np.vdot(V[j], w))
        w = w - a * V[j]
        alpha[j] = a
        b = np.linalg.norm(w)
        beta[j + 1] = b
        j += 1
        happy = b < 1e-14 * max(1.0, abs(a))
        if happy or j == check_at or j == m_cap:
            u = _tridiag_expv_coeffs(alpha[:j], beta[1:j], dt)
            err = abs(b * u[-1] * dt)
            if happy or err <= tol * beta0 or j == m_cap:
                if not happy and err > tol * beta0:
                    # dimension exhausted; halve the step
                    half = _lanczos_expv(A, v, dt / 2, tol, m_start, m_max)
                    return _lanczos_expv(A, half, dt / 2, tol, m_start, m_max)
                return (V[:j].T @ u) * beta0
            check_at = min(j + 8, m_cap)
        if b < 1e-300:
            b = 1.0  # fully converged subspace; vector below is arbitrary
        V[j] = w / b


def _tridiag_expv_coeffs(alpha, offdiag, dt):
    """exp(-i dt T) e_1 for the Lanczos tridiagonal T."""
    if len(alpha) == 1:
        return np.array([np.exp(-1j * dt * alpha[0])])
    w, Z = eigh_tridiagonal(alpha, offdiag)
    return Z @ (np.exp(-1j * dt * w) * Z[0, :].conj())


def occupancy(psi):
    """Site occupation probabilities P_j = <n_j> of a sector state."""
    p = np.abs(psi.amps)**2
    basis = psi.basis
    out = np.empty(basis.L)
    for j in range(basis.L):
        mask = np.asarray((basis.states >> j) & 1, dtype=bool)
        out[j] = p[mask].sum()
    return out


def participation_entropy(p, q):
    """Renyi participation entropy of a probability vector, natural log."""
    p = np.asarray(p, dtype=float)
    if q < 1:
        raise ValueError(f"order q must be >= 1, got {q}")
    if p.min() < -1e-12:
        raise ValueError(f"negative probability {p.min()!r}")
    p = np.clip(p, 0.0, None)
    tot = p.sum()
    if abs(tot - 1.0) > 1e-8:
        raise ValueError(f"probabilities sum to {tot!r}, expected 1")
    if q == 1:
        nz = p[p > 0]
        return float(-(nz * np.log(nz)).sum())
    return float(np.log((p**q).sum()) / (1.0 - q))


def default_initial_states(L, M=None):
    """The 2M staggered product states used for sector quenches.

    State i (1-based, i <= M) is "10" repeated M+1-i times followed by "01"
    repeated i-1 times; states M+1..2M are their global spin flips.
    """
    if L % 2:
        raise ValueError(f"default initial states need even L, got {L}")
    if M is None:
        M = L // 2
    if L != 2 * M:
        raise ValueError(f"default initial states need L = 2M, got {L}, {M}")
    states = []
    for i in range(1, M + 1):
        spec = "10" * (M + 1 - i) + "01" * (i - 1)
        states.append(state_from_string(spec))
    full = (1 << L) - 1
    states += [s ^ full for s in states[:M]]
    return states


def _pe_curves_dense(H, init_ranks, times, q, time_chunk=64):
    """S_q(t) per initial state via one dense eigendecomposition."""
    w, Q = np.linalg.eigh(H.toarray())
    out = np.empty((len(init_ranks), len(times)))
    for lo in range(0, len(times), time_chunk):
        ts = times[lo:lo + time_chunk]
        E = np.exp(-1j * np.outer(w, ts))
        for s, r in enumerate(init_ranks):
            psi = Q @ (Q[r, :][:, None] * E)
            out[s, lo:lo + len(ts)] = _pe_of_probs(
                psi.real**2 + psi.imag**2, q)
    return out


def _pe_of_probs(p, q):
    """S_q for each column of a (dim, T) probability array."""
    if q == 1:
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(p > 0, p * np.log(p), 0.0)
        return -terms.sum(axis=0)
    return np.log((p**q).sum(axis=0)) / (1.0 - q)


def _pe_delta_worker(args):
    (k, params_dict, delta, init_masks, times, q, dense_threshold,
     krylov_tol, shots, shots_seed) = args
    p = ModelParams(**params_dict)
    p = replace(p, delta=delta)
    basis = enumerate_sector(p.L, _common_popcount(init_masks))
    H = build_sector_hamiltonian(p, basis)
    ranks = [basis.rank(m) for m in init_masks]
    if basis.dim <= dense_threshold:
        curves = _pe_curves_dense(H, ranks, times, q)
    else:
        curves = np.empty((len(ranks), len(times)))
        for s, r in enumerate(ranks):
            psi0 = PureState.from_mask(basis, basis.states[r])
            states = evolve(H, psi0, times, dense_threshold, krylov_tol)
            probs = np.stack(
                [st.amps.real**2 + st.amps.imag**2 for st in states], axis=1)
            curves[s] = _pe_of_probs(probs, q)
    if shots:
        curves = _resample_curves(curves, basis, H, ranks, times, q,
                                  dense_threshold, krylov_tol, shots,
                                  shots_seed, k)
    return k, curves


def _common_popcount(masks):
    pops = {bin(int(m)).count("1") for m in masks}
    if len(pops) != 1:
        raise ValueError(f"initial states span several sectors: {sorted(pops)}")
    return pops.pop()


def _resample_curves(curves, basis, H, ranks, times, q, dense_threshold,
                     krylov_tol, shots, shots_seed, delta_index):
    """Replace exact probabilities by multinomial 5000-shot estimates."""
    out = np.empty_like(curves)
    for s, r in enumerate(ranks):
        rng = np.random.default_rng(np.random.SeedSequence(
            entropy=int(shots_seed), spawn_key=(int(delta_index), int(s))))
        psi0 = PureState.from_mask(basis, basis.states[r])
        states = evolve(H, psi0, times, dense_threshold, krylov_tol)
        for t_idx, st in enumerate(states):
            p = st.amps.real**2 + st.amps.imag**2
            p = np.clip(p, 0, None)
            p /= p.sum()
            counts = rng.multinomial(int(shots), p)
            out[s, t_idx] = participation_entropy(counts / float(shots), q)
    return out


def quench_pe_series(params, initial_states, deltas, times, q=2,
                     dense_threshold=DENSE_THRESHOLD, krylov_tol=KRYLOV_TOL,
                     shots=None, shots_seed=0, workers=None):
    """Trajectory-averaged S_q^PE(t) over (initial state, delta) pairs.

    params: ModelParams whose delta field is replaced per draw.
    initial_states: bitmasks, all in one sector.
    Returns a TimeSeries with per-trajectory curves attached (delta-major,
    state-minor order).
    """
    times = np.asarray(times, dtype=float)
    masks = [int(m) for m in initial_states]
    if not masks:
        raise ValueError("need at least one initial state")
    _common_popcount(masks)
    params_dict = dict(L=params.L, mu=params.mu, V=params.V,
                       delta=params.delta, lam=params.lam, alpha=params.alpha)
    tasks = [(k, params_dict, float(d), masks, times, q, dense_threshold,
              krylov_tol, shots, shots_seed) for k, d in enumerate(deltas)]
    blocks = [None] * len(tasks)
    if workers is not None and workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for k, curves in pool.map(_pe_delta_worker, tasks):
                blocks[k] = curves
    else:
        for t in tasks:
            k, curves = _pe_delta_worker(t)
            blocks[k] = curves
    traj = np.concatenate(blocks, axis=0)  # (n_delta * n_states, T)
    n = traj.shape[0]
    mean = traj.mean(axis=0)
    stderr = (traj.std(axis=0, ddof=1) / math.sqrt(n)) if n > 1 else \
        np.zeros_like(mean)
    return TimeSeries(times=times, observable="S_PE", index=int(q),
                      mean=mean, stderr=stderr, n_traj=n, traj=traj)


def _occupancy_delta_worker(args):
    (k, params_dict, delta, mask, times, dense_threshold, krylov_tol) = args
    p = ModelParams(**params_dict)
    p = replace(p, delta=delta)
    M = bin(int(mask)).count("1")
    basis = enumerate_sector(p.L, M)
    H = build_sector_hamiltonian(p, basis)
    psi0 = PureState.from_mask(basis, mask)
    states = evolve(H, psi0, times, dense_threshold, krylov_tol)
    return k, np.stack([occupancy(st) for st in states], axis=0)  # (T, L)


def quench_occupancy_series(params, initial_state, deltas, times,
                            dense_threshold=DENSE_THRESHOLD,
                            krylov_tol=KRYLOV_TOL, workers=None):
    """Mean site occupancies P_j(t) averaged over delta draws."""
    times = np.asarray(times, dtype=float)
    mask = int(initial_state)
    params_dict = dict(L=params.L, mu=params.mu, V=params.V,
                       delta=params.delta, lam=params.lam, alpha=params.alpha)
    tasks = [(k, params_dict, float(d), mask, times, dense_threshold,
              krylov_tol) for k, d in enumerate(deltas)]
    blocks = [None] * len(tasks)
    if workers is not None and workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for k, block in pool.map(_occupancy_delta_worker, tasks):
                blocks[k] = block
    else:
        for t in tasks:
            k, block = _occupancy_delta_worker(t)
            blocks[k] = block
    stack = np.stack(blocks, axis=0)  # (n_delta, T, L)
    n = stack.shape[0]
    mean = stack.mean(axis=0)
    stderr = (stack.std(axis=0, ddof=1) / math.sqrt(n)) if n > 1 else \
        np.zeros_like(mean)
    return TimeSeries(times=times, observable="P", index=0, mean=mean,
                      stderr=stderr, n_traj=n)


def default_time_grid(t_max=500.0, dt=2.0):
    """The standard output grid: 0..t_max inclusive in dt steps."""
    n = int(round(t_max / dt))
    return np.linspace(0.0, n * dt, n + 1)
