"""Late-time averaging, path sweeps, scaling fits, readout mitigation.

The sweep statistic follows the measurement pipeline: every (initial state,
phase draw) trajectory is reduced to its mean S_q over the late-time window,
and the quoted value and standard error are the mean and standard error of
those trajectory means.
"""

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

import numpy as np

from .dynamics import (DENSE_THRESHOLD, default_initial_states,
                       default_time_grid, quench_pe_series)
from .seeding import delta_draws

DEFAULT_WINDOW = (350.0, 450.0)

# Measured readout fidelities of the reference 10-qubit device.
REFERENCE_F0 = np.array([0.969, 0.947, 0.966, 0.956, 0.956,
                         0.948, 0.968, 0.951, 0.957, 0.954])
REFERENCE_F1 = np.array([0.926, 0.901, 0.926, 0.907, 0.918,
                         0.909, 0.915, 0.895, 0.919, 0.913])


@dataclass(frozen=True)
class LateTimeStat:
    mean: float
    stderr: float
    window: Tuple[float, float]
    n_samples: int  # trajectories x time points inside the window


@dataclass(frozen=True)
class ScalingFit:
    a: float
    b: float
    residual: float


def late_time_average(series, window=DEFAULT_WINDOW):
    """Window statistics of a TimeSeries across trajectory means.

    Every trajectory is averaged over the time points inside [t_start,
    t_end]; the result's mean and stderr are taken across those trajectory
    means. The series must carry per-trajectory curves.
    """
    t0, t1 = float(window[0]), float(window[1])
    if not t0 < t1:
        raise ValueError(f"window must have t_start < t_end, got {window}")
    times = series.times
    if t0 < times[0] or t1 > times[-1]:
        raise ValueError(
            f"window {window} outside series range "
            f"[{times[0]}, {times[-1]}]")
    sel = (times >= t0) & (times <= t1)
    n_inside = int(sel.sum())
    if n_inside < 2:
        raise ValueError(f"window {window} contains {n_inside} time points")
    if series.traj is None:
        raise ValueError(
            "series carries no per-trajectory curves; rerun the quench "
            "with trajectory retention")
    tmeans = series.traj[:, sel].mean(axis=1)
    n = len(tmeans)
    stderr = float(tmeans.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return LateTimeStat(mean=float(tmeans.mean()), stderr=stderr,
                        window=(t0, t1), n_samples=n * n_inside)


def rescale_pe(value, L_from, L_to):
    """Rescale a participation entropy between half-filled chain sizes.

    Multiplies by ln C(L_to, L_to/2) / ln C(L_from, L_from/2) so curves from
    different L share one axis.
    """
    for L in (L_from, L_to):
        if L % 2 or L < 2:
            raise ValueError(f"rescaling needs even L >= 2, got {L}")
    num = math.log(math.comb(L_to, L_to // 2))
    den = math.log(math.comb(L_from, L_from // 2))
    return value * num / den


@dataclass(frozen=True)
class SweepProtocol:
    """Everything a path sweep needs besides the path itself."""

    q: int = 2
    n_delta: int = 10
    seed: int = 0
    window: Tuple[float, float] = DEFAULT_WINDOW
    t_max: float = 500.0
    dt: float = 2.0
    dense_threshold: int = DENSE_THRESHOLD
    workers: Optional[int] = None
    shots: Optional[int] = None


@dataclass(frozen=True)
class SweepPoint:
    path_id: str
    mu: float
    V: float
    q: int
    mean: float
    stderr: float
    window: Tuple[float, float]
    L: int
    n_delta: int
    seed: int


@dataclass
class SweepResult:
    path_id: str
    points: list = field(default_factory=list)

    def rows(self):
        """CSV rows: path_id, mu, V, q, mean, stderr, window_start,
        window_end, L, n_delta, seed."""
        return [(p.path_id, p.mu, p.V, p.q, p.mean, p.stderr, p.window[0],
                 p.window[1], p.L, p.n_delta, p.seed) for p in self.points]

    def argmin_mu(self):
        k = int(np.argmin([p.mean for p in self.points]))
        return self.points[k].mu


def standard_path(path_id):
    """The three reference cuts through the (mu, V) plane."""
    if path_id == "I":
        return [(0.5, v) for v in np.arange(1.0, 4.0 + 1e-9, 0.25)]
    if path_id == "II":
        return [(m, 1.0) for m in np.arange(0.5, 2.0 + 1e-9, 0.25)]
    if path_id == "III":
        return [(m, 3.0) for m in np.arange(0.5, 2.0 + 1e-9, 0.25)]
    raise ValueError(f"unknown path {path_id!r}; available: I, II, III")


def path_sweep(path, params, protocol=SweepProtocol(), path_id="custom"):
    """Late-time S_q along a list of (mu, V) points.

    Each point runs the default 2M initial states over n_delta seeded phase
    draws; draws are keyed by point index, so results do not depend on
    worker scheduling.
    """
    if not path:
        raise ValueError("path must contain at least one (mu, V) point")
    times = default_time_grid(protocol.t_max, protocol.dt)
    states = default_initial_states(params.L)
    result = SweepResult(path_id=path_id)
    for idx, (mu, V) in enumerate(path):
        p = replace(params, mu=float(mu), V=float(V))
        deltas = delta_draws(protocol.seed, idx, protocol.n_delta)
        series = quench_pe_series(
            p, states, deltas, times, q=protocol.q,
            dense_threshold=protocol.dense_threshold,
            shots=protocol.shots, shots_seed=protocol.seed,
            workers=protocol.workers)
        stat = late_time_average(series, protocol.window)
        result.points.append(SweepPoint(
            path_id=path_id, mu=float(mu), V=float(V), q=protocol.q,
            mean=stat.mean, stderr=stat.stderr, window=stat.window,
            L=params.L, n_delta=protocol.n_delta, seed=protocol.seed))
    return result


def scaling_fit(points):
    """Least-squares line through (ln N, S_q) pairs.

    Returns slope a (the fractal-dimension estimate), intercept b, and the
    RMS residual of the fit.
    """
    pts = [(float(x), float(y)) for x, y in points]
    if len(pts) < 3:
        raise ValueError(f"need at least 3 points, got {len(pts)}")
    x = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    if np.ptp(x) < 1e-12:
        raise ValueError("degenerate abscissas: all ln N equal")
    a, b = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((a * x + b - y)**2)))
    return ScalingFit(a=float(a), b=float(b), residual=resid)


def scaling_series(mu, V, sizes, params_template, protocol=SweepProtocol()):
    """Window-averaged S_q versus sector size over several chain lengths.

    Returns (lnN array, Sbar array, stderr array, ScalingFit).
    """
    lnN, Sbar, errs = [], [], []
    times = default_time_grid(protocol.t_max, protocol.dt)
    for idx, L in enumerate(sizes):
        if L % 2:
            raise ValueError(f"sizes must be even, got {L}")
        p = replace(params_template, L=int(L), mu=float(mu), V=float(V))
        deltas = delta_draws(protocol.seed, idx, protocol.n_delta)
        series = quench_pe_series(
            p, default_initial_states(L), deltas, times, q=protocol.q,
            dense_threshold=protocol.dense_threshold,
            workers=protocol.workers)
        stat = late_time_average(series, protocol.window)
        lnN.append(math.log(math.comb(L, L // 2)))
        Sbar.append(stat.mean)
        errs.append(stat.stderr)
    fit = scaling_fit(list(zip(lnN, Sbar)))
    return np.array(lnN), np.array(Sbar), np.array(errs), fit


def _confusion(F0, F1):
    if F0 + F1 <= 1.0:
        raise ValueError(
            f"confusion matrix with F0={F0}, F1={F1} is singular")
    return np.array([[F0, 1.0 - F1], [1.0 - F0, F1]])


def corrupt_readout(probs, fidelities):
    """Forward-apply per-qubit confusion matrices (the mitigation inverse)."""
    return _apply_confusion(probs, fidelities, invert=False)


def mitigate_readout(probs, fidelities):
    """Invert per-qubit readout confusion on a distribution.

    probs: joint distribution of length 2^L (bit j of the index is qubit
    j+1), or a (L, 2) array of per-qubit marginals, or a single qubit's
    (P0, P1) pair. fidelities: (L, 2) array of (F0, F1) rows, or one pair.
    Negative corrected entries are clipped and the distribution is
    renormalized. Returns (corrected, clipped_mass).
    """
    corrected = _apply_confusion(probs, fidelities, invert=True)
    neg = np.clip(corrected, None, 0.0)
    clipped = float(-neg.sum())
    corrected = np.clip(corrected, 0.0, None)
    total = corrected.sum(axis=-1, keepdims=corrected.ndim > 1)
    if np.any(np.asarray(total) <= 0):
        raise ValueError("mitigation removed all probability mass")
    return corrected / (total if corrected.ndim > 1 else corrected.sum()), \
        clipped


def _apply_confusion(probs, fidelities, invert):
    p = np.asarray(probs, dtype=float)
    fid = np.asarray(fidelities, dtype=float)
    if fid.ndim == 1:
        fid = fid[None, :]
    mats = [_confusion(f0, f1) for f0, f1 in fid]
    if invert:
        mats = [np.linalg.inv(C) for C in mats]
    if p.ndim == 2:
        if p.shape != (len(mats), 2):
            raise ValueError(
                f"per-qubit input must be shape ({len(mats)}, 2), "
                f"got {p.shape}")
        return np.stack([mats[i] @ p[i] for i in range(len(mats))])
    if p.ndim == 1 and len(p) == 2 and len(mats) == 1:
        return mats[0] @ p
    L = len(mats)
    if p.ndim != 1 or len(p) != (1 << L):
        raise ValueError(
            f"joint input must have length 2^{L}, got shape {p.shape}")
    # tensor reshape puts the most significant bit (site L) on axis 0
    tens = p.reshape((2,) * L)
    for q in range(L):
        axis = L - 1 - q  # qubit q+1 owns bit q of the flat index
        tens = np.moveaxis(
            np.tensordot(mats[q], tens, axes=([1], [axis])), 0, axis)
    return tens.reshape(-1)
