import math

import numpy as np
import pytest

from gaahsim.analysis import (SweepPoint, SweepProtocol, SweepResult,
                              corrupt_readout, late_time_average,
                              mitigate_readout, path_sweep, rescale_pe,
                              scaling_fit, scaling_series, standard_path)
from gaahsim.dynamics import TimeSeries, default_time_grid
from gaahsim.model import ModelParams


def make_series(times, traj):
    traj = np.asarray(traj, dtype=float)
    mean = traj.mean(axis=0)
    err = traj.std(axis=0, ddof=1) / math.sqrt(len(traj)) \
        if len(traj) > 1 else np.zeros_like(mean)
    return TimeSeries(times=np.asarray(times, float), observable="S_PE",
                      index=2, mean=mean, stderr=err, n_traj=len(traj),
                      traj=traj)


def test_late_time_average_constant_series():
    times = default_time_grid(500.0, 2.0)
    series = make_series(times, [np.full(len(times), 3.25)])
    stat = late_time_average(series)
    assert stat.mean == pytest.approx(3.25, abs=1e-15)
    assert stat.stderr == 0.0


def test_late_time_average_window_point_count():
    times = default_time_grid(500.0, 2.0)
    series = make_series(times, [np.arange(len(times), dtype=float)])
    stat = late_time_average(series, (350.0, 450.0))
    # 2 ns grid: 51 samples inside [350, 450]
    assert stat.n_samples == 51


def test_late_time_average_across_trajectories():
    times = np.array([0.0, 100.0, 400.0, 450.0])
    traj = np.array([[0, 0, 1.0, 1.0], [0, 0, 3.0, 3.0]])
    stat = late_time_average(make_series(times, traj), (350.0, 450.0))
    assert stat.mean == pytest.approx(2.0)
    assert stat.stderr == pytest.approx(np.std([1.0, 3.0], ddof=1) /
                                        math.sqrt(2))


def test_late_time_average_refinement_stability():
    # band-limited input: halving the grid step changes the mean < 1e-3
    f = lambda t: 2.0 + 0.3 * np.sin(2 * math.pi * t / 100.0)
    coarse = default_time_grid(500.0, 2.0)
    fine = default_time_grid(500.0, 1.0)
    sc = late_time_average(make_series(coarse, [f(coarse)]))
    sf = late_time_average(make_series(fine, [f(fine)]))
    assert abs(sc.mean - sf.mean) < 1e-3


def test_late_time_average_errors():
    times = np.array([0.0, 10.0, 20.0])
    series = make_series(times, [[1.0, 2.0, 3.0]])
    with pytest.raises(ValueError):
        late_time_average(series, (350.0, 450.0))
    with pytest.raises(ValueError):
        late_time_average(series, (20.0, 10.0))
    no_traj = TimeSeries(times=times, observable="S_PE", index=2,
                         mean=np.ones(3), stderr=np.zeros(3), n_traj=1)
    with pytest.raises(ValueError):
        late_time_average(no_traj, (0.0, 20.0))


def test_rescale_pe_identity():
    assert rescale_pe(3.3, 10, 10) == pytest.approx(3.3, abs=1e-15)


def test_rescale_pe_known_factors():
    assert rescale_pe(1.0, 14, 10) == pytest.approx(
        math.log(252) / math.log(3432), rel=1e-12)
    assert rescale_pe(1.0, 22, 10) == pytest.approx(
        math.log(252) / math.log(705432), rel=1e-12)


def test_rescale_pe_monotone_in_source_size():
    vals = [rescale_pe(1.0, L, 10) for L in (12, 14, 18, 22)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_rescale_pe_rejects_odd_sizes():
    with pytest.raises(ValueError):
        rescale_pe(1.0, 13, 10)
    with pytest.raises(ValueError):
        rescale_pe(1.0, 14, 9)


def test_standard_paths():
    p1 = standard_path("I")
    assert p1[0] == (0.5, 1.0) and p1[-1] == (0.5, 4.0) and len(p1) == 13
    p2 = standard_path("II")
    assert p2[0] == (0.5, 1.0) and p2[-1] == (2.0, 1.0) and len(p2) == 7
    p3 = standard_path("III")
    assert all(v == 3.0 for _, v in p3)
    with pytest.raises(ValueError):
        standard_path("IV")


def test_path_sweep_small_chain_runs_and_orders():
    protocol = SweepProtocol(q=2, n_delta=3, seed=0, window=(100.0, 200.0),
                             t_max=200.0, dt=10.0)
    params = ModelParams(L=6, mu=0.5, V=1.0)
    res = path_sweep([(0.5, 1.0), (0.5, 4.0)], params, protocol, "I")
    rows = res.rows()
    assert len(rows) == 2
    assert rows[0][0] == "I"
    # extended endpoint has higher late-time entropy than localized
    assert rows[0][4] > rows[1][4]
    assert res.argmin_mu() == 0.5


def test_sweep_result_argmin():
    res = SweepResult(path_id="II")
    for mu, mean in [(0.5, 3.0), (1.0, 2.0), (1.5, 2.5)]:
        res.points.append(SweepPoint(
            path_id="II", mu=mu, V=1.0, q=2, mean=mean, stderr=0.0,
            window=(350.0, 450.0), L=10, n_delta=10, seed=0))
    assert res.argmin_mu() == 1.0


def test_path_sweep_rejects_empty_path():
    with pytest.raises(ValueError):
        path_sweep([], ModelParams(L=6, mu=0.5, V=1.0))


def test_scaling_fit_exact_line():
    pts = [(x, 0.5 * x + 0.1) for x in (1.0, 2.0, 3.0, 4.0)]
    fit = scaling_fit(pts)
    assert fit.a == pytest.approx(0.5, abs=1e-12)
    assert fit.b == pytest.approx(0.1, abs=1e-12)
    assert fit.residual == pytest.approx(0.0, abs=1e-12)


def test_scaling_fit_errors():
    with pytest.raises(ValueError):
        scaling_fit([(1.0, 2.0), (2.0, 3.0)])
    with pytest.raises(ValueError):
        scaling_fit([(1.0, 2.0), (1.0, 3.0), (1.0, 4.0)])


def test_scaling_fit_recovers_slope_under_noise():
    rng = np.random.default_rng(42)
    x = np.linspace(2.0, 9.0, 8)
    misses = 0
    for _ in range(300):
        sigma = 0.05
        y = 0.7 * x + 0.2 + rng.normal(0.0, sigma, size=len(x))
        fit = scaling_fit(list(zip(x, y)))
        # 3-sigma band on the OLS slope
        se = sigma / math.sqrt(((x - x.mean()) ** 2).sum())
        if abs(fit.a - 0.7) > 3 * se:
            misses += 1
    assert misses <= 10  # ~0.3% expected at 3 sigma


def test_scaling_series_extended_slope_small():
    protocol = SweepProtocol(q=2, n_delta=3, seed=0, window=(100.0, 200.0),
                             t_max=200.0, dt=10.0)
    lnN, Sbar, errs, fit = scaling_series(
        0.5, 0.5, [4, 6, 8], ModelParams(L=4, mu=0.5, V=0.5), protocol)
    assert len(lnN) == 3
    assert np.all(np.diff(lnN) > 0)
    # delocalized: entropies grow with sector size at a slope near one
    assert 0.5 < fit.a < 1.1


def test_mitigate_readout_identity_fidelities():
    p = np.array([0.2, 0.8])
    corrected, clipped = mitigate_readout(p, (1.0, 1.0))
    assert np.allclose(corrected, p, atol=1e-14)
    assert clipped == 0.0


def test_mitigate_readout_single_qubit_value():
    corrected, _ = mitigate_readout(np.array([0.5, 0.5]), (0.969, 0.926))
    assert corrected[1] == pytest.approx((0.5 - 0.031) / 0.895, rel=1e-10)


def test_mitigate_readout_singular_confusion():
    with pytest.raises(ValueError):
        mitigate_readout(np.array([0.5, 0.5]), (0.5, 0.5))


def test_mitigate_readout_clips_and_renormalizes():
    # heavily corrupted input that inverts to a negative entry
    corrected, clipped = mitigate_readout(np.array([0.99, 0.01]),
                                          (0.9, 0.9))
    assert clipped > 0.0
    assert corrected.min() >= 0.0
    assert corrected.sum() == pytest.approx(1.0, rel=1e-12)


def test_readout_round_trip_property_thousand_cases():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        L = int(rng.integers(1, 5))
        fid = np.column_stack([rng.uniform(0.85, 0.99, size=L),
                               rng.uniform(0.85, 0.99, size=L)])
        p = rng.dirichlet(np.ones(1 << L) * 2.0)
        raw = corrupt_readout(p, fid)
        corrected, clipped = mitigate_readout(raw, fid)
        assert clipped == pytest.approx(0.0, abs=1e-10)
        assert np.abs(corrected - p).max() < 1e-9
