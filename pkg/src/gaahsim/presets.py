"""Named reproduction presets.

Each preset expands to a list of jobs; a job is one experiment run writing
one output file. Presets use closed-system propagation at the experimental
size L=10 (dissipative runs stay behind the `lindblad` subcommand, since a
full density-matrix sweep at L=10 is not a desk-scale computation).
"""

NEEL = "1010101010"
SINGLE = "1000000000"

_QUENCH_POINTS = {
    "a": (0.5, 0.5, SINGLE),
    "b": (2.0, 0.5, SINGLE),
    "c": (0.5, 4.0, SINGLE),
    "d": (0.5, 0.5, NEEL),
    "e": (2.0, 0.5, NEEL),
    "f": (0.5, 4.0, NEEL),
}

_PE_POINTS = {
    "extended": (0.5, 1.0),
    "critical": (2.0, 1.0),
    "localized": (0.5, 4.0),
}

_SCALING_POINTS = {
    "extended": (0.5, 1.0),
    "critical": (2.0, 1.0),
    "localized": (1.0, 3.0),
}


def _grid(start, stop, step):
    n = round((stop - start) / step)
    return [round(start + k * step, 10) for k in range(n + 1)]


def _job(filename, experiment, **config):
    return {"file": filename, "experiment": experiment, "config": config}


def _build_presets():
    p = {}
    p["fig1c"] = [_job(
        "fig1c_phase_map.csv", "phase-map",
        L=1000, n_delta=100,
        mu_min=0.0, mu_max=2.0, mu_steps=81,
        V_min=0.0, V_max=4.0, V_steps=41)]
    for key, (mu, V, init) in _QUENCH_POINTS.items():
        p[f"fig2{key}"] = [_job(
            f"fig2{key}_occupancy.csv", "quench",
            L=10, mu=mu, V=V, initial_state=init,
            n_delta=50, t_max=500.0, dt=2.0)]
    p["fig3a"] = [
        _job(f"fig3a_{name}.csv", "pe-series",
             L=10, mu=mu, V=V, q=2, n_delta=50, t_max=500.0, dt=2.0)
        for name, (mu, V) in _PE_POINTS.items()]
    p["fig3b"] = [
        _job(f"fig3b_V{V:g}.csv", "pe-series",
             L=10, mu=0.5, V=V, q=2, n_delta=50, t_max=500.0, dt=2.0)
        for V in _grid(1.0, 4.0, 0.25)]
    p["fig3c"] = [
        _job(f"fig3c_mu{mu:g}.csv", "pe-series",
             L=10, mu=mu, V=1.0, q=2, n_delta=50, t_max=500.0, dt=2.0)
        for mu in _grid(0.5, 2.0, 0.25)]
    p["fig4a"] = [_job(
        "fig4a_plane.csv", "path-sweep",
        path="plane", L=10, q=2, n_delta=10,
        window_start=350.0, window_end=450.0, t_max=500.0, dt=2.0)]
    for key, path in (("b", "I"), ("c", "II"), ("d", "III")):
        p[f"fig4{key}"] = [_job(
            f"fig4{key}_path{path}.csv", "path-sweep",
            path=path, L=10, q=2, n_delta=10,
            window_start=350.0, window_end=450.0, t_max=500.0, dt=2.0)]
    p["figS5"] = [
        _job(f"figS5_{name}.json", "scaling-fit",
             mu=mu, V=V, q=2, sizes=[8, 10, 12, 14], n_delta=10,
             window_start=350.0, window_end=450.0, t_max=500.0, dt=2.0)
        for name, (mu, V) in _SCALING_POINTS.items()]
    return p


PRESETS = _build_presets()


def preset_jobs(name):
    try:
        return PRESETS[name]
    except KeyError:
        known = ", ".join(sorted(PRESETS))
        raise ValueError(f"unknown preset '{name}'; choose from: {known}")
