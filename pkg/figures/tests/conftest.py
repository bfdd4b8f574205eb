"""Shared fixture: generate reduced-scale gaahsim outputs once per session.

The simulator is driven strictly through its console script, so these tests
exercise the real file contract end to end. Scales are cut (smaller L,
fewer phase draws, shorter grids) to keep the suite fast; schemas and file
names are exactly those of the full presets.
"""

import json
import shutil
import subprocess

import pytest

GAAHSIM = shutil.which("gaahsim")

REDUCED = {
    "fig1c": {"L": 100, "n_delta": 2, "mu_steps": 9, "V_steps": 9},
    "fig2a": {"n_delta": 3, "t_max": 100.0},
    "fig3a": {"n_delta": 2, "t_max": 100.0},
    "fig4a": {"L": 4, "n_delta": 1},
    "fig4b": {"L": 6, "n_delta": 2},
    "figS5": {"sizes": [4, 6, 8], "n_delta": 2},
}


@pytest.fixture(scope="session")
def results(tmp_path_factory):
    if GAAHSIM is None:
        pytest.skip("gaahsim console script not installed")
    out = tmp_path_factory.mktemp("results")
    for preset, overrides in REDUCED.items():
        cfg = out / f"_{preset}_overrides.json"
        cfg.write_text(json.dumps(overrides))
        proc = subprocess.run(
            [GAAHSIM, "reproduce", preset, "--config", str(cfg),
             "--out", str(out)],
            capture_output=True, text=True)
        assert proc.returncode == 0, f"{preset}: {proc.stderr}"
    return out
