"""Deterministic, scheduling-independent random draws.

Every (point, draw) pair owns its own SeedSequence spawned from the master
seed, so a sweep distributed over any number of workers, in any order,
produces exactly the same phase offsets. Nothing here keeps mutable state.
"""

import numpy as np


def delta_draw(master_seed, point_index, draw_index):
    """One uniform phase in [-pi, pi) for the given (point, draw) slot."""
    ss = np.random.SeedSequence(
        entropy=int(master_seed),
        spawn_key=(int(point_index), int(draw_index)))
    rng = np.random.default_rng(ss)
    return float(rng.uniform(-np.pi, np.pi))


def delta_draws(master_seed, point_index, n):
    """The first n phase draws for one sweep point, as an array."""
    return np.array(
        [delta_draw(master_seed, point_index, k) for k in range(int(n))])
