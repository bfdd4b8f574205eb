"""Exact simulation toolkit for a quasiperiodic hard-core boson chain.

Layers, bottom up: `basis` (U(1) sectors over bitmasks), `model` (couplings
and the sector Hamiltonian), `spectral` (eigensolves, IPR phase maps),
`dynamics` (closed-system quenches and participation entropies), `opensys`
(Lindblad dissipation and post-selection), `analysis` (late-time windows,
path sweeps, scaling fits, readout mitigation), `device` (tunable-coupler
arithmetic), and `cli` (batch front end).
"""

__version__ = "0.1.0"

from .basis import (MAX_SITES, SectorBasis, enumerate_sector,
                    occupation_vectors, state_from_string, state_to_string)
from .model import (DEFAULT_LAMBDA, GOLDEN_ALPHA, ModelParams,
                    SectorHamiltonian, build_sector_hamiltonian,
                    build_single_particle, coupling_profile, onsite_profile)
from .spectral import (EigenSystem, PhaseLabel, classify_phase,
                       eigendecompose, ipr, ipr_phase_map)
from .dynamics import (PureState, TimeSeries, default_initial_states,
                       default_time_grid, evolve, occupancy,
                       participation_entropy, quench_occupancy_series,
                       quench_pe_series)
from .opensys import (DensityMatrix, NoiseModel, build_full_hamiltonian,
                      evolve_lindblad, lindblad_rhs, occupancies_from_rho,
                      post_select)
from .analysis import (LateTimeStat, ScalingFit, SweepProtocol, SweepResult,
                       corrupt_readout, late_time_average, mitigate_readout,
                       path_sweep, rescale_pe, scaling_fit, scaling_series,
                       standard_path)
from .device import (CouplerSpec, compensate_crosstalk, coupling_range,
                     effective_coupling, solve_coupler_frequency)
from .seeding import delta_draw, delta_draws

__all__ = [
    "__version__",
    "MAX_SITES", "SectorBasis", "enumerate_sector", "occupation_vectors",
    "state_from_string", "state_to_string",
    "DEFAULT_LAMBDA", "GOLDEN_ALPHA", "ModelParams", "SectorHamiltonian",
    "build_sector_hamiltonian", "build_single_particle", "coupling_profile",
    "onsite_profile",
    "EigenSystem", "PhaseLabel", "classify_phase", "eigendecompose", "ipr",
    "ipr_phase_map",
    "PureState", "TimeSeries", "default_initial_states", "default_time_grid",
    "evolve", "occupancy", "participation_entropy",
    "quench_occupancy_series", "quench_pe_series",
    "DensityMatrix", "NoiseModel", "build_full_hamiltonian",
    "evolve_lindblad", "lindblad_rhs", "occupancies_from_rho", "post_select",
    "LateTimeStat", "ScalingFit", "SweepProtocol", "SweepResult",
    "corrupt_readout", "late_time_average", "mitigate_readout", "path_sweep",
    "rescale_pe", "scaling_fit", "scaling_series", "standard_path",
    "CouplerSpec", "compensate_crosstalk", "coupling_range",
    "effective_coupling", "solve_coupler_frequency",
    "delta_draw", "delta_draws",
]
