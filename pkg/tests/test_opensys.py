import math

import numpy as np
import pytest
import scipy.sparse as sp

from gaahsim.basis import SectorBasis, state_from_string
from gaahsim.dynamics import PureState, evolve, occupancy
from gaahsim.model import ModelParams, build_sector_hamiltonian
from gaahsim.opensys import (DEFAULT_T1_NS, DEFAULT_T2_NS, DensityMatrix,
                             NoiseModel, build_full_hamiltonian,
                             evolve_lindblad, lindblad_rhs,
                             occupancies_from_rho, post_select)


def zero_h(L):
    return sp.csr_matrix((1 << L, 1 << L))


def pure_rho(L, mask):
    amps = np.zeros(1 << L, dtype=complex)
    amps[mask] = 1.0
    return DensityMatrix.from_pure(amps)


def test_noise_model_broadcast_and_validation():
    nm = NoiseModel(T1=100.0, T2=50.0)
    assert np.allclose(nm.t1_array(4), 100.0)
    assert np.allclose(nm.t2_array(4), 50.0)
    nm2 = NoiseModel(T1=[1.0, 2.0, 3.0], T2=10.0)
    assert list(nm2.t1_array(3)) == [1.0, 2.0, 3.0]
    with pytest.raises(ValueError):
        nm2.t1_array(4)
    with pytest.raises(ValueError):
        NoiseModel(T1=-5.0, T2=10.0).t1_array(2)


def test_density_matrix_validation():
    with pytest.raises(ValueError):
        DensityMatrix(np.zeros((3, 3)))
    rho = pure_rho(2, 0b01)
    rho.validate()
    bad = DensityMatrix(np.diag([0.7, 0.5, 0.0, -0.2]).astype(complex))
    with pytest.raises(ValueError):
        bad.validate()


def test_closed_system_limit_rhs_is_commutator():
    p = ModelParams(L=3, mu=0.7, V=1.1, delta=0.2)
    H = build_full_hamiltonian(p)
    noise = NoiseModel(T1=1e15, T2=1e15)
    rng = np.random.default_rng(0)
    A = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    rho = A @ A.conj().T
    rho /= rho.trace()
    got = lindblad_rhs(rho, H, noise)
    Hd = H.toarray()
    expect = -1j * (Hd @ rho - rho @ Hd)
    assert np.abs(got - expect).max() < 1e-12


def test_single_qubit_population_decay_rate():
    noise = NoiseModel(T1=120.0, T2=1e15)
    rho = pure_rho(1, 0b1)
    rhs = lindblad_rhs(rho.entries, zero_h(1), noise)
    assert rhs[1, 1].real == pytest.approx(-1.0 / 120.0, rel=1e-12)
    assert rhs[0, 0].real == pytest.approx(+1.0 / 120.0, rel=1e-12)


def test_single_qubit_coherence_decay_rate():
    # coherence decays at 1/(2 T1) + 1/T2 for these jump operators
    T1, T2 = 80.0, 30.0
    noise = NoiseModel(T1=T1, T2=T2)
    amps = np.array([1.0, 1.0]) / math.sqrt(2)
    rho = DensityMatrix.from_pure(amps)
    rhs = lindblad_rhs(rho.entries, zero_h(1), noise)
    expect = -(0.5 / T1 + 1.0 / T2) * rho.entries[0, 1]
    assert rhs[0, 1] == pytest.approx(expect, rel=1e-12)
    # integrated check against the closed-form exponential
    times = np.linspace(0.0, 60.0, 7)
    out = evolve_lindblad(rho, zero_h(1), noise, times, tol=1e-10)
    for t, dm in zip(times, out):
        analytic = 0.5 * math.exp(-(0.5 / T1 + 1.0 / T2) * t)
        assert dm.entries[0, 1].real == pytest.approx(analytic, rel=1e-6)


def test_three_qubit_total_excitation_decay():
    T1 = 100.0
    noise = NoiseModel(T1=T1, T2=1e15)
    rho0 = pure_rho(3, 0b111)
    times = np.linspace(0.0, 3 * T1, 10)
    out = evolve_lindblad(rho0, zero_h(3), noise, times, tol=1e-10)
    for t, dm in zip(times, out):
        total = occupancies_from_rho(dm.entries, 3).sum()
        assert total == pytest.approx(3 * math.exp(-t / T1), rel=1e-3)


def test_evolve_lindblad_closed_limit_matches_dynamics():
    p = ModelParams(L=6, mu=0.5, V=1.0, delta=0.8)
    mask = state_from_string("101010")
    b = SectorBasis(6, 3)
    Hs = build_sector_hamiltonian(p, b)
    psi0 = PureState.from_mask(b, mask)
    times = np.array([0.0, 100.0, 250.0])
    pure = evolve(Hs, psi0, times)
    noise = NoiseModel(T1=1e15, T2=1e15)
    rhos = evolve_lindblad(pure_rho(6, mask), build_full_hamiltonian(p),
                           noise, times, tol=1e-12)
    for psi, dm in zip(pure, rhos):
        assert np.abs(occupancies_from_rho(dm.entries, 6) -
                      occupancy(psi)).max() < 1e-7


def test_evolve_lindblad_trace_and_hermiticity():
    p = ModelParams(L=4, mu=1.0, V=2.0, delta=-0.5)
    noise = NoiseModel(T1=500.0, T2=200.0)
    out = evolve_lindblad(pure_rho(4, 0b0101), build_full_hamiltonian(p),
                          noise, [0.0, 50.0, 100.0], tol=1e-9)
    for dm in out:
        dm.validate(positivity_tol=1e-6)


def test_evolve_lindblad_rejects_unsorted_times():
    noise = NoiseModel()
    with pytest.raises(ValueError):
        evolve_lindblad(pure_rho(2, 0b01), zero_h(2), noise, [10.0, 5.0])


def test_build_full_hamiltonian_blocks_by_sector():
    p = ModelParams(L=5, mu=0.9, V=1.3, delta=0.1)
    H = build_full_hamiltonian(p).toarray()
    for s in range(1 << 5):
        for t in range(1 << 5):
            if H[s, t] != 0.0:
                assert bin(s).count("1") == bin(t).count("1")


def test_build_full_hamiltonian_size_cap():
    with pytest.raises(ValueError):
        build_full_hamiltonian(ModelParams(L=15, mu=0.5, V=0.5))


def test_post_select_identity_inside_sector():
    b = SectorBasis(4, 2)
    p = np.zeros(16)
    p[b.states] = 1.0 / 6.0
    inside, discarded = post_select(p, b)
    assert np.allclose(inside, 1.0 / 6.0)
    assert discarded == pytest.approx(0.0, abs=1e-15)


def test_post_select_uniform_counting():
    b = SectorBasis(10, 5)
    p = np.full(1024, 1.0 / 1024)
    inside, discarded = post_select(p, b)
    assert np.allclose(inside, 1.0 / 252)
    assert discarded == pytest.approx(1.0 - 252.0 / 1024.0, rel=1e-12)


def test_post_select_zero_weight_error():
    b = SectorBasis(4, 2)
    p = np.zeros(16)
    p[0] = 1.0  # all weight in the empty sector
    with pytest.raises(ValueError):
        post_select(p, b)


def test_post_select_consistent_with_relaxation():
    # after relaxation the discarded weight approximates the decayed
    # fraction of the initial M excitations
    T1 = 400.0
    noise = NoiseModel(T1=T1, T2=1e15)
    mask = state_from_string("1010")
    out = evolve_lindblad(pure_rho(4, mask), zero_h(4), noise, [120.0],
                          tol=1e-10)
    b = SectorBasis(4, 2)
    diag = np.real(np.diag(out[0].entries))
    _, discarded = post_select(diag, b)
    expect = 1.0 - math.exp(-2 * 120.0 / T1)
    assert discarded == pytest.approx(expect, rel=1e-9)


def test_default_reference_times():
    assert DEFAULT_T1_NS == 22300.0
    assert DEFAULT_T2_NS == 4000.0
