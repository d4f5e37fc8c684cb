import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lattice_dilation.algebra import NoiseChannel
from lattice_dilation.integrals import compute_I1, integrate_dilation
from lattice_dilation.oracle import (
    AccuracyError,
    AdequacyError,
    FockSpace,
    RegimeError,
    adjoint_evolve_operator,
    coherent_vector,
    density_matrix,
    evolve_density,
    oracle_I1_I2,
    perturbative_clock_state,
    ramsey_excited_probability,
)
from lattice_dilation.oracle import _vk_matrix
from lattice_dilation.states import StateKind, SuperposedCoherentState

CHANNELS = [
    NoiseChannel.free(),
    NoiseChannel.amplitude(0.05),
    NoiseChannel.phase(0.05),
    NoiseChannel.diffusion(0.05),
]


def test_ladder_operators():
    space = FockSpace.of(10)
    comm = space.a @ space.adag - space.adag @ space.a
    assert np.allclose(comm[:9, :9], np.eye(9))
    assert np.allclose(space.adag @ space.a, space.number)
    assert FockSpace.of(10) is space


def test_vacuum():
    vec = coherent_vector(0, 12)
    assert vec[0] == 1 and np.count_nonzero(vec) == 1


@pytest.mark.parametrize("alpha", [0.3, 1.0, 1.5 * np.exp(0.8j), -1.2j])
def test_coherent_vector_moments(alpha):
    space = FockSpace.of(40)
    vec = coherent_vector(alpha, 40)
    assert np.vdot(vec, vec).real == pytest.approx(1.0, abs=1e-10)
    assert np.vdot(vec, space.number @ vec).real == pytest.approx(abs(alpha) ** 2, abs=1e-10)


def test_coherent_overlap_of_opposite_states():
    alpha = 0.395
    overlap = np.vdot(coherent_vector(-alpha, 40), coherent_vector(alpha, 40)).real
    assert overlap == pytest.approx(math.exp(-2 * alpha**2), rel=1e-12)
    assert overlap == pytest.approx(0.732, abs=5e-4)


def test_adequacy_guard():
    with pytest.raises(AdequacyError, match="at least 16"):
        coherent_vector(2.0, 12)


def test_full_revolution_returns_a():
    space = FockSpace.of(20)
    evolved = adjoint_evolve_operator(space.a, NoiseChannel.free(), 1.3, 2 * math.pi / 1.3)
    assert np.allclose(evolved, space.a, atol=1e-12)


def test_amplitude_damping_of_number():
    space = FockSpace.of(30)
    gamma = 0.2
    evolved = adjoint_evolve_operator(space.number, NoiseChannel.amplitude(gamma), 1.0, 1.0 / gamma)
    assert np.abs(evolved - math.exp(-1) * space.number).max() <= 1e-8


def test_diffusion_of_pair_number():
    dim, gamma, t = 40, 0.1, 5.0
    space = FockSpace.of(dim)
    op = space.adag @ space.adag @ space.a @ space.a
    evolved = adjoint_evolve_operator(op, NoiseChannel.diffusion(gamma), 1.0, t)
    expected = op + 4 * gamma * t * space.number + 2 * (gamma * t) ** 2 * np.eye(dim)
    # The a† jump feeds truncation error down from the top level; it stays
    # below 1e-9 for n ≤ 7 at this dimension.
    keep = slice(0, 8)
    assert np.abs(evolved[keep, keep] - expected[keep, keep]).max() <= 1e-7
    vec = coherent_vector(0.6 + 0.3j, dim)
    got = np.vdot(vec, evolved @ vec)
    assert abs(got - np.vdot(vec, expected @ vec)) <= 1e-7


def test_accuracy_error_reports_tolerance():
    with pytest.raises(AccuracyError) as info:
        adjoint_evolve_operator(np.ones((20, 20)), NoiseChannel.phase(0.1), 1.0, 20.0, steps=4)
    assert info.value.achieved > info.value.tolerance == 1e-9


def test_stacked_operators_evolve_independently():
    space = FockSpace.of(20)
    stack = np.stack([space.a, space.number])
    channel = NoiseChannel.amplitude(0.1)
    together = adjoint_evolve_operator(stack, channel, 1.0, 3.0)
    for op, got in zip(stack, together):
        assert np.allclose(adjoint_evolve_operator(op, channel, 1.0, 3.0), got, atol=1e-12)


@pytest.mark.parametrize("channel", CHANNELS, ids=str)
def test_density_matrix_stays_physical(channel):
    state = SuperposedCoherentState(0.9, math.pi / 3, 2.0, 0.4)
    rho0 = density_matrix(state, 30)
    traj = evolve_density(rho0, channel, 1.0, np.linspace(0.0, 20.0, 41))
    for rho in traj[[0, 10, 40]]:
        assert np.abs(rho - rho.conj().T).max() < 1e-12
        assert np.trace(rho).real == pytest.approx(1.0, abs=1e-10)
        assert np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min() > -1e-8


def test_density_matrix_normalisation():
    for kind in StateKind:
        rho = density_matrix(SuperposedCoherentState(0.5, 0.6, 1.0, kind=kind), 30)
        assert np.trace(rho).real == pytest.approx(1.0, abs=1e-14)


def test_zero_time(regime):
    assert oracle_I1_I2(NoiseChannel.free(), regime, SuperposedCoherentState(0.5), 0.0) == (0, 0)


def test_regime_guard(regime):
    with pytest.raises(RegimeError, match="integral engine"):
        oracle_I1_I2(NoiseChannel.free(), regime, SuperposedCoherentState(0.5), 2000.0)


def test_free_oracle_matches_engine(regime):
    state = SuperposedCoherentState(0.5)
    T = 50.0
    I1, I2 = oracle_I1_I2(NoiseChannel.free(), regime, state, T, dim=30)
    exact = integrate_dilation(NoiseChannel.free(), regime, state, T)
    assert abs(I1 - exact.I1.total) < 1e-4 * abs(exact.I1.total)
    assert abs(I2 - exact.I2.total) < 1e-4 * abs(exact.I2.total)


@pytest.mark.usefixtures("quiet_regime")
def test_phase_damping_changes_only_oscillating_I1(regime):
    # Subtracting the phase channel's own oscillating part must leave the free secular I₁.
    state = SuperposedCoherentState(0.5, math.pi / 8, 2.0)
    T = 50.0
    I1_phase, _ = oracle_I1_I2(NoiseChannel.phase(0.05), regime, state, T, dim=30)
    osc = integrate_dilation(NoiseChannel.phase(0.05), regime, state, T).I1.oscillating
    free_secular = compute_I1(NoiseChannel.free(), regime, state, T, include_oscillating=False)
    assert abs(I1_phase - osc - free_secular) < 1e-4 * abs(free_secular)


@pytest.mark.parametrize("channel", CHANNELS, ids=str)
def test_superoperator_and_heisenberg_forms_of_I2_agree(channel, regime):
    # Tr(V·e^{F s}(V ρ(u))) against Tr(V[s]·V·ρ(u)) at sample times.
    dim = 30
    V = _vk_matrix(regime, FockSpace.of(dim))
    rho0 = density_matrix(SuperposedCoherentState(0.8, math.pi / 8, 2.0), dim)
    for u, s in ((0.0, 3.0), (4.0, 7.5), (10.0, 2.0)):
        rho_u = evolve_density(rho0, channel, 1.0, np.array([0.0, u]))[-1] if u else rho0
        propagated = evolve_density(V @ rho_u, channel, 1.0, np.array([0.0, s]))[-1]
        superop = np.trace(V @ propagated)
        heisenberg = np.trace(adjoint_evolve_operator(V, channel, 1.0, s) @ V @ rho_u)
        assert abs(superop - heisenberg) <= 1e-9 * abs(heisenberg)


PLUS = np.full((2, 2), 0.5, dtype=complex)


def test_unperturbed_clock_state():
    rho = perturbative_clock_state(0, 0, 0, PLUS, omega0=3.0, t=0.7)
    expected = np.array([[0.5, 0.5 * np.exp(-3j * 0.7)], [0.5 * np.exp(3j * 0.7), 0.5]])
    assert np.allclose(rho, expected, atol=1e-15)


@settings(max_examples=50, deadline=None)
@given(
    st.floats(-1e-3, 1e-3),
    st.floats(0.0, 1e-4),
    st.floats(-1e-3, 1e-3),
    st.floats(-1e-4, 1e-4),
    st.floats(0.1, 5.0),
)
def test_clock_state_preserves_trace(I1, I2_re, I2_im, I2p, t):
    rho = perturbative_clock_state(I1, complex(I2_re, I2_im), I2p, PLUS, omega0=2.0, t=t)
    assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)
    assert abs(np.trace(rho).imag) < 1e-12
    assert np.abs(rho - rho.conj().T).max() < 1e-12


def test_ramsey_without_dilation():
    # Laser on resonance: a π/2 pulse pair returns the atom to |e⟩.
    rho = perturbative_clock_state(0, 0, 0, PLUS, omega0=5.0, t=1.0, laser_omega=5.0)
    assert ramsey_excited_probability(rho) == pytest.approx(1.0)
