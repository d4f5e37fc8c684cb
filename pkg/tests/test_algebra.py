import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lattice_dilation.algebra import (
    PRUNE_RTOL,
    NoiseChannel,
    NormalOrderedPoly,
    coherent_overlap,
    evolve,
    expectation,
    kinetic_poly,
    multiply_normal_order,
    vk_poly,
    wk_poly,
)
from lattice_dilation.oracle import FockSpace, density_matrix
from lattice_dilation.states import StateKind, SuperposedCoherentState
from lattice_dilation.units import DimensionlessRegime, DomainError

A = NormalOrderedPoly.monomial(0, 1)
ADAG = NormalOrderedPoly.monomial(1, 0)
NUMBER = NormalOrderedPoly.monomial(1, 1)

complexes = st.complex_numbers(max_magnitude=2.0, allow_nan=False, allow_infinity=False)


@st.composite
def polys(draw, max_degree=4):
    keys = [(m, n) for m in range(max_degree + 1) for n in range(max_degree + 1 - m)]
    chosen = draw(st.lists(st.sampled_from(keys), min_size=1, max_size=5, unique=True))
    return NormalOrderedPoly({key: draw(complexes) for key in chosen})


def test_canonical_commutator():
    assert dict(A * ADAG) == {(1, 1): 1, (0, 0): 1}
    assert dict(ADAG * A) == {(1, 1): 1}


def test_number_squared():
    # Read off from a dense product in a 12-level truncation.
    a = FockSpace.of(12).a
    dense = NUMBER.to_matrix(a) @ NUMBER.to_matrix(a)
    expected = NormalOrderedPoly({(2, 2): 1, (1, 1): 1})
    assert dict(NUMBER * NUMBER) == dict(expected)
    assert np.allclose(dense, expected.to_matrix(a))


def test_identity_is_neutral():
    P = NormalOrderedPoly({(2, 1): 0.5 - 1j, (0, 3): 2.0})
    assert dict(P * NormalOrderedPoly.identity()) == dict(P)
    assert dict(NormalOrderedPoly.identity() * P) == dict(P)


def test_negative_power_rejected():
    with pytest.raises(ValueError):
        NormalOrderedPoly({(-1, 0): 1.0})


def test_pruning_drops_negligible_terms():
    P = NormalOrderedPoly({(1, 1): 1.0, (0, 0): 0.5 * PRUNE_RTOL, (2, 0): 10 * PRUNE_RTOL})
    assert set(P) == {(1, 1), (2, 0)}


def test_products_are_exact_on_the_untruncated_block():
    dim, margin = 40, 8
    a = FockSpace.of(dim).a
    P = NormalOrderedPoly({(2, 1): 1.5, (0, 2): -0.25j, (1, 1): 0.75})
    Q = NormalOrderedPoly({(1, 3): 0.5, (2, 0): 1.0 + 1j, (0, 0): -2.0})
    dense = P.to_matrix(a) @ Q.to_matrix(a)
    keep = slice(0, dim - margin)
    assert np.allclose((P * Q).to_matrix(a)[keep, keep], dense[keep, keep], rtol=0, atol=1e-9)


@settings(max_examples=40, deadline=None)
@given(polys(2), polys(2))
def test_products_match_matrices(P, Q):
    dim, margin = 30, 5
    a = FockSpace.of(dim).a
    dense = P.to_matrix(a) @ Q.to_matrix(a)
    keep = slice(0, dim - margin)
    scale = max(1.0, np.abs(dense[keep, keep]).max())
    assert np.abs((P * Q).to_matrix(a)[keep, keep] - dense[keep, keep]).max() <= 1e-10 * scale


@settings(max_examples=30, deadline=None)
@given(polys(2), polys(2), polys(2))
def test_product_is_associative(P, Q, R):
    left, right = (P * Q) * R, P * (Q * R)
    scale = max(abs(c) for c in list(left.values()) + [1.0])
    for key in set(left) | set(right):
        assert abs(left.get(key, 0) - right.get(key, 0)) <= 1e-12 * scale


@settings(max_examples=30, deadline=None)
@given(polys(3), polys(3), polys(3), complexes)
def test_product_is_bilinear(P, Q, R, c):
    left = P * (Q + R.scale(c))
    right = P * Q + (P * R).scale(c)
    scale = max(abs(v) for v in list(left.values()) + list(right.values()) + [1.0])
    for key in set(left) | set(right):
        assert abs(left.get(key, 0) - right.get(key, 0)) <= 1e-12 * scale


@settings(max_examples=30, deadline=None)
@given(polys(3), polys(3))
def test_dagger_reverses_products(P, Q):
    left, right = (P * Q).dagger(), Q.dagger() * P.dagger()
    scale = max(abs(v) for v in list(left.values()) + [1.0])
    for key in set(left) | set(right):
        assert abs(left.get(key, 0) - right.get(key, 0)) <= 1e-12 * scale
    assert dict(P.dagger().dagger()) == dict(P)


def test_coherent_overlap_examples():
    alpha = 0.7 - 0.2j
    assert coherent_overlap(alpha, alpha) == pytest.approx(1.0, rel=1e-15)
    assert coherent_overlap(-0.6, 0.6) == pytest.approx(math.exp(-2 * 0.36), rel=1e-15)
    assert coherent_overlap(0, alpha) == pytest.approx(math.exp(-abs(alpha) ** 2 / 2), rel=1e-15)


def test_number_on_coherent_state():
    state = SuperposedCoherentState.coherent(0.9 * cmath.exp(0.4j))
    assert expectation(NUMBER, state) == pytest.approx(0.81, rel=1e-14)


def test_number_on_cat_and_mixture():
    cat = SuperposedCoherentState(0.395, math.pi / 4, math.pi)
    C = cat.C_i
    assert expectation(NUMBER, cat).real == pytest.approx(0.395**2 * (1 - C) / (1 + C), rel=1e-13)
    for theta in (0.0, 0.3, math.pi / 4, 1.2):
        mix = SuperposedCoherentState(0.395, theta, math.pi, kind=StateKind.CLASSICAL)
        assert expectation(NUMBER, mix).real == pytest.approx(0.395**2, rel=1e-13)


@settings(max_examples=40, deadline=None)
@given(
    polys(4),
    st.floats(0.05, 1.5),
    st.floats(0.0, math.pi / 2),
    st.floats(0.0, 2 * math.pi),
    st.floats(0.0, 2 * math.pi),
    st.sampled_from(list(StateKind)),
)
def test_expectation_matches_dense_trace(P, alpha0, theta, phi, varphi, kind):
    try:
        state = SuperposedCoherentState(alpha0, theta, phi, varphi, kind)
    except DomainError:
        return
    space = FockSpace.of(40)
    rho = density_matrix(state, 40)
    dense = np.trace(P.to_matrix(space.a) @ rho)
    scale = sum(abs(c) * max(alpha0, 1.0) ** (m + n) for (m, n), c in P.items())
    assert abs(expectation(P, state) - dense) <= 1e-8 * scale


def test_phase_damping_leaves_number_fixed():
    evolved = evolve(NUMBER, NoiseChannel.phase(3.0), omega_z=2.0)
    assert dict(evolved) == {(1, 1, 0, 0j): 1.0}


def test_amplitude_damping_of_pair_number():
    gamma = 0.7
    evolved = evolve(NormalOrderedPoly.monomial(2, 2), NoiseChannel.amplitude(gamma), omega_z=5.0)
    assert dict(evolved) == {(2, 2, 0, complex(-2 * gamma)): 1.0}


def test_diffusion_of_pair_number():
    gamma, t = 0.3, 1.7
    evolved = evolve(NormalOrderedPoly.monomial(2, 2), NoiseChannel.diffusion(gamma), omega_z=5.0)
    at_t = evolved.at(t)
    assert dict(at_t) == pytest.approx({(2, 2): 1.0, (1, 1): 4 * gamma * t, (0, 0): 2 * gamma**2 * t**2})


def test_free_rotation():
    P = NormalOrderedPoly({(2, 0): 1.0, (0, 1): 1.0})
    at_t = evolve(P, NoiseChannel.free(), omega_z=1.3).at(0.4)
    assert at_t[(2, 0)] == pytest.approx(cmath.exp(2j * 1.3 * 0.4))
    assert at_t[(0, 1)] == pytest.approx(cmath.exp(-1j * 1.3 * 0.4))


def test_negative_rate_rejected():
    with pytest.raises(DomainError):
        NoiseChannel.amplitude(-1.0)
    with pytest.raises(DomainError):
        NoiseChannel(rate=1.0)


CHANNELS = [
    NoiseChannel.free(),
    NoiseChannel.amplitude(0.4),
    NoiseChannel.phase(0.4),
    NoiseChannel.diffusion(0.4),
]


@pytest.mark.parametrize("channel", CHANNELS, ids=str)
@settings(max_examples=20, deadline=None)
@given(P=polys(4))
def test_evolution_commutes_with_dagger(channel, P):
    left = evolve(P.dagger(), channel, 1.1)
    right = evolve(P, channel, 1.1).dagger()
    assert set(left) == set(right)
    for key in left:
        assert left[key] == pytest.approx(right[key], rel=1e-14)


@pytest.mark.parametrize("channel", CHANNELS, ids=str)
@settings(max_examples=20, deadline=None)
@given(P=polys(4), Q=polys(4), c=complexes)
def test_evolution_is_linear(channel, P, Q, c):
    t = 0.9
    left = evolve(P + Q.scale(c), channel, 1.1).at(t)
    right = evolve(P, channel, 1.1).at(t) + evolve(Q, channel, 1.1).at(t).scale(c)
    scale = max(abs(v) for v in list(right.values()) + [1.0])
    for key in set(left) | set(right):
        assert abs(left.get(key, 0) - right.get(key, 0)) <= 1e-12 * scale


@pytest.mark.parametrize(
    "channel, flow",
    [
        (NoiseChannel.free(), lambda n0, g, t: n0),
        (NoiseChannel.phase(0.5), lambda n0, g, t: n0),
        (NoiseChannel.amplitude(0.5), lambda n0, g, t: n0 * math.exp(-g * t)),
        (NoiseChannel.diffusion(0.5), lambda n0, g, t: n0 + g * t),
    ],
    ids=str,
)
def test_number_flows(channel, flow):
    state = SuperposedCoherentState(0.8, math.pi / 3, 2.0, 0.5)
    n0 = expectation(NUMBER, state).real
    for t in (0.0, 0.3, 2.5):
        got = expectation(evolve(NUMBER, channel, 1.0).at(t), state)
        assert got.real == pytest.approx(flow(n0, channel.rate, t), rel=1e-13)
        assert abs(got.imag) < 1e-14


def test_vk_and_kinetic_polys_are_hermitian():
    coeffs = DimensionlessRegime()
    V, K, W = vk_poly(coeffs), kinetic_poly(coeffs), wk_poly(coeffs)
    assert V.is_hermitian() and K.is_hermitian() and W.is_hermitian()
    # W is a negative multiple of a² + a†² − 2a†a − 1.
    shape = NormalOrderedPoly({(2, 0): 1, (0, 2): 1, (1, 1): -2, (0, 0): -1})
    ratio = W[(2, 0)] / shape[(2, 0)]
    assert ratio.real < 0
    assert dict(W) == pytest.approx(dict(shape.scale(ratio)))


def test_kinetic_poly_is_momentum_squared():
    # p = i√(mħω/2)(a† − a), so p²/(m²c²) = −(ħω/2mc²)(a† − a)², with C_k = ħω/4mc².
    coeffs = DimensionlessRegime()
    diff = ADAG - A
    expected = (diff * diff).scale(-2.0 * coeffs.C_k)
    assert dict(kinetic_poly(coeffs)) == pytest.approx(dict(expected))


def test_vk_vacuum_value():
    coeffs = DimensionlessRegime()
    vac = SuperposedCoherentState.coherent(0.0)
    assert expectation(vk_poly(coeffs), vac).real == pytest.approx(-coeffs.C_r - coeffs.C_k)
