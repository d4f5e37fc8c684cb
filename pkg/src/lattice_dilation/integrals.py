"""Exact time integrals of evolved ladder polynomials.

The integrals reduce to two shapes,

    ∫₀ᵀ t^k e^{λt} dt                         (single time)
    ∫∫_{s,u ≥ 0, s+u ≤ T} s^j u^k e^{λs+μu}   (ordered pair of times)

and both are divided differences of ``exp`` with repeated nodes
(Hermite–Genocchi):

    ∫₀ᵀ t^k e^{λt} dt = T^{k+1} k! · exp[0, λT ×(k+1)]
    ∫∫ s^j u^k e^{λs+μu} = T^{j+k+2} j! k! · exp[0, λT ×(j+1), μT ×(k+1)]

Divided differences of ``exp`` are evaluated by a Taylor series when the nodes
are clustered and by the defining recursion when they are spread out, which
keeps full relative accuracy for small rates (no 1 − e^{−ΓT} cancellation)
and for large oscillation phases alike.
"""

from __future__ import annotations

import cmath
import math
from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache

from .algebra import (
    EvolvedPoly,
    NoiseChannel,
    NormalOrderedPoly,
    evolve,
    evolve_monomial,
    monomial_expectation,
    vk_poly,
    wk_poly,
)
from .states import SuperposedCoherentState
from .units import Coefficients

__all__ = [
    "exp_divided_difference",
    "exact_exp_poly_integral",
    "ordered_pair_integral",
    "SplitIntegral",
    "IntegralResult",
    "compute_I1",
    "compute_I2",
    "compute_I2_prime",
    "integrate_dilation",
    "is_oscillating",
    "engine_report",
]

_CLUSTER_RADIUS = 1.0
_TAYLOR_TERMS = 40
_INV_FACTORIAL = [1.0 / math.factorial(i) for i in range(_TAYLOR_TERMS + 64)]


def _node_key(z: complex) -> tuple[float, float]:
    return (z.real, z.imag)


def _taylor_dd(nodes: tuple[complex, ...]) -> complex:
    # exp[z_0..z_n] = e^c Σ_m h_m(z − c) / (n+m)!, h_m complete homogeneous.
    n = len(nodes) - 1
    centre = sum(nodes) / len(nodes)
    shifted = [z - centre for z in nodes]
    h = [1.0 + 0j] + [0j] * _TAYLOR_TERMS
    for w in shifted:
        if w == 0:
            continue
        for m in range(1, _TAYLOR_TERMS + 1):
            h[m] += w * h[m - 1]
    # |h_m|/(n+m)! <= r^m/(m! n!), which bounds the tail once r^m/m! is tiny.
    radius = max(abs(w) for w in shifted)
    total = 0j
    for m in range(_TAYLOR_TERMS + 1):
        total += h[m] * _INV_FACTORIAL[n + m]
        if radius**m * _INV_FACTORIAL[m] * _INV_FACTORIAL[n] <= 1e-18 * abs(total):
            break
    return cmath.exp(centre) * total


@lru_cache(maxsize=65536)
def _dd_sorted(nodes: tuple[complex, ...]) -> complex:
    if len(nodes) == 1:
        return cmath.exp(nodes[0])
    # The widest pair decides between series and recursion.
    i, j, spread = 0, 0, 0.0
    for a in range(len(nodes)):
        for b in range(a + 1, len(nodes)):
            d = abs(nodes[a] - nodes[b])
            if d > spread:
                i, j, spread = a, b, d
    if spread <= _CLUSTER_RADIUS:
        return _taylor_dd(nodes)
    without_i = nodes[:i] + nodes[i + 1 :]
    without_j = nodes[:j] + nodes[j + 1 :]
    return (_dd_sorted(without_j) - _dd_sorted(without_i)) / (nodes[i] - nodes[j])


def exp_divided_difference(nodes) -> complex:
    """Divided difference exp[z_0, …, z_n]; repeated nodes are allowed."""
    canon = tuple(sorted((complex(z) for z in nodes), key=_node_key))
    if not canon:
        raise ValueError("need at least one node")
    return _dd_sorted(canon)


def exact_exp_poly_integral(k: int, lam: complex, T: float) -> complex:
    """∫₀ᵀ t^k e^{λt} dt, exact for any complex λ."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if T < 0:
        raise ValueError("T must be non-negative")
    if T == 0:
        return 0j
    z = complex(lam) * T
    return T ** (k + 1) * math.factorial(k) * exp_divided_difference((0j,) + (z,) * (k + 1))


def ordered_pair_integral(j: int, lam: complex, k: int, mu: complex, T: float) -> complex:
    """∫∫ s^j u^k e^{λs+μu} over the triangle s, u ≥ 0, s + u ≤ T."""
    if T == 0:
        return 0j
    nodes = (0j,) + (complex(lam) * T,) * (j + 1) + (complex(mu) * T,) * (k + 1)
    return (
        T ** (j + k + 2)
        * math.factorial(j)
        * math.factorial(k)
        * exp_divided_difference(nodes)
    )


def is_oscillating(*exponents: complex) -> bool:
    """True when any time variable carries an imaginary exponent."""
    return any(complex(x).imag != 0.0 for x in exponents)


@dataclass(frozen=True)
class SplitIntegral:
    """An integral split into secular and oscillating contributions."""

    non_oscillating: complex
    oscillating: complex

    @property
    def total(self) -> complex:
        return self.non_oscillating + self.oscillating

    def value(self, include_oscillating: bool = True) -> complex:
        return self.total if include_oscillating else self.non_oscillating


@dataclass(frozen=True)
class IntegralResult:
    I1: SplitIntegral
    I2: SplitIntegral


def _single_time(poly: EvolvedPoly, moments, T: float) -> SplitIntegral:
    parts = [0j, 0j]
    for (m, n, k, lam), c in poly.items():
        value = c * moments(m, n) * exact_exp_poly_integral(k, lam, T)
        parts[is_oscillating(lam)] += value
    return SplitIntegral(parts[0], parts[1])


def _i1_split(poly: NormalOrderedPoly, channel, coeffs, state, T) -> SplitIntegral:
    evolved = evolve(poly, channel, coeffs.omega_z)
    return _single_time(evolved, monomial_expectation(state), T)


def compute_I1(
    channel: NoiseChannel,
    coeffs: Coefficients,
    state: SuperposedCoherentState,
    T: float,
    include_oscillating: bool = True,
) -> complex:
    """∫₀ᵀ ⟨V[t]⟩/(mc²) dt for the given channel and motional state."""
    split = _i1_split(vk_poly(coeffs), channel, coeffs, state, T)
    return split.value(include_oscillating)


def compute_I2_prime(
    channel: NoiseChannel,
    coeffs: Coefficients,
    state: SuperposedCoherentState,
    T: float,
    include_oscillating: bool = True,
) -> complex:
    """∫₀ᵀ ħ⟨W[t]⟩/(m²c⁴) dt with W = p²/2m, in s²."""
    split = _i1_split(wk_poly(coeffs), channel, coeffs, state, T)
    return split.value(include_oscillating)


def _i2_split(channel, coeffs, state, T) -> SplitIntegral:
    V = vk_poly(coeffs)
    omega = coeffs.omega_z
    moments = monomial_expectation(state)
    # Collect coefficient of s^j e^{λs} u^k e^{μu}, s = t₂ − t₁, u = t₁.
    table: dict[tuple[int, complex, int, complex], complex] = defaultdict(complex)
    for (m1, n1, j, lam), c1 in evolve(V, channel, omega).items():
        product = NormalOrderedPoly.monomial(m1, n1, c1) * V
        for (m2, n2), c2 in product.items():
            for mm, nn, k, mu, w in evolve_monomial(m2, n2, channel, omega):
                if w != 0.0:
                    table[(j, lam, k, mu)] += c2 * w * moments(mm, nn)
    parts = [0j, 0j]
    for (j, lam, k, mu), c in table.items():
        if c == 0:
            continue
        value = 2.0 * c * ordered_pair_integral(j, lam, k, mu, T)
        # e^{λs+μu} = e^{λ t₂ + (μ−λ) t₁}
        parts[is_oscillating(lam, mu - lam)] += value
    return SplitIntegral(parts[0], parts[1])


def compute_I2(
    channel: NoiseChannel,
    coeffs: Coefficients,
    state: SuperposedCoherentState,
    T: float,
    include_oscillating: bool = True,
) -> complex:
    """2∫₀ᵀdt₂∫₀^{t₂}dt₁ ⟨(V[t₂−t₁]V)[t₁]⟩/(mc²)²."""
    return _i2_split(channel, coeffs, state, T).value(include_oscillating)


def integrate_dilation(
    channel: NoiseChannel,
    coeffs: Coefficients,
    state: SuperposedCoherentState,
    T: float,
) -> IntegralResult:
    """Both integrals with their secular/oscillating split."""
    return IntegralResult(
        I1=_i1_split(vk_poly(coeffs), channel, coeffs, state, T),
        I2=_i2_split(channel, coeffs, state, T),
    )


def engine_report(
    channel: NoiseChannel,
    coeffs: Coefficients,
    alpha0: float,
    theta: float,
    phi: float,
    T: float,
    include_oscillating: bool = False,
    varphi: float = 0.0,
):
    """A :class:`~lattice_dilation.closedform.DilationReport` built from exact integrals."""
    from .closedform import DilationReport
    from .states import StateKind

    values = {}
    for kind in StateKind:
        state = SuperposedCoherentState(alpha0, theta, phi, varphi, kind)
        result = integrate_dilation(channel, coeffs, state, T)
        values[kind] = (
            result.I1.value(include_oscillating).real,
            result.I2.value(include_oscillating).real,
        )
    (i1q, i2q), (i1c, i2c) = values[StateKind.QUANTUM], values[StateKind.CLASSICAL]
    return DilationReport(
        channel=channel,
        T=T,
        alpha0=alpha0,
        theta=theta,
        phi=phi,
        I1_qtm=i1q,
        I1_cls=i1c,
        I2_qtm=i2q,
        I2_cls=i2c,
        Delta1_coh=i1q - i1c,
        Delta2_qtm_sq=i2q - i1q * i1q,
        Delta2_cls_sq=i2c - i1c * i1c,
    )
