"""Closed-form dilation integrals in the secular (non-oscillating) approximation.

Every report compares the cat state against the classical mixture with the
same amplitude and weights.  The expectations that appear are

    quantum:    ⟨a†a⟩ = α₀²(1−C_i)/(1+C_i),  ⟨a†²a²⟩ = α₀⁴
    classical:  ⟨a†a⟩ = α₀²,                 ⟨a†²a²⟩ = α₀⁴

with C_i = e^{−2α₀²} sin 2θ cos φ.  Oscillating contributions are suppressed by
1/(ω_z T) and are handled exactly by :mod:`lattice_dilation.integrals`;
:func:`oscillating_delta1` gives the leading one for the free channel.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .algebra import ChannelKind, NoiseChannel
from .states import StateKind, SuperposedCoherentState
from .units import Coefficients, DomainError

__all__ = [
    "DilationReport",
    "RegimeWarning",
    "free_report",
    "amplitude_report",
    "phase_report",
    "diffusion_report",
    "channel_report",
    "kinetic_expectation",
    "oscillating_delta1",
    "OscillatingDelta1",
    "decay_factors",
]

# Below this ΓT the exponential factors switch to their Taylor series.
SERIES_THRESHOLD = 0.5
_SEPARATION = 100.0


class RegimeWarning(UserWarning):
    """Parameters outside ω_z ≫ Γ, where the secular forms were derived."""

    def __init__(self, message: str, ratio: float):
        super().__init__(message)
        self.ratio = ratio


@dataclass(frozen=True)
class DilationReport:
    channel: NoiseChannel
    T: float
    alpha0: float
    theta: float
    phi: float
    I1_qtm: float
    I1_cls: float
    I2_qtm: float
    I2_cls: float
    Delta1_coh: float
    Delta2_qtm_sq: float
    Delta2_cls_sq: float

    @property
    def Delta2_cq_sq(self) -> float:
        return self.Delta2_qtm_sq + self.Delta2_cls_sq

    @property
    def relative_discrepancy(self) -> float:
        return self.Delta1_coh / self.T

    @property
    def C_i(self) -> float:
        return math.exp(-2.0 * self.alpha0**2) * math.sin(2.0 * self.theta) * math.cos(self.phi)

    def as_dict(self) -> dict[str, float | str]:
        return {
            "channel": self.channel.kind.value,
            "rate": self.channel.rate,
            "T": self.T,
            "alpha0": self.alpha0,
            "theta": self.theta,
            "phi": self.phi,
            "I1_qtm": self.I1_qtm,
            "I1_cls": self.I1_cls,
            "I2_qtm": self.I2_qtm,
            "I2_cls": self.I2_cls,
            "Delta1_coh": self.Delta1_coh,
            "Delta2_qtm_sq": self.Delta2_qtm_sq,
            "Delta2_cls_sq": self.Delta2_cls_sq,
            "Delta2_cq_sq": self.Delta2_cq_sq,
            "relative_discrepancy": self.relative_discrepancy,
        }


def _series(x: float, coefficient) -> float:
    total, power = 0.0, 1.0
    for m in range(40):
        term = coefficient(m) * power
        total += term
        if abs(term) < 1e-18 * abs(total):
            break
        power *= -x
    return total


def decay_factors(gamma: float, T: float) -> tuple[float, float, float]:
    """The three amplitude-damping factors, each finite as Γ → 0.

    Returns ((1−e^{−ΓT})/Γ, (1−2e^{−ΓT}+e^{−2ΓT})/Γ², (1−e^{−ΓT}−ΓTe^{−ΓT})/Γ²).
    """
    x = gamma * T
    if x < SERIES_THRESHOLD:
        f1 = _series(x, lambda m: 1.0 / math.factorial(m + 1))
        f3 = _series(x, lambda m: (m + 1) / math.factorial(m + 2))
    else:
        f1 = -math.expm1(-x) / x
        f3 = (-math.expm1(-x) - x * math.exp(-x)) / x**2
    return T * f1, (T * f1) ** 2, T * T * f3


def _validate(coeffs: Coefficients, alpha0: float, theta: float, phi: float, T: float):
    """Return (C_i, α₀²/(1+C_i)), the two state factors every formula needs.

    1 + C_i is formed with expm1 so that α₀²/(1+C_i) stays accurate for small
    α₀.  At α₀ = 0 with sin 2θ cos φ = −1 the cat state is not defined, but the
    formulas have a finite limit (the one-phonon Fock state, ratio ½), which
    is what is returned.
    """
    if not (alpha0 >= 0 and math.isfinite(alpha0)):
        raise DomainError(f"alpha0 must be non-negative, got {alpha0!r}")
    if not T > 0:
        raise DomainError(f"interrogation time must be positive, got {T!r}")
    a2 = alpha0 * alpha0
    s = math.sin(2.0 * theta) * math.cos(phi)
    C = math.exp(-2.0 * a2) * s
    one_plus_C = (1.0 + s) + s * math.expm1(-2.0 * a2)
    if a2 == 0.0 and one_plus_C == 0.0:
        return C, 0.5
    if one_plus_C <= 0.0:
        raise DomainError("superposition is not normalisable (1 + C_i <= 0)")
    return C, a2 / one_plus_C


def _check_regime(channel: NoiseChannel, coeffs: Coefficients) -> None:
    if channel.rate > 0 and coeffs.omega_z / channel.rate < _SEPARATION:
        ratio = coeffs.omega_z / channel.rate
        warnings.warn(
            RegimeWarning(
                f"omega_z/Gamma = {ratio:.3g} < {_SEPARATION:g}; secular forms assume omega_z >> Gamma",
                ratio,
            ),
            stacklevel=3,
        )


def _moments(alpha0: float, C: float, r: float) -> tuple[float, float, float]:
    a2 = alpha0 * alpha0
    return (1.0 - C) * r, a2, a2 * a2


def free_report(coeffs: Coefficients, alpha0: float, theta: float, phi: float, T: float) -> DilationReport:
    return _free_like(NoiseChannel.free(), coeffs, alpha0, theta, phi, T)


def phase_report(
    coeffs: Coefficients, alpha0: float, theta: float, phi: float, T: float, gamma_p: float
) -> DilationReport:
    """Phase damping leaves every secular quantity unchanged."""
    channel = NoiseChannel.phase(gamma_p)
    _check_regime(channel, coeffs)
    return _free_like(channel, coeffs, alpha0, theta, phi, T)


def _free_like(channel, coeffs, alpha0, theta, phi, T) -> DilationReport:
    C, r = _validate(coeffs, alpha0, theta, phi, T)
    C_k, C_r = coeffs.C_k, coeffs.C_r
    n_q, n_c, n2 = _moments(alpha0, C, r)
    a2 = alpha0 * alpha0

    def I1(n):
        return -(C_k * (2.0 * n + 1.0) + C_r) * T

    def I2(n):
        return (4.0 * C_k**2 * n2 + (C_r + C_k) ** 2 + 4.0 * C_k * (C_r + 2.0 * C_k) * n) * T * T

    return DilationReport(
        channel=channel,
        T=T,
        alpha0=alpha0,
        theta=theta,
        phi=phi,
        I1_qtm=I1(n_q),
        I1_cls=I1(n_c),
        I2_qtm=I2(n_q),
        I2_cls=I2(n_c),
        Delta1_coh=4.0 * C_k * C * r * T,
        Delta2_qtm_sq=(
            16.0 * C_k**2 * C * r * r * T * T
            + 4.0 * C_k**2 * (1.0 - C) * r * T * T
        ),
        Delta2_cls_sq=4.0 * C_k**2 * a2 * T * T,
    )


def amplitude_report(
    coeffs: Coefficients, alpha0: float, theta: float, phi: float, T: float, gamma_a: float
) -> DilationReport:
    channel = NoiseChannel.amplitude(gamma_a)
    _check_regime(channel, coeffs)
    C, r = _validate(coeffs, alpha0, theta, phi, T)
    C_k, C_r = coeffs.C_k, coeffs.C_r
    n_q, n_c, n2 = _moments(alpha0, C, r)
    a2 = alpha0 * alpha0
    E1, E2, E3 = decay_factors(gamma_a, T)

    def I1(n):
        return -(C_k + C_r) * T - 2.0 * C_k * n * E1

    def I2(n):
        return (
            4.0 * C_k**2 * n2 * E2
            + 4.0 * C_k * (C_r + C_k) * n * T * E1
            + 8.0 * C_k**2 * n * E3
            + (C_r + C_k) ** 2 * T * T
        )

    return DilationReport(
        channel=channel,
        T=T,
        alpha0=alpha0,
        theta=theta,
        phi=phi,
        I1_qtm=I1(n_q),
        I1_cls=I1(n_c),
        I2_qtm=I2(n_q),
        I2_cls=I2(n_c),
        Delta1_coh=4.0 * C_k * C * r * E1,
        Delta2_qtm_sq=(
            16.0 * C_k**2 * C * r * r * E2
            + 8.0 * C_k**2 * (1.0 - C) * r * E3
        ),
        Delta2_cls_sq=8.0 * C_k**2 * a2 * E3,
    )


def diffusion_report(
    coeffs: Coefficients, alpha0: float, theta: float, phi: float, T: float, gamma_d: float
) -> DilationReport:
    """Diffusion heats the motion: ⟨a†a⟩ grows as Γ_d t, adding T³ and T⁴ variance terms."""
    channel = NoiseChannel.diffusion(gamma_d)
    _check_regime(channel, coeffs)
    C, r = _validate(coeffs, alpha0, theta, phi, T)
    C_k, C_r = coeffs.C_k, coeffs.C_r
    G = gamma_d
    n_q, n_c, n2 = _moments(alpha0, C, r)
    a2 = alpha0 * alpha0
    T2, T3, T4 = T * T, T**3, T**4

    def I1(n):
        return -(C_k * (2.0 * n + 1.0) + C_r) * T - C_k * G * T2

    def I2(n):
        return (
            (4.0 * C_k**2 * n2 + (C_r + C_k) ** 2 + 4.0 * C_k * (C_r + 2.0 * C_k) * n) * T2
            + (10.0 / 3.0 * C_k**2 + 2.0 * C_k * C_r) * G * T3
            + 20.0 / 3.0 * C_k**2 * G * n * T3
            + 5.0 / 3.0 * C_k**2 * G * G * T4
        )

    heating = 4.0 / 3.0 * C_k**2 * G * T3 + 2.0 / 3.0 * C_k**2 * G * G * T4
    return DilationReport(
        channel=channel,
        T=T,
        alpha0=alpha0,
        theta=theta,
        phi=phi,
        I1_qtm=I1(n_q),
        I1_cls=I1(n_c),
        I2_qtm=I2(n_q),
        I2_cls=I2(n_c),
        Delta1_coh=4.0 * C_k * C * r * T,
        Delta2_qtm_sq=(
            16.0 * C_k**2 * C * r * r * T2
            + 8.0 / 3.0 * C_k**2 * (1.0 - C) * r * G * T3
            + 4.0 * C_k**2 * (1.0 - C) * r * T2
            + heating
        ),
        Delta2_cls_sq=4.0 * C_k**2 * a2 * T2 + 8.0 / 3.0 * C_k**2 * a2 * G * T3 + heating,
    )


def channel_report(
    channel: NoiseChannel, coeffs: Coefficients, alpha0: float, theta: float, phi: float, T: float
) -> DilationReport:
    """Dispatch to the report matching ``channel``."""
    kind = channel.kind
    if kind is ChannelKind.FREE:
        return free_report(coeffs, alpha0, theta, phi, T)
    if kind is ChannelKind.AMPLITUDE:
        return amplitude_report(coeffs, alpha0, theta, phi, T, channel.rate)
    if kind is ChannelKind.PHASE:
        return phase_report(coeffs, alpha0, theta, phi, T, channel.rate)
    return diffusion_report(coeffs, alpha0, theta, phi, T, channel.rate)


def kinetic_expectation(state: SuperposedCoherentState, coeffs: Coefficients, t: float) -> float:
    """⟨p²(t)⟩/(m²c²) under free evolution.

    For the mixture this is 4C_k(α₀² + ½ − α₀² cos(2ω_z t − 2φ_α)); the
    superposition subtracts 8α₀²C_k·C_i/(1+C_i).  The cosine enters with a
    minus sign: a displaced, resting coherent state starts at a turning point
    where the kinetic energy equals the vacuum value 2C_k.
    """
    a2 = state.alpha0**2
    C_k = coeffs.C_k
    value = 4.0 * C_k * (a2 + 0.5 - a2 * math.cos(2.0 * coeffs.omega_z * t - 2.0 * state.varphi))
    if state.kind is StateKind.QUANTUM:
        C = state.C_i
        value -= 8.0 * a2 * C_k * C / (1.0 + C)
    return value


@dataclass(frozen=True)
class OscillatingDelta1:
    full: float
    correction: float
    bound: float


def oscillating_delta1(
    coeffs: Coefficients, alpha0: float, theta: float, phi: float, T: float
) -> OscillatingDelta1:
    """Free-channel Δ₁ with the gravitational oscillating terms kept (real α).

    The product C_i·tan φ is evaluated as e^{−2α₀²} sin 2θ sin φ so that φ = π/2,
    where C_i vanishes, is handled without dividing by cos φ.
    """
    C, r = _validate(coeffs, alpha0, theta, phi, T)
    overlap = math.exp(-2.0 * alpha0**2)
    C_tan = overlap * math.sin(2.0 * theta) * math.sin(phi)
    C_cos2 = C * math.cos(2.0 * theta)
    wT = coeffs.omega_z * T
    # α₀/(1+C_i) = r/α₀, which vanishes with α₀.
    prefactor = 2.0 * coeffs.C_g * (r / alpha0 if alpha0 > 0 else 0.0) / coeffs.omega_z
    correction = prefactor * (C_tan * (math.cos(wT) - 1.0) - C_cos2 * math.sin(wT))
    secular = 4.0 * coeffs.C_k * C * r * T
    bound = prefactor * (2.0 * abs(C_tan) + abs(C_cos2))
    return OscillatingDelta1(full=secular + correction, correction=correction, bound=bound)
