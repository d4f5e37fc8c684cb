"""Observable clock quantities built from the dilation integrals.

Ramsey fringes, the frequency discrepancy between the cat state and the
classical mixture, a detectability ratio, idealized-clock moments and the
classical proper time of a Gaussian wavepacket.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .algebra import NoiseChannel
from .closedform import DilationReport, amplitude_report, diffusion_report, free_report
from .units import Coefficients, DomainError, LatticeDerived

__all__ = [
    "ContrastWarning",
    "FringeModel",
    "fringe_model",
    "fringe_probability",
    "DetectabilityResult",
    "detectability",
    "accuracy_ratio",
    "ClockMoments",
    "IdealizedMoments",
    "CoherentIdealized",
    "idealized_clock_moments",
    "coherent_idealized_moments",
    "state_independent_variance",
    "discrepancy_margin",
    "combined_noise_report",
    "classical_proper_time",
]


class ContrastWarning(UserWarning):
    """The second-order contrast loss is too large to trust."""


@dataclass(frozen=True)
class FringeModel:
    """Ramsey fringe ½(1 + p̃ cos((ω̃₀ − ω)T)).

    The shift ω̃₀ − ω₀ = ω₀I₁/T is stored on its own: at optical frequencies
    it is far below the resolution of ω̃₀ as a double.
    """

    omega0: float
    T: float
    shift: float
    contrast: float
    report: DilationReport | None = None

    @property
    def omega0_tilde(self) -> float:
        return self.omega0 + self.shift


def fringe_model(
    I1: float,
    I2: float,
    omega0: float,
    T: float,
    report: DilationReport | None = None,
) -> FringeModel:
    """Shifted frequency ω̃₀ = ω₀(1 + I₁/T) and contrast p̃ = 1 − ω₀²(Re I₂ − I₁²)/2."""
    if T <= 0:
        raise DomainError("T must be positive")
    loss = 0.5 * omega0**2 * (complex(I2).real - I1 * I1)
    if loss > 0.5:
        warnings.warn(
            f"contrast loss {loss:.3g} exceeds 0.5; second-order fringe is unreliable",
            ContrastWarning,
            stacklevel=2,
        )
    return FringeModel(
        omega0=omega0,
        T=T,
        shift=omega0 * I1 / T,
        contrast=1.0 - loss,
        report=report,
    )


def fringe_probability(omega: float, model: FringeModel) -> float:
    detuning = (model.omega0 - omega) + model.shift
    value = 0.5 * (1.0 + model.contrast * math.cos(detuning * model.T))
    return min(1.0, max(0.0, value))


@dataclass(frozen=True)
class DetectabilityResult:
    discrepancy: float
    sigma_coh: float
    ratio: float
    detectable: bool
    kappa: float


def detectability(
    report: DilationReport, omega0: float, T: float | None = None, kappa: float = 1.0
) -> DetectabilityResult:
    """Compare the frequency discrepancy with the combined frequency spread.

    ``kappa`` is the proportionality constant in the spread, which the
    addition-of-quadratures argument leaves undetermined.
    """
    if kappa <= 0:
        raise DomainError("kappa must be positive")
    T = report.T if T is None else T
    shift = report.Delta1_coh / T * omega0
    sigma = kappa * math.sqrt(2.0 / T**2 + omega0**2 * report.Delta2_cq_sq / T**2)
    ratio = abs(shift) / sigma
    return DetectabilityResult(shift, sigma, ratio, ratio >= 1.0, kappa)


def accuracy_ratio(report: DilationReport, relative_accuracy: float) -> float:
    """|Δ₁,coh|/T in units of a clock's fractional accuracy."""
    if relative_accuracy <= 0:
        raise DomainError("relative_accuracy must be positive")
    return abs(report.relative_discrepancy) / relative_accuracy


@dataclass(frozen=True)
class ClockMoments:
    """Initial moments of an idealized clock: ⟨T_c⟩, σ_c², ⟨{T_c, H_c}⟩, ⟨H_c⟩."""

    T_mean: float = 0.0
    T_variance: float = 0.0
    TH_anticommutator: float = 0.0
    H_mean: float = 0.0

    @property
    def covariance_weight(self) -> float:
        return self.TH_anticommutator - 2.0 * self.T_mean * self.H_mean


@dataclass(frozen=True)
class IdealizedMoments:
    mean: float
    variance: float


def idealized_clock_moments(
    I1: float, I2: complex, I2p: float, clock: ClockMoments, t: float
) -> IdealizedMoments:
    """Time-operator mean and variance of an idealized clock to second order.

    Both moments carry a clock-state-dependent part proportional to
    Σ₂ = Im I₂ + 2I₂′: the mean shifts by ⟨H_c⟩Σ₂, and the variance by
    Σ₂(⟨{T_c, H_c}⟩ − 2⟨T_c⟩⟨H_c⟩), which is real for any state.  For a clock
    with ⟨H_c⟩ = 0 the mean reduces to ⟨T_c⟩(0) + t + I₁.
    """
    I2 = complex(I2)
    sigma2 = I2.imag + 2.0 * I2p
    mean = clock.T_mean + t + I1 + clock.H_mean * sigma2
    variance = clock.T_variance + I2.real - I1 * I1 + sigma2 * clock.covariance_weight
    return IdealizedMoments(mean, variance)


def state_independent_variance(delta2_qtm_sq: float, delta2_cls_sq: float) -> float:
    """σ²_coh,i, the part of the combined variance that ignores the clock state."""
    return delta2_qtm_sq + delta2_cls_sq


@dataclass(frozen=True)
class CoherentIdealized:
    discrepancy: float
    variance: float
    independent: float

    @property
    def dependent(self) -> float:
        return self.variance - self.independent


def coherent_idealized_moments(
    qtm: tuple[float, complex, float],
    cls: tuple[float, complex, float],
    clock: ClockMoments,
    t: float,
) -> CoherentIdealized:
    """Discrepancy and summed variance for cat state vs mixture.

    ``qtm`` and ``cls`` are (I₁, I₂, I₂′) triples for the two motional states.
    """
    q = idealized_clock_moments(*qtm, clock, t)
    c = idealized_clock_moments(*cls, clock, t)
    independent = state_independent_variance(
        complex(qtm[1]).real - qtm[0] * qtm[0], complex(cls[1]).real - cls[0] * cls[0]
    )
    return CoherentIdealized(q.mean - c.mean, q.variance + c.variance, independent)


def discrepancy_margin(report: DilationReport) -> float:
    """δ = |⟨T_c⟩_coh| − σ_coh,i; the discrepancy stands out when δ > 0."""
    sigma2 = state_independent_variance(report.Delta2_qtm_sq, report.Delta2_cls_sq)
    return abs(report.Delta1_coh) - math.sqrt(max(sigma2, 0.0))


def combined_noise_report(
    coeffs: Coefficients,
    alpha0: float,
    theta: float,
    phi: float,
    T: float,
    gamma_a: float,
    gamma_d: float,
) -> DilationReport:
    """Amplitude damping and diffusion treated as independent additions.

    Δ₁ and the integrals come from the amplitude form; the variances add the
    diffusion increment over the free channel.  No joint closed form exists,
    so this is a first-order composition in the two rates.
    """
    amp = amplitude_report(coeffs, alpha0, theta, phi, T, gamma_a)
    if gamma_d == 0:
        return amp
    diff = diffusion_report(coeffs, alpha0, theta, phi, T, gamma_d)
    free = free_report(coeffs, alpha0, theta, phi, T)
    extra_q = diff.Delta2_qtm_sq - free.Delta2_qtm_sq
    extra_c = diff.Delta2_cls_sq - free.Delta2_cls_sq
    return DilationReport(
        channel=NoiseChannel.amplitude(gamma_a),
        T=T,
        alpha0=alpha0,
        theta=theta,
        phi=phi,
        I1_qtm=amp.I1_qtm,
        I1_cls=amp.I1_cls,
        I2_qtm=amp.I2_qtm + (diff.I2_qtm - free.I2_qtm),
        I2_cls=amp.I2_cls + (diff.I2_cls - free.I2_cls),
        Delta1_coh=amp.Delta1_coh,
        Delta2_qtm_sq=amp.Delta2_qtm_sq + extra_q,
        Delta2_cls_sq=amp.Delta2_cls_sq + extra_c,
    )


def classical_proper_time(
    z0: float,
    p0: float,
    sigma_p2: float,
    derived: LatticeDerived,
    T: float,
    augment_variance: bool = True,
    sigma_z2: float | None = None,
) -> float:
    """I₀ = (1/mc²)∫₀ᵀ (m g z̄ − p̄²/2m) dt along the classical trajectory, in s.

    ``z0`` is the initial height measured from the gravity-shifted trap
    minimum, the same origin as the ladder operators.  With
    ``augment_variance`` the momentum spread σ_p²(t) of a Gaussian is added to
    p̄².  Its partner σ_z² defaults to the minimum-uncertainty value
    ħ²/(4σ_p²), for which a coherent state keeps σ_p² constant.
    """
    m = derived.mass
    w = derived.omega_z
    g = derived.consts.g
    c2 = derived.consts.c**2
    hbar = derived.consts.hbar
    if T < 0:
        raise DomainError("T must be non-negative")

    sin_t, cos_t = math.sin(w * T), math.cos(w * T)
    sin_2t = math.sin(2.0 * w * T)
    # z(t) = −g/ω² + z0 cos ωt + (p0/mω) sin ωt ; p(t) = −mω z0 sin ωt + p0 cos ωt
    z_int = -g * T / w**2 + z0 * sin_t / w + p0 / (m * w) * (1.0 - cos_t) / w
    cos2_int = 0.5 * T + sin_2t / (4.0 * w)
    sin2_int = 0.5 * T - sin_2t / (4.0 * w)
    p2_int = (m * w * z0) ** 2 * sin2_int + p0**2 * cos2_int - m * z0 * p0 * sin_t**2
    if augment_variance and sigma_p2 > 0:
        if sigma_z2 is None:
            sigma_z2 = hbar**2 / (4.0 * sigma_p2)
        p2_int += sigma_p2 * cos2_int + (m * w) ** 2 * sigma_z2 * sin2_int
    return g * z_int / c2 - p2_int / (2.0 * m * m * c2)
