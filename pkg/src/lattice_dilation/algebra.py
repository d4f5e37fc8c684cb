"""Normal-ordered ladder-operator polynomials and their open-system evolution.

A polynomial is stored as a mapping ``(m, n) -> coefficient`` standing for
``coefficient * a†^m a^n``.  Heisenberg evolution under each noise channel maps
a monomial to a finite sum of monomials with coefficients of the form
``t^k e^{λt}``; :class:`EvolvedPoly` keeps those as exact ``(k, λ)`` labels so
time integrals can later be done in closed form.
"""

from __future__ import annotations

import cmath
import enum
import math
from collections import defaultdict
from collections.abc import Callable, Iterator, Mapping
from dataclasses import dataclass

import numpy as np

from .states import SuperposedCoherentState
from .units import Coefficients, DomainError

__all__ = [
    "ChannelKind",
    "NoiseChannel",
    "NormalOrderedPoly",
    "EvolvedPoly",
    "multiply_normal_order",
    "evolve",
    "evolve_monomial",
    "CHANNEL_RULES",
    "coherent_overlap",
    "monomial_expectation",
    "expectation",
    "vk_poly",
    "wk_poly",
    "kinetic_poly",
]

PRUNE_RTOL = 1e-15


class ChannelKind(enum.Enum):
    FREE = "free"
    AMPLITUDE = "amplitude"
    PHASE = "phase"
    DIFFUSION = "diffusion"


@dataclass(frozen=True)
class NoiseChannel:
    """A Lindblad channel acting on the trap motion, with rate ``rate`` (1/s).

    The jump operators are √Γ·a (amplitude damping), √Γ·a†a (phase damping)
    and the pair √Γ·a, √Γ·a† (diffusion).
    """

    kind: ChannelKind = ChannelKind.FREE
    rate: float = 0.0

    def __post_init__(self) -> None:
        if not (self.rate >= 0 and math.isfinite(self.rate)):
            raise DomainError(f"{self.kind.value} rate must be non-negative, got {self.rate!r}")
        if self.kind is ChannelKind.FREE and self.rate != 0.0:
            raise DomainError("the free channel takes no rate")

    @classmethod
    def free(cls) -> NoiseChannel:
        return cls(ChannelKind.FREE)

    @classmethod
    def amplitude(cls, rate: float) -> NoiseChannel:
        return cls(ChannelKind.AMPLITUDE, float(rate))

    @classmethod
    def phase(cls, rate: float) -> NoiseChannel:
        return cls(ChannelKind.PHASE, float(rate))

    @classmethod
    def diffusion(cls, rate: float) -> NoiseChannel:
        return cls(ChannelKind.DIFFUSION, float(rate))

    def __str__(self) -> str:
        if self.kind is ChannelKind.FREE:
            return "free"
        return f"{self.kind.value}({self.rate:g})"


class NormalOrderedPoly(Mapping):
    """Immutable linear combination of normal-ordered monomials a†^m a^n."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[tuple[int, int], complex] | None = None):
        clean: dict[tuple[int, int], complex] = {}
        for (m, n), c in (terms or {}).items():
            if m < 0 or n < 0:
                raise ValueError(f"negative power in monomial {(m, n)}")
            clean[(int(m), int(n))] = clean.get((int(m), int(n)), 0) + complex(c)
        if clean:
            scale = max(abs(c) for c in clean.values())
            clean = {key: c for key, c in clean.items() if abs(c) > PRUNE_RTOL * scale}
        self._terms = clean

    @classmethod
    def identity(cls, coeff: complex = 1.0) -> NormalOrderedPoly:
        return cls({(0, 0): coeff})

    @classmethod
    def monomial(cls, m: int, n: int, coeff: complex = 1.0) -> NormalOrderedPoly:
        return cls({(m, n): coeff})

    def __getitem__(self, key: tuple[int, int]) -> complex:
        return self._terms[key]

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __repr__(self) -> str:
        body = " + ".join(f"({c:.6g})a†^{m}a^{n}" for (m, n), c in sorted(self._terms.items()))
        return f"NormalOrderedPoly({body or '0'})"

    def __add__(self, other: NormalOrderedPoly) -> NormalOrderedPoly:
        out = dict(self._terms)
        for key, c in other.items():
            out[key] = out.get(key, 0) + c
        return NormalOrderedPoly(out)

    def __sub__(self, other: NormalOrderedPoly) -> NormalOrderedPoly:
        return self + other.scale(-1.0)

    def __mul__(self, other):
        if isinstance(other, NormalOrderedPoly):
            return multiply_normal_order(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, factor: complex) -> NormalOrderedPoly:
        return NormalOrderedPoly({key: factor * c for key, c in self._terms.items()})

    def dagger(self) -> NormalOrderedPoly:
        """Hermitian conjugate: (m, n) -> (n, m) with conjugated coefficients."""
        return NormalOrderedPoly({(n, m): c.conjugate() for (m, n), c in self._terms.items()})

    def is_hermitian(self, rtol: float = 1e-14) -> bool:
        diff = self - self.dagger()
        scale = max((abs(c) for c in self.values()), default=0.0)
        return all(abs(c) <= rtol * scale for c in diff.values())

    def degree(self) -> int:
        return max((m + n for m, n in self._terms), default=0)

    def to_matrix(self, a: np.ndarray) -> np.ndarray:
        """Dense representation given a (truncated) annihilation matrix."""
        adag = a.conj().T
        out = np.zeros_like(a, dtype=complex)
        for (m, n), c in self._terms.items():
            out += c * np.linalg.matrix_power(adag, m) @ np.linalg.matrix_power(a, n)
        return out


def _reorder_coefficient(n: int, p: int, j: int) -> int:
    # a^n a†^p = Σ_j C(n,j) C(p,j) j! a†^{p-j} a^{n-j}
    return math.comb(n, j) * math.comb(p, j) * math.factorial(j)


def multiply_normal_order(P: NormalOrderedPoly, Q: NormalOrderedPoly) -> NormalOrderedPoly:
    """Exact normal-ordered product using [a, a†] = 1."""
    out: dict[tuple[int, int], complex] = defaultdict(complex)
    for (m, n), c in P.items():
        for (p, q), d in Q.items():
            for j in range(min(n, p) + 1):
                out[(m + p - j, n + q - j)] += c * d * _reorder_coefficient(n, p, j)
    return NormalOrderedPoly(out)


class EvolvedPoly(Mapping):
    """Sum of ``coeff · t^k · e^{λt} · a†^m a^n`` keyed by ``(m, n, k, λ)``."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[tuple[int, int, int, complex], complex]):
        self._terms = {key: complex(c) for key, c in terms.items() if c != 0}

    def __getitem__(self, key):
        return self._terms[key]

    def __iter__(self):
        return iter(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __repr__(self) -> str:
        return f"EvolvedPoly({self._terms!r})"

    def at(self, t: float) -> NormalOrderedPoly:
        """Evaluate the time dependence at a given ``t``."""
        out: dict[tuple[int, int], complex] = defaultdict(complex)
        for (m, n, k, lam), c in self._terms.items():
            out[(m, n)] += c * t**k * cmath.exp(lam * t)
        return NormalOrderedPoly(out)

    def dagger(self) -> EvolvedPoly:
        return EvolvedPoly(
            {(n, m, k, lam.conjugate()): c.conjugate() for (m, n, k, lam), c in self._terms.items()}
        )


Rule = Callable[[int, int, float, float], list[tuple[int, int, int, complex, float]]]


def _free_rule(m, n, omega_z, gamma):
    return [(m, n, 0, 1j * (m - n) * omega_z, 1.0)]


def _amplitude_rule(m, n, omega_z, gamma):
    return [(m, n, 0, 1j * (m - n) * omega_z - 0.5 * (m + n) * gamma, 1.0)]


def _phase_rule(m, n, omega_z, gamma):
    return [(m, n, 0, 1j * (m - n) * omega_z - 0.5 * (m - n) ** 2 * gamma, 1.0)]


def _diffusion_rule(m, n, omega_z, gamma):
    # Both powers drop together; each contraction brings one factor Γ·t.
    rotation = 1j * (m - n) * omega_z
    terms = []
    for j in range(min(m, n) + 1):
        weight = (
            math.factorial(m)
            * math.factorial(n)
            / (math.factorial(j) * math.factorial(m - j) * math.factorial(n - j))
        )
        terms.append((m - j, n - j, j, rotation, weight * gamma**j))
    return terms


CHANNEL_RULES: dict[ChannelKind, Rule] = {
    ChannelKind.FREE: _free_rule,
    ChannelKind.AMPLITUDE: _amplitude_rule,
    ChannelKind.PHASE: _phase_rule,
    ChannelKind.DIFFUSION: _diffusion_rule,
}


def evolve_monomial(
    m: int, n: int, channel: NoiseChannel, omega_z: float
) -> list[tuple[int, int, int, complex, float]]:
    """Heisenberg evolution of a†^m a^n as ``[(m', n', k, λ, weight), ...]``.

    Each entry stands for ``weight · t^k · e^{λt} · a†^{m'} a^{n'}``.
    """
    return CHANNEL_RULES[channel.kind](m, n, omega_z, channel.rate)


def evolve(P: NormalOrderedPoly, channel: NoiseChannel, omega_z: float) -> EvolvedPoly:
    """Apply the channel's monomial rule term by term."""
    out: dict[tuple[int, int, int, complex], complex] = defaultdict(complex)
    for (m, n), c in P.items():
        for mm, nn, k, lam, w in evolve_monomial(m, n, channel, omega_z):
            if w != 0.0:
                out[(mm, nn, k, lam)] += c * w
    return EvolvedPoly(out)


def coherent_overlap(beta: complex, alpha: complex) -> complex:
    """⟨β|α⟩ for coherent states."""
    return cmath.exp(-0.5 * abs(alpha) ** 2 - 0.5 * abs(beta) ** 2 + beta.conjugate() * alpha)


class _MonomialMoments:
    """Caches ⟨a†^m a^n⟩ for one state."""

    def __init__(self, state: SuperposedCoherentState):
        betas, weights = state.branches()
        self._pairs = []
        for j, bj in enumerate(betas):
            for k, bk in enumerate(betas):
                w = weights[j, k]
                if w != 0:
                    # Tr(a†^m a^n |b_j⟩⟨b_k|) = ⟨b_k|a†^m a^n|b_j⟩
                    self._pairs.append((complex(bk).conjugate(), complex(bj), w * coherent_overlap(bk, bj)))
        self._cache: dict[tuple[int, int], complex] = {}

    def __call__(self, m: int, n: int) -> complex:
        key = (m, n)
        if key not in self._cache:
            self._cache[key] = sum(w * cb**m * b**n for cb, b, w in self._pairs)
        return self._cache[key]


def monomial_expectation(state: SuperposedCoherentState):
    """Return a cached function ``(m, n) -> ⟨a†^m a^n⟩`` for ``state``."""
    return _MonomialMoments(state)


def expectation(P: NormalOrderedPoly, state: SuperposedCoherentState) -> complex:
    moments = monomial_expectation(state)
    return sum(c * moments(m, n) for (m, n), c in P.items())


def vk_poly(coeffs: Coefficients) -> NormalOrderedPoly:
    """Relativistic coupling divided by mc²: C_g(a+a†) − C_r + C_k(a²+a†²−2a†a−1)."""
    C_g, C_r, C_k = coeffs.C_g, coeffs.C_r, coeffs.C_k
    return NormalOrderedPoly(
        {
            (0, 1): C_g,
            (1, 0): C_g,
            (0, 0): -C_r - C_k,
            (0, 2): C_k,
            (2, 0): C_k,
            (1, 1): -2.0 * C_k,
        }
    )


def kinetic_poly(coeffs: Coefficients) -> NormalOrderedPoly:
    """p²/(m²c²) in ladder operators: −2C_k(a²+a†²−2a†a−1)."""
    C_k = coeffs.C_k
    return NormalOrderedPoly(
        {(0, 2): -2.0 * C_k, (2, 0): -2.0 * C_k, (1, 1): 4.0 * C_k, (0, 0): 2.0 * C_k}
    )


def wk_poly(coeffs: Coefficients) -> NormalOrderedPoly:
    """ħ·W/(m²c⁴) for the kinetic energy W = p²/2m.

    Expanding p²/2m gives W/(mc²) = −C_k(a²+a†²−2a†a−1).  The extra factor
    ħ/(mc²) turns its time integral into s², the unit in which it enters the
    clock state when energies are measured as angular frequencies.
    """
    return kinetic_poly(coeffs).scale(0.5 * coeffs.hbar_over_mc2)
