"""Superpositions and mixtures of two opposite coherent states."""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

from .units import DomainError

__all__ = ["StateKind", "SuperposedCoherentState", "coherence_factor"]


class StateKind(enum.Enum):
    QUANTUM = "qtm"
    CLASSICAL = "cls"


@dataclass(frozen=True)
class SuperposedCoherentState:
    """Two-branch state built from |α⟩ and |−α⟩ with α = alpha0·e^{i·varphi}.

    The quantum kind is the normalised pure state
    ``cos(theta)|α⟩ + e^{i·phi} sin(theta)|−α⟩``; the classical kind is the
    mixture ``cos²(theta)|α⟩⟨α| + sin²(theta)|−α⟩⟨−α|``.
    """

    alpha0: float
    theta: float = math.pi / 4
    phi: float = math.pi
    varphi: float = 0.0
    kind: StateKind = StateKind.QUANTUM

    def __post_init__(self) -> None:
        if not (self.alpha0 >= 0 and math.isfinite(self.alpha0)):
            raise DomainError(f"alpha0 must be non-negative, got {self.alpha0!r}")
        if self.kind is StateKind.QUANTUM and 1.0 + self.C_i <= 0.0:
            raise DomainError("superposition is not normalisable (1 + C_i <= 0)")

    @classmethod
    def coherent(cls, alpha: complex) -> SuperposedCoherentState:
        """A single coherent state |α⟩."""
        return cls(abs(alpha), theta=0.0, phi=0.0, varphi=cmath.phase(alpha))

    @property
    def alpha(self) -> complex:
        return self.alpha0 * cmath.exp(1j * self.varphi)

    @property
    def C_i(self) -> float:
        return coherence_factor(self)

    def with_kind(self, kind: StateKind) -> SuperposedCoherentState:
        return SuperposedCoherentState(self.alpha0, self.theta, self.phi, self.varphi, kind)

    def branches(self) -> tuple[np.ndarray, np.ndarray]:
        """Branch amplitudes β_j and a weight matrix W with ρ = Σ W_jk |β_j⟩⟨β_k|.

        W already includes the normalisation.
        """
        betas = np.array([self.alpha, -self.alpha])
        c, s = math.cos(self.theta), math.sin(self.theta)
        if self.kind is StateKind.CLASSICAL:
            weights = np.diag([c * c, s * s]).astype(complex)
        else:
            amps = np.array([c, cmath.exp(1j * self.phi) * s])
            weights = np.outer(amps, amps.conj()) / (1.0 + self.C_i)
        return betas, weights


def coherence_factor(state: SuperposedCoherentState) -> float:
    """Interference weight e^{−2α₀²}·sin 2θ·cos φ."""
    return math.exp(-2.0 * state.alpha0**2) * math.sin(2.0 * state.theta) * math.cos(state.phi)
