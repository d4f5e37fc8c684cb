"""Brute-force reference calculations in a truncated Fock space.

Nothing here uses the ladder-operator rule table: operators are dense matrices,
open-system dynamics is the Lindblad equation integrated with fixed-step RK4,
and the dilation integrals are done by quadrature.  The trap rotation
``iω[a†a, ·]`` commutes with all three dissipators, so it is applied exactly
and RK4 only has to resolve the (slow) dissipative part.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np
from scipy.integrate import simpson
from scipy.special import gammaln

from .algebra import ChannelKind, NoiseChannel
from .states import SuperposedCoherentState
from .units import Coefficients, DomainError

__all__ = [
    "AdequacyError",
    "AccuracyError",
    "RegimeError",
    "FockSpace",
    "coherent_vector",
    "density_matrix",
    "adjoint_evolve_operator",
    "evolve_density",
    "oracle_I1_I2",
    "oracle_I1_I2_batch",
    "perturbative_clock_state",
    "ramsey_excited_probability",
]

DEFAULT_DIM = 40
MAX_PHASE = 1e3

# One channel, or several whose dissipators act simultaneously.
ChannelSpec = Union[NoiseChannel, tuple[NoiseChannel, ...]]


class AdequacyError(DomainError):
    """The truncated space is too small for the requested state."""


class AccuracyError(RuntimeError):
    """RK4 step-doubling estimate exceeded the requested tolerance."""

    def __init__(self, achieved: float, tolerance: float):
        super().__init__(
            f"RK4 error estimate {achieved:.3e} exceeds tolerance {tolerance:.3e}; use more steps"
        )
        self.achieved = achieved
        self.tolerance = tolerance


class RegimeError(DomainError):
    """Too many oscillations for quadrature; use the exact integral engine."""


@dataclass(frozen=True)
class FockSpace:
    dim: int
    a: np.ndarray
    adag: np.ndarray
    number: np.ndarray

    @classmethod
    def of(cls, dim: int) -> FockSpace:
        """Cached ladder operators for a space of dimension ``dim``."""
        return _fock(int(dim))


@lru_cache(maxsize=16)
def _fock(dim: int) -> FockSpace:
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)
    a.setflags(write=False)
    adag = a.conj().T.copy()
    adag.setflags(write=False)
    number = np.diag(np.arange(dim, dtype=float)).astype(complex)
    number.setflags(write=False)
    return FockSpace(dim, a, adag, number)


def coherent_vector(alpha: complex, dim: int = DEFAULT_DIM) -> np.ndarray:
    """Truncated e^{−|α|²/2} Σ αⁿ/√(n!) |n⟩."""
    if abs(alpha) ** 2 > dim / 4:
        raise AdequacyError(
            f"|alpha|^2 = {abs(alpha) ** 2:.3g} exceeds dim/4 = {dim / 4:g}; "
            f"use a Fock dimension of at least {math.ceil(4 * abs(alpha) ** 2)}"
        )
    n = np.arange(dim)
    if alpha == 0:
        vec = np.zeros(dim, dtype=complex)
        vec[0] = 1.0
        return vec
    log_mag = -0.5 * abs(alpha) ** 2 + n * math.log(abs(alpha)) - 0.5 * gammaln(n + 1)
    return np.exp(log_mag + 1j * n * np.angle(alpha))


def density_matrix(state: SuperposedCoherentState, dim: int = DEFAULT_DIM) -> np.ndarray:
    betas, weights = state.branches()
    vecs = [coherent_vector(b, dim) for b in betas]
    rho = np.zeros((dim, dim), dtype=complex)
    for j in range(2):
        for k in range(2):
            if weights[j, k] != 0:
                rho += weights[j, k] * np.outer(vecs[j], vecs[k].conj())
    return rho / np.trace(rho).real


def _as_channels(channel) -> tuple[NoiseChannel, ...]:
    if isinstance(channel, NoiseChannel):
        return (channel,)
    return tuple(channel)


def _is_unitary(channel) -> bool:
    return all(ch.kind is ChannelKind.FREE or ch.rate == 0 for ch in _as_channels(channel))


def _jump_operators(channel, space: FockSpace) -> list[np.ndarray]:
    """Jump operators for one channel or for several acting at once."""
    jumps = []
    for ch in _as_channels(channel):
        root = math.sqrt(ch.rate)
        if ch.kind is ChannelKind.AMPLITUDE:
            jumps.append(root * space.a)
        elif ch.kind is ChannelKind.PHASE:
            jumps.append(root * space.number)
        elif ch.kind is ChannelKind.DIFFUSION:
            jumps += [root * space.a, root * space.adag]
    return jumps


def _left(B: np.ndarray, X: np.ndarray) -> np.ndarray:
    """B @ X for a stack X of shape (..., N, N), as one 2-D matrix product."""
    n = X.shape[-1]
    flat = np.moveaxis(X, -2, 0).reshape(n, -1)
    return np.moveaxis((B @ flat).reshape((n,) + X.shape[:-2] + (n,)), 0, -2)


def _right(X: np.ndarray, B: np.ndarray) -> np.ndarray:
    """X @ B for a stack X of shape (..., N, N)."""
    n = X.shape[-1]
    return (X.reshape(-1, n) @ B).reshape(X.shape)


def _dissipators(channel: ChannelSpec, space: FockSpace):
    """Return (forward, adjoint) dissipator functions acting on (..., N, N) stacks.

    Every jump operator used here has a diagonal L†L, so the anticommutator
    part collapses to an elementwise product.
    """
    jumps = _jump_operators(channel, space)
    decay = np.zeros(space.dim, dtype=complex)
    for L in jumps:
        LdL = L.conj().T @ L
        if np.count_nonzero(LdL - np.diag(np.diag(LdL))):
            raise NotImplementedError("jump operators must have diagonal L†L")
        decay += np.diag(LdL)
    anti = 0.5 * (decay[:, None] + decay[None, :])

    def forward(rho):
        out = -anti * rho
        for L in jumps:
            out += _right(_left(L, rho), L.conj().T)
        return out

    def adjoint(A):
        out = -anti * A
        for L in jumps:
            out += _right(_left(L.conj().T, A), L)
        return out

    return forward, adjoint


def _rotation_phases(dim: int, omega: float, t: float) -> np.ndarray:
    n = np.arange(dim)
    return np.exp(1j * omega * t * (n[:, None] - n[None, :]))


def _stiffness(channel, dim: int) -> float:
    total = 0.0
    for ch in _as_channels(channel):
        if ch.kind is ChannelKind.PHASE:
            total += ch.rate * (dim - 1) ** 2 / 2
        else:
            total += ch.rate * 2 * dim
    return total


def _default_steps(channel, omega: float, t: float, dim: int) -> int:
    fastest = max([omega] + [ch.rate for ch in _as_channels(channel)])
    h = 1.0 / (20.0 * max(fastest, 1e-300))
    h = min(h, 1.0 / max(_stiffness(channel, dim), 1e-300))
    return max(1, math.ceil(abs(t) / h))


def _rk4(rhs, X0: np.ndarray, t: float, steps: int, record: int = 1) -> np.ndarray:
    """Fixed-step RK4; returns the state after every ``record`` steps (first = X0)."""
    h = t / steps
    X = X0.copy()
    out = [X0.copy()]
    for i in range(steps):
        k1 = rhs(X)
        k2 = rhs(X + 0.5 * h * k1)
        k3 = rhs(X + 0.5 * h * k2)
        k4 = rhs(X + h * k3)
        X = X + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if (i + 1) % record == 0:
            out.append(X.copy())
    return np.stack(out)


def _richardson(rhs, X0, t, steps, intervals, tol):
    """RK4 at ``steps`` and ``2*steps``; returns extrapolated samples on ``intervals``."""
    if steps % intervals:
        steps = intervals * math.ceil(steps / intervals)
    coarse = _rk4(rhs, X0, t, steps, steps // intervals)
    fine = _rk4(rhs, X0, t, 2 * steps, 2 * steps // intervals)
    scale = max(np.max(np.abs(fine)), 1e-300)
    estimate = float(np.max(np.abs(fine - coarse))) / 15.0 / scale
    if estimate > tol:
        raise AccuracyError(estimate, tol)
    return (16.0 * fine - coarse) / 15.0


def _dim_of(op: np.ndarray) -> int:
    if op.shape[-1] != op.shape[-2]:
        raise ValueError("operators must be square")
    return op.shape[-1]


def adjoint_evolve_operator(
    op: np.ndarray,
    channel: ChannelSpec,
    omega_z: float,
    t: float,
    steps: int | None = None,
    tol: float = 1e-9,
) -> np.ndarray:
    """Heisenberg-picture operator A[t] under the adjoint Lindblad equation.

    ``op`` may be a stack of operators with shape (..., N, N).
    """
    op = np.asarray(op, dtype=complex)
    dim = _dim_of(op)
    space = _fock(dim)
    rotation = _rotation_phases(dim, omega_z, t)
    if _is_unitary(channel) or t == 0:
        return op * rotation
    _, adjoint = _dissipators(channel, space)
    steps = steps or _default_steps(channel, omega_z, t, dim)
    final = _richardson(adjoint, op, t, steps, 1, tol)[-1]
    return final * rotation


def evolve_density(
    rho: np.ndarray,
    channel: ChannelSpec,
    omega_z: float,
    times: np.ndarray,
    steps_per_interval: int | None = None,
    tol: float = 1e-9,
) -> np.ndarray:
    """Schrödinger-picture ρ on a uniform grid ``times`` (starting at 0)."""
    rho = np.asarray(rho, dtype=complex)
    dim = _dim_of(rho)
    times = np.asarray(times, dtype=float)
    intervals = len(times) - 1
    T = float(times[-1])
    phases = np.stack([_rotation_phases(dim, omega_z, -t) for t in times])
    if _is_unitary(channel) or T == 0:
        traj = np.broadcast_to(rho, (len(times),) + rho.shape)
    else:
        forward, _ = _dissipators(channel, _fock(dim))
        if steps_per_interval is None:
            steps_per_interval = math.ceil(_default_steps(channel, omega_z, T, dim) / intervals)
        traj = _richardson(forward, rho, T, steps_per_interval * intervals, intervals, tol)
    # traj has shape (G+1, ..., N, N); broadcast phases over batch axes.
    extra = traj.ndim - 3
    return traj * phases.reshape(phases.shape[:1] + (1,) * extra + phases.shape[1:])


def _vk_matrix(coeffs: Coefficients, space: FockSpace) -> np.ndarray:
    a, ad, num = space.a, space.adag, space.number
    eye = np.eye(space.dim)
    return (
        coeffs.C_g * (a + ad)
        - coeffs.C_r * eye
        + coeffs.C_k * (a @ a + ad @ ad - 2.0 * num - eye)
    )


def _grid_size(T: float, omega: float, grid: int | None) -> int:
    if grid is None:
        grid = max(64, math.ceil(T * omega / 0.125))
    return grid + grid % 2


def oracle_I1_I2_batch(
    channel: ChannelSpec,
    coeffs: Coefficients,
    states: list[SuperposedCoherentState],
    T: float,
    grid: int | None = None,
    dim: int = DEFAULT_DIM,
    tol: float = 1e-9,
) -> tuple[np.ndarray, np.ndarray]:
    """I₁ and I₂ for several states sharing one channel and T.

    I₂ = 2∫∫_{s+u≤T} Tr(V[s]·V·ρ(u)) ds du with V[s] the Heisenberg-evolved
    coupling and ρ(u) the Schrödinger-evolved state, both sampled on one grid
    and integrated with Simpson's rule (inner over s, then outer over u).
    """
    omega = coeffs.omega_z
    if omega * T > MAX_PHASE:
        raise RegimeError(
            f"omega_z*T = {omega * T:.3g} exceeds {MAX_PHASE:g}; use the integral engine instead"
        )
    if T == 0:
        zeros = np.zeros(len(states), dtype=complex)
        return zeros, zeros.copy()
    G = _grid_size(T, omega, grid)
    h = T / G
    times = np.linspace(0.0, T, G + 1)
    space = _fock(dim)
    V = _vk_matrix(coeffs, space)

    rho0 = np.stack([density_matrix(s, dim) for s in states])
    rho_t = evolve_density(rho0, channel, omega, times, tol=tol)  # (G+1, S, N, N)
    V_s = _heisenberg_trajectory(V, channel, omega, times, tol)  # (G+1, N, N)

    # I₁ = ∫ Tr(V ρ(u)) du
    i1_samples = np.einsum("ab,gsba->gs", V, rho_t)
    I1 = simpson(i1_samples, dx=h, axis=0)

    # g[i, j, s] = Tr(V[s_i] · V ρ_s(u_j))
    M = np.einsum("ab,gsbc->gsac", V, rho_t)
    g = np.einsum("iab,jsba->ijs", V_s, M, optimize=True)
    inner = np.zeros((G + 1, len(states)), dtype=complex)
    for j in range(G):
        inner[j] = simpson(g[: G - j + 1, j], dx=h, axis=0)
    I2 = 2.0 * simpson(inner, dx=h, axis=0)
    return I1, I2


def _heisenberg_trajectory(V, channel, omega, times, tol):
    dim = V.shape[-1]
    phases = np.stack([_rotation_phases(dim, omega, t) for t in times])
    if _is_unitary(channel):
        return V[None] * phases
    _, adjoint = _dissipators(channel, _fock(dim))
    intervals = len(times) - 1
    steps = math.ceil(_default_steps(channel, omega, times[-1], dim) / intervals) * intervals
    return _richardson(adjoint, V, times[-1], steps, intervals, tol) * phases


def oracle_I1_I2(
    channel: ChannelSpec,
    coeffs: Coefficients,
    state: SuperposedCoherentState,
    T: float,
    grid: int | None = None,
    dim: int = DEFAULT_DIM,
) -> tuple[complex, complex]:
    I1, I2 = oracle_I1_I2_batch(channel, coeffs, [state], T, grid, dim)
    return complex(I1[0]), complex(I2[0])


_SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)  # basis (|e⟩, |g⟩)


def perturbative_clock_state(
    I1: complex,
    I2: complex,
    I2p: complex,
    rho_c0: np.ndarray,
    omega0: float,
    t: float,
    laser_omega: float | None = None,
) -> np.ndarray:
    """Clock density matrix to second order in the dilation integrals.

    Basis order is (|e⟩, |g⟩) and H_c = ω₀σ_z/2 (energies as angular
    frequencies).  With ``laser_omega`` the unperturbed evolution is taken in
    the frame rotating at the laser frequency; the corrections always use H_c.
    """
    rho_c0 = np.asarray(rho_c0, dtype=complex)
    H = 0.5 * omega0 * _SIGMA_Z
    drive = omega0 - (laser_omega if laser_omega is not None else 0.0)
    U = np.diag(np.exp(-0.5j * drive * t * np.array([1.0, -1.0])))
    rho = U @ rho_c0 @ U.conj().T

    first = -1j * (H @ rho) * I1
    second = 0.5 * (H @ rho @ H - H @ H @ rho) * I2 - 1j * (H @ H @ rho) * I2p
    return rho + first + first.conj().T + second + second.conj().T


def ramsey_excited_probability(rho_c: np.ndarray) -> float:
    """Excited population after an ideal closing π/2 pulse mapping |+⟩ → |e⟩."""
    plus = np.array([1.0, 1.0]) / math.sqrt(2.0)
    minus = np.array([-1.0, 1.0]) / math.sqrt(2.0)
    pulse = np.outer([1.0, 0.0], plus) + np.outer([0.0, 1.0], minus)
    after = pulse @ rho_c @ pulse.conj().T
    return float(after[0, 0].real)
