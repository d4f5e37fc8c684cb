"""Physical constants, atom and lattice descriptions, and derived coefficients.

Everything downstream consumes a small set of dimensionless numbers: the trap
frequency ``omega_z`` together with the three coefficients ``C_g``, ``C_r`` and
``C_k`` that multiply the gravitational, gravity-shift and kinetic pieces of the
relativistic coupling written in ladder operators.  :func:`derive_lattice`
produces them from SI inputs; :class:`DimensionlessRegime` lets tests and the
verification suite pick them directly.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

from scipy import constants as _codata

__all__ = [
    "PhysicalConstants",
    "AtomSpec",
    "LatticeSpec",
    "LatticeDerived",
    "DimensionlessRegime",
    "Coefficients",
    "DomainError",
    "MG24",
    "SR87",
    "PRESETS",
    "derive_lattice",
    "displacement_to_alpha",
    "load_atom_presets",
]


class DomainError(ValueError):
    """Raised when an input lies outside the domain of a formula."""


def _require_positive(**values: float) -> None:
    for name, value in values.items():
        if not (value > 0 and math.isfinite(value)):
            raise DomainError(f"{name} must be positive and finite, got {value!r}")


@dataclass(frozen=True)
class PhysicalConstants:
    """SI constants.  Defaults are CODATA; ``g`` is standard gravity."""

    hbar: float = _codata.hbar
    c: float = _codata.c
    g: float = _codata.g
    amu: float = _codata.atomic_mass

    def __post_init__(self) -> None:
        _require_positive(hbar=self.hbar, c=self.c, g=self.g, amu=self.amu)


@dataclass(frozen=True)
class AtomSpec:
    """An atomic species trapped at its magic wavelength.

    ``clock_omega`` is the angular frequency of the clock transition.  It is an
    external constant (the standard clock-transition frequency), not something
    derived here.
    """

    name: str
    mass: float
    magic_wavelength: float
    clock_omega: float

    def __post_init__(self) -> None:
        _require_positive(
            mass=self.mass,
            magic_wavelength=self.magic_wavelength,
            clock_omega=self.clock_omega,
        )

    @classmethod
    def from_lab_units(
        cls,
        name: str,
        mass_amu: float,
        magic_wavelength_nm: float,
        clock_frequency_THz: float,
        consts: PhysicalConstants | None = None,
    ) -> AtomSpec:
        consts = consts or PhysicalConstants()
        return cls(
            name=name,
            mass=mass_amu * consts.amu,
            magic_wavelength=magic_wavelength_nm * 1e-9,
            clock_omega=2.0 * math.pi * clock_frequency_THz * 1e12,
        )


@dataclass(frozen=True)
class LatticeSpec:
    """Trap depth in recoil energies and the Ramsey interrogation time."""

    trap_depth_recoil: float = 300.0
    interrogation_time: float = 1.0

    def __post_init__(self) -> None:
        _require_positive(
            trap_depth_recoil=self.trap_depth_recoil,
            interrogation_time=self.interrogation_time,
        )


class Coefficients(Protocol):
    """What the operator-level code needs from a parameter set."""

    omega_z: float
    C_g: float
    C_r: float
    C_k: float
    hbar_over_mc2: float


@dataclass(frozen=True)
class LatticeDerived:
    """Every quantity derived from an atom in a lattice (SI units)."""

    atom: AtomSpec
    lattice: LatticeSpec
    consts: PhysicalConstants
    k: float
    E_r: float
    U_max: float
    omega_z: float
    z_s: float
    C_g: float
    C_r: float
    C_k: float

    @property
    def mass(self) -> float:
        return self.atom.mass

    @property
    def hbar_over_mc2(self) -> float:
        """ħ/(mc²) in seconds; converts an energy-weighted integral to s²."""
        return self.consts.hbar / (self.atom.mass * self.consts.c**2)

    def alpha(self, d: float) -> float:
        return displacement_to_alpha(d, self)


@dataclass(frozen=True)
class DimensionlessRegime:
    """Coefficients chosen directly, with ``omega_z`` setting the time unit.

    All results of the theory depend only on ``omega_z*T``, ``Gamma*T`` and the
    state parameters once the coefficients are fixed, so a regime with
    ``omega_z = 1`` exercises exactly the same formulas as a real lattice.
    """

    omega_z: float = 1.0
    C_g: float = 0.3
    C_r: float = 0.02
    C_k: float = 0.1
    hbar_over_mc2: float = 0.01

    def __post_init__(self) -> None:
        _require_positive(omega_z=self.omega_z)
        for name in ("C_g", "C_r", "C_k", "hbar_over_mc2"):
            if getattr(self, name) < 0:
                raise DomainError(f"{name} must be non-negative")


def derive_lattice(
    atom: AtomSpec,
    lattice: LatticeSpec | None = None,
    consts: PhysicalConstants | None = None,
) -> LatticeDerived:
    """Harmonic approximation of the lattice well and the coupling coefficients."""
    lattice = lattice or LatticeSpec()
    consts = consts or PhysicalConstants()
    m = atom.mass
    hbar, c, g = consts.hbar, consts.c, consts.g

    k = 2.0 * math.pi / atom.magic_wavelength
    E_r = 2.0 * math.pi**2 * hbar**2 / (m * atom.magic_wavelength**2)
    U_max = lattice.trap_depth_recoil * E_r
    omega_z = math.sqrt(2.0 * U_max / m) * k
    z_s = math.sqrt(hbar / (m * omega_z))

    return LatticeDerived(
        atom=atom,
        lattice=lattice,
        consts=consts,
        k=k,
        E_r=E_r,
        U_max=U_max,
        omega_z=omega_z,
        z_s=z_s,
        C_g=g * z_s / (math.sqrt(2.0) * c**2),
        C_r=g**2 / (omega_z**2 * c**2),
        C_k=hbar * omega_z / (4.0 * m * c**2),
    )


def displacement_to_alpha(d: float, derived: LatticeDerived) -> float:
    """Coherent amplitude whose centre sits a distance ``d`` from the trap minimum."""
    if d < 0:
        raise DomainError(f"displacement must be non-negative, got {d!r}")
    return d / (math.sqrt(2.0) * derived.z_s)


# Clock frequencies are the standard optical clock transitions (external data).
MG24 = AtomSpec.from_lab_units("mg24", 24.0, 468.0, 655.0)
SR87 = AtomSpec.from_lab_units("sr87", 87.0, 813.0, 429.228)

PRESETS: dict[str, AtomSpec] = {MG24.name: MG24, SR87.name: SR87}

_PRESET_KEYS = ("mass_amu", "magic_wavelength_nm", "clock_frequency_THz")


def load_atom_presets(path: str | Path) -> dict[str, AtomSpec]:
    """Read atom presets from an INI file.

    Each section is one atom; the section name is used unless a ``name`` key
    is present::

        [yb171]
        mass_amu = 171
        magic_wavelength_nm = 759.35
        clock_frequency_THz = 518.295
    """
    parser = configparser.ConfigParser()
    with open(path, encoding="utf-8") as fh:
        parser.read_file(fh)
    atoms: dict[str, AtomSpec] = {}
    for section in parser.sections():
        entry = parser[section]
        missing = [key for key in _PRESET_KEYS if key not in entry]
        if missing:
            raise DomainError(f"preset [{section}] is missing {', '.join(missing)}")
        name = entry.get("name", section)
        atoms[name] = AtomSpec.from_lab_units(
            name,
            entry.getfloat("mass_amu"),
            entry.getfloat("magic_wavelength_nm"),
            entry.getfloat("clock_frequency_THz"),
        )
    return atoms
