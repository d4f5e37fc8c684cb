"""Command-line front end.

Subcommands::

    params              derived lattice constants and α(d)
    sweep-displacement  discrepancy and variance versus displacement d
    sweep-noise         (Γ_a, Γ_d) grid with the detectability margin δ
    verify              closed forms vs exact engine vs Fock-space oracle

Exit codes: 0 ok, 1 failed check or I/O failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .algebra import ChannelKind, NoiseChannel
from .checks import VerifyRegime, corrupted_rule, run_verification
from .clock import combined_noise_report, detectability, discrepancy_margin
from .closedform import DilationReport, channel_report
from .integrals import engine_report
from .oracle import AdequacyError, coherent_vector
from .units import (
    PRESETS,
    AtomSpec,
    DimensionlessRegime,
    DomainError,
    LatticeDerived,
    LatticeSpec,
    derive_lattice,
    load_atom_presets,
)

__all__ = [
    "SweepConfig",
    "DISPLACEMENT_COLUMNS",
    "NOISE_COLUMNS",
    "JSON_SCHEMA_VERSION",
    "displacement_rows",
    "noise_rows",
    "read_sweep_json",
    "parse_length",
    "parse_angle",
    "main",
]

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
JSON_SCHEMA_VERSION = 1

DISPLACEMENT_COLUMNS = (
    "d_m",
    "alpha",
    "abs_Delta1_coh_s",
    "Delta2_cq_sq_s2",
    "relative_discrepancy",
    "detectability_ratio",
)
NOISE_COLUMNS = (
    "gamma_a_Hz",
    "gamma_d_Hz",
    "abs_Delta1_coh_s",
    "Delta2_cq_sq_s2",
    "delta_s",
    "added_variance_ratio",
)

_LENGTH_UNITS = {"": 1.0, "m": 1.0, "cm": 1e-2, "mm": 1e-3, "um": 1e-6, "µm": 1e-6, "nm": 1e-9, "pm": 1e-12}
_ANGLE = re.compile(r"^\s*([-+]?[0-9.]*(?:e[-+]?\d+)?)\s*\*?\s*pi\s*(?:/\s*([0-9.]+))?\s*$", re.I)


class UsageError(Exception):
    """Bad command-line or configuration input."""


def parse_length(text: str) -> float:
    """'10nm', '1.5 um', '2e-8' → metres."""
    match = re.fullmatch(r"\s*([-+]?[0-9.]+(?:[eE][-+]?\d+)?)\s*([a-zµ]*)\s*", str(text))
    if not match or match.group(2) not in _LENGTH_UNITS:
        raise argparse.ArgumentTypeError(f"not a length: {text!r} (use e.g. 10nm)")
    return float(match.group(1)) * _LENGTH_UNITS[match.group(2)]


def parse_angle(text: str) -> float:
    """Radians, accepting forms such as 'pi', 'pi/4', '3pi/4' or '0.785'."""
    match = _ANGLE.match(str(text))
    if match:
        lead = match.group(1)
        factor = float(lead) if lead not in ("", "+", "-") else (-1.0 if lead == "-" else 1.0)
        divisor = float(match.group(2)) if match.group(2) else 1.0
        return factor * math.pi / divisor
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an angle: {text!r}") from None


def _float_list(text: str) -> list[float]:
    return [float(x) for x in str(text).replace(",", " ").split()]


def _length_list(text: str) -> list[float]:
    return [parse_length(x) for x in str(text).replace(",", " ").split()]


def _check_grid(name: str, values) -> None:
    if len(values) == 0:
        raise UsageError(f"{name} grid is empty")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise UsageError(f"{name} grid must be strictly increasing")


@dataclass
class SweepConfig:
    """Everything a sweep needs; built from flags and an optional INI file."""

    atom: AtomSpec
    depth: float = 300.0
    T: float = 1.0
    theta: float = math.pi / 4
    phi: float = math.pi
    channel: str = "free"
    rate: float = 0.0
    displacements: list[float] = field(default_factory=list)
    gamma_a: list[float] = field(default_factory=list)
    gamma_d: list[float] = field(default_factory=list)
    include_oscillating: bool = False
    kappa: float = 1.0
    jobs: int = 1

    def derived(self) -> LatticeDerived:
        return derive_lattice(self.atom, LatticeSpec(self.depth, self.T))

    def noise_channel(self) -> NoiseChannel:
        kind = ChannelKind(self.channel)
        if kind is ChannelKind.FREE:
            return NoiseChannel.free()
        return NoiseChannel(kind, self.rate)


def _report(config: SweepConfig, derived: LatticeDerived, alpha0: float) -> DilationReport:
    channel = config.noise_channel()
    # At α₀ = 0 every branch is phase-invariant, so there are no oscillating
    # terms and the closed form is exact (it also covers the C_i = −1 limit).
    if config.include_oscillating and alpha0 > 0:
        return engine_report(
            channel, derived, alpha0, config.theta, config.phi, config.T, include_oscillating=True
        )
    return channel_report(channel, derived, alpha0, config.theta, config.phi, config.T)


def _displacement_row(args):
    config, derived, d = args
    alpha0 = derived.alpha(d)
    report = _report(config, derived, alpha0)
    ratio = detectability(report, derived.atom.clock_omega, config.T, config.kappa).ratio
    return (
        d,
        alpha0,
        abs(report.Delta1_coh),
        report.Delta2_cq_sq,
        abs(report.relative_discrepancy),
        ratio,
    )


def _noise_row(args):
    config, derived, alpha0, ga, gd, free = args
    report = combined_noise_report(derived, alpha0, config.theta, config.phi, config.T, ga, gd)
    omega0 = derived.atom.clock_omega
    added = 0.5 * omega0**2 * (report.Delta2_cq_sq - free.Delta2_cq_sq)
    return (
        ga,
        gd,
        abs(report.Delta1_coh),
        report.Delta2_cq_sq,
        discrepancy_margin(report),
        added,
    )


def _map(func, tasks, jobs: int) -> list:
    """Ordered map, optionally across processes."""
    if jobs <= 1:
        return [func(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(func, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))


def displacement_rows(config: SweepConfig) -> list[tuple[float, ...]]:
    _check_grid("displacement", config.displacements)
    if config.displacements[0] < 0:
        raise UsageError("displacements must be non-negative")
    derived = config.derived()
    return _map(_displacement_row, [(config, derived, d) for d in config.displacements], config.jobs)


def noise_rows(config: SweepConfig, d: float) -> list[tuple[float, ...]]:
    _check_grid("gamma_a", config.gamma_a)
    _check_grid("gamma_d", config.gamma_d)
    if config.gamma_a[0] < 0 or config.gamma_d[0] < 0:
        raise UsageError("rates must be non-negative")
    derived = config.derived()
    alpha0 = derived.alpha(d)
    free = channel_report(NoiseChannel.free(), derived, alpha0, config.theta, config.phi, config.T)
    tasks = [(config, derived, alpha0, ga, gd, free) for ga in config.gamma_a for gd in config.gamma_d]
    return _map(_noise_row, tasks, config.jobs)


def _fmt(x: float) -> str:
    # Shortest string that round-trips to the same double.
    return repr(float(x))


def _render(columns, rows, fmt: str, command: str, parameters: dict) -> str:
    if fmt == "json":
        doc = {
            "schema": JSON_SCHEMA_VERSION,
            "command": command,
            "parameters": parameters,
            "columns": list(columns),
            "rows": [dict(zip(columns, map(float, row))) for row in rows],
        }
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def read_sweep_json(path: str | Path) -> dict:
    """Load and validate a JSON sweep written by this tool."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("schema") != JSON_SCHEMA_VERSION:
        raise ValueError(f"unsupported schema {doc.get('schema')!r}")
    for key in ("command", "parameters", "columns", "rows"):
        if key not in doc:
            raise ValueError(f"missing key {key!r}")
    columns = doc["columns"]
    for row in doc["rows"]:
        if list(row) != columns:
            raise ValueError("row keys do not match columns")
    return doc


def _emit(text: str, output: str | None) -> None:
    if output in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        Path(output).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {output}: {exc.strerror or exc}") from exc


# --------------------------------------------------------------------------- parser


def _add_atom_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--atom", default="mg24", help="preset name (default mg24)")
    p.add_argument("--presets", help="INI file with extra atom presets")
    p.add_argument("--mass-amu", type=float, help="inline atom: mass in amu")
    p.add_argument("--wavelength-nm", type=float, help="inline atom: magic wavelength")
    p.add_argument("--clock-THz", type=float, help="inline atom: clock frequency")
    p.add_argument("--depth", type=float, default=300.0, help="trap depth in recoil energies")


def _add_sweep_options(p: argparse.ArgumentParser) -> None:
    _add_atom_options(p)
    p.add_argument("--T", type=float, default=1.0, help="interrogation time in s")
    p.add_argument("--theta", type=parse_angle, default=math.pi / 4, help="weight angle (e.g. pi/4)")
    p.add_argument("--phi", type=parse_angle, default=math.pi, help="relative phase (e.g. pi)")
    p.add_argument("--kappa", type=float, default=1.0, help="spread proportionality constant")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", "-o", help="output file (default stdout)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--config", help="INI file; section named after the subcommand")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lattice-dilation",
        description="Quantum-superposition effects on time dilation in optical lattice clocks.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("params", help="print derived lattice constants")
    _add_atom_options(p)
    p.add_argument("--d", type=parse_length, action="append", default=[], help="displacement, e.g. 10nm")
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.add_argument("--config", help="INI file; section [params]")

    p = sub.add_parser("sweep-displacement", help="Δ₁ and variance versus displacement")
    _add_sweep_options(p)
    p.add_argument("--channel", choices=[k.value for k in ChannelKind], default="free")
    p.add_argument("--rate", type=float, default=0.0, help="channel rate in Hz")
    p.add_argument("--d", type=_length_list, help="explicit displacements, e.g. '0nm 5nm 10nm'")
    p.add_argument("--d-min", type=parse_length, default=0.0)
    p.add_argument("--d-max", type=parse_length, default=30e-9)
    p.add_argument("--points", type=int, default=31)
    p.add_argument(
        "--include-oscillating",
        action="store_true",
        help="use exact integrals including oscillating terms",
    )

    p = sub.add_parser("sweep-noise", help="(Γ_a, Γ_d) grid with detectability margin")
    _add_sweep_options(p)
    p.add_argument("--d", type=parse_length, default=10e-9, help="displacement (default 10nm)")
    p.add_argument("--gamma-a", type=_float_list, help="explicit Γ_a values in Hz")
    p.add_argument("--gamma-d", type=_float_list, help="explicit Γ_d values in Hz")
    p.add_argument("--gamma-min", type=float, default=1e-2)
    p.add_argument("--gamma-max", type=float, default=1e2)
    p.add_argument("--gamma-points", type=int, default=9)

    p = sub.add_parser("verify", help="oracle and engine cross-checks (dimensionless regime)")
    p.add_argument("--T", type=_float_list, default=[20.0, 50.0], help="interrogation times")
    p.add_argument("--alpha", type=_float_list, default=[0.3, 0.8], help="coherent amplitudes")
    p.add_argument("--gamma", type=float, default=0.02, help="channel rate (units of omega_z)")
    p.add_argument("--dim", type=int, default=30, help="Fock-space dimension")
    p.add_argument("--grid", type=int, default=None, help="quadrature intervals")
    p.add_argument("--no-joint", action="store_true", help="skip the joint-channel check")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--config", help="INI file; section [verify]")
    p.add_argument("--corrupt", choices=[k.value for k in ChannelKind], help=argparse.SUPPRESS)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    """Parse twice: once to find --config, then with config values as defaults."""
    args = parser.parse_args(argv)
    if not getattr(args, "config", None):
        return args
    cfg = configparser.ConfigParser()
    try:
        with open(args.config, encoding="utf-8") as fh:
            cfg.read_file(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config {args.config}: {exc.strerror or exc}") from exc
    if not cfg.has_section(args.command):
        return args
    subparser = _subparser(parser, args.command)
    actions = {a.dest: a for a in subparser._actions}
    defaults = {}
    for key, raw in cfg[args.command].items():
        dest = key.replace("-", "_")
        action = actions.get(dest)
        if action is None or dest in ("config", "help"):
            raise UsageError(f"unknown key {key!r} in [{args.command}]")
        if isinstance(action, argparse._StoreTrueAction):
            defaults[dest] = cfg[args.command].getboolean(key)
        elif isinstance(action, argparse._AppendAction):
            defaults[dest] = [action.type(x) for x in raw.replace(",", " ").split()]
        else:
            try:
                defaults[dest] = action.type(raw) if action.type else raw
            except (argparse.ArgumentTypeError, ValueError) as exc:
                raise UsageError(f"bad value for {key!r}: {exc}") from exc
    subparser.set_defaults(**defaults)
    return parser.parse_args(argv)


def _subparser(parser: argparse.ArgumentParser, name: str) -> argparse.ArgumentParser:
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[name]
    raise KeyError(name)


def _resolve_atom(args) -> AtomSpec:
    inline = (args.mass_amu, args.wavelength_nm, args.clock_THz)
    if any(v is not None for v in inline):
        if any(v is None for v in inline):
            raise UsageError("inline atom needs --mass-amu, --wavelength-nm and --clock-THz")
        return AtomSpec.from_lab_units("custom", *inline)
    presets = dict(PRESETS)
    if args.presets:
        try:
            presets.update(load_atom_presets(args.presets))
        except OSError as exc:
            raise UsageError(f"cannot read presets {args.presets}: {exc.strerror or exc}") from exc
    if args.atom not in presets:
        raise UsageError(f"unknown atom {args.atom!r}; available presets: {', '.join(sorted(presets))}")
    return presets[args.atom]


# --------------------------------------------------------------------------- commands


def cmd_params(args) -> int:
    atom = _resolve_atom(args)
    derived = derive_lattice(atom, LatticeSpec(args.depth))
    values = {
        "atom": atom.name,
        "trap_depth_recoil": args.depth,
        "k_per_m": derived.k,
        "E_r_J": derived.E_r,
        "U_max_J": derived.U_max,
        "omega_z_rad_per_s": derived.omega_z,
        "z_s_m": derived.z_s,
        "C_g": derived.C_g,
        "C_r": derived.C_r,
        "C_k": derived.C_k,
        "hbar_over_mc2_s": derived.hbar_over_mc2,
        "clock_omega_rad_per_s": atom.clock_omega,
    }
    alphas = [{"d_m": d, "alpha": derived.alpha(d)} for d in args.d]
    if args.format == "json":
        doc = {"schema": JSON_SCHEMA_VERSION, "command": "params", "values": values, "alpha": alphas}
        sys.stdout.write(json.dumps(doc, indent=2) + "\n")
        return EXIT_OK
    width = max(len(k) for k in values)
    for key, value in values.items():
        shown = value if isinstance(value, str) else f"{value:.6g}"
        print(f"{key:<{width}}  {shown}")
    for entry in alphas:
        print(f"alpha(d={entry['d_m'] * 1e9:g} nm) = {entry['alpha']:.6g}")
    return EXIT_OK


def _sweep_config(args, **extra) -> SweepConfig:
    if args.T <= 0:
        raise UsageError("T must be positive")
    if args.kappa <= 0:
        raise UsageError("kappa must be positive")
    return SweepConfig(
        atom=_resolve_atom(args),
        depth=args.depth,
        T=args.T,
        theta=args.theta,
        phi=args.phi,
        kappa=args.kappa,
        jobs=args.jobs,
        **extra,
    )


def _parameters(config: SweepConfig, **more) -> dict:
    data = asdict(config)
    data["atom"] = config.atom.name
    for key in ("displacements", "gamma_a", "gamma_d"):
        data.pop(key)
    data.pop("jobs")
    data.update(more)
    return data


def cmd_sweep_displacement(args) -> int:
    if args.d is not None:
        grid = args.d
    else:
        if args.points < 1:
            raise UsageError("points must be at least 1")
        # Rounded to 15 digits so that e.g. 10 nm prints as 1e-08.
        grid = [float(f"{x:.15g}") for x in np.linspace(args.d_min, args.d_max, args.points)]
    if args.rate < 0:
        raise UsageError("rate must be non-negative")
    config = _sweep_config(
        args,
        channel=args.channel,
        rate=args.rate,
        displacements=[float(d) for d in grid],
        include_oscillating=args.include_oscillating,
    )
    rows = displacement_rows(config)
    text = _render(DISPLACEMENT_COLUMNS, rows, args.format, "sweep-displacement", _parameters(config))
    _emit(text, args.output)
    return EXIT_OK


def cmd_sweep_noise(args) -> int:
    if args.gamma_points < 1 or not 0 < args.gamma_min < args.gamma_max:
        raise UsageError("need 0 < gamma-min < gamma-max and gamma-points >= 1")
    log_grid = list(np.geomspace(args.gamma_min, args.gamma_max, args.gamma_points))
    config = _sweep_config(
        args,
        gamma_a=[float(x) for x in (args.gamma_a if args.gamma_a is not None else log_grid)],
        gamma_d=[float(x) for x in (args.gamma_d if args.gamma_d is not None else log_grid)],
    )
    rows = noise_rows(config, args.d)
    params = _parameters(config, d_m=args.d, gamma_a=config.gamma_a, gamma_d=config.gamma_d)
    _emit(_render(NOISE_COLUMNS, rows, args.format, "sweep-noise", params), args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        regime = VerifyRegime(
            coeffs=DimensionlessRegime(),
            T_values=tuple(args.T),
            alphas=tuple(args.alpha),
            gamma=args.gamma,
            dim=args.dim,
            grid=args.grid,
        )
    except DomainError as exc:
        raise UsageError(str(exc)) from exc
    for a in regime.alphas:
        coherent_vector(a, regime.dim)  # surfaces an adequacy error before any work

    if args.corrupt:
        with corrupted_rule(args.corrupt):
            results = run_verification(regime, joint=not args.no_joint)
    else:
        results = run_verification(regime, joint=not args.no_joint)

    ok = all(r.passed for r in results)
    if args.format == "json":
        doc = {
            "schema": JSON_SCHEMA_VERSION,
            "command": "verify",
            "passed": ok,
            "checks": [
                {
                    "name": r.name,
                    "error": r.error,
                    "threshold": None if r.informational else r.threshold,
                    "passed": r.passed,
                    "informational": r.informational,
                    "detail": r.detail,
                }
                for r in results
            ],
        }
        sys.stdout.write(json.dumps(doc, indent=2) + "\n")
    else:
        for r in results:
            print(r.line())
        failed = [r.name for r in results if not r.passed]
        print("all checks passed" if ok else f"FAILED: {', '.join(failed)}")
    return EXIT_OK if ok else EXIT_FAIL


_COMMANDS = {
    "params": cmd_params,
    "sweep-displacement": cmd_sweep_displacement,
    "sweep-noise": cmd_sweep_noise,
    "verify": cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = _apply_config(parser, argv)
        return _COMMANDS[args.command](args)
    except SystemExit as exc:  # argparse usage errors and --help
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    except AdequacyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
