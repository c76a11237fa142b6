"""
INI-style run configuration.

Molecular constants are given in cm^-1 (B, C) and Debye (mu) and converted
once, here, to internal units.  Horizon and track times are in units of
1/B, track frequencies in units of B.  Unknown sections or keys are errors.

Example::

    [molecule]
    kind = symmetric
    B = 5.182
    C = 0.852
    mu = 1.847

    [basis]
    jmax = 12

    [initial]
    state = 0,0,0

    [tracks]
    kind = gaussian

    [grid]
    horizon = 5
    steps = 10000

    [output]
    name = fluoromethane_000
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import DomainError, QTCError
from .rotor import RotorSpec
from .simulator import SimulationConfig
from .tracks import TrackSet, load_tabulated_track, orientation_tracks, zero_tracks
from .units import UnitSystem

SCHEMA = {
    "molecule": {"name": False, "kind": False, "B": True, "C": False, "mu": True},
    "basis": {"jmax": True, "restrict_k_block": False},
    "initial": {"state": True},
    "tracks": {"kind": False, "amplitude": False, "frequency": False,
               "x_file": False, "y_file": False, "z_file": False},
    "grid": {"horizon": True, "steps": True},
    "solver": {"guard": False, "boundary_tol": False, "compat_tol": False, "step_tol": False},
    "output": {"dir": False, "name": False, "plots": False, "plot_format": False},
}
OPTIONAL_SECTIONS = {"solver", "output"}


class ConfigError(QTCError):
    pass


@dataclass(frozen=True)
class RunConfig:
    simulation: SimulationConfig
    units: UnitSystem
    name: str
    out_dir: Path
    plots: bool = True
    plot_format: str = "svg"
    molecule: str = ""


def bundled_configs() -> dict[str, Path]:
    root = resources.files("qtc_rotor") / "configs"
    return {p.name[:-4]: Path(str(p)) for p in root.iterdir() if p.name.endswith(".ini")}


def resolve_config(name_or_path: str) -> Path:
    path = Path(name_or_path)
    if path.exists():
        return path
    bundled = bundled_configs()
    if name_or_path in bundled:
        return bundled[name_or_path]
    raise ConfigError(f"no config file or bundled config named {name_or_path!r}")


def parse_state(text: str) -> tuple[int, int, int]:
    try:
        parts = tuple(int(p) for p in text.replace(" ", "").split(","))
    except ValueError:
        raise ConfigError(f"state must be 'J,K,M' integers, got {text!r}") from None
    if len(parts) == 2:  # linear rotor |J M>
        parts = (parts[0], 0, parts[1])
    if len(parts) != 3:
        raise ConfigError(f"state must be 'J,K,M', got {text!r}")
    return parts


def _get(cp, section, key, conv, default=None):
    if not cp.has_option(section, key):
        return default
    raw = cp.get(section, key)
    try:
        if conv is bool:
            return cp.getboolean(section, key)
        return conv(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: cannot parse {raw!r}") from None


def load_config(path, jmax=None, steps=None, initial=None, out_dir=None, plots=None) -> RunConfig:
    """Parse and validate a config file; keyword arguments override its values."""
    path = Path(path)
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    cp.optionxform = str
    try:
        with path.open() as fh:
            cp.read_file(fh)
    except (configparser.Error, OSError) as exc:
        raise ConfigError(f"{path}: {exc}") from None

    for section in cp.sections():
        if section not in SCHEMA:
            raise ConfigError(f"{path}: unknown section [{section}]")
        for key in cp.options(section):
            if key not in SCHEMA[section]:
                raise ConfigError(f"{path}: unknown key [{section}] {key}")
    for section, keys in SCHEMA.items():
        if not cp.has_section(section):
            if section in OPTIONAL_SECTIONS:
                continue
            raise ConfigError(f"{path}: missing section [{section}]")
        for key, required in keys.items():
            if required and not cp.has_option(section, key):
                raise ConfigError(f"{path}: missing key [{section}] {key}")

    kind = _get(cp, "molecule", "kind", str, "symmetric")
    B_cm = _get(cp, "molecule", "B", float)
    mu_d = _get(cp, "molecule", "mu", float)
    if not (B_cm and B_cm > 0 and mu_d and mu_d > 0):
        raise ConfigError(f"{path}: [molecule] B and mu must be positive")
    C_cm = _get(cp, "molecule", "C", float, B_cm)
    units = UnitSystem(B_cm, mu_d)

    jmax = jmax if jmax is not None else _get(cp, "basis", "jmax", int)
    state = initial if initial is not None else parse_state(cp.get("initial", "state"))
    horizon = _get(cp, "grid", "horizon", float)
    steps = steps if steps is not None else _get(cp, "grid", "steps", int)

    try:
        rotor = RotorSpec(kind, 1.0, units.energy_to_internal(C_cm), 1.0, jmax)
        tracks = _tracks(cp, path, horizon)
        sim = SimulationConfig(
            rotor, tuple(state), tracks, horizon, steps,
            guard=_get(cp, "solver", "guard", float, 1e8),
            boundary_tol=_get(cp, "solver", "boundary_tol", float, 1e-8),
            compat_tol=_get(cp, "solver", "compat_tol", float, 1e-3),
            step_tol=_get(cp, "solver", "step_tol", float, 1e-10),
            restrict_k_block=_get(cp, "basis", "restrict_k_block", bool, True),
        )
    except DomainError as exc:
        raise ConfigError(f"{path}: {exc}") from None

    name = _get(cp, "output", "name", str, path.stem)
    out = Path(out_dir) if out_dir is not None else Path(_get(cp, "output", "dir", str, "out"))
    do_plots = plots if plots is not None else _get(cp, "output", "plots", bool, True)
    fmt = _get(cp, "output", "plot_format", str, "svg")
    if fmt not in ("svg", "pdf", "png"):
        raise ConfigError(f"{path}: [output] plot_format must be svg, pdf or png")
    return RunConfig(sim, units, name, out, do_plots, fmt, _get(cp, "molecule", "name", str, ""))


def _tracks(cp, path: Path, horizon: float) -> TrackSet:
    kind = _get(cp, "tracks", "kind", str, "gaussian")
    if kind == "gaussian":
        return orientation_tracks(
            horizon,
            _get(cp, "tracks", "amplitude", float, 0.2),
            _get(cp, "tracks", "frequency", float, 8.0),
        )
    if kind == "zero":
        return zero_tracks()
    if kind == "tabulated":
        files = []
        for key in ("x_file", "y_file", "z_file"):
            if not cp.has_option("tracks", key):
                raise ConfigError(f"{path}: tabulated tracks need [tracks] {key}")
            f = Path(cp.get("tracks", key))
            files.append(f if f.is_absolute() else path.parent / f)
        return TrackSet(*(load_tabulated_track(f) for f in files))
    raise ConfigError(f"{path}: [tracks] kind must be gaussian, zero or tabulated, got {kind!r}")
