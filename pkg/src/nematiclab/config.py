"""Experiment configuration: a flat ``key = value`` text format.

One assignment per line; ``#`` starts a comment; blank lines are ignored.
The keys are exactly the fields of :class:`RunConfig`; any other key, a
repeated key or an unparsable value is reported with its line number.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

from .initial_data import SCENARIOS
from .timestepper import SCHEMES

__all__ = ["RunConfig", "ConfigError", "parse_config", "load_config", "format_config"]


class ConfigError(ValueError):
    """Malformed configuration; ``line`` is the 1-based offending line (or None)."""

    def __init__(self, message: str, line: int | None = None, source: str = "<config>"):
        where = f"{source}:{line}: " if line is not None else f"{source}: "
        super().__init__(where + message)
        self.line = line


@dataclass(frozen=True)
class RunConfig:
    dimension: int = 3
    resolution: int = 32
    box_len: float = 6.283185307179586
    s: float = 0.6
    eta: tuple = (0.0, 0.0, 1.0)
    scenario: str = "small_data"
    epsilon: float = 1e-2
    seed: int = 0
    dt: float = 1e-3
    t_end: float = 0.1
    snapshot_every: int = 10
    solver: str = "imex_euler"
    dealias: bool = True
    output_dir: str = "out"


def _bool(text: str) -> bool:
    low = text.lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _eta(text: str) -> tuple:
    parts = text.replace(",", " ").split()
    if not parts:
        raise ValueError("eta needs at least one component")
    return tuple(float(p) for p in parts)


_PARSERS = {
    "dimension": int,
    "resolution": int,
    "box_len": float,
    "s": float,
    "eta": _eta,
    "scenario": str,
    "epsilon": float,
    "seed": int,
    "dt": float,
    "t_end": float,
    "snapshot_every": int,
    "solver": str,
    "dealias": _bool,
    "output_dir": str,
}


def _check(values: dict, lines: dict, source: str) -> None:
    def fail(key, msg):
        raise ConfigError(f"{key}: {msg}", lines.get(key), source)

    if values["dimension"] not in (2, 3):
        fail("dimension", f"must be 2 or 3, got {values['dimension']}")
    if values["resolution"] < 8 or values["resolution"] % 2:
        fail("resolution", f"must be even and >= 8, got {values['resolution']}")
    for key in ("box_len", "epsilon", "dt", "t_end"):
        if not values[key] > 0:
            fail(key, f"must be positive, got {values[key]}")
    if values["s"] < 0:
        fail("s", f"must be nonnegative, got {values['s']}")
    if len(values["eta"]) != values["dimension"]:
        fail("eta", f"needs {values['dimension']} components, got {len(values['eta'])}")
    if not any(values["eta"]):
        fail("eta", "must be nonzero")
    if values["scenario"] not in SCENARIOS:
        fail("scenario", f"unknown scenario {values['scenario']!r}; expected one of {', '.join(SCENARIOS)}")
    if values["solver"] not in SCHEMES:
        fail("solver", f"unknown solver {values['solver']!r}; expected one of {', '.join(SCHEMES)}")
    if values["snapshot_every"] < 1:
        fail("snapshot_every", f"must be >= 1, got {values['snapshot_every']}")
    if values["t_end"] < values["dt"]:
        fail("t_end", f"must be >= dt ({values['dt']}), got {values['t_end']}")


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    values = {f.name: f.default for f in fields(RunConfig)}
    lines: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno, source)
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _PARSERS:
            raise ConfigError(f"unknown key {key!r}", lineno, source)
        if key in lines:
            raise ConfigError(f"duplicate key {key!r} (first set on line {lines[key]})", lineno, source)
        if not value:
            raise ConfigError(f"missing value for {key!r}", lineno, source)
        try:
            values[key] = _PARSERS[key](value)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}", lineno, source) from None
        lines[key] = lineno
    _check(values, lines, source)
    return RunConfig(**values)


def load_config(path) -> RunConfig:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", None, str(p)) from None
    return parse_config(text, str(p))


def format_config(cfg: RunConfig) -> str:
    """Serialize back to the text format (round-trips through :func:`parse_config`)."""
    out = []
    for f in fields(RunConfig):
        v = getattr(cfg, f.name)
        if f.name == "eta":
            v = ", ".join(repr(float(x)) for x in v)
        elif isinstance(v, bool):
            v = "true" if v else "false"
        elif isinstance(v, float):
            v = repr(v)
        out.append(f"{f.name} = {v}")
    return "\n".join(out) + "\n"
