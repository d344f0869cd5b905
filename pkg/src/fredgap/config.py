"""Run configuration for the command-line front end.

Values are resolved with the precedence flags > config file > defaults. The
config file is plain ``key = value`` text; ``#`` starts a comment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .errors import ConfigurationError

ROUTES = ("closed_form", "double_contour", "t_integral")
FORMATS = ("csv", "json")


@dataclass(frozen=True)
class RunConfig:
    """Settings shared by all subcommands.

    ``None`` for ``order``, ``panels``, ``truncation`` or ``route`` means "use
    the library default for this experiment".
    """

    order: int | None = None
    panels: int | None = None
    truncation: float | None = None
    tol: float | None = None
    route: str | None = None
    threads: int = 1
    format: str = "csv"
    out: str | None = None
    deterministic: bool = True

    def __post_init__(self):
        if self.order is not None and self.order < 1:
            raise ConfigurationError("order must be >= 1")
        if self.panels is not None and self.panels < 1:
            raise ConfigurationError("panels must be >= 1")
        if self.truncation is not None and not (self.truncation > 0 and math.isfinite(self.truncation)):
            raise ConfigurationError("truncation must be positive and finite")
        if self.tol is not None and not self.tol > 0:
            raise ConfigurationError("tolerance must be positive")
        if self.threads < 1:
            raise ConfigurationError("thread count must be >= 1")
        if self.route is not None and self.route not in ROUTES:
            raise ConfigurationError(f"route must be one of {ROUTES}")
        if self.format not in FORMATS:
            raise ConfigurationError(f"format must be one of {FORMATS}")

    def tolerance(self, default: float) -> float:
        return default if self.tol is None else self.tol


_FIELDS = {f.name: f for f in fields(RunConfig)}
_CASTS = {
    "order": int, "panels": int, "threads": int,
    "truncation": float, "tol": float,
    "route": str, "format": str, "out": str,
}


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigurationError(f"not a boolean: {text!r}")


def coerce(key: str, raw: str):
    """Convert a textual value for ``key`` to the field's type."""
    if key not in _FIELDS:
        raise ConfigurationError(f"unknown config key {key!r}")
    if raw.strip().lower() in ("", "none", "default"):
        return None
    if key == "deterministic":
        return _parse_bool(raw)
    try:
        return _CASTS[key](raw.strip())
    except ValueError as exc:
        raise ConfigurationError(f"bad value for {key}: {raw!r}") from exc


def parse_config_text(text: str) -> dict:
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected key = value")
        key, raw = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        out[key] = coerce(key, raw)
    return out


def load_config_file(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file {path}: {exc}") from exc
    return parse_config_text(text)


def resolve_config(flags: dict | None = None, path=None, base: RunConfig | None = None) -> RunConfig:
    """Defaults, overridden by the file at ``path``, overridden by non-None ``flags``."""
    cfg = base or RunConfig()
    if path is not None:
        file_values = {k: v for k, v in load_config_file(path).items() if v is not None}
        cfg = replace(cfg, **file_values)
    overrides = {k: v for k, v in (flags or {}).items() if v is not None and k in _FIELDS}
    return replace(cfg, **overrides)
