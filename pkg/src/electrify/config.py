"""Run configuration: one JSON file naming the artifacts and parameters.

Schema (see docs/config.md): paths to the feed archive, geo caches, drive
cycle, and surrogate model; the parameter profile name with optional
overrides; the random seed; the route allow-list. The ELECTRIFY_CONFIG
environment variable supplies the path when --config is omitted.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError, MissingInput

ENV_CONFIG_VAR = "ELECTRIFY_CONFIG"

_KNOWN_KEYS = {
    "feed", "distances", "elevations", "cycle", "model", "profile",
    "seed", "bus_size", "overrides", "routes", "city_id", "report", "report_csv",
}


@dataclass
class RunConfig:
    feed: str | None = None
    distances: str | None = None
    elevations: str | None = None
    cycle: str | None = None  # None = bundled synthetic stop-and-go cycle
    model: str | None = None
    profile: str = "boston"
    seed: int = 0
    bus_size: str = "40ft"
    overrides: dict = field(default_factory=dict)
    routes: list[str] = field(default_factory=list)  # allow-list of route short names
    city_id: str | None = None
    report: str | None = None
    report_csv: str | None = None
    base_dir: Path = field(default_factory=Path)

    def resolve(self, value: str | None) -> Path | None:
        if value is None:
            return None
        p = Path(value)
        return p if p.is_absolute() else self.base_dir / p

    def existing_path(self, name: str) -> Path:
        value = getattr(self, name)
        if value is None:
            raise MissingInput(f"--{name} (or config {name!r}) is required", field=name)
        p = self.resolve(value)
        if not p.exists():
            raise ConfigError(f"{name} file does not exist: {p}", field=name)
        return p


def load_run_config(path: str | Path | None) -> RunConfig:
    """Load a RunConfig; fall back to $ELECTRIFY_CONFIG, then to defaults."""
    if path is None:
        env = os.environ.get(ENV_CONFIG_VAR)
        if env:
            path = env
        else:
            return RunConfig()
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file does not exist: {p}", field="config")
    try:
        payload = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {p} is not valid JSON: {exc}", field="config") from exc
    if not isinstance(payload, dict):
        raise ConfigError(f"config file {p} must hold a JSON object", field="config")
    unknown = set(payload) - _KNOWN_KEYS
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(sorted(unknown))}", field="config")
    if "seed" in payload and not isinstance(payload["seed"], int):
        raise ConfigError("seed must be an integer", field="seed")
    if "routes" in payload and not isinstance(payload["routes"], list):
        raise ConfigError("routes must be a list of route short names", field="routes")
    if "overrides" in payload and not isinstance(payload["overrides"], dict):
        raise ConfigError("overrides must be an object", field="overrides")
    cfg = RunConfig(base_dir=p.parent)
    for key, value in payload.items():
        setattr(cfg, key, value)
    return cfg


def read_allow_list(path: str | Path) -> list[str]:
    """Route short names, one per line; blank lines and # comments ignored."""
    names = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        entry = line.split("#", 1)[0].strip()
        if entry:
            names.append(entry)
    return names
