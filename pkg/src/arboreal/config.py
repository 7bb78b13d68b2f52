"""Experiment configuration files (TOML).

Example::

    d = 5
    seed = 0

    [local_group]
    generators = ["(1 2 3 4 5)", "(2 5)(3 4)"]

    [parabolic]
    kind = "full"
    xi = "|12"

    [schedule]
    n_max = 8
    depth = 1

    [thresholds]
    threshold = "1/100"

Keys under ``[schedule]``, ``[thresholds]``, ``[portraits]`` and ``[output]``
may also be given at top level.  Numbers may be written as exact fractions in
strings ("1/4").
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import tomli

from .automorphism import Portrait
from .local_action import LocalGroup
from .parabolic import Kind, ParabolicSpec
from .tree import BoundaryPoint, check_degree, vertex


class ConfigError(ValueError):
    pass


def parse_number(value) -> Fraction:
    try:
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"not an exact number: {value!r}") from exc


def _lookup(data: dict, section: str, key: str, default=None):
    if isinstance(data.get(section), dict) and key in data[section]:
        return data[section][key]
    return data.get(key, default)


@dataclass
class ExperimentConfig:
    d: int
    F: LocalGroup
    H: ParabolicSpec | None
    f1: Portrait | None = None
    f2: Portrait | None = None
    n_min: int = 1
    n_max: int = 8
    depth: int = 1
    threshold: Fraction = Fraction(1, 100)
    seed: int = 0
    output: str | None = None


def load_portrait(path: str | Path, base: Path | None = None) -> Portrait:
    p = Path(path)
    if base is not None and not p.is_absolute():
        p = base / p
    try:
        return Portrait.from_json(p.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read portrait file {p}: {exc}") from exc
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"bad portrait file {p}: {exc}") from exc


def from_dict(data: dict, base: Path | None = None) -> ExperimentConfig:
    try:
        d = check_degree(int(data.get("d", _lookup(data, "local_group", "degree", 0))))
        lg = data.get("local_group", {})
        degree = int(lg.get("degree", d))
        if degree != d:
            raise ConfigError(f"local_group.degree = {degree} disagrees with d = {d}")
        gens = lg.get("generators", [])
        if isinstance(gens, str):
            gens = [gens]
        F = LocalGroup.from_strings(d, gens)
        H = None
        par = data.get("parabolic")
        if par:
            xi = BoundaryPoint.parse(str(par.get("xi", "|12")), d)
            kind = Kind(str(par.get("kind", "full")).lower())
            base_v = vertex(str(par.get("base", "")), d)
            H = ParabolicSpec(F, xi, kind, base_v)
        cfg = ExperimentConfig(d, F, H)
        for name in ("f1", "f2"):
            path = _lookup(data, "portraits", name)
            if path:
                setattr(cfg, name, load_portrait(path, base))
        cfg.n_min = int(_lookup(data, "schedule", "n_min", 1))
        cfg.n_max = int(_lookup(data, "schedule", "n_max", 8))
        cfg.depth = int(_lookup(data, "schedule", "depth", 1))
        cfg.threshold = parse_number(_lookup(data, "thresholds", "threshold", "1/100"))
        cfg.seed = int(data.get("seed", 0))
        cfg.output = _lookup(data, "output", "path")
    except ConfigError:
        raise
    except (ValueError, TypeError, KeyError) as exc:
        raise ConfigError(str(exc)) from exc
    if cfg.n_min < 1 or cfg.n_max < cfg.n_min:
        raise ConfigError("schedule needs 1 <= n_min <= n_max")
    return cfg


def load(path: str | Path) -> ExperimentConfig:
    p = Path(path)
    try:
        data = tomli.loads(p.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {p}: {exc}") from exc
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"config {p} is not valid TOML: {exc}") from exc
    return from_dict(data, p.parent)


def dump_portrait(g: Portrait) -> str:
    return json.dumps(g.to_dict(), indent=1, sort_keys=True)
