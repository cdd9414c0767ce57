"""Run configuration: an INI document with one flat section per concern.

Example::

    [inputs]
    gauge = data/gauge.csv
    sre = CHIRPS=data/chirps.csv, TAMSAT=data/tamsat.csv

    [pipeline]
    methods = LOCI, QM, GPR
    split_date = 2001-01-01
    seed = 0
    jobs = 1
    out = results

    [correction]
    threshold = 0.85
    classes = 0.85, 5, 20, 40

    [evaluation]
    events = Dry, Heavy, Violent
    season_start_month = 1
    harmonics = 2

Relative paths resolve against the directory holding the config file.
Overrides are ``key=value`` strings, addressed either as ``section.key`` or
by a bare key. A bare ``seed`` means ``pipeline.seed``; use ``synth.seed`` for
the generator.
"""

from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import (
    DEFAULT_CLASSES,
    DEFAULT_SPLIT,
    WET_THRESHOLD,
    EventCategory,
    IntensityClass,
    as_date,
    make_classes,
)
from .features import DEFAULT_CAP
from .models import METHODS, normalize_method
from .seasonality import DEFAULT_HARMONICS
from .synth import SynthSpec


class ConfigError(ValueError):
    pass


DEFAULT_EVENTS = (EventCategory.DRY, EventCategory.HEAVY, EventCategory.VIOLENT)

# section -> keys understood in that section
KNOWN_KEYS = {
    "inputs": ("gauge", "sre", "stations", "sentinel"),
    "pipeline": ("methods", "split_date", "seed", "jobs", "out"),
    "correction": ("threshold", "classes", "cap"),
    "evaluation": ("events", "season_start_month", "harmonics"),
    "synth": tuple(f.name for f in dataclasses.fields(SynthSpec)),
}


@dataclass(frozen=True)
class RunConfig:
    gauge: Path | None = None
    sre: dict = field(default_factory=dict)          # product name -> CSV path
    stations: Path | None = None
    sentinel: float | None = None
    methods: tuple[str, ...] = METHODS
    split_date: np.datetime64 = DEFAULT_SPLIT
    seed: int = 0
    jobs: int = 1
    out: Path = Path("results")
    threshold: float = WET_THRESHOLD
    classes: tuple[IntensityClass, ...] = DEFAULT_CLASSES
    cap: int = DEFAULT_CAP
    events: tuple[EventCategory, ...] = DEFAULT_EVENTS
    season_start_month: int = 1
    harmonics: int = DEFAULT_HARMONICS
    synth: SynthSpec = field(default_factory=SynthSpec)

    def __post_init__(self):
        if not self.methods:
            raise ConfigError("at least one method is required")
        object.__setattr__(self, "methods",
                           tuple(dict.fromkeys(normalize_method(m) for m in self.methods)))
        object.__setattr__(self, "split_date", as_date(self.split_date))
        object.__setattr__(self, "out", Path(self.out))
        if not self.threshold > 0:
            raise ConfigError("threshold must be positive")
        if not 1 <= self.season_start_month <= 12:
            raise ConfigError("season_start_month must be in 1..12")
        if not 1 <= self.harmonics <= 4:
            raise ConfigError("harmonics must be in 1..4")
        if self.jobs < 1:
            raise ConfigError("jobs must be at least 1")
        if self.cap < 1:
            raise ConfigError("cap must be positive")

    def check_inputs(self) -> None:
        """Raise :class:`ConfigError` naming any missing input file."""
        if self.gauge is None:
            raise ConfigError("inputs.gauge is not set")
        if not self.sre:
            raise ConfigError("inputs.sre is not set")
        for p in [self.gauge, *self.sre.values()] + ([self.stations] if self.stations else []):
            if not Path(p).is_file():
                raise ConfigError(f"input file not found: {p}")


def _split_list(text: str) -> list[str]:
    return [t.strip() for t in text.replace(";", ",").split(",") if t.strip()]


def _parse_sre(text: str, base: Path) -> dict:
    out = {}
    for item in _split_list(text):
        name, sep, path = item.partition("=")
        if not sep:
            name, path = Path(item).stem, item
        name = name.strip()
        if name in out:
            raise ConfigError(f"duplicate SRE product name {name!r}")
        out[name] = base / path.strip()
    return out


def _event(name: str) -> EventCategory:
    for c in EventCategory:
        if c.value.lower() == name.strip().lower():
            return c
    raise ConfigError(f"unknown event category {name!r}")


def _resolve_override(key: str, parser: configparser.ConfigParser) -> tuple[str, str]:
    if "." in key:
        section, _, name = key.partition(".")
        if name not in KNOWN_KEYS.get(section, ()):
            raise ConfigError(f"unknown setting {key!r}")
        return section, name
    hits = [s for s, keys in KNOWN_KEYS.items() if key in keys]
    # a bare key shared with [synth] (seed) means the pipeline one
    if len(hits) > 1 and "synth" in hits:
        hits.remove("synth")
    if not hits:
        raise ConfigError(f"unknown setting {key!r}")
    if len(hits) > 1:
        raise ConfigError(f"ambiguous setting {key!r}; use one of "
                          + ", ".join(f"{s}.{key}" for s in hits))
    return hits[0], key


def parse_overrides(items) -> list[tuple[str, str]]:
    out = []
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"override must look like key=value, got {item!r}")
        out.append((key.strip(), value.strip()))
    return out


def _convert(section: str, key: str, raw: str, base: Path):
    try:
        if section == "synth":
            ftype = {f.name: f.type for f in dataclasses.fields(SynthSpec)}[key]
            if ftype == "str":
                return raw
            return int(raw) if ftype == "int" else float(raw)
        if key in ("gauge", "stations", "out"):
            return base / raw
        if key == "sre":
            return _parse_sre(raw, base)
        if key in ("sentinel", "threshold"):
            return float(raw)
        if key in ("seed", "jobs", "cap", "season_start_month", "harmonics"):
            return int(raw)
        if key == "methods":
            return tuple(_split_list(raw))
        if key == "split_date":
            return as_date(raw)
        if key == "classes":
            return make_classes([float(v) for v in _split_list(raw)])
        if key == "events":
            return tuple(_event(v) for v in _split_list(raw))
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{section}.{key}: invalid value {raw!r} ({exc})") from None
    raise ConfigError(f"unknown setting {section}.{key}")


def load_config(path=None, overrides=()) -> RunConfig:
    """Build a :class:`RunConfig` from an optional INI file plus overrides."""
    parser = configparser.ConfigParser(interpolation=None)
    base = Path.cwd()
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        try:
            parser.read(path, encoding="utf-8")
        except configparser.Error as exc:
            raise ConfigError(f"{path}: {exc}") from None
        base = path.resolve().parent
    raw: dict[tuple[str, str], tuple[str, Path]] = {}
    for section in parser.sections():
        if section not in KNOWN_KEYS:
            raise ConfigError(f"unknown config section [{section}]")
        for key, value in parser.items(section):
            if key not in KNOWN_KEYS[section]:
                raise ConfigError(f"unknown setting {section}.{key}")
            raw[(section, key)] = (value, base)
    # override paths resolve against the working directory
    for key, value in parse_overrides(overrides):
        raw[_resolve_override(key, parser)] = (value, Path.cwd())

    kwargs, synth = {}, {}
    for (section, key), (value, where) in raw.items():
        converted = _convert(section, key, value, where)
        (synth if section == "synth" else kwargs)[key] = converted
    try:
        if synth:
            kwargs["synth"] = SynthSpec(**synth)
        return RunConfig(**kwargs)
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None
