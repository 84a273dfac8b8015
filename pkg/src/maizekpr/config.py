"""Layered run configuration.

One YAML file covers the whole pipeline; each threshold lives in exactly
one place and every field has the built-in default, so an empty (or
absent) file is a valid configuration. CLI flags override file values.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .extract import ExtractConfig
from .filtering import FilterConfig
from .rowgraph import GraphConfig

_SECTIONS = {
    "extract": ExtractConfig,
    "filter": FilterConfig,
    "graph": GraphConfig,
}


@dataclass
class RunConfig:
    extract: ExtractConfig = field(default_factory=ExtractConfig)
    filter: FilterConfig = field(default_factory=FilterConfig)
    graph: GraphConfig = field(default_factory=GraphConfig)
    parallelism: int = 1
    # passed through to the external mask adapter, which shares this file
    adapter: dict = field(default_factory=lambda: {"points_per_side": 80})

    def validate(self) -> None:
        self.extract.validate()
        self.filter.validate()
        self.graph.validate()
        if self.parallelism < 1:
            raise ValueError("parallelism must be >= 1")


def _build_section(cls, raw: dict, section: str):
    fields = {f.name: f for f in dataclasses.fields(cls)}
    kwargs = {}
    for key, value in raw.items():
        if key not in fields:
            raise ValueError(f"unknown key {section}.{key!r} in config")
        kwargs[key] = value
    return cls(**kwargs)


def config_from_dict(raw: dict) -> RunConfig:
    raw = dict(raw or {})
    cfg = RunConfig()
    for section, cls in _SECTIONS.items():
        if section in raw:
            sub = raw.pop(section)
            if not isinstance(sub, dict):
                raise ValueError(f"config section {section!r} must be a mapping")
            setattr(cfg, section, _build_section(cls, sub, section))
    if "parallelism" in raw:
        cfg.parallelism = int(raw.pop("parallelism"))
    if "adapter" in raw:
        sub = raw.pop("adapter")
        if not isinstance(sub, dict):
            raise ValueError("config section 'adapter' must be a mapping")
        cfg.adapter = sub
    if raw:
        raise ValueError(f"unknown config keys: {sorted(raw)}")
    cfg.validate()
    return cfg


def load_config(path=None) -> RunConfig:
    """Load a YAML config file; None or a missing value yields defaults."""
    if path is None:
        return RunConfig()
    text = Path(path).read_text()
    raw = yaml.safe_load(text)
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ValueError(f"{path}: config root must be a mapping")
    try:
        return config_from_dict(raw)
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from exc


def apply_overrides(cfg: RunConfig, overrides) -> RunConfig:
    """Apply ``section.key=value`` strings on top of a config."""
    for item in overrides or ():
        if "=" not in item:
            raise ValueError(f"override {item!r} is not of the form section.key=value")
        dotted, value = item.split("=", 1)
        parts = dotted.split(".")
        if len(parts) == 1 and parts[0] == "parallelism":
            cfg.parallelism = int(value)
            continue
        if len(parts) != 2:
            raise ValueError(f"override {item!r} is not of the form section.key=value")
        section, key = parts
        if section == "adapter":
            cfg.adapter[key] = yaml.safe_load(value)
            continue
        if section not in _SECTIONS:
            raise ValueError(f"unknown config section {section!r}")
        target = getattr(cfg, section)
        if key not in {f.name for f in dataclasses.fields(target)}:
            raise ValueError(f"unknown key {section}.{key!r}")
        setattr(target, key, yaml.safe_load(value))
    cfg.validate()
    return cfg
