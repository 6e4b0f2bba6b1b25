"""INI run configuration.

Sections::

    [temperature] mu1, mu2, xi1, xi2, gamma, C0, S0     (or)
    [damage]      alpha1, alpha2, sigma1, sigma2, S0
    [economy]     r
    [cost]        K, q
    [simulation]  paths, dt, t_max, seed, bridge_correction, quantile_levels,
                  histogram_bins, ceiling                 (optional)

If both ``[temperature]`` and ``[damage]`` are present, ``[damage]`` wins.
Missing keys take the built-in defaults, which reproduce the reference
parameter set (alpha1=0.03708657, alpha2=0.02758027, sigma=0.19012608,
r=0.05, K=60, q=0, S0=1).
"""

from __future__ import annotations

import configparser
import io
import logging
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .model import CostSchedule, DamageDynamics, TemperatureModel, ValidationError, calibrate
from .montecarlo import SimConfig

log = logging.getLogger(__name__)

DEFAULT_R = 0.05


@dataclass(frozen=True)
class RunConfig:
    dynamics: DamageDynamics
    cost: CostSchedule
    sim: SimConfig
    temperature: TemperatureModel | None = None

    def as_dict(self) -> dict:
        out = {}
        if self.temperature is not None:
            out["temperature"] = _asdict(self.temperature)
        else:
            d = _asdict(self.dynamics)
            d.pop("r")
            out["damage"] = d
        out["economy"] = {"r": self.dynamics.r}
        out["cost"] = _asdict(self.cost)
        out["simulation"] = self.sim.as_dict()
        return out

    def to_ini(self) -> str:
        cp = configparser.ConfigParser()
        cp.optionxform = str
        for section, values in self.as_dict().items():
            cp[section] = {k: _fmt(v) for k, v in values.items()}
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()


def _asdict(obj) -> dict:
    return {f.name: getattr(obj, f.name) for f in fields(obj)}


def _fmt(v) -> str:
    if isinstance(v, (list, tuple)):
        return ", ".join(repr(float(x)) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _section(cp: configparser.ConfigParser, name: str, cls) -> dict:
    """Typed keyword arguments for ``cls`` from one section, matching keys case-insensitively."""
    if not cp.has_section(name):
        return {}
    by_lower = {f.name.lower(): f for f in fields(cls)}
    out = {}
    for key, raw in cp.items(name):
        f = by_lower.get(key.lower())
        if f is None:
            raise ValidationError(f"unknown key {key!r} in [{name}]")
        try:
            if f.name == "quantile_levels":
                out[f.name] = tuple(float(x) for x in raw.replace(",", " ").split())
            elif f.name == "bridge_correction":
                out[f.name] = cp.getboolean(name, key)
            elif f.name in ("paths", "seed", "histogram_bins"):
                out[f.name] = int(raw)
            else:
                out[f.name] = float(raw)
        except ValueError as exc:
            raise ValidationError(f"[{name}] {key} = {raw!r}: {exc}") from None
    return out


def parse_config(text: str) -> RunConfig:
    cp = configparser.ConfigParser()
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ValidationError(f"malformed config: {exc}") from None
    known = {"temperature", "damage", "economy", "cost", "simulation"}
    extra = set(cp.sections()) - known
    if extra:
        raise ValidationError(f"unknown config section(s): {sorted(extra)}")

    for key in (cp.options("economy") if cp.has_section("economy") else []):
        if key.lower() != "r":
            raise ValidationError(f"unknown key {key!r} in [economy]")
    try:
        r = float(cp.get("economy", "r", fallback=DEFAULT_R))
    except ValueError as exc:
        raise ValidationError(f"[economy] r: {exc}") from None
    tm = None
    if cp.has_section("damage"):
        if cp.has_section("temperature"):
            log.warning("both [temperature] and [damage] given; using [damage]")
        dkw = _section(cp, "damage", DamageDynamics)
        dkw.pop("r", None)
        dyn = DamageDynamics(**dkw, r=r)
    else:
        tm = TemperatureModel(**_section(cp, "temperature", TemperatureModel))
        dyn = calibrate(tm, r)
    cost = CostSchedule(**_section(cp, "cost", CostSchedule))
    sim = SimConfig(**_section(cp, "simulation", SimConfig))
    return RunConfig(dyn, cost, sim, tm)


def load_config(path: str | Path | None) -> RunConfig:
    """Read a config file; ``None`` gives the built-in defaults."""
    if path is None:
        return parse_config("")
    return parse_config(Path(path).read_text())


def with_sim(cfg: RunConfig, **overrides) -> RunConfig:
    overrides = {k: v for k, v in overrides.items() if v is not None}
    return replace(cfg, sim=replace(cfg.sim, **overrides)) if overrides else cfg
