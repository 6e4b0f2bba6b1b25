"""Damage-vs-barrier curves over cost growth rates, and a brute-force MC optimum."""

from __future__ import annotations

import csv
import enum
import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .closed_form import value_function
from .model import CostSchedule, DamageDynamics, ValidationError
from .montecarlo import SimConfig, simulate_barriers


class Engine(enum.Enum):
    CLOSED_FORM = "closed_form"
    MONTE_CARLO = "monte_carlo"
    BOTH = "both"


class BoundaryArgminWarning(UserWarning):
    """The grid minimum sits on the edge of the grid, so the grid may not bracket the optimum."""


@dataclass(frozen=True)
class SweepSpec:
    H_grid: tuple[float, ...]
    q_list: tuple[float, ...] = (0.0,)
    engine: Engine = Engine.CLOSED_FORM
    sim: SimConfig = field(default_factory=SimConfig)

    def __post_init__(self):
        object.__setattr__(self, "H_grid", tuple(float(h) for h in self.H_grid))
        object.__setattr__(self, "q_list", tuple(float(q) for q in self.q_list))
        g = self.H_grid
        if not g:
            raise ValidationError("H_grid is empty")
        if any(b <= a for a, b in zip(g, g[1:])):
            raise ValidationError("H_grid must be strictly increasing")

    def validate(self, dyn: DamageDynamics) -> None:
        if self.H_grid[0] < dyn.S0:
            raise ValidationError(f"H_grid values must be >= S0 = {dyn.S0}")


@dataclass(frozen=True)
class SweepRow:
    q: float
    H: float
    cf_damage: float | None
    mc_damage: float | None
    mc_se: float | None


@dataclass
class SweepResult:
    rows: list[SweepRow]
    argmins: dict[float, dict]
    crn: bool = True

    def curve(self, q: float, which: str = "cf") -> tuple[np.ndarray, np.ndarray]:
        rows = [r for r in self.rows if r.q == q]
        vals = [r.cf_damage if which == "cf" else r.mc_damage for r in rows]
        return np.array([r.H for r in rows]), np.array(vals, dtype=float)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["q", "H", "cf_damage", "mc_damage", "mc_se"])
            for r in self.rows:
                w.writerow([repr(r.q), repr(r.H)] + ["" if v is None else repr(v)
                                                     for v in (r.cf_damage, r.mc_damage, r.mc_se)])

    def argmin_json(self) -> str:
        return json.dumps({"common_random_numbers": self.crn,
                           "argmins": {repr(q): v for q, v in self.argmins.items()}},
                          indent=2, sort_keys=True)


def _argmin(H: Sequence[float], vals: np.ndarray) -> dict:
    i = int(np.nanargmin(vals))
    return {"H": float(H[i]), "damage": float(vals[i]), "index": i}


def damage_curve(dyn: DamageDynamics, cost: CostSchedule, spec: SweepSpec,
                 threads: int | None = None) -> SweepResult:
    """Expected damage over ``spec.H_grid`` for each cost growth rate in ``spec.q_list``.

    Closed form is unavailable for q >= r; those rates always use Monte Carlo.
    Monte Carlo points for one q share their paths (common random numbers).
    """
    spec.validate(dyn)
    H = spec.H_grid
    rows: list[SweepRow] = []
    argmins: dict[float, dict] = {}
    for q in spec.q_list:
        c = CostSchedule(cost.K, q)
        engine = spec.engine if q < dyn.r else Engine.MONTE_CARLO
        cf = mc = se = None
        if engine in (Engine.CLOSED_FORM, Engine.BOTH):
            cf = np.array([value_function(dyn, c, dyn.S0, 0.0, h) for h in H])
        if engine in (Engine.MONTE_CARLO, Engine.BOTH):
            d, _, _ = simulate_barriers(dyn, c, H, spec.sim, threads=threads)
            mc = d.mean(axis=0)
            se = d.std(axis=0, ddof=1) / math.sqrt(len(d))
        for i, h in enumerate(H):
            rows.append(SweepRow(q, h,
                                 None if cf is None else float(cf[i]),
                                 None if mc is None else float(mc[i]),
                                 None if se is None else float(se[i])))
        entry = {"engine": engine.value}
        if cf is not None:
            entry["closed_form"] = _argmin(H, cf)
        if mc is not None:
            entry["monte_carlo"] = _argmin(H, mc)
        argmins[q] = entry
    return SweepResult(rows, argmins)


def mc_optimal_barrier(dyn: DamageDynamics, cost: CostSchedule, sim: SimConfig,
                       H_grid: Sequence[float], threads: int | None = None) -> tuple[float, float, float]:
    """Grid argmin of Monte Carlo mean damage, all grid points on the same paths.

    Returns ``(H_best, damage_best, std_error)``. Warns with
    :class:`BoundaryArgminWarning` when the argmin is a grid endpoint.
    """
    if not cost.q < dyn.r:
        raise ValidationError("mc_optimal_barrier needs q < r")
    H = [float(h) for h in H_grid]
    if not H:
        raise ValidationError("H_grid is empty")
    d, _, _ = simulate_barriers(dyn, cost, H, sim, threads=threads)
    means = d.mean(axis=0)
    i = int(np.argmin(means))
    if len(H) > 1 and i in (0, len(H) - 1):
        warnings.warn(f"Monte Carlo argmin H={H[i]:g} is at the grid boundary; "
                      "the grid may not bracket the optimum", BoundaryArgminWarning, stacklevel=2)
    se = float(d[:, i].std(ddof=1) / math.sqrt(len(d))) if len(d) > 1 else math.nan
    return H[i], float(means[i]), se


def default_grid(lo: float = 1.0, hi: float = 20.0, n: int = 39) -> tuple[float, ...]:
    return tuple(float(x) for x in np.linspace(lo, hi, n))

