"""Monte Carlo distribution of realized total damage under barrier strategies.

Paths use exact log-steps of the regime-switching GBM on a uniform grid,
barrier breaches are detected against ``H e^{qt}`` with an optional
Brownian-bridge correction, and the discounted damage integral is
accumulated by the trapezoidal rule and closed past the horizon with the
conditional-mean tail ``S(T) e^{-rT} / (r - alpha)``.

Noise comes from counter-based streams keyed by (seed, path index), so
every path is reproducible on its own, results do not depend on the
thread count, and several strategies can share one pass (common random
numbers).
"""

from __future__ import annotations

import csv
import json
import logging
import math
import os
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from . import _core
from .closed_form import Branch, optimal_barrier
from .model import CostSchedule, DamageDynamics, Strategy, StrategyKind, ValidationError

log = logging.getLogger(__name__)

DEFAULT_QUANTILES = (0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 0.99)


@dataclass(frozen=True)
class SimConfig:
    paths: int = 100_000
    dt: float = 0.1
    t_max: float = 600.0
    seed: int = 20090301
    bridge_correction: bool = True
    quantile_levels: tuple[float, ...] = DEFAULT_QUANTILES
    histogram_bins: int = 100
    ceiling: float = 1e12

    def __post_init__(self):
        object.__setattr__(self, "quantile_levels", tuple(float(x) for x in self.quantile_levels))
        if self.paths < 1:
            raise ValidationError("paths >= 1")
        if not 0 < self.dt <= 1:
            raise ValidationError("0 < dt <= 1")
        if not self.t_max >= 100:
            raise ValidationError("t_max >= 100")
        if not 0 <= self.seed < 2**64:
            raise ValidationError("seed must fit in 64 bits")
        lv = self.quantile_levels
        if any(not 0 < x < 1 for x in lv) or any(b <= a for a, b in zip(lv, lv[1:])):
            raise ValidationError("quantile_levels must be strictly increasing in (0, 1)")
        if self.histogram_bins < 1:
            raise ValidationError("histogram_bins >= 1")
        if not self.ceiling > 0:
            raise ValidationError("ceiling > 0")

    @property
    def n_steps(self) -> int:
        n = round(self.t_max / self.dt)
        if abs(n * self.dt - self.t_max) > 1e-9 * self.t_max:
            n = math.ceil(self.t_max / self.dt)
        return int(n)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["quantile_levels"] = list(self.quantile_levels)
        return d


@dataclass(frozen=True)
class PathOutcome:
    total_damage: float
    tau: float | None  # None: not acted within the horizon
    acted: bool
    overflow: bool = False


@dataclass
class DamageDistribution:
    strategy: str
    barrier: float | None
    paths: int
    mean: float
    std_error: float
    quantiles: dict[float, float]
    hist_edges: np.ndarray = field(repr=False)
    hist_masses: np.ndarray = field(repr=False)
    act_fraction: float = 0.0
    mean_tau_given_acted: float | None = None
    overflow_count: int = 0
    damage: np.ndarray | None = field(default=None, repr=False, compare=False)
    tau: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def hist_density(self) -> np.ndarray:
        return self.hist_masses / np.diff(self.hist_edges)

    def quantile(self, level: float) -> float:
        return self.quantiles[float(level)]

    def summary(self, config: SimConfig | None = None) -> dict:
        out = {
            "strategy": self.strategy,
            "barrier": self.barrier,
            "paths": self.paths,
            "mean": self.mean,
            "std_error": self.std_error,
            "quantiles": {repr(k): v for k, v in self.quantiles.items()},
            "act_fraction": self.act_fraction,
            "mean_tau_given_acted": self.mean_tau_given_acted,
            "overflow_count": self.overflow_count,
        }
        if config is not None:
            out["config"] = config.as_dict()
        return out


def resolve_barrier(dyn: DamageDynamics, cost: CostSchedule, strategy: Strategy) -> tuple[Strategy, float]:
    """Normalize a strategy and return it with its time-zero barrier level.

    ``inf`` means never act; a level at or below ``S0`` means act at t = 0.
    """
    kind = strategy.kind
    if kind is StrategyKind.OPTIMAL:
        sol = optimal_barrier(dyn, cost)
        if sol.branch is Branch.INTERIOR:
            return Strategy.barrier(sol.H_star), sol.H_star
        return Strategy.immediate(), dyn.S0
    if kind is StrategyKind.NEVER:
        return strategy, math.inf
    if kind is StrategyKind.IMMEDIATE:
        return strategy, dyn.S0
    if strategy.H <= dyn.S0:
        return Strategy.immediate(), dyn.S0
    return strategy, strategy.H


def bridge_crossing_probability(logS_k: float, logS_k1: float, log_barrier_k: float,
                                log_barrier_k1: float, sigma: float, dt: float) -> float:
    """Chance a Brownian bridge between two sub-barrier endpoints touched the barrier.

    The barrier is log-linear in time, so the log-distance is itself a
    Brownian bridge with volatility ``sigma``.
    """
    d0 = log_barrier_k - logS_k
    d1 = log_barrier_k1 - logS_k1
    if d0 <= 0 or d1 <= 0:
        return 1.0
    if sigma <= 0:
        return 0.0
    return math.exp(-2.0 * d0 * d1 / (sigma * sigma * dt))


def _grid(dyn: DamageDynamics, cfg: SimConfig):
    n = cfg.n_steps
    t = np.arange(n + 1, dtype=np.float64) * cfg.dt
    disc = np.exp(-dyn.r * t)
    return n, disc, cfg.dt * disc, 0.5 * cfg.dt * disc


def simulate_barriers(dyn: DamageDynamics, cost: CostSchedule, levels: Sequence[float],
                      cfg: SimConfig, path_start: int = 0, n_paths: int | None = None,
                      threads: int | None = None, backend: str | None = None):
    """Raw per-path outcomes for each time-zero barrier level (common random numbers).

    Returns ``(damage, tau, overflow)`` of shape ``(n_paths, len(levels))``;
    ``tau`` is NaN where the barrier was not reached within the horizon.
    """
    n, disc, wfull, whalf = _grid(dyn, cfg)
    if n_paths is None:
        n_paths = cfg.paths
    with np.errstate(divide="ignore"):
        log_h = np.log(np.asarray(levels, dtype=np.float64))
    sdt = math.sqrt(cfg.dt)
    return _core.simulate_block(
        cfg.seed, path_start, n_paths, n, cfg.dt, math.log(dyn.S0),
        (dyn.alpha1 - 0.5 * dyn.sigma1**2) * cfg.dt, dyn.sigma1 * sdt,
        (dyn.alpha2 - 0.5 * dyn.sigma2**2) * cfg.dt, dyn.sigma2 * sdt,
        cost.q, dyn.r, cost.K, 1.0 / (dyn.r - dyn.alpha1), 1.0 / (dyn.r - dyn.alpha2),
        cfg.ceiling, bool(cfg.bridge_correction), np.ascontiguousarray(log_h),
        wfull, whalf, disc, threads=threads or os.cpu_count() or 1, backend=backend,
    )


def simulate_path(dyn: DamageDynamics, cost: CostSchedule, strategy: Strategy, cfg: SimConfig,
                  path_index: int, backend: str | None = None) -> PathOutcome:
    _, level = resolve_barrier(dyn, cost, strategy)
    d, t, f = simulate_barriers(dyn, cost, [level], cfg, path_start=path_index, n_paths=1,
                                threads=1, backend=backend)
    tau = float(t[0, 0])
    acted = not math.isnan(tau)
    return PathOutcome(float(d[0, 0]), tau if acted else None, acted, bool(f[0, 0]))


def summarize(damage: np.ndarray, tau: np.ndarray, overflow: np.ndarray, cfg: SimConfig,
              strategy: str = "", barrier: float | None = None,
              keep_samples: bool = True) -> DamageDistribution:
    """Ensemble statistics of one column of path outcomes."""
    n = len(damage)
    levels = cfg.quantile_levels
    qv = np.quantile(damage, levels) if levels else []
    hi = float(np.quantile(damage, 0.995))
    edges = np.linspace(0.0, hi, cfg.histogram_bins + 1)
    inside = damage[damage <= hi]
    counts, _ = np.histogram(inside, bins=edges)
    masses = counts / counts.sum()
    acted = ~np.isnan(tau)
    n_acted = int(acted.sum())
    mean_tau = float(np.mean(tau[acted])) if n_acted else None
    # arrays are indexed by path, so these reductions do not depend on threading
    mean = float(np.mean(damage))
    se = float(np.std(damage, ddof=1) / math.sqrt(n)) if n > 1 else math.nan
    return DamageDistribution(
        strategy=strategy,
        barrier=None if barrier is None or math.isinf(barrier) else float(barrier),
        paths=n,
        mean=mean,
        std_error=se,
        quantiles={float(k): float(v) for k, v in zip(levels, qv)},
        hist_edges=edges,
        hist_masses=masses,
        act_fraction=n_acted / n,
        mean_tau_given_acted=mean_tau,
        overflow_count=int(overflow.sum()),
        damage=damage if keep_samples else None,
        tau=tau if keep_samples else None,
    )


def run_ensembles(dyn: DamageDynamics, cost: CostSchedule, strategies: Sequence[Strategy],
                  cfg: SimConfig, threads: int | None = None,
                  backend: str | None = None) -> list[DamageDistribution]:
    """Run several strategies on the same paths in one pass.

    Each result is bit-identical to a separate ``run_ensemble`` call with the
    same config.
    """
    resolved = [resolve_barrier(dyn, cost, s) for s in strategies]
    levels = [lv for _, lv in resolved]
    damage, tau, flags = simulate_barriers(dyn, cost, levels, cfg, threads=threads, backend=backend)
    out = []
    for j, (strat, lv) in enumerate(resolved):
        dist = summarize(damage[:, j].copy(), tau[:, j].copy(), flags[:, j], cfg,
                         strategy=strat.label() if strategies[j].kind is not StrategyKind.OPTIMAL
                         else f"optimal -> {strat.label()}", barrier=lv)
        if dist.overflow_count:
            log.warning("%s: %d paths closed early at the overflow ceiling", dist.strategy,
                        dist.overflow_count)
        out.append(dist)
    return out


def run_ensemble(dyn: DamageDynamics, cost: CostSchedule, strategy: Strategy, cfg: SimConfig,
                 threads: int | None = None, backend: str | None = None) -> DamageDistribution:
    return run_ensembles(dyn, cost, [strategy], cfg, threads=threads, backend=backend)[0]


def write_quantiles_csv(dist: DamageDistribution, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["level", "value"])
        for k, v in dist.quantiles.items():
            w.writerow([repr(k), repr(v)])


def write_histogram_csv(dist: DamageDistribution, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["bin_left", "bin_right", "density"])
        dens = dist.hist_density
        for a, b, d in zip(dist.hist_edges[:-1], dist.hist_edges[1:], dens):
            w.writerow([repr(float(a)), repr(float(b)), repr(float(d))])


def summary_json(dist: DamageDistribution, cfg: SimConfig) -> str:
    return json.dumps(dist.summary(cfg), indent=2, sort_keys=True)
