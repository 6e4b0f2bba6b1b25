"""Domain parameters: temperature dynamics, damage-rate GBM, cost schedule, strategies.

Units are fixed project-wide: years, billion USD, annualized rates, degrees C.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field


class ValidationError(ValueError):
    """A parameter set violates a model invariant."""


class DomainError(ValueError):
    """A formula is evaluated outside the region where it is valid."""


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ValidationError(msg)


def _finite(**values: float) -> None:
    for name, v in values.items():
        _require(math.isfinite(v), f"{name} must be finite (got {v!r})")


@dataclass(frozen=True)
class TemperatureModel:
    """Arithmetic Brownian temperature with a drift/volatility drop at action time.

    ``S0`` is the damage rate at reference temperature ``C0``; damage is
    ``S0 * exp(gamma * (C - C0))``.
    """

    mu1: float = 0.01
    mu2: float = 0.005
    xi1: float = 0.1
    xi2: float = 0.1
    gamma: float = 1.9012608
    C0: float = 15.0
    S0: float = 1.0

    def __post_init__(self):
        _finite(mu1=self.mu1, mu2=self.mu2, xi1=self.xi1, xi2=self.xi2,
                gamma=self.gamma, C0=self.C0, S0=self.S0)
        _require(self.gamma > 0, "gamma > 0")
        _require(self.xi1 >= 0 and self.xi2 >= 0, "xi1 >= 0 and xi2 >= 0")
        _require(self.S0 > 0, "S0 > 0")
        _require(self.mu2 <= self.mu1, "mu2 <= mu1")
        _require(self.xi2 <= self.xi1, "xi2 <= xi1")


@dataclass(frozen=True)
class DamageDynamics:
    """Damage-rate GBM before (alpha1, sigma1) and after (alpha2, sigma2) the action."""

    alpha1: float = 0.03708657
    alpha2: float = 0.02758027
    sigma1: float = 0.19012608
    sigma2: float = 0.19012608
    S0: float = 1.0
    r: float = 0.05

    def __post_init__(self):
        _finite(alpha1=self.alpha1, alpha2=self.alpha2, sigma1=self.sigma1,
                sigma2=self.sigma2, S0=self.S0, r=self.r)
        _require(self.r > self.alpha1, f"r > alpha1 (r={self.r}, alpha1={self.alpha1})")
        _require(self.alpha1 > self.alpha2,
                 f"alpha1 > alpha2 (alpha1={self.alpha1}, alpha2={self.alpha2})")
        _require(self.sigma1 >= self.sigma2 >= 0, "sigma1 >= sigma2 >= 0")
        _require(self.S0 > 0, "S0 > 0")

    def log_drift(self, q: float = 0.0) -> float:
        """Drift of log(S e^{-qt}) before action: alpha1 - q - sigma1^2/2."""
        return self.alpha1 - q - 0.5 * self.sigma1**2


@dataclass(frozen=True)
class CostSchedule:
    """One-off action cost ``K * exp(q t)`` paid at the action time."""

    K: float = 60.0
    q: float = 0.0

    def __post_init__(self):
        _finite(K=self.K, q=self.q)
        _require(self.K >= 0, "K >= 0")

    def at(self, t: float) -> float:
        return self.K * math.exp(self.q * t)


class StrategyKind(enum.Enum):
    NEVER = "never"
    IMMEDIATE = "immediate"
    BARRIER = "barrier"
    OPTIMAL = "optimal"


@dataclass(frozen=True)
class Strategy:
    """When to act: never, now, at the first breach of ``H e^{qt}``, or at the optimal barrier.

    Build with the classmethods. ``Strategy.barrier(H, S0)`` collapses to
    ``immediate`` when ``H <= S0`` since the breach happens at t = 0.
    """

    kind: StrategyKind
    H: float | None = field(default=None)

    def __post_init__(self):
        if self.kind is StrategyKind.BARRIER:
            if self.H is None or not (self.H > 0) or math.isnan(self.H):
                raise ValidationError("barrier strategy needs H > 0")
        elif self.H is not None:
            raise ValidationError(f"{self.kind.value} strategy takes no barrier level")

    @classmethod
    def never(cls) -> "Strategy":
        return cls(StrategyKind.NEVER)

    @classmethod
    def immediate(cls) -> "Strategy":
        return cls(StrategyKind.IMMEDIATE)

    @classmethod
    def optimal(cls) -> "Strategy":
        return cls(StrategyKind.OPTIMAL)

    @classmethod
    def barrier(cls, H: float, S0: float | None = None) -> "Strategy":
        if S0 is not None and H <= S0:
            return cls.immediate()
        return cls(StrategyKind.BARRIER, float(H))

    def label(self) -> str:
        if self.kind is StrategyKind.BARRIER:
            return f"barrier({self.H:g})"
        return self.kind.value


def calibrate(tm: TemperatureModel, r: float) -> DamageDynamics:
    """Ito map from temperature dynamics to the damage-rate GBM."""
    g = tm.gamma
    return DamageDynamics(
        alpha1=tm.mu1 * g + 0.5 * (tm.xi1 * g) ** 2,
        alpha2=tm.mu2 * g + 0.5 * (tm.xi2 * g) ** 2,
        sigma1=tm.xi1 * g,
        sigma2=tm.xi2 * g,
        S0=tm.S0,
        r=r,
    )


def damage_rate_from_temperature(tm: TemperatureModel, C: float) -> float:
    return tm.S0 * math.exp(tm.gamma * (C - tm.C0))


def critical_temperature(tm: TemperatureModel, S_star: float) -> float:
    """Temperature at which the damage rate reaches ``S_star``."""
    if not S_star > 0:
        raise DomainError("S_star must be > 0")
    return tm.C0 + math.log(S_star / tm.S0) / tm.gamma
