"""Analytic solution of the barrier stopping problem.

Before action the damage rate follows GBM(alpha1, sigma1); the cost grows as
``K e^{qt}`` and the action triggers when ``S_t`` first reaches ``H e^{qt}``.
In the detrended variable ``Y = S e^{-qt}`` the expected total damage is
``V(S, t) = e^{qt} Q(Y)`` with

    Q(Y) = (Y/H)^eps * (K - H * spread) + Y / (r - alpha1),
    spread = 1/(r - alpha1) - 1/(r - alpha2),

where ``eps > 1`` is the positive root of
``(sigma1^2/2) x (x - 1) + (alpha1 - q) x - (r - q) = 0``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from scipy import integrate

from .model import CostSchedule, DamageDynamics, DomainError, ValidationError


class Branch(enum.Enum):
    INTERIOR = "interior"
    IMMEDIATE = "immediate_optimal"


@dataclass(frozen=True)
class ClosedFormSolution:
    branch: Branch
    eps: float | None
    eps_tilde: float | None
    H_star: float | None
    coeff: float | None
    V0: float
    nu: float
    expected_tau: float | None

    def as_dict(self) -> dict:
        d = dict(self.__dict__)
        d["branch"] = self.branch.value
        return d


@dataclass(frozen=True)
class DeterministicSolution:
    tau_star: float
    S_star: float


def pv_no_action(dyn: DamageDynamics, S: float) -> float:
    """Present value of all future damage if the action is never taken."""
    return S / (dyn.r - dyn.alpha1)


def pv_with_action(dyn: DamageDynamics, cost: CostSchedule, S: float, t: float = 0.0) -> float:
    """Present value of future damage plus cost when acting now, at time ``t``."""
    return S / (dyn.r - dyn.alpha2) + cost.K * math.exp(cost.q * t)


def _spread(dyn: DamageDynamics) -> float:
    # (alpha1 - alpha2) / ((r - alpha1)(r - alpha2))
    return (dyn.alpha1 - dyn.alpha2) / ((dyn.r - dyn.alpha1) * (dyn.r - dyn.alpha2))


def characteristic_roots(dyn: DamageDynamics, q: float) -> tuple[float, float]:
    """Roots ``(eps_tilde, eps)`` of the homogeneous Euler equation, ascending.

    Uses the cancellation-free quadratic form, so the limit
    ``sigma1 -> 0`` gives ``eps -> (r - q)/(alpha1 - q)`` cleanly.
    """
    if not dyn.sigma1 > 0:
        raise DomainError("characteristic roots need sigma1 > 0; use deterministic_solution")
    a = 0.5 * dyn.sigma1**2
    b = dyn.alpha1 - q - a
    c = -(dyn.r - q)
    disc = b * b - 4.0 * a * c
    if disc < 0:
        raise DomainError("complex characteristic roots (q > r with small volatility)")
    big = -0.5 * (b + math.copysign(math.sqrt(disc), b))
    if big == 0.0:
        return 0.0, 0.0
    x1, x2 = big / a, c / big
    return (x1, x2) if x1 <= x2 else (x2, x1)


def characteristic_residual(dyn: DamageDynamics, q: float, x: float) -> float:
    return 0.5 * dyn.sigma1**2 * x * (x - 1.0) + (dyn.alpha1 - q) * x - (dyn.r - q)


def _eps(dyn: DamageDynamics, q: float) -> float:
    if dyn.sigma1 > 0:
        return characteristic_roots(dyn, q)[1]
    if not q < dyn.alpha1:
        raise DomainError("deterministic limit needs q < alpha1")
    return (dyn.r - q) / (dyn.alpha1 - q)


def barrier_optimum(dyn: DamageDynamics, cost: CostSchedule) -> float:
    """H* = eps (r-a1)(r-a2) K / ((eps-1)(a1-a2)), the unconstrained optimal barrier."""
    if not cost.q < dyn.r:
        raise DomainError("interior barrier optimum exists only for q < r")
    eps = _eps(dyn, cost.q)
    return eps * cost.K / ((eps - 1.0) * _spread(dyn))


def value_function(dyn: DamageDynamics, cost: CostSchedule, S: float, t: float, H: float,
                   eps: float | None = None) -> float:
    """Expected total damage at ``(S, t)`` for the barrier ``H e^{qt}``.

    Valid in the continuation region ``S e^{-qt} <= H``. ``H = inf`` gives
    the never-act value.
    """
    q = cost.q
    if not q < dyn.r:
        raise DomainError("closed-form value function requires q < r")
    if not H > 0:
        raise DomainError("barrier H must be > 0")
    Y = S * math.exp(-q * t)
    if Y > H:
        raise DomainError(f"Y = S e^(-qt) = {Y:g} lies above the barrier H = {H:g}; "
                          "use pv_with_action")
    if eps is None:
        eps = _eps(dyn, q)
    if math.isinf(H):
        return S / (dyn.r - dyn.alpha1)
    Q = (Y / H) ** eps * (cost.K - H * _spread(dyn)) + Y / (dyn.r - dyn.alpha1)
    return math.exp(q * t) * Q


def value_function_dY(dyn: DamageDynamics, cost: CostSchedule, Y: float, H: float) -> float:
    """dQ/dY of the detrended value function, for smooth-pasting checks."""
    eps = _eps(dyn, cost.q)
    return eps / H * (Y / H) ** (eps - 1.0) * (cost.K - H * _spread(dyn)) + 1.0 / (dyn.r - dyn.alpha1)


def deterministic_solution(dyn: DamageDynamics, cost: CostSchedule) -> DeterministicSolution:
    """Optimal action time and damage rate with both volatilities set to zero."""
    q = cost.q
    if not q < dyn.alpha1:
        raise ValidationError(f"deterministic optimum needs q < alpha1 (q={q}, alpha1={dyn.alpha1})")
    arg = cost.K * (dyn.r - q) * (dyn.alpha2 - dyn.r) / (dyn.S0 * (dyn.alpha2 - dyn.alpha1))
    if arg < 1.0:
        return DeterministicSolution(0.0, dyn.S0)
    tau = math.log(arg) / (dyn.alpha1 - q)
    return DeterministicSolution(tau, dyn.S0 * arg ** (dyn.alpha1 / (dyn.alpha1 - q)))


def optimal_barrier(dyn: DamageDynamics, cost: CostSchedule) -> ClosedFormSolution:
    """Optimal barrier and value; q >= r or H* <= S0 route to immediate action."""
    q = cost.q
    nu = dyn.log_drift(q)
    immediate = ClosedFormSolution(Branch.IMMEDIATE, None, None, None, None,
                                   pv_with_action(dyn, cost, dyn.S0, 0.0), nu, None)
    if not q < dyn.r:
        return immediate
    if dyn.sigma1 > 0:
        eps_tilde, eps = characteristic_roots(dyn, q)
    else:
        if not q < dyn.alpha1:
            return immediate
        eps_tilde, eps = -math.inf, _eps(dyn, q)
    H = eps * cost.K / ((eps - 1.0) * _spread(dyn))
    if not H > dyn.S0:
        return ClosedFormSolution(Branch.IMMEDIATE, eps, eps_tilde, None, None,
                                  immediate.V0, nu, None)
    coeff = (cost.K - H * _spread(dyn)) / H**eps
    V0 = value_function(dyn, cost, dyn.S0, 0.0, H, eps=eps)
    e_tau = math.log(H / dyn.S0) / nu if nu > 0 else None
    return ClosedFormSolution(Branch.INTERIOR, eps, eps_tilde, H, coeff, V0, nu, e_tau)


def _hitting_params(dyn: DamageDynamics, cost: CostSchedule, H: float) -> tuple[float, float]:
    nu = dyn.log_drift(cost.q)
    if not nu > 0:
        raise DomainError(f"hitting-time law needs nu = alpha1 - q - sigma1^2/2 > 0 (nu={nu:g})")
    if not H > dyn.S0:
        raise DomainError(f"hitting-time density requires H > S0 (H={H:g}, S0={dyn.S0:g})")
    if not dyn.sigma1 > 0:
        raise DomainError("hitting-time density needs sigma1 > 0")
    return math.log(H / dyn.S0), nu


def hitting_time_density(dyn: DamageDynamics, cost: CostSchedule, H: float, tau: float) -> float:
    """First-passage density of ``S_t`` through ``H e^{qt}`` (inverse Gaussian)."""
    b, nu = _hitting_params(dyn, cost, H)
    if tau <= 0:
        return 0.0
    s = dyn.sigma1
    return b / (s * tau * math.sqrt(2.0 * math.pi * tau)) * math.exp(
        -((b - nu * tau) ** 2) / (2.0 * s * s * tau))


def expected_hitting_time(dyn: DamageDynamics, cost: CostSchedule, H: float) -> float:
    nu = dyn.log_drift(cost.q)
    if not nu > 0:
        raise DomainError(f"expected hitting time needs nu > 0 (nu={nu:g})")
    if H < dyn.S0:
        raise DomainError("expected hitting time needs H >= S0")
    return math.log(H / dyn.S0) / nu


def hitting_time_moments(dyn: DamageDynamics, cost: CostSchedule, H: float,
                         epsabs: float = 1e-8) -> tuple[float, float]:
    """(integral of g, integral of tau*g) over (0, inf) by adaptive quadrature.

    The upper limit starts at mean + 12 * ln(H/S0) sigma1 / nu^1.5 and is
    doubled until the remaining tail mass falls below 1e-9.
    """
    b, nu = _hitting_params(dyn, cost, H)
    mean = b / nu
    upper = mean + 12.0 * b * dyn.sigma1 / nu**1.5
    g = lambda x: hitting_time_density(dyn, cost, H, x)  # noqa: E731
    tg = lambda x: x * hitting_time_density(dyn, cost, H, x)  # noqa: E731

    def _quad(f, lo, hi):
        # split at the mean so the peak is never missed
        pts = [p for p in (0.5 * mean, mean, 2.0 * mean) if lo < p < hi]
        return integrate.quad(f, lo, hi, epsabs=epsabs, epsrel=1e-10, limit=500, points=pts or None)[0]

    mass = _quad(g, 0.0, upper)
    first = _quad(tg, 0.0, upper)
    while True:
        tail = _quad(g, upper, 2.0 * upper)
        tail_m = _quad(tg, upper, 2.0 * upper)
        mass += tail
        first += tail_m
        upper *= 2.0
        if tail < 1e-9 and tail_m < 1e-9:
            break
    return mass, first
