import csv
import json
import math
from dataclasses import replace

import numpy as np
import pytest
from scipy import integrate, stats

from bitebullet import (
    CostSchedule,
    SimConfig,
    Strategy,
    ValidationError,
    expected_hitting_time,
    hitting_time_density,
    pv_no_action,
    pv_with_action,
    run_ensemble,
    simulate_path,
    value_function,
)
from bitebullet.montecarlo import (
    bridge_crossing_probability,
    resolve_barrier,
    simulate_barriers,
    summarize,
    summary_json,
    write_histogram_csv,
    write_quantiles_csv,
)


@pytest.fixture
def flat(dyn):
    return replace(dyn, sigma1=0.0, sigma2=0.0)


def test_never_act_without_noise(flat, cost):
    out = simulate_path(flat, cost, Strategy.never(), SimConfig(), 0)
    assert out.total_damage == pytest.approx(77.44, abs=0.05)
    assert out.total_damage == pytest.approx(pv_no_action(flat, 1.0), rel=1e-5)
    assert not out.acted and out.tau is None and not out.overflow


def test_immediate_without_noise(flat, cost):
    out = simulate_path(flat, cost, Strategy.immediate(), SimConfig(), 3)
    assert out.acted and out.tau == 0.0
    assert out.total_damage == pytest.approx(104.60, abs=0.05)
    assert out.total_damage == pytest.approx(pv_with_action(flat, cost, 1.0), rel=1e-5)


def test_barrier_below_start_acts_at_once(dyn, cost):
    out = simulate_path(dyn, cost, Strategy.barrier(0.5), SimConfig(), 11)
    ref = simulate_path(dyn, cost, Strategy.immediate(), SimConfig(), 11)
    assert out == ref and out.tau == 0.0 and out.acted


@pytest.mark.parametrize("q", [0.0, 0.02])
def test_barrier_without_noise_matches_deterministic_value(flat, q):
    # deterministic path crosses H e^{qt} at ln(H)/(alpha1 - q); value from the zero-volatility limit
    c = CostSchedule(60.0, q)
    H = 4.0
    out = simulate_path(flat, c, Strategy.barrier(H), SimConfig(dt=0.01), 0)
    hit = math.log(H) / (flat.alpha1 - q)
    assert abs(out.tau - hit) <= 0.01
    assert out.total_damage == pytest.approx(value_function(flat, c, 1.0, 0.0, H), rel=2e-4)


def test_strategy_resolution(dyn, cost):
    s, lv = resolve_barrier(dyn, cost, Strategy.optimal())
    assert lv == pytest.approx(10.1915, abs=1e-4)
    assert resolve_barrier(dyn, cost, Strategy.never())[1] == math.inf
    assert resolve_barrier(dyn, CostSchedule(60.0, 0.05), Strategy.optimal()) == (Strategy.immediate(), 1.0)


def test_bridge_probability_examples():
    s, dt = 0.19, 0.1
    d = s * math.sqrt(dt)
    assert bridge_crossing_probability(0.0, math.log(2), math.log(2), math.log(2), s, dt) == 1.0
    assert bridge_crossing_probability(-d, -d, 0.0, 0.0, s, dt) == pytest.approx(math.exp(-2))
    assert bridge_crossing_probability(-d, -d, 0.0, 0.0, 0.0, dt) == 0.0


def test_bridge_probability_against_simulated_bridges():
    rng = np.random.default_rng(0)
    s, dt, n = 0.3, 0.1, 400
    a, b = -0.02, -0.03
    t = np.linspace(0, dt, n + 1)
    w = np.concatenate([np.zeros((20000, 1)), np.cumsum(rng.normal(0, s * math.sqrt(dt / n), (20000, n)), 1)], 1)
    bridge = a + w - t / dt * (w[:, -1:] - (b - a))
    frac = np.mean(bridge.max(1) >= 0.0)
    p = bridge_crossing_probability(a, b, 0.0, 0.0, s, dt)
    # discrete monitoring misses a little, so the fine-grid estimate sits slightly below
    assert p - 0.03 < frac <= p + 3 * math.sqrt(p * (1 - p) / 20000)


def test_hitting_time_law_long_horizon(dyn, cost):
    cfg = SimConfig(paths=4000, t_max=3000.0)
    dist = run_ensemble(dyn, cost, Strategy.barrier(2.0), cfg)
    tau = dist.tau[~np.isnan(dist.tau)]
    b, nu, s = math.log(2.0), dyn.log_drift(0.0), dyn.sigma1
    lam = b * b / (s * s)
    law = stats.invgauss((b / nu) / lam, scale=lam)
    assert dist.act_fraction == pytest.approx(law.cdf(3000.0), abs=3 * math.sqrt(law.sf(3000.0) / 4000) + 1e-3)
    se = tau.std(ddof=1) / math.sqrt(len(tau))
    assert abs(tau.mean() - expected_hitting_time(dyn, cost, 2.0)) < 3 * se + 0.3
    assert stats.kstest(tau, law.cdf).pvalue > 1e-3


def test_hitting_time_mean_truncated_at_horizon(dyn, cost):
    # at the default horizon the mean among acted paths is the truncated-law mean
    cfg = SimConfig(paths=4000)
    dist = run_ensemble(dyn, cost, Strategy.barrier(2.0), cfg)
    g = lambda t: hitting_time_density(dyn, cost, 2.0, t)  # noqa: E731
    mass = integrate.quad(g, 0, 600, points=[36.0], limit=200)[0]
    mean = integrate.quad(lambda t: t * g(t), 0, 600, points=[36.0], limit=200)[0] / mass
    tau = dist.tau[~np.isnan(dist.tau)]
    assert abs(tau.mean() - mean) < 3 * tau.std(ddof=1) / math.sqrt(len(tau)) + 0.3
    assert dist.act_fraction == pytest.approx(mass, abs=0.01)


def test_tail_closure_is_exact_without_noise(flat, cost):
    short = simulate_path(flat, cost, Strategy.never(), SimConfig(t_max=100.0), 0)
    long = simulate_path(flat, cost, Strategy.never(), SimConfig(t_max=600.0), 0)
    assert short.total_damage == pytest.approx(long.total_damage, rel=1e-6)


def test_tail_closure_is_unbiased_with_noise(dyn, cost):
    # paths share their first 1000 steps, so the difference isolates the closure
    a = run_ensemble(dyn, cost, Strategy.barrier(5.0), SimConfig(paths=3000, t_max=100.0))
    b = run_ensemble(dyn, cost, Strategy.barrier(5.0), SimConfig(paths=3000, t_max=600.0))
    diff = b.damage - a.damage
    assert abs(diff.mean()) < 3 * diff.std(ddof=1) / math.sqrt(len(diff)) + 1e-9


def test_time_step_refinement_without_noise(flat, cost):
    exact = pv_no_action(flat, 1.0)
    errs = [abs(simulate_path(flat, cost, Strategy.never(), SimConfig(dt=dt), 0).total_damage - exact)
            for dt in (0.8, 0.4, 0.2, 0.1)]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    # trapezoid rule: second order
    assert errs[-2] / errs[-1] == pytest.approx(4.0, rel=0.05)


def test_time_step_refinement_with_noise(dyn, cost):
    ref = value_function(dyn, cost, 1.0, 0.0, 10.1915)
    for dt in (0.2, 0.1, 0.05):
        d = run_ensemble(dyn, cost, Strategy.optimal(), SimConfig(paths=2000, dt=dt, seed=7))
        assert abs(d.mean - ref) < 0.01 * ref + 3 * d.std_error


def test_overflow_ceiling_closes_paths(dyn, cost):
    cfg = SimConfig(paths=200, ceiling=5.0)
    d = run_ensemble(dyn, cost, Strategy.never(), cfg)
    assert d.overflow_count > 0
    assert np.isfinite(d.damage).all()


def test_summary_statistics(dyn, cost):
    cfg = SimConfig(paths=1000, histogram_bins=20, quantile_levels=(0.1, 0.5, 0.9))
    d = run_ensemble(dyn, cost, Strategy.barrier(5.0), cfg)
    assert d.mean == pytest.approx(d.damage.mean())
    assert d.std_error == pytest.approx(d.damage.std(ddof=1) / math.sqrt(1000))
    assert list(d.quantiles) == [0.1, 0.5, 0.9]
    assert d.quantile(0.5) == pytest.approx(np.median(d.damage))
    assert d.hist_masses.sum() == pytest.approx(1.0)
    assert len(d.hist_edges) == 21 and d.hist_edges[0] == 0.0
    assert d.hist_edges[-1] == pytest.approx(np.quantile(d.damage, 0.995))
    assert (d.damage >= 0).all()


def test_summarize_counts_acted_paths():
    cfg = SimConfig(quantile_levels=(0.5,), histogram_bins=2)
    tau = np.array([1.0, np.nan, 3.0, np.nan])
    d = summarize(np.array([1.0, 2.0, 3.0, 4.0]), tau, np.zeros(4, bool), cfg)
    assert d.act_fraction == 0.5 and d.mean_tau_given_acted == 2.0 and d.mean == 2.5


def test_outputs_round_trip(dyn, cost, tmp_path):
    cfg = SimConfig(paths=500)
    d = run_ensemble(dyn, cost, Strategy.optimal(), cfg)
    write_quantiles_csv(d, tmp_path / "q.csv")
    write_histogram_csv(d, tmp_path / "h.csv")
    rows = list(csv.DictReader(open(tmp_path / "q.csv")))
    assert {float(r["level"]): float(r["value"]) for r in rows} == d.quantiles
    rows = list(csv.DictReader(open(tmp_path / "h.csv")))
    widths = np.array([float(r["bin_right"]) - float(r["bin_left"]) for r in rows])
    assert np.sum(widths * np.array([float(r["density"]) for r in rows])) == pytest.approx(1.0)
    s = json.loads(summary_json(d, cfg))
    assert s["mean"] == d.mean and s["config"]["seed"] == cfg.seed
    assert s["strategy"].startswith("optimal")


@pytest.mark.parametrize("kw", [dict(paths=0), dict(dt=0.0), dict(dt=2.0), dict(t_max=50.0),
                                dict(seed=-1), dict(quantile_levels=(0.5, 0.2)),
                                dict(quantile_levels=(1.0,)), dict(histogram_bins=0)])
def test_sim_config_validation(kw):
    with pytest.raises(ValidationError):
        SimConfig(**kw)


def test_step_count():
    assert SimConfig().n_steps == 6000
    assert SimConfig(dt=0.07, t_max=100).n_steps == math.ceil(100 / 0.07)
