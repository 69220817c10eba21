"""Acceptance sweep for the whole library.

Each test covers one numbered claim, sweeps the stated instance count
at the stated tolerance, and prints exactly one verdict line (run with
``pytest tests/test_acceptance.py -s`` to watch them go by; on failure
the same line is the assertion message).  Budgets are asserted too;
they are generous on purpose and the sweeps sit far inside them.
"""

import time

import numpy as np
import pytest

import probeopt as po

from helpers import draw_instance, restricted_oracle_value


def _verdict(ok: bool, label: str, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}"
    print(line)
    assert ok, line


def test_01_two_state_exactness():
    t0 = time.perf_counter()
    worst = 0.0
    count = 500
    for seed in range(count):
        inst = draw_instance(seed, n_lo=1, n_hi=10, k_lo=2, k_hi=2)
        gain = po.evaluate_policy(inst, po.two_state_opt(inst)).gain
        worst = max(worst, abs(gain - po.exact_dp(inst).value))
    elapsed = time.perf_counter() - t0
    _verdict(
        worst <= 1e-9 and elapsed < 60.0,
        "two-state exactness",
        f"{count} instances (K=2, n<=10), max |gap| = {worst:.2e}, {elapsed:.1f}s",
    )


def test_02_reserve_class_optimality():
    t0 = time.perf_counter()
    worst = 0.0
    count = 200
    for seed in range(count):
        inst = draw_instance(1000 + seed, n_lo=1, n_hi=8, k_hi=4)
        for ell in [None, *range(inst.n)]:
            gain = po.evaluate_policy(inst, po.reserve_backup_policy(inst, ell)).gain
            worst = max(worst, abs(gain - restricted_oracle_value(inst, ell)))
    elapsed = time.perf_counter() - t0
    _verdict(
        worst <= 1e-9 and elapsed < 300.0,
        "reserve class optimality",
        f"{count} instances, every fallback incl. none, "
        f"max |gap| = {worst:.2e}, {elapsed:.1f}s",
    )


def test_03_four_fifths_guarantee():
    t0 = time.perf_counter()
    low = 1.0
    count = 500
    for seed in range(count):
        inst = draw_instance(2000 + seed, n_lo=1, n_hi=8, k_hi=4)
        gain = po.evaluate_policy(inst, po.best_reserve_backup(inst)).gain
        opt = po.exact_dp(inst).value
        if opt > 1e-12:
            low = min(low, gain / opt)
    elapsed = time.perf_counter() - t0
    _verdict(
        low >= 0.8 - 1e-9 and elapsed < 600.0,
        "4/5 guarantee",
        f"{count} instances, empirical min ratio = {low:.6f}, {elapsed:.1f}s",
    )


def test_04_adaptivity_worked_instance():
    t0 = time.perf_counter()
    inst = po.counterexample_instance(0.1)
    result = po.exact_dp(inst)
    heuristic = po.evaluate_policy(inst, po.best_reserve_backup(inst)).gain
    ratio = heuristic / result.value
    elapsed = time.perf_counter() - t0
    _verdict(
        result.tree.root.channel == 0 and ratio >= 0.998 and elapsed < 1.0,
        "adaptive worked instance",
        f"root probes channel 0, heuristic/optimal = {ratio:.6f}, {elapsed:.2f}s",
    )


def test_05_additive_scheme():
    t0 = time.perf_counter()
    worst = -1.0
    count = 102
    epsilons = (0.1, 0.2, 0.3)
    for seed in range(count):
        inst = draw_instance(
            3000 + seed, n_lo=1, n_hi=6, k_hi=4, cost_regime="equal"
        )
        opt = po.exact_dp(inst).value
        for eps in epsilons:
            gain = po.additive_approx(inst, eps).report.gain
            shortfall = opt - eps * inst.max_reward - gain
            worst = max(worst, shortfall)
    elapsed = time.perf_counter() - t0
    _verdict(
        worst <= 1e-9 and elapsed < 900.0,
        "additive scheme",
        f"{count} equal-cost instances x eps {epsilons}, "
        f"max shortfall past bound = {worst:.2e}, {elapsed:.1f}s",
    )


def test_06_charged_objective_guarantee():
    t0 = time.perf_counter()
    rng = np.random.default_rng(46)
    low = 1.0
    worst_eq = 0.0
    count = 300
    for seed in range(count):
        inst = draw_instance(4000 + seed, n_lo=1, n_hi=8, k_hi=4)
        x = float(rng.uniform(0.0, inst.max_reward))
        pol = po.best_reserve_backup(inst, x)
        gain = po.evaluate_policy(inst, pol, altered_threshold=x).gain
        opt = po.altered_optimum(inst, x).value
        assert gain >= (2.0 / 3.0) * opt - 1e-9, (seed, x, gain, opt)
        if opt > 1e-12:
            low = min(low, gain / opt)
        if inst.state_count == 2:
            worst_eq = max(worst_eq, abs(gain - opt))
    elapsed = time.perf_counter() - t0
    _verdict(
        worst_eq <= 1e-9 and elapsed < 600.0,
        "charged objective",
        f"{count} instances, min ratio = {low:.6f}, "
        f"K=2 max |gap| = {worst_eq:.2e}, {elapsed:.1f}s",
    )


def test_07_rate_limited_mixture():
    t0 = time.perf_counter()
    worst_rate = 0.0
    worst_short = -1.0
    count = 100
    slack = 0.05
    for seed in range(count):
        inst = draw_instance(5000 + seed, n_lo=1, n_hi=8, k_hi=4)
        factor = 1.0 if inst.state_count == 2 else 2.0 / 3.0
        for lam in (0.2, 0.5, 0.8):
            mix = po.solve_unsaturated(inst, lam, slack)
            worst_rate = max(
                worst_rate, abs(mix.transmit_prob - lam * (1.0 + slack))
            )
            q_star = po.rate_constrained_optimum(inst, mix.effective_rate).value
            assert mix.busy_slot_gain <= q_star + 1e-9, (seed, lam)
            worst_short = max(
                worst_short,
                factor * (1.0 - slack) * q_star - mix.busy_slot_gain,
            )
    elapsed = time.perf_counter() - t0
    _verdict(
        worst_rate <= 1e-12 and worst_short <= 1e-6 and elapsed < 900.0,
        "rate-limited mixture",
        f"{count} instances x 3 rates, max |rate miss| = {worst_rate:.1e}, "
        f"max guarantee shortfall = {worst_short:.2e}, {elapsed:.1f}s",
    )


def test_08_monte_carlo_agreement():
    # a million slots per instance; the queue check compares the
    # half-horizon and full-horizon backlog means, which would roughly
    # double under drift but stay put for a stable queue
    t0 = time.perf_counter()
    worst_z = 0.0
    worst_busy = 0.0
    slack = 0.05
    count = 10
    for seed in range(count):
        inst = draw_instance(6000 + seed, n_lo=2, n_hi=8, k_hi=4)
        pol = po.best_reserve_backup(inst)
        rep = po.evaluate_policy(inst, pol)
        sat = po.simulate_saturated(
            inst, pol, po.SimConfig(slots=100_000, replications=10, seed=seed)
        )
        z = abs(sat.mean_gain - rep.gain) / sat.se_gain if sat.se_gain else 0.0
        worst_z = max(worst_z, z)
        assert z <= 4.0, (seed, z)

        mix = po.solve_unsaturated(inst, 0.5, slack)
        full = po.simulate_unsaturated(
            inst, mix, po.SimConfig(slots=100_000, replications=10, seed=seed)
        )
        half = po.simulate_unsaturated(
            inst, mix, po.SimConfig(slots=50_000, replications=10, seed=seed)
        )
        worst_busy = max(worst_busy, abs(full.busy_fraction - 1.0 / (1.0 + slack)))
        assert full.mean_queue <= 1.5 * half.mean_queue + 2.0, seed
    elapsed = time.perf_counter() - t0
    _verdict(
        worst_z <= 4.0 and worst_busy <= 0.02 and elapsed < 600.0,
        "Monte Carlo agreement",
        f"{count} instances x 1e6 slots, max |z| = {worst_z:.2f}, "
        f"max busy-fraction miss = {worst_busy:.4f}, {elapsed:.1f}s",
    )


def test_09_scale_smoke():
    big = po.generate(po.GenSpec(n=2000, state_count=16), 0)
    t0 = time.perf_counter()
    po.best_reserve_backup(big)
    t_policy = time.perf_counter() - t0

    mid = po.generate(po.GenSpec(n=500, state_count=8), 1)
    t0 = time.perf_counter()
    po.solve_unsaturated(mid, 0.5, 0.05)
    t_mix = time.perf_counter() - t0
    _verdict(
        t_policy < 2.0 and t_mix < 10.0,
        "scale smoke",
        f"fallback search n=2000 K=16 in {t_policy:.2f}s, "
        f"rate-limited solve n=500 K=8 in {t_mix:.2f}s",
    )
