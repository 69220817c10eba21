"""Shared test machinery.

Two jobs live here.  First, deterministic instance draws keyed by a
single integer so every test file can sweep seeds without sharing rng
state.  Second, slow reference evaluators that re-derive policy values
straight from the slot rules with plain Python loops over all K^n
state assignments.  They deliberately share no code with the package's
vectorized algebra, so agreement is evidence rather than tautology.
"""

from __future__ import annotations

import itertools

import numpy as np

import probeopt as po


def draw_instance(
    seed: int,
    n_lo: int = 1,
    n_hi: int = 8,
    k_lo: int = 2,
    k_hi: int = 4,
    prob_shape: str | None = None,
    cost_regime: str | None = None,
    cost_range: tuple[float, float] = (0.0, 0.3),
) -> po.Instance:
    """One deterministic instance per seed, cycling generator knobs."""
    g = np.random.default_rng(seed)
    n = int(g.integers(n_lo, n_hi + 1))
    k = int(g.integers(k_lo, k_hi + 1))
    spec = po.GenSpec(
        n=n,
        state_count=k,
        prob_shape=prob_shape or po.PROB_SHAPES[seed % len(po.PROB_SHAPES)],
        cost_regime=cost_regime or po.COST_REGIMES[seed % len(po.COST_REGIMES)],
        cost_range=cost_range,
    )
    return po.generate(spec, g)


def restricted_oracle_value(instance: po.Instance, backup: int | None) -> float:
    """Exact optimum of the reserve-a-fallback class.

    The fallback is the only legal unprobed transmission and may never
    itself be probed.  The no-fallback sentinel forbids unprobed
    transmission entirely; stopping silent stays legal there, and with
    the bottom reward pinned at zero a forced-transmission reading
    prices identically.
    """
    if backup is None:
        opts = po.OracleOptions(allowed_backups=())
    else:
        opts = po.OracleOptions(allowed_backups=(backup,), forbidden_probe=backup)
    return po.exact_dp(instance, opts).value


# -- slow evaluation ----------------------------------------------------


def iter_assignments(n: int, k: int):
    return itertools.product(range(k), repeat=n)


def assignment_weight(instance: po.Instance, states) -> float:
    w = 1.0
    for j, s in enumerate(states):
        w *= float(instance.probs[s, j])
    return w


def _close_threshold(instance, policy, best: int | None):
    """The closing decision, restated from the documented slot rules."""
    backup = policy.backup
    blind = None if backup is None else float(instance.blind_rewards[backup])
    th = policy.threshold
    if best is None:
        if backup is None:
            return ("silent",)
        if th is not None and blind < th:
            return ("silent",)
        return ("backup", backup)
    r = float(instance.rewards[best])
    top = r if blind is None else max(r, blind)
    if th is not None and top < th:
        return ("silent",)
    if blind is None or r >= blind:
        return ("transmit", None, best)
    return ("backup", backup)


def run_threshold(instance, policy, states):
    """Hand-executed level-list walk: before each probe, stop if the
    best observation so far already reaches that probe's level."""
    best: int | None = None
    probed: list[int] = []
    for lev, chans in policy.levels:
        for ch in chans:
            if best is not None and best >= lev:
                return probed, _close_threshold(instance, policy, best)
            probed.append(ch)
            s = int(states[ch])
            if best is None or s > best:
                best = s
    return probed, _close_threshold(instance, policy, best)


def run_exhaust(instance, policy, states):
    """Two-state probe-until-success walk, independent of the
    level-list conversion."""
    probed = []
    for ch in policy.probe_order:
        probed.append(ch)
        if states[ch] == 1:
            return probed, ("transmit", None, 1)
    return probed, ("backup", policy.backup)


def _run_policy(instance, policy, states):
    if isinstance(policy, po.ThresholdPolicy):
        return run_threshold(instance, policy, states)
    if isinstance(policy, po.ExhaustPolicy):
        return run_exhaust(instance, policy, states)
    return policy.act(states)


def slow_report(instance, policy, altered_threshold=None):
    """(gain, transmit_prob, probe_cost, state_mass) by full enumeration."""
    if isinstance(policy, po.MixedPolicy):
        a = policy.alpha
        g1, t1, c1, m1 = slow_report(
            instance, policy.policy_plus, altered_threshold
        )
        g0, t0, c0, m0 = slow_report(
            instance, policy.policy_minus, altered_threshold
        )
        return (
            a * g1 + (1 - a) * g0,
            a * t1 + (1 - a) * t0,
            a * c1 + (1 - a) * c0,
            a * m1 + (1 - a) * m0,
        )
    k, n = instance.state_count, instance.n
    mass = np.zeros(k)
    cost = 0.0
    for states in iter_assignments(n, k):
        w = assignment_weight(instance, states)
        if w == 0.0:
            continue
        probed, action = _run_policy(instance, policy, states)
        assert len(set(probed)) == len(probed), "slow walker saw a repeat probe"
        cost += w * sum(float(instance.costs[j]) for j in probed)
        if action[0] == "transmit":
            mass[action[2]] += w
        elif action[0] == "backup":
            mass[int(states[action[1]])] += w
        else:
            assert action[0] == "silent"
    gain = float(mass @ instance.rewards) - cost
    tx = float(mass.sum())
    if altered_threshold is not None:
        gain -= float(altered_threshold) * tx
    return gain, tx, cost, mass


# -- brute-force optimum of the fixed-prefix class ----------------------


def prefix_class_optimum(instance, backup: int, escape_state: int) -> float:
    """Exhaustive best value over fixed-prefix policies with the given
    fallback and escape floor.

    Backbones are ordered tuples over the other channels; observations
    at or below the floor are discarded and the walk continues, an
    observation above it escapes into an optimal continuation on the
    not-yet-probed channels (the fallback included), priced by the
    restricted oracle on the shifted leftover system.  Exhausting the
    backbone transmits the fallback blind.  Only sensible at n <= 5.
    """
    n, k = instance.n, instance.state_count
    probs, r, costs = instance.probs, instance.rewards, instance.costs
    others = [j for j in range(n) if j != backup]
    blind = float(instance.blind_rewards[backup])
    esc_cache: dict = {}

    def escape_value(remaining: tuple, s: int) -> float:
        if s == k - 1 or not remaining:
            return 0.0
        key = (remaining, s)
        if key not in esc_cache:
            new_r = [0.0] + [float(r[t] - r[s]) for t in range(s + 1, k)]
            cols = []
            for j in remaining:
                base = float(probs[: s + 1, j].sum())
                cols.append([base] + [float(probs[t, j]) for t in range(s + 1, k)])
            sub = po.Instance.from_arrays(
                new_r,
                np.array(cols).T,
                [float(costs[j]) for j in remaining],
                validate=False,
            )
            esc_cache[key] = po.exact_dp(
                sub, po.OracleOptions(allowed_backups=())
            ).value
        return esc_cache[key]

    def backbone_value(perm) -> float:
        val, reach = 0.0, 1.0
        probed: list[int] = []
        for ch in perm:
            val -= reach * float(costs[ch])
            probed.append(ch)
            rem = tuple(j for j in range(n) if j not in probed)
            for s in range(escape_state + 1, k):
                p = float(probs[s, ch])
                if p > 0.0:
                    val += reach * p * (float(r[s]) + escape_value(rem, s))
            reach *= float(probs[: escape_state + 1, ch].sum())
        return val + reach * blind

    best = blind
    for size in range(1, len(others) + 1):
        for perm in itertools.permutations(others, size):
            best = max(best, backbone_value(perm))
    return best
