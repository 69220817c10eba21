"""Equal-cost solver with an additive optimality guarantee.

The one-fallback family searched by ``best_reserve_backup`` can leave a
constant fraction of the optimum on the table.  When every channel
charges the same probing cost c, a richer family closes the gap to an
additive epsilon * (top reward):

* If c is at most epsilon * (top reward), probing is nearly free and
  the no-fallback level-list policy already loses at most one probe
  cost against the unrestricted optimum.

* Otherwise rewards are coarsened onto a grid of width epsilon / 2 and
  the solver enumerates policies of a restricted shape: a backbone of
  probes that keeps going while observations stay at or below an
  escape state i, ending in a blind send of a designated fallback; the
  first observation above i ("an escape") hands the slot to a
  no-fallback level-list subtree over the remaining channels, scored
  on rewards shifted down by the escape reward, with the escaped
  channel transmitted if the subtree finds nothing better.  Probes on
  the backbone past the first escape with probability more than
  epsilon / 2 each, so backbones longer than h = 1 + ceil(log(eps/2) /
  log(1 - eps/2)) add less than (epsilon / 2) * (top reward) and are
  not enumerated.

Some optimal policy has exactly this backbone-plus-escapes shape for
the right fallback and escape state, so enumerating every (fallback,
escape state, backbone) triple and keeping the best loses only the
coarsening and truncation budgets.  The winner is mapped back to the
original reward scale before it is returned: decisions fire on the
grid cell of each observation, transmitted rewards are the original
ones, so the reported gain can only improve on the bucketed figure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    GainReport,
    Instance,
    PolicyStructureError,
    ProbingError,
    RepeatedProbe,
    UnknownChannel,
    evaluate_policy,
)
from .multi_state import (
    ThresholdPolicy,
    _stop_profile,
    _workspace,
    reserve_backup_policy,
)

__all__ = [
    "AdditiveCertificate",
    "AdditiveResult",
    "CandidateBudgetExceeded",
    "EpsilonOutOfRange",
    "PrefixTreePolicy",
    "UnequalCosts",
    "additive_approx",
    "best_prefix_policy",
    "shifted_rewards",
]


class EpsilonOutOfRange(ProbingError):
    pass


class UnequalCosts(ProbingError):
    pass


class CandidateBudgetExceeded(ProbingError):
    pass


def shifted_rewards(rewards, escape_state: int) -> np.ndarray:
    """Reward scale as seen after holding a channel at ``escape_state``:
    states at or below it are worth nothing extra, higher states their
    margin over it."""
    r = np.asarray(rewards, dtype=float)
    if not 0 <= escape_state < r.shape[0]:
        raise IndexError(f"escape state {escape_state} out of range")
    return np.where(np.arange(r.shape[0]) > escape_state, r - r[escape_state], 0.0)


# -- the backbone-plus-escapes policy object ----------------------------


@dataclass(frozen=True, eq=False)
class PrefixTreePolicy:
    """Backbone of probes with per-escape level-list subtrees.

    The backbone channels are probed in order while every observation
    stays below ``escape_min``; exhausting it sends ``backup`` blind.
    An observation at state s >= escape_min stops the backbone and runs
    ``subtrees[t][s - escape_min]``, a pair (send_min, levels): the
    level lists are probed exactly like a ThresholdPolicy's, and the
    slot closes on the best observation seen inside the subtree if that
    reaches send_min, otherwise on the escaped channel itself.  The
    fallback is never sent on escape paths, but the subtrees may probe
    it.  ``escape_min`` equal to the state count means the backbone
    never breaks.
    """

    backup: int
    escape_min: int
    backbone: tuple[int, ...]
    subtrees: tuple[
        tuple[tuple[int, tuple[tuple[int, tuple[int, ...]], ...]], ...], ...
    ]

    def __post_init__(self) -> None:
        object.__setattr__(self, "backbone", tuple(int(j) for j in self.backbone))
        object.__setattr__(
            self,
            "subtrees",
            tuple(
                tuple(
                    (
                        int(send_min),
                        tuple((int(u), tuple(int(c) for c in mem)) for u, mem in levels),
                    )
                    for send_min, levels in per_state
                )
                for per_state in self.subtrees
            ),
        )

    def validate(self, instance: Instance) -> None:
        k = instance.state_count
        if not 0 <= self.backup < instance.n:
            raise UnknownChannel(f"backup index {self.backup} out of range")
        if not 0 <= self.escape_min <= k:
            raise PolicyStructureError(
                f"escape_min {self.escape_min} outside 0..{k}"
            )
        if self.backup in self.backbone:
            raise PolicyStructureError("fallback appears on the backbone")
        if len(set(self.backbone)) != len(self.backbone):
            raise RepeatedProbe("backbone repeats a channel")
        if self.escape_min < k and len(self.subtrees) != len(self.backbone):
            raise PolicyStructureError("one subtree row per backbone probe")
        for t, per_state in enumerate(self.subtrees[: len(self.backbone)]):
            if self.escape_min < k and len(per_state) != k - self.escape_min:
                raise PolicyStructureError(
                    f"backbone slot {t}: need one subtree per escape state"
                )
            probed = set(self.backbone[: t + 1])
            for send_min, levels in per_state:
                if not 0 <= send_min <= k:
                    raise PolicyStructureError(f"send_min {send_min} out of range")
                seen = set(probed)
                last_u = None
                for u, mem in levels:
                    if last_u is not None and u >= last_u:
                        raise PolicyStructureError("subtree levels must descend")
                    last_u = u
                    if not 0 <= u < k:
                        raise PolicyStructureError(f"subtree level {u} out of range")
                    for c in mem:
                        if not 0 <= c < instance.n:
                            raise UnknownChannel(f"subtree probes channel {c}")
                        if c in seen:
                            raise RepeatedProbe(
                                f"channel {c} probed twice on one path"
                            )
                        seen.add(c)

    def _gain_report(self, instance: Instance, altered_threshold=None) -> GainReport:
        self.validate(instance)
        ws = _workspace(instance)
        probs = instance.probs
        k = instance.state_count
        states = np.arange(k)
        mass = np.zeros(k)
        cost = 0.0
        reach = 1.0
        for t, m in enumerate(self.backbone):
            if reach <= 0.0:
                break
            cost += reach * instance.costs[m]
            if self.escape_min >= k:
                continue
            col = probs[:, m]
            for s in range(self.escape_min, k):
                w = reach * col[s]
                if w <= 0.0:
                    continue
                send_min, levels = self.subtrees[t][s - self.escape_min]
                arrays = [(u, np.array(mem, dtype=int)) for u, mem in levels]
                sub_cost, stopped, none = _stop_profile(ws, arrays)
                cost += w * sub_cost
                mass += w * np.where(states >= send_min, stopped, 0.0)
                mass[s] += w * (none + float(stopped[:send_min].sum()))
            reach *= float(col[: self.escape_min].sum())
        mass += reach * probs[:, self.backup]
        return GainReport.assemble(instance, mass, cost, altered_threshold)

    # -- execution ------------------------------------------------------

    def act(self, states) -> tuple[list[int], tuple]:
        """Run one slot.  Same return contract as DecisionTree.act."""
        probed: list[int] = []
        for t, m in enumerate(self.backbone):
            probed.append(m)
            s = int(states[m])
            if s < self.escape_min:
                continue
            # escape: run the subtree's level lists on their own
            # observations, then close on its best find or fall back
            # to the channel in hand
            send_min, levels = self.subtrees[t][s - self.escape_min]
            best, best_chan = -1, None
            done = False
            for u, mem in levels:
                if best >= u:
                    break
                for c in mem:
                    probed.append(c)
                    sc = int(states[c])
                    if sc > best:
                        best, best_chan = sc, c
                    if sc >= u:
                        done = True
                        break
                if done:
                    break
            if best_chan is not None and best >= send_min:
                return probed, ("transmit", best_chan, best)
            return probed, ("transmit", m, s)
        return probed, ("backup", self.backup)

    # -- serialization --------------------------------------------------

    def to_dict(self, names: tuple[str, ...] | None = None) -> dict:
        nm = (lambda j: names[j]) if names else (lambda j: str(j + 1))
        return {
            "kind": "prefix-tree",
            "backup": nm(self.backup),
            "escape_min": self.escape_min,
            "backbone": [nm(j) for j in self.backbone],
            "subtrees": [
                [
                    {
                        "state": self.escape_min + q,
                        "send_min": send_min,
                        "levels": [
                            {"level": u, "channels": [nm(c) for c in mem]}
                            for u, mem in levels
                        ],
                    }
                    for q, (send_min, levels) in enumerate(per_state)
                ]
                for per_state in self.subtrees
            ],
        }

    @classmethod
    def from_dict(cls, data: dict, instance: Instance | None = None) -> "PrefixTreePolicy":
        idx = instance.index_of if instance is not None else (lambda s: int(s) - 1)
        return cls(
            backup=idx(data["backup"]),
            escape_min=int(data["escape_min"]),
            backbone=tuple(idx(c) for c in data["backbone"]),
            subtrees=tuple(
                tuple(
                    (
                        int(entry["send_min"]),
                        tuple(
                            (int(lv["level"]), tuple(idx(c) for c in lv["channels"]))
                            for lv in entry["levels"]
                        ),
                    )
                    for entry in per_state
                )
                for per_state in data["subtrees"]
            ),
        )


# -- escape subtrees ----------------------------------------------------


def _escape_subtree(
    instance: Instance, remaining: frozenset, escape_state: int, memo: dict
) -> tuple[float, ThresholdPolicy, tuple[int, ...]]:
    """Best no-fallback continuation after holding ``escape_state`` with
    only ``remaining`` unprobed, scored on the shifted reward scale.
    The send-or-hold call at the end is free to hold, so the subtree is
    built with a zero decision bar.  Memoized: the value only depends
    on the remaining set and the escape state."""
    key = (remaining, escape_state)
    hit = memo.get(key)
    if hit is not None:
        return hit
    order = tuple(sorted(remaining))
    r = instance.rewards
    k = instance.state_count
    sub_rewards = np.concatenate([[0.0], r[escape_state + 1 :] - r[escape_state]])
    probs = instance.probs[:, order]
    sub_probs = np.vstack(
        [probs[: escape_state + 1].sum(axis=0), probs[escape_state + 1 :]]
    )
    sub = Instance.from_arrays(
        sub_rewards, sub_probs, instance.costs[list(order)], validate=False
    )
    policy = reserve_backup_policy(sub, None, 0.0)
    gain = evaluate_policy(sub, policy).gain
    out = (float(gain), policy, order)
    memo[key] = out
    return out


def _translate_subtree(
    policy: ThresholdPolicy, order: tuple[int, ...], escape_state: int
) -> tuple[int, tuple[tuple[int, tuple[int, ...]], ...]]:
    """Map a shifted-scale subtree back to host states and channel ids.
    Shifted state u corresponds to host state escape_state + u for
    u >= 1; the send floor is the first state past the escape."""
    levels = tuple(
        (escape_state + u, tuple(order[c] for c in mem))
        for u, mem in policy.levels
    )
    return escape_state + 1, levels


# -- backbone enumeration -----------------------------------------------


def best_prefix_policy(
    instance: Instance,
    backup: int,
    escape_state: int,
    max_length: int | None = None,
    *,
    _memo: dict | None = None,
    _counter: list | None = None,
) -> tuple[PrefixTreePolicy, float]:
    """Best backbone-plus-escapes policy for one (fallback, escape
    state) pair, searching backbones up to ``max_length`` probes (all
    lengths when None).  Every backbone prefix is itself a candidate;
    escape continuations are optimal by construction, so only the
    backbone is enumerated.  Returns the policy and its gain."""
    if not 0 <= backup < instance.n:
        raise UnknownChannel(f"backup index {backup} out of range")
    if not 0 <= escape_state < instance.state_count:
        raise IndexError(f"escape state {escape_state} out of range")
    memo = {} if _memo is None else _memo
    counter = [0] if _counter is None else _counter
    k = instance.state_count
    probs = instance.probs
    r = instance.rewards
    costs = instance.costs
    blind_l = float(probs[:, backup] @ r)
    cont = probs[: escape_state + 1].sum(axis=0)
    pool = [j for j in range(instance.n) if j != backup]
    cap = len(pool) if max_length is None else min(max_length, len(pool))
    everything = frozenset(range(instance.n))

    best_val = -np.inf
    best_pi: tuple[int, ...] = ()

    def escape_value(m: int, remaining: frozenset) -> float:
        total = 0.0
        for s in range(escape_state + 1, k):
            p = probs[s, m]
            if p > 0.0:
                total += p * (r[s] + _escape_subtree(instance, remaining, s, memo)[0])
        return total

    def rec(acc: float, reach: float, used: frozenset, prefix: tuple) -> None:
        nonlocal best_val, best_pi
        counter[0] += 1
        val = acc + reach * blind_l
        if val > best_val:
            best_val, best_pi = val, prefix
        if len(prefix) == cap or reach <= 0.0:
            return
        for m in pool:
            if m in used:
                continue
            taken = used | {m}
            esc = escape_value(m, everything - taken)
            rec(
                acc + reach * (esc - costs[m]),
                reach * float(cont[m]),
                taken,
                prefix + (m,),
            )

    rec(0.0, 1.0, frozenset(), ())

    subtrees = []
    probed: set[int] = set()
    for m in best_pi:
        probed.add(m)
        remaining = everything - probed
        per_state = tuple(
            _translate_subtree(
                *_escape_subtree(instance, remaining, s, memo)[1:], s
            )
            for s in range(escape_state + 1, k)
        )
        subtrees.append(per_state)
    policy = PrefixTreePolicy(
        backup=backup,
        escape_min=escape_state + 1,
        backbone=best_pi,
        subtrees=tuple(subtrees),
    )
    return policy, float(best_val)


# -- reward coarsening --------------------------------------------------


def _coarsen(instance: Instance, width: float):
    """Snap rewards down onto a grid of ``width`` and merge states that
    land on the same cell.  Returns the coarse instance, the state ->
    cell map, and per cell the first original state in it (with a
    sentinel entry at the end).  The merge can concentrate all mass on
    the top cell, so the coarse instance skips validation."""
    codes = np.floor(instance.rewards / width + 1e-12).astype(int)
    cells, cell_of = np.unique(codes, return_inverse=True)
    acc = np.zeros((cells.shape[0], instance.n))
    np.add.at(acc, cell_of, instance.probs)
    coarse = Instance.from_arrays(
        cells * width, acc, instance.costs, names=instance.names, validate=False
    )
    first_of = np.concatenate(
        [np.searchsorted(cell_of, np.arange(cells.shape[0])), [instance.state_count]]
    )
    return coarse, cell_of, first_of


def _lift(
    policy: PrefixTreePolicy, cell_of: np.ndarray, first_of: np.ndarray, k: int
) -> PrefixTreePolicy:
    """Re-express a coarse-state policy over the original states: every
    coarse threshold becomes the first original state of its cell, and
    escapes are split per original state (states sharing a cell share
    their subtree)."""
    escape_min = int(first_of[policy.escape_min])
    subtrees = []
    for per_cell in policy.subtrees:
        per_state = []
        for s in range(escape_min, k):
            cell = int(cell_of[s])
            send_min, levels = per_cell[cell - policy.escape_min]
            per_state.append(
                (
                    int(first_of[send_min]),
                    tuple((int(first_of[u]), mem) for u, mem in levels),
                )
            )
        subtrees.append(tuple(per_state))
    return PrefixTreePolicy(
        backup=policy.backup,
        escape_min=escape_min,
        backbone=policy.backbone,
        subtrees=tuple(subtrees),
    )


# -- the solver ----------------------------------------------------------


@dataclass(frozen=True)
class AdditiveCertificate:
    """What the solver actually did: which branch ran, the coarsening
    and enumeration parameters, and the winner's coarse-scale gain (the
    quantity the guarantee is proved for; the reported original-scale
    gain can only be higher)."""

    branch: str
    epsilon: float
    probe_cost: float
    path_bound: int | None
    cell_count: int | None
    candidates: int
    budget: int
    coarse_gain: float | None
    backup: int | None
    escape_state: int | None


@dataclass(frozen=True)
class AdditiveResult:
    policy: object
    report: GainReport
    certificate: AdditiveCertificate


def additive_approx(
    instance: Instance, epsilon: float, *, max_candidates: int = 10**8
) -> AdditiveResult:
    """Equal-cost policy within epsilon * (top reward) of the optimum.

    Requires every channel to charge the same probing cost.  Raises
    CandidateBudgetExceeded before enumerating when the backbone count
    n * cells * sum over lengths of P(n - 1, length) would pass
    ``max_candidates``; the count is polynomial for fixed epsilon but
    grows quickly with n once h exceeds a handful."""
    if not 0.0 < epsilon <= 1.0:
        raise EpsilonOutOfRange(f"epsilon must be in (0, 1], got {epsilon}")
    costs = instance.costs
    if not np.all(costs == costs[0]):
        raise UnequalCosts("the additive scheme needs equal probing costs")
    c = float(costs[0])
    rmax = instance.max_reward

    if c <= epsilon * rmax:
        # probing is cheap enough that exhausting without a fallback
        # wastes at most one probe cost against the optimum
        policy = reserve_backup_policy(instance, None, None)
        return AdditiveResult(
            policy,
            evaluate_policy(instance, policy),
            AdditiveCertificate(
                branch="cheap-probes",
                epsilon=epsilon,
                probe_cost=c,
                path_bound=None,
                cell_count=None,
                candidates=0,
                budget=max_candidates,
                coarse_gain=None,
                backup=None,
                escape_state=None,
            ),
        )

    half = epsilon / 2.0
    coarse, cell_of, first_of = _coarsen(instance, half)
    kc = coarse.state_count
    h = 1 + math.ceil(math.log(half) / math.log(1.0 - half))
    n = instance.n
    cap = min(h, n - 1)
    per_pair = sum(math.perm(n - 1, t) for t in range(cap + 1))
    count = n * kc * per_pair
    if count > max_candidates:
        raise CandidateBudgetExceeded(
            f"{count} backbone candidates exceed the budget of {max_candidates}"
        )

    memo: dict = {}
    counter = [0]
    best = None
    best_val = -np.inf
    for backup in range(n):
        for i in range(kc):
            policy, val = best_prefix_policy(
                coarse, backup, i, h, _memo=memo, _counter=counter
            )
            if val > best_val:
                best, best_val = (policy, backup, i), val
    policy_c, backup, i = best
    lifted = _lift(policy_c, cell_of, first_of, instance.state_count)
    return AdditiveResult(
        lifted,
        evaluate_policy(instance, lifted),
        AdditiveCertificate(
            branch="coarsened",
            epsilon=epsilon,
            probe_cost=c,
            path_bound=h,
            cell_count=kc,
            candidates=counter[0],
            budget=max_candidates,
            coarse_gain=float(best_val),
            backup=backup,
            escape_state=i,
        ),
    )
