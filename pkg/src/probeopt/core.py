"""Shared model types for multichannel probe-and-transmit optimization.

The setting: a sender holds one packet per slot and owns ``n`` channels.
Channel ``j`` is in a random state drawn fresh each slot from a known
distribution over ``K`` ordered states; state ``u`` carries reward
``rewards[u]`` (throughput if the packet is sent on a channel in that
state), with ``rewards[0] == 0`` and rewards strictly increasing.  Paying
``cost_j`` reveals channel ``j``'s current state.  After any number of
probes the sender transmits on one channel, either a probed one (reward
known) or an unprobed backup (reward is the channel's mean), or stays
silent.  A policy's gain is expected reward minus expected probing cost.

This module holds the instance container, validation, tail statistics,
the gain report produced by every evaluator, and JSON serialization.
Solvers live in :mod:`probeopt.two_state`, :mod:`probeopt.multi_state`,
:mod:`probeopt.additive`, :mod:`probeopt.lagrange`; the brute-force
reference in :mod:`probeopt.oracle`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "PROB_TOL",
    "ProbingError",
    "Violation",
    "InstanceValidationError",
    "LevelOutOfRange",
    "PolicyStructureError",
    "RepeatedProbe",
    "UnknownChannel",
    "BackupProbed",
    "InconsistentLeaf",
    "ChannelStats",
    "Instance",
    "validate_instance",
    "TailStats",
    "tail_stats",
    "blind_backup_reward",
    "GainReport",
    "evaluate_policy",
    "load_instance",
    "save_instance",
]

# Absolute slack for probability mass checks.
PROB_TOL = 1e-12


class ProbingError(Exception):
    """Base class for every error raised by this package."""


@dataclass(frozen=True)
class Violation:
    """One validation finding: a stable code, the offending channel (or
    None for instance-wide problems), and a human-readable detail."""

    code: str
    channel: str | None
    detail: str

    def __str__(self) -> str:
        where = f" [channel {self.channel}]" if self.channel is not None else ""
        return f"{self.code}{where}: {self.detail}"


class InstanceValidationError(ProbingError):
    def __init__(self, violations: Sequence[Violation]):
        self.violations = tuple(violations)
        super().__init__("; ".join(str(v) for v in self.violations))

    def codes(self) -> tuple[str, ...]:
        return tuple(v.code for v in self.violations)


class LevelOutOfRange(ProbingError, IndexError):
    """State index outside ``0..K-1``."""


class PolicyStructureError(ProbingError):
    """A policy object violates the rules of the probing game."""


class RepeatedProbe(PolicyStructureError):
    pass


class UnknownChannel(PolicyStructureError):
    pass


class BackupProbed(PolicyStructureError):
    pass


class InconsistentLeaf(PolicyStructureError):
    pass


@dataclass(frozen=True, eq=False)
class ChannelStats:
    """One channel: a name, a probing cost, and a state distribution.

    ``probs[u]`` is the per-slot probability of state ``u``.  The array is
    copied and frozen on construction.
    """

    name: str
    cost: float
    probs: np.ndarray

    def __post_init__(self) -> None:
        p = np.array(self.probs, dtype=float, copy=True)
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "cost", float(self.cost))
        object.__setattr__(self, "name", str(self.name))

    def __repr__(self) -> str:
        return (
            f"ChannelStats(name={self.name!r}, cost={self.cost!r}, "
            f"probs={self.probs.tolist()!r})"
        )


@dataclass(frozen=True, eq=False)
class Instance:
    """A probing problem: shared state rewards plus per-channel stats.

    Frozen and identity-hashed, so solver caches can key on it.  Use
    :func:`validate_instance` to check model assumptions; constructors in
    this package validate by default and internal transforms opt out.
    """

    rewards: np.ndarray
    channels: tuple[ChannelStats, ...]

    def __post_init__(self) -> None:
        r = np.array(self.rewards, dtype=float, copy=True)
        r.setflags(write=False)
        object.__setattr__(self, "rewards", r)
        object.__setattr__(self, "channels", tuple(self.channels))

    # -- shapes ---------------------------------------------------------

    @property
    def state_count(self) -> int:
        return len(self.rewards)

    @property
    def n(self) -> int:
        return len(self.channels)

    @property
    def max_reward(self) -> float:
        return float(self.rewards[-1])

    # -- derived arrays (cached; instances are immutable) ---------------

    @cached_property
    def probs(self) -> np.ndarray:
        """State distributions, shape ``(K, n)``, one column per channel."""
        out = np.column_stack([ch.probs for ch in self.channels])
        out.setflags(write=False)
        return out

    @cached_property
    def costs(self) -> np.ndarray:
        out = np.array([ch.cost for ch in self.channels], dtype=float)
        out.setflags(write=False)
        return out

    @cached_property
    def names(self) -> tuple[str, ...]:
        return tuple(ch.name for ch in self.channels)

    @cached_property
    def blind_rewards(self) -> np.ndarray:
        """Expected reward of an unprobed transmission, per channel."""
        out = self.rewards @ self.probs
        out.setflags(write=False)
        return out

    # -- constructors and transforms ------------------------------------

    @classmethod
    def from_arrays(
        cls,
        rewards: Sequence[float] | np.ndarray,
        probs: Sequence[Sequence[float]] | np.ndarray,
        costs: Sequence[float] | np.ndarray,
        names: Sequence[str] | None = None,
        *,
        validate: bool = True,
    ) -> "Instance":
        """Build an instance from a ``(K, n)`` probability matrix.

        Column ``j`` of ``probs`` is channel ``j``'s distribution.  Names
        default to "1".."n".
        """
        p = np.asarray(probs, dtype=float)
        if p.ndim != 2:
            raise InstanceValidationError(
                [Violation("bad-prob-shape", None, "probs must be a 2-d matrix")]
            )
        k, n = p.shape
        c = np.asarray(costs, dtype=float)
        if c.shape != (n,):
            raise InstanceValidationError(
                [Violation("bad-prob-shape", None, "costs length must match columns")]
            )
        if names is None:
            names = [str(j + 1) for j in range(n)]
        channels = tuple(
            ChannelStats(name=names[j], cost=float(c[j]), probs=p[:, j])
            for j in range(n)
        )
        inst = cls(rewards=np.asarray(rewards, dtype=float), channels=channels)
        if validate:
            validate_instance(inst)
        return inst

    def subset(self, indices: Iterable[int], *, validate: bool = False) -> "Instance":
        """A new instance over the given channel indices, order preserved."""
        picked = tuple(self.channels[int(i)] for i in indices)
        inst = Instance(rewards=self.rewards, channels=picked)
        if validate:
            validate_instance(inst)
        return inst

    def with_rewards(
        self, rewards: Sequence[float] | np.ndarray, *, validate: bool = False
    ) -> "Instance":
        """Same channels, different reward vector."""
        inst = Instance(rewards=np.asarray(rewards, dtype=float), channels=self.channels)
        if validate:
            validate_instance(inst)
        return inst

    def index_of(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise UnknownChannel(f"no channel named {name!r}") from None

    def __repr__(self) -> str:
        return (
            f"Instance(K={self.state_count}, n={self.n}, "
            f"rewards={self.rewards.tolist()!r})"
        )


def validate_instance(
    instance: Instance,
    *,
    allow_positive_base_reward: bool = False,
    renormalize: bool = False,
) -> Instance:
    """Check model assumptions; raise :class:`InstanceValidationError`
    listing every violation found, or return a clean instance.

    With ``renormalize=True``, state distributions with positive mass are
    rescaled to sum to one (and not flagged); the repaired instance is
    returned.  Checks, with their violation codes:

    * "too-few-states", "no-channels": shape floor (K >= 2, n >= 1).
    * "nonzero-base-reward": ``rewards[0] != 0`` unless allowed.
    * "non-increasing-rewards": rewards must be strictly increasing.
    * "reward-out-of-range": rewards outside ``[0, 1]``.
    * "negative-cost".
    * "bad-prob-shape": a channel's vector length differs from K.
    * "prob-out-of-range": an entry outside ``[0, 1]``.
    * "probs-not-normalized": mass differs from 1 beyond ``PROB_TOL``.
    * "certain-top-state": all mass on the top state, so probing that
      channel can never reveal anything and the tail recursions divide
      by zero one level down.
    * "duplicate-name".
    """
    violations: list[Violation] = []
    r = instance.rewards
    k = instance.state_count

    if k < 2:
        violations.append(
            Violation("too-few-states", None, f"need at least 2 states, got {k}")
        )
    if instance.n < 1:
        violations.append(Violation("no-channels", None, "need at least one channel"))
    if k >= 1:
        if not allow_positive_base_reward and r[0] != 0.0:
            violations.append(
                Violation("nonzero-base-reward", None, f"rewards[0] = {r[0]!r}")
            )
        if np.any(np.diff(r) <= 0):
            violations.append(
                Violation(
                    "non-increasing-rewards",
                    None,
                    f"rewards must be strictly increasing, got {r.tolist()!r}",
                )
            )
        if np.any(r < 0.0) or np.any(r > 1.0 + PROB_TOL):
            violations.append(
                Violation(
                    "reward-out-of-range", None, f"rewards outside [0, 1]: {r.tolist()!r}"
                )
            )

    seen: set[str] = set()
    repaired: list[ChannelStats] = []
    any_repair = False
    for ch in instance.channels:
        if ch.name in seen:
            violations.append(Violation("duplicate-name", ch.name, "name reused"))
        seen.add(ch.name)
        if ch.cost < 0.0:
            violations.append(
                Violation("negative-cost", ch.name, f"cost = {ch.cost!r}")
            )
        p = ch.probs
        if p.shape != (k,):
            violations.append(
                Violation(
                    "bad-prob-shape",
                    ch.name,
                    f"expected {k} state probabilities, got shape {p.shape}",
                )
            )
            repaired.append(ch)
            continue
        if np.any(p < -PROB_TOL) or np.any(p > 1.0 + PROB_TOL):
            violations.append(
                Violation("prob-out-of-range", ch.name, f"probs = {p.tolist()!r}")
            )
        total = float(p.sum())
        if abs(total - 1.0) > PROB_TOL:
            if renormalize and total > PROB_TOL:
                ch = ChannelStats(name=ch.name, cost=ch.cost, probs=p / total)
                any_repair = True
            else:
                violations.append(
                    Violation(
                        "probs-not-normalized", ch.name, f"mass sums to {total!r}"
                    )
                )
        if k >= 2 and float(ch.probs[-1]) >= 1.0 - PROB_TOL:
            violations.append(
                Violation(
                    "certain-top-state",
                    ch.name,
                    "top state must have probability < 1",
                )
            )
        repaired.append(ch)

    if violations:
        raise InstanceValidationError(violations)
    if any_repair:
        return Instance(rewards=instance.rewards, channels=tuple(repaired))
    return instance


@dataclass(frozen=True)
class TailStats:
    """Upper-tail summary of one channel at one state level.

    ``tail_prob`` is the chance the channel sits at ``level`` or above;
    ``tail_reward`` is the expected reward conditioned on that event, or
    None when the event has zero probability.
    """

    level: int
    tail_prob: float
    tail_reward: float | None


def tail_stats(instance: Instance, channel: int, level: int) -> TailStats:
    """Tail statistics for ``channel`` at ``level`` (both 0-based)."""
    k = instance.state_count
    if not 0 <= channel < instance.n:
        raise UnknownChannel(f"channel index {channel} out of range 0..{instance.n - 1}")
    if not 0 <= level < k:
        raise LevelOutOfRange(f"level {level} out of range 0..{k - 1}")
    p = instance.channels[channel].probs[level:]
    mass = float(p.sum())
    if mass <= 0.0:
        return TailStats(level=level, tail_prob=0.0, tail_reward=None)
    mean = float(p @ instance.rewards[level:]) / mass
    return TailStats(level=level, tail_prob=mass, tail_reward=mean)


def blind_backup_reward(instance: Instance, channel: int | None) -> float:
    """Expected reward of transmitting on ``channel`` without probing it.

    ``None`` means "no backup designated" and maps to the sentinel -1.0,
    strictly worse than any real transmission (rewards live in [0, 1]),
    so comparisons against it never tie.
    """
    if channel is None:
        return -1.0
    if not 0 <= channel < instance.n:
        raise UnknownChannel(f"channel index {channel} out of range 0..{instance.n - 1}")
    return float(instance.blind_rewards[channel])


@dataclass(frozen=True, eq=False)
class GainReport:
    """Evaluation of one policy on one instance.

    ``state_mass[u]`` is the probability that the slot ends with a
    transmission on a channel whose true state is ``u`` (blind backups
    contribute their state distribution).  ``transmit_prob`` is the total
    mass, ``success_prob`` the expected reward, ``probe_cost`` the
    expected probing spend.  ``gain`` is reward minus cost, and when
    ``altered_threshold`` is set, additionally minus
    ``altered_threshold * transmit_prob`` (a per-transmission charge used
    by the rate-constrained machinery).
    """

    gain: float
    transmit_prob: float
    probe_cost: float
    success_prob: float
    state_mass: np.ndarray
    altered_threshold: float | None = None

    def __post_init__(self) -> None:
        m = np.array(self.state_mass, dtype=float, copy=True)
        m.setflags(write=False)
        object.__setattr__(self, "state_mass", m)

    @classmethod
    def assemble(
        cls,
        instance: Instance,
        state_mass: np.ndarray,
        probe_cost: float,
        altered_threshold: float | None = None,
    ) -> "GainReport":
        mass = np.asarray(state_mass, dtype=float)
        transmit = float(mass.sum())
        success = float(mass @ instance.rewards)
        gain = success - float(probe_cost)
        if altered_threshold is not None:
            gain -= float(altered_threshold) * transmit
        return cls(
            gain=gain,
            transmit_prob=transmit,
            probe_cost=float(probe_cost),
            success_prob=success,
            state_mass=mass,
            altered_threshold=None if altered_threshold is None else float(altered_threshold),
        )

    def as_dict(self) -> dict:
        return {
            "gain": self.gain,
            "transmit_prob": self.transmit_prob,
            "probe_cost": self.probe_cost,
            "success_prob": self.success_prob,
            "state_mass": self.state_mass.tolist(),
            "altered_threshold": self.altered_threshold,
        }


def evaluate_policy(
    instance: Instance,
    policy,
    *,
    altered_threshold: float | None = None,
) -> GainReport:
    """Exact analytic evaluation of ``policy`` on ``instance``.

    Dispatches to the policy's ``_gain_report`` hook; every policy class
    in this package provides one.  ``altered_threshold`` charges each
    transmission that amount (see :class:`GainReport`).
    """
    hook = getattr(policy, "_gain_report", None)
    if hook is None:
        raise TypeError(f"{type(policy).__name__} cannot be evaluated")
    return hook(instance, altered_threshold)


# -- serialization ------------------------------------------------------


def instance_to_dict(instance: Instance) -> dict:
    return {
        "rewards": instance.rewards.tolist(),
        "channels": [
            {"name": ch.name, "cost": ch.cost, "probs": ch.probs.tolist()}
            for ch in instance.channels
        ],
    }


def instance_from_dict(data: dict, *, validate: bool = True) -> Instance:
    try:
        rewards = data["rewards"]
        channels = tuple(
            ChannelStats(name=c["name"], cost=c["cost"], probs=c["probs"])
            for c in data["channels"]
        )
    except (KeyError, TypeError) as exc:
        raise InstanceValidationError(
            [Violation("bad-document", None, f"malformed instance document: {exc}")]
        ) from exc
    inst = Instance(rewards=rewards, channels=channels)
    if validate:
        validate_instance(inst)
    return inst


def load_instance(path, *, validate: bool = True) -> Instance:
    """Read an instance from a JSON document (see README for the layout)."""
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    return instance_from_dict(data, validate=validate)


def save_instance(instance: Instance, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(instance_to_dict(instance), fh, indent=2)
        fh.write("\n")


def round_floats(obj, sig: int = 12):
    """Round every float in a JSON-ish structure to ``sig`` significant
    digits.  Keeps reports diffable across platforms."""
    if isinstance(obj, float):
        if obj == 0.0 or not math.isfinite(obj):
            return obj
        return round(obj, sig - 1 - int(math.floor(math.log10(abs(obj)))))
    if isinstance(obj, dict):
        return {k: round_floats(v, sig) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(v, sig) for v in obj]
    return obj
