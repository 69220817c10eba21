"""Brute-force reference solver over complete decision trees.

The state of any probing policy is (set of channels probed so far, best
state observed so far); rewards are monotone in the state index, so only
the best observation matters for what follows.  The solver tabulates the
optimal continuation value over all ``2^n * (K + 1)`` such states,
exactly, and can extract an explicit optimal decision tree on demand.
Exponential in the channel count, so it refuses instances wider than
``OracleOptions.max_channels``.

Options restrict the policy class (which channels may serve as unprobed
backups, whether the slot may end silent, a channel barred from probing)
so the structured solvers can be checked for optimality within their
claimed class, not just for a good value.  A per-transmission charge
(``altered_threshold``) turns the objective into the one the
rate-limited machinery in :mod:`probeopt.lagrange` optimizes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

from .core import (
    BackupProbed,
    GainReport,
    InconsistentLeaf,
    Instance,
    ProbingError,
    RepeatedProbe,
    UnknownChannel,
    evaluate_policy,
)

__all__ = [
    "TooLarge",
    "InconsistentOptions",
    "InfeasibleRate",
    "OracleOptions",
    "OracleResult",
    "Probe",
    "TransmitProbed",
    "TransmitBackup",
    "NoTransmit",
    "DecisionTree",
    "exact_dp",
    "altered_optimum",
    "backup_structure_check",
    "StructureReport",
    "rate_constrained_optimum",
    "RateConstrainedBound",
    "dual_certificate",
    "MixCertificate",
    "tree_to_dot",
]

# Two action values within this absolute slack count as tied; the tie
# preference then decides which one the extracted tree takes.
TIE_TOL = 1e-12

_RANKS = {
    "default": {"transmit": 0, "backup": 1, "silent": 2, "probe": 3},
    "prefer-backup": {"backup": 0, "transmit": 1, "silent": 2, "probe": 3},
    "prefer-silent": {"silent": 0, "transmit": 1, "backup": 2, "probe": 3},
    "prefer-transmit": {"transmit": 0, "backup": 1, "probe": 2, "silent": 3},
}


class TooLarge(ProbingError):
    """Instance exceeds the exponential solver's size cap."""


class InconsistentOptions(ProbingError):
    """The option set leaves some reachable state with no legal action."""


class InfeasibleRate(ProbingError):
    """Transmission rate outside the open interval (0, 1)."""


@dataclass(frozen=True)
class OracleOptions:
    """Policy-class restrictions for :func:`exact_dp`.

    allowed_backups
        Channels that may be transmitted without probing.  ``None``
        means all of them, an empty tuple forbids unprobed
        transmissions entirely.
    forbidden_probe
        A channel the policy must never probe (used to carve out the
        reserve-a-backup class).
    allow_no_transmit
        Whether ending the slot with no transmission is legal.
    altered_threshold
        Charge per transmission, subtracted from the reward of every
        transmit action.  ``None`` means no charge.
    tie_preference
        Which action an extracted tree takes when several are optimal
        to within ``TIE_TOL``.  One of "default" (transmit probed, then
        backup, then silent, then probe), "prefer-backup",
        "prefer-silent", "prefer-transmit".
    """

    altered_threshold: float | None = None
    allow_no_transmit: bool = True
    allowed_backups: tuple[int, ...] | None = None
    forbidden_probe: int | None = None
    tie_preference: str = "default"
    max_channels: int = 14

    def __post_init__(self) -> None:
        if self.tie_preference not in _RANKS:
            raise InconsistentOptions(
                f"tie_preference must be one of {sorted(_RANKS)}"
            )
        if self.allowed_backups is not None:
            object.__setattr__(
                self, "allowed_backups", tuple(int(j) for j in self.allowed_backups)
            )


# -- decision tree nodes ------------------------------------------------


@dataclass(frozen=True)
class Probe:
    channel: int
    children: tuple  # one subtree per observed state, length K


@dataclass(frozen=True)
class TransmitProbed:
    channel: int
    state: int


@dataclass(frozen=True)
class TransmitBackup:
    channel: int


@dataclass(frozen=True)
class NoTransmit:
    pass


@dataclass(frozen=True, eq=False)
class DecisionTree:
    """An explicit probing policy: internal nodes probe, leaves settle
    the slot.  Channels are stored as 0-based indices; ``names`` (when
    present) gives their external labels for serialization."""

    root: object
    state_count: int
    n: int
    names: tuple[str, ...] | None = None

    # -- evaluation -----------------------------------------------------

    def _gain_report(self, instance: Instance, altered_threshold=None) -> GainReport:
        probs = instance.probs
        mass = np.zeros(instance.state_count)
        cost = 0.0
        stack = [(self.root, 1.0)]
        while stack:
            node, reach = stack.pop()
            if isinstance(node, Probe):
                cost += reach * instance.costs[node.channel]
                col = probs[:, node.channel]
                for s, child in enumerate(node.children):
                    if col[s] > 0.0:
                        stack.append((child, reach * col[s]))
            elif isinstance(node, TransmitProbed):
                mass[node.state] += reach
            elif isinstance(node, TransmitBackup):
                mass += reach * probs[:, node.channel]
            # NoTransmit adds nothing
        return GainReport.assemble(instance, mass, cost, altered_threshold)

    # -- execution ------------------------------------------------------

    def act(self, states) -> tuple[list[int], tuple]:
        """Run the tree against one slot's channel states.

        ``states[j]`` is channel ``j``'s true state.  Returns the probe
        sequence and the closing action, one of ``("transmit", j, s)``,
        ``("backup", j)``, ``("silent",)``.
        """
        probed: list[int] = []
        node = self.root
        while isinstance(node, Probe):
            probed.append(node.channel)
            node = node.children[int(states[node.channel])]
        if isinstance(node, TransmitProbed):
            return probed, ("transmit", node.channel, node.state)
        if isinstance(node, TransmitBackup):
            return probed, ("backup", node.channel)
        return probed, ("silent",)

    # -- structure ------------------------------------------------------

    def validate(self) -> None:
        """Walk every path and check the game rules: no channel probed
        twice, probed-transmit leaves name a channel and state actually
        observed on their path, backups are never probed channels."""

        def walk(node, seen: dict[int, int]) -> None:
            if isinstance(node, Probe):
                j = node.channel
                if not 0 <= j < self.n:
                    raise UnknownChannel(f"probe of channel index {j}")
                if j in seen:
                    raise RepeatedProbe(f"channel {j} probed twice on one path")
                if len(node.children) != self.state_count:
                    raise InconsistentLeaf(
                        f"probe node needs {self.state_count} children, "
                        f"got {len(node.children)}"
                    )
                for s, child in enumerate(node.children):
                    walk(child, {**seen, j: s})
            elif isinstance(node, TransmitProbed):
                if node.channel not in seen:
                    raise InconsistentLeaf(
                        f"transmit of unprobed channel {node.channel}"
                    )
                if seen[node.channel] != node.state:
                    raise InconsistentLeaf(
                        f"channel {node.channel} observed in state "
                        f"{seen[node.channel]}, leaf claims {node.state}"
                    )
            elif isinstance(node, TransmitBackup):
                if not 0 <= node.channel < self.n:
                    raise UnknownChannel(f"backup channel index {node.channel}")
                if node.channel in seen:
                    raise BackupProbed(
                        f"channel {node.channel} probed, then used blind"
                    )
            elif not isinstance(node, NoTransmit):
                raise InconsistentLeaf(f"unknown node {node!r}")

        walk(self.root, {})

    def depth(self) -> int:
        def d(node) -> int:
            if isinstance(node, Probe):
                return 1 + max(d(c) for c in node.children)
            return 0

        return d(self.root)

    # -- serialization --------------------------------------------------

    def _name(self, j: int) -> str:
        return self.names[j] if self.names else str(j + 1)

    def to_dict(self) -> dict:
        def enc(node):
            if isinstance(node, Probe):
                return {
                    "probe": self._name(node.channel),
                    "children": [enc(c) for c in node.children],
                }
            if isinstance(node, TransmitProbed):
                return {
                    "transmit": {"channel": self._name(node.channel), "state": node.state}
                }
            if isinstance(node, TransmitBackup):
                return {"backup": self._name(node.channel)}
            return {"silent": True}

        return {
            "kind": "decision-tree",
            "state_count": self.state_count,
            "channels": [self._name(j) for j in range(self.n)],
            "root": enc(self.root),
        }

    @classmethod
    def from_dict(cls, data: dict, instance: Instance | None = None) -> "DecisionTree":
        names = tuple(data["channels"])
        if instance is not None:
            index = {name: instance.index_of(name) for name in names}
            names_out = instance.names
            n = instance.n
        else:
            index = {name: j for j, name in enumerate(names)}
            names_out = names
            n = len(names)

        def dec(node):
            if "probe" in node:
                return Probe(
                    channel=index[node["probe"]],
                    children=tuple(dec(c) for c in node["children"]),
                )
            if "transmit" in node:
                t = node["transmit"]
                return TransmitProbed(channel=index[t["channel"]], state=int(t["state"]))
            if "backup" in node:
                return TransmitBackup(channel=index[node["backup"]])
            return NoTransmit()

        return cls(
            root=dec(data["root"]),
            state_count=int(data["state_count"]),
            n=n,
            names=names_out,
        )


def tree_to_dot(tree: DecisionTree) -> str:
    """Graphviz source for a decision tree, one node per line."""
    lines = ["digraph policy {", "  node [shape=box, fontname=monospace];"]
    counter = [0]

    def emit(node) -> str:
        nid = f"n{counter[0]}"
        counter[0] += 1
        if isinstance(node, Probe):
            lines.append(f'  {nid} [label="probe {tree._name(node.channel)}"];')
            for s, child in enumerate(node.children):
                cid = emit(child)
                lines.append(f'  {nid} -> {cid} [label="{s}"];')
        elif isinstance(node, TransmitProbed):
            lines.append(
                f'  {nid} [label="send {tree._name(node.channel)} '
                f'(state {node.state})", shape=ellipse];'
            )
        elif isinstance(node, TransmitBackup):
            lines.append(
                f'  {nid} [label="send {tree._name(node.channel)} blind", '
                f"shape=ellipse];"
            )
        else:
            lines.append(f'  {nid} [label="no transmission", shape=ellipse];')
        return nid

    emit(tree.root)
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- the tabulation -----------------------------------------------------


def _check_options(instance: Instance, options: OracleOptions) -> None:
    n = instance.n
    if n > options.max_channels:
        raise TooLarge(
            f"{n} channels exceeds the cap of {options.max_channels}; "
            "this solver is exponential in the channel count"
        )
    if options.forbidden_probe is not None and not 0 <= options.forbidden_probe < n:
        raise UnknownChannel(f"forbidden_probe index {options.forbidden_probe}")
    if options.allowed_backups is not None:
        for j in options.allowed_backups:
            if not 0 <= j < n:
                raise UnknownChannel(f"backup index {j}")
    probe_able = n - (1 if options.forbidden_probe is not None else 0)
    backups = (
        instance.n if options.allowed_backups is None else len(options.allowed_backups)
    )
    if probe_able == 0 and backups == 0 and not options.allow_no_transmit:
        raise InconsistentOptions(
            "nothing may be probed, no backup is allowed, and the slot "
            "may not stay silent; no policy exists"
        )


def _tabulate(instance: Instance, options: OracleOptions):
    """Fill V[mask, bidx] = best continuation value with ``mask`` probed
    and best observation ``bidx - 1`` (index 0 means nothing seen)."""
    n, k = instance.n, instance.state_count
    probs = instance.probs  # (K, n)
    costs = instance.costs
    rewards = instance.rewards
    x = 0.0 if options.altered_threshold is None else float(options.altered_threshold)

    size = 1 << n
    allowed = (
        tuple(range(n)) if options.allowed_backups is None else options.allowed_backups
    )

    # best blind reward among still-unprobed allowed backups, per mask
    bb = np.full(size, -np.inf)
    idx = np.arange(size)
    for j in allowed:
        free = (idx >> j) & 1 == 0
        bb[free] = np.maximum(bb[free], instance.blind_rewards[j])

    # child b-index after observing state s with prior best b
    m_idx = np.maximum(np.arange(k + 1)[:, None] - 1, np.arange(k)[None, :]) + 1

    stop_base = np.full(k + 1, -np.inf)
    stop_base[1:] = rewards - x
    if options.allow_no_transmit:
        stop_base = np.maximum(stop_base, 0.0)

    probe_ok = np.ones(n, dtype=bool)
    if options.forbidden_probe is not None:
        probe_ok[options.forbidden_probe] = False

    V = np.empty((size, k + 1))
    order = np.argsort(
        -np.array([m.bit_count() for m in range(size)]), kind="stable"
    )
    for mask in order:
        stop = stop_base.copy()
        if bb[mask] > -np.inf:
            stop = np.maximum(stop, bb[mask] - x)
        free = [j for j in range(n) if probe_ok[j] and not (mask >> j) & 1]
        if free:
            children = V[[mask | (1 << j) for j in free]]  # (f, K+1)
            gath = children[:, m_idx]  # (f, K+1, K)
            vals = np.einsum("fbs,sf->fb", gath, probs[:, free]) - costs[free][:, None]
            best = vals.max(axis=0)
            V[mask] = np.maximum(stop, best)
        else:
            V[mask] = stop
    return V


@dataclass(frozen=True, eq=False)
class OracleResult:
    """Optimal value plus, on demand, an optimal decision tree."""

    value: float
    instance: Instance
    options: OracleOptions
    table: np.ndarray = field(repr=False)

    @cached_property
    def tree(self) -> DecisionTree:
        inst, opts = self.instance, self.options
        n, k = inst.n, inst.state_count
        probs, costs, rewards = inst.probs, inst.costs, inst.rewards
        x = 0.0 if opts.altered_threshold is None else float(opts.altered_threshold)
        ranks = _RANKS[opts.tie_preference]
        allowed = tuple(range(n)) if opts.allowed_backups is None else opts.allowed_backups
        V = self.table

        def build(mask: int, bidx: int, path: tuple[tuple[int, int], ...]):
            target = V[mask, bidx]
            # (value, (rank, channel-or-0), constructor)
            cands: list[tuple[float, tuple[int, int], Callable]] = []
            if bidx >= 1:
                b = bidx - 1
                # transmit the first probed channel that hit the best state
                winner = next(j for j, s in path if s == b)
                cands.append(
                    (
                        rewards[b] - x,
                        (ranks["transmit"], 0),
                        lambda: TransmitProbed(channel=winner, state=b),
                    )
                )
            pool = [j for j in allowed if not (mask >> j) & 1]
            if pool:
                ell = max(pool, key=lambda j: (inst.blind_rewards[j], -j))
                cands.append(
                    (
                        float(inst.blind_rewards[ell]) - x,
                        (ranks["backup"], ell),
                        lambda: TransmitBackup(channel=ell),
                    )
                )
            if opts.allow_no_transmit:
                cands.append((0.0, (ranks["silent"], 0), NoTransmit))
            for j in range(n):
                if (mask >> j) & 1 or j == opts.forbidden_probe:
                    continue
                child = V[mask | (1 << j)]
                val = float(probs[:, j] @ child[np.maximum(bidx - 1, np.arange(k)) + 1])
                val -= costs[j]

                def probe_maker(j=j):
                    kids = tuple(
                        build(
                            mask | (1 << j),
                            max(bidx - 1, s) + 1,
                            path + ((j, s),),
                        )
                        for s in range(k)
                    )
                    return Probe(channel=j, children=kids)

                cands.append((val, (ranks["probe"], j), probe_maker))
            best = max(v for v, _, _ in cands)
            assert best >= target - 1e-9, "extraction drifted from the table"
            tied = [(key, make) for v, key, make in cands if v >= best - TIE_TOL]
            tied.sort(key=lambda t: t[0])
            return tied[0][1]()

        tree = DecisionTree(
            root=build(0, 0, ()), state_count=k, n=n, names=inst.names
        )
        tree.validate()
        return tree


def exact_dp(instance: Instance, options: OracleOptions | None = None) -> OracleResult:
    """Optimal expected gain over every decision tree the options allow.

    ``result.value`` is exact up to float rounding; ``result.tree``
    extracts an optimal tree lazily (cheap on the optimal paths only).
    """
    opts = options or OracleOptions()
    _check_options(instance, opts)
    V = _tabulate(instance, opts)
    return OracleResult(
        value=float(V[0, 0]), instance=instance, options=opts, table=V
    )


def altered_optimum(
    instance: Instance,
    threshold: float,
    *,
    tie_preference: str = "default",
    max_channels: int = 14,
) -> OracleResult:
    """Unrestricted optimum of the per-transmission-charge objective."""
    return exact_dp(
        instance,
        OracleOptions(
            altered_threshold=float(threshold),
            allow_no_transmit=True,
            tie_preference=tie_preference,
            max_channels=max_channels,
        ),
    )


# -- structural diagnostics --------------------------------------------


@dataclass(frozen=True, eq=False)
class StructureReport:
    """Outcome of :func:`backup_structure_check`."""

    value: float
    agree: bool
    fallback_only: bool
    best_backup_only: bool
    notes: tuple[str, ...]
    default_tree: DecisionTree
    backup_tree: DecisionTree

    @property
    def ok(self) -> bool:
        return self.agree and self.fallback_only and self.best_backup_only


def backup_structure_check(
    instance: Instance, options: OracleOptions | None = None
) -> StructureReport:
    """Check how optimal trees use unprobed transmissions.

    Solves twice, once with default tie-breaking and once preferring
    blind sends, and verifies on both trees that every blind send (a)
    happens only when it beats the best probed observation and (b) uses
    the best-mean channel still unprobed.  Both should hold for any
    optimal tree up to the tie slack; a failure flags a solver bug or a
    genuinely pathological instance worth a look.
    """
    base = options or OracleOptions()
    res_a = exact_dp(instance, base)
    res_b = exact_dp(
        instance,
        OracleOptions(
            altered_threshold=base.altered_threshold,
            allow_no_transmit=base.allow_no_transmit,
            allowed_backups=base.allowed_backups,
            forbidden_probe=base.forbidden_probe,
            tie_preference="prefer-backup",
            max_channels=base.max_channels,
        ),
    )
    agree = abs(res_a.value - res_b.value) <= 1e-9
    notes: list[str] = []
    if not agree:
        notes.append(
            f"tie preference moved the value: {res_a.value!r} vs {res_b.value!r}"
        )
    x = 0.0 if base.altered_threshold is None else base.altered_threshold
    allowed = (
        tuple(range(instance.n))
        if base.allowed_backups is None
        else base.allowed_backups
    )
    fallback_only = True
    best_backup_only = True

    def scan(tree: DecisionTree, label: str) -> None:
        nonlocal fallback_only, best_backup_only

        def walk(node, probed: dict[int, int]) -> None:
            nonlocal fallback_only, best_backup_only
            if isinstance(node, Probe):
                for s, child in enumerate(node.children):
                    walk(child, {**probed, node.channel: s})
            elif isinstance(node, TransmitBackup):
                blind = float(instance.blind_rewards[node.channel])
                if probed:
                    seen = instance.rewards[max(probed.values())]
                    if blind < seen - TIE_TOL:
                        fallback_only = False
                        notes.append(
                            f"{label}: blind send of {node.channel} under a "
                            f"better observation ({blind!r} < {seen!r})"
                        )
                rivals = [j for j in allowed if j not in probed and j != node.channel]
                if rivals:
                    top = max(instance.blind_rewards[j] for j in rivals)
                    if blind < top - TIE_TOL:
                        best_backup_only = False
                        notes.append(
                            f"{label}: blind send of {node.channel} while a "
                            f"better backup was free ({blind!r} < {top!r})"
                        )

        walk(tree.root, {})

    scan(res_a.tree, "default")
    scan(res_b.tree, "prefer-backup")
    return StructureReport(
        value=res_a.value,
        agree=agree,
        fallback_only=fallback_only,
        best_backup_only=best_backup_only,
        notes=tuple(notes),
        default_tree=res_a.tree,
        backup_tree=res_b.tree,
    )


# -- rate-constrained benchmark ----------------------------------------


@dataclass(frozen=True, eq=False)
class RateConstrainedBound:
    """Upper bound on the gain of any transmission-rate-``rate`` mix.

    ``value = min over charges L of (L * rate + altered optimum at L)``;
    every evaluation of the right side is itself a valid bound, so the
    reported minimum is safe even though the scalar search is numeric.
    """

    value: float
    multiplier: float
    rate: float
    evaluations: int


def rate_constrained_optimum(
    instance: Instance,
    rate: float,
    *,
    max_channels: int = 14,
    _cache: dict | None = None,
) -> RateConstrainedBound:
    if not 0.0 < rate < 1.0:
        raise InfeasibleRate(f"rate must lie in (0, 1), got {rate!r}")
    rmax = instance.max_reward
    cache: dict[float, float] = {} if _cache is None else _cache

    def dual(L: float) -> float:
        L = min(max(float(L), 0.0), rmax)
        if L not in cache:
            cache[L] = altered_optimum(
                instance, L, max_channels=max_channels
            ).value
        return L * rate + cache[L]

    grid = np.unique(
        np.concatenate(
            [[0.0, rmax], instance.rewards, np.asarray(instance.blind_rewards)]
        )
    )
    grid = grid[(grid >= 0.0) & (grid <= rmax)]
    for L in grid:
        dual(L)
    minimize_scalar(
        dual, bounds=(0.0, rmax), method="bounded", options={"xatol": 1e-10}
    )
    # the argmin among everything actually evaluated; each evaluation is
    # a valid upper bound on its own, so no bracketing argument is needed
    best_L = min(cache, key=lambda L: L * rate + cache[L])
    return RateConstrainedBound(
        value=dual(best_L),
        multiplier=float(best_L),
        rate=float(rate),
        evaluations=len(cache),
    )


@dataclass(frozen=True, eq=False)
class MixCertificate:
    """A two-tree mixture meeting the rate, with its achieved gain.

    When ``ok`` is true, the mixture transmits with probability ``rate``
    exactly and its plain gain sits within ``gap`` of the dual bound,
    certifying both sides are near-tight.
    """

    ok: bool
    bound: RateConstrainedBound
    alpha: float
    side_step: float
    tree_hi: DecisionTree | None
    tree_lo: DecisionTree | None
    transmit_hi: float
    transmit_lo: float
    gain_hi: float
    gain_lo: float
    primal_value: float
    gap: float


def dual_certificate(
    instance: Instance,
    rate: float,
    bound: RateConstrainedBound | None = None,
    *,
    max_channels: int = 14,
    gap_tol: float = 1e-6,
) -> MixCertificate:
    """Try to exhibit a primal mixture matching the dual bound.

    Solves the charged problem just below and just above the bound's
    best multiplier (transmit-greedy below, silence-greedy above), and
    mixes the two trees to hit the rate exactly.  The step widens from
    1e-7 to 1e-3 until the two transmission probabilities straddle the
    rate; at a kink of the dual this succeeds immediately.
    """
    if bound is None:
        bound = rate_constrained_optimum(instance, rate, max_channels=max_channels)
    rmax = instance.max_reward
    for step in (1e-7, 1e-6, 1e-5, 1e-4, 1e-3):
        lo_L = max(0.0, bound.multiplier - step)
        hi_L = min(rmax, bound.multiplier + step)
        r_hi = altered_optimum(
            instance, lo_L, tie_preference="prefer-transmit", max_channels=max_channels
        )
        r_lo = altered_optimum(
            instance, hi_L, tie_preference="prefer-silent", max_channels=max_channels
        )
        g_hi = evaluate_policy(instance, r_hi.tree)
        g_lo = evaluate_policy(instance, r_lo.tree)
        s_hi, s_lo = g_hi.transmit_prob, g_lo.transmit_prob
        if s_lo - 1e-15 <= rate <= s_hi + 1e-15:
            denom = s_hi - s_lo
            alpha = 1.0 if denom <= 0 else min(1.0, max(0.0, (rate - s_lo) / denom))
            primal = alpha * g_hi.gain + (1.0 - alpha) * g_lo.gain
            gap = bound.value - primal
            return MixCertificate(
                ok=bool(abs(gap) <= gap_tol),
                bound=bound,
                alpha=float(alpha),
                side_step=step,
                tree_hi=r_hi.tree,
                tree_lo=r_lo.tree,
                transmit_hi=float(s_hi),
                transmit_lo=float(s_lo),
                gain_hi=float(g_hi.gain),
                gain_lo=float(g_lo.gain),
                primal_value=float(primal),
                gap=float(gap),
            )
    return MixCertificate(
        ok=False,
        bound=bound,
        alpha=float("nan"),
        side_step=1e-3,
        tree_hi=None,
        tree_lo=None,
        transmit_hi=float("nan"),
        transmit_lo=float("nan"),
        gain_hi=float("nan"),
        gain_lo=float("nan"),
        primal_value=float("nan"),
        gap=float("inf"),
    )
