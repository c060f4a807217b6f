"""Recursive approximate peeling with cost-based pruning.

``peel_vertex`` decides, level by level, whether a vertex can be peeled by
recursing into a random multiset of its neighbors. Each recursion level
discards neighbors that were peeled and prunes the few active neighbors whose
next-level cost is highest, so the query cost of the next level is known
exactly before it is spent. ``peel`` runs it on a uniform vertex sample under
a global query budget and answers whether every sampled vertex was peeled.
"""

from __future__ import annotations

import enum
import heapq
import math
from collections import Counter
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property
from typing import Callable, Sequence, Union

import numpy as np

from arbest.exact import log2_ceil, log_three_halves_ceil
from arbest.graph import Graph, QueryOracle

PAPER_COEFFICIENTS = dict(c0=100, cs=6, cp=4, ct=8, cb=400, ctt=10, cr=10, ce=3)
SCALED_COEFFICIENTS = dict(c0=4, cs=2, cp=1, ct=2, cb=400, ctt=10, cr=4, ce=1)
COEFFICIENT_NAMES = tuple(PAPER_COEFFICIENTS)


def _frac(x) -> Fraction:
    if isinstance(x, float):
        return Fraction(str(x))
    return Fraction(x)


@dataclass(frozen=True)
class PeelConfig:
    """Every constant of one Peel run, for one arboricity guess ``alpha``.

    L is the integer stand-in for ``log n`` and ``ell`` the deepest level.
    Coefficients: ``c0`` level-0 degree threshold ``c0*L^2*alpha``; ``cs``
    sample divisor (``ceil(d/(cs*alpha))`` neighbor samples); ``cp`` prune
    count ``ceil(cp*L)``; ``ct`` peel threshold ``tau(j) = ct*L^2 - j*cp*L``;
    ``cb`` query budget ``cb*t``; ``ctt`` vertex sample size
    ``t = ceil(ctt*n/(alpha*L))``; ``cr`` repetitions ``ceil(cr*L)``; ``ce``
    bound ``ce*L`` on upward samples in the sampling-event predicate.
    """

    alpha: Fraction
    n: int
    L: int
    ell: int
    c0: Fraction
    cs: Fraction
    cp: Fraction
    ct: Fraction
    cb: Fraction
    ctt: Fraction
    cr: Fraction
    ce: Fraction

    def __post_init__(self):
        for name in ("alpha",) + COEFFICIENT_NAMES:
            object.__setattr__(self, name, _frac(getattr(self, name)))
        if self.n < 2:
            raise ValueError("PeelConfig needs n >= 2")
        if self.L < 1 or self.ell < 0:
            raise ValueError("L must be >= 1 and ell >= 0")
        for name in ("alpha",) + COEFFICIENT_NAMES:
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @classmethod
    def build(cls, n: int, alpha, coefficients: dict, L: int | None = None,
              ell: int | None = None, **overrides) -> "PeelConfig":
        coeffs = dict(coefficients)
        coeffs.update(overrides)
        unknown = set(coeffs) - set(COEFFICIENT_NAMES)
        if unknown:
            raise ValueError(f"unknown coefficients: {sorted(unknown)}")
        return cls(alpha=alpha, n=n, L=L if L is not None else log2_ceil(n),
                   ell=ell if ell is not None else log_three_halves_ceil(n), **coeffs)

    @classmethod
    def paper(cls, n: int, alpha=1, **overrides) -> "PeelConfig":
        return cls.build(n, alpha, PAPER_COEFFICIENTS, **overrides)

    @classmethod
    def scaled(cls, n: int, alpha=1, **overrides) -> "PeelConfig":
        return cls.build(n, alpha, SCALED_COEFFICIENTS, **overrides)

    def with_alpha(self, alpha) -> "PeelConfig":
        return replace(self, alpha=alpha)

    # derived quantities -------------------------------------------------
    @cached_property
    def degree_threshold(self) -> Fraction:
        return self.c0 * self.L * self.L * self.alpha

    @cached_property
    def degree_threshold_int(self) -> int:
        return math.floor(self.degree_threshold)

    def sample_count(self, d: int) -> int:
        return math.ceil(Fraction(d) / (self.cs * self.alpha))

    @cached_property
    def prune_count(self) -> int:
        return math.ceil(self.cp * self.L)

    def tau(self, j: int) -> Fraction:
        return self.ct * self.L * self.L - j * self.cp * self.L

    @cached_property
    def tau_int(self) -> tuple[int, ...]:
        return tuple(math.floor(self.tau(j)) for j in range(self.ell + 2))

    @cached_property
    def t(self) -> int:
        return math.ceil(self.ctt * self.n / (self.alpha * self.L))

    @cached_property
    def budget(self) -> Fraction:
        return self.cb * self.t

    @cached_property
    def budget_int(self) -> int:
        return math.floor(self.budget)

    @cached_property
    def reps(self) -> int:
        return math.ceil(self.cr * self.L)

    @cached_property
    def upward_bound(self) -> Fraction:
        return self.ce * self.L

    @cached_property
    def dense_bound(self) -> Fraction:
        return self.ct * self.L * self.L

    def problems(self) -> list[str]:
        """Consistency problems; empty when the config is usable as intended."""
        out = []
        bad = [j for j in range(self.ell + 1) if self.tau(j) <= 0]
        if bad:
            out.append(f"tau(j) <= 0 for j in {bad}")
        if self.ce > self.cp:
            out.append("upward-sample bound ce*L exceeds prune count cp*L")
        return out

    def digest(self) -> str:
        parts = [f"n={self.n}", f"L={self.L}", f"ell={self.ell}"]
        parts += [f"{k}={getattr(self, k)}" for k in COEFFICIENT_NAMES]
        return ";".join(parts)


class Verdict(str, enum.Enum):
    YES = "Yes"
    NO = "No"


class Reason(str, enum.Enum):
    ALL_PEELED = "AllPeeled"
    SURVIVOR_REMAINS = "SurvivorRemains"
    BUDGET_EXCEEDED = "BudgetExceeded"


class PeelMemo:
    """Per-run state of every vertex touched by ``peel_vertex``.

    ``q[v][j]`` is the j-cost of v; the list stops at the level after v was
    peeled and costs past its end read as zero. ``slots[v][j]`` is the list of
    active neighbor slots ``(u, position in S(v))`` after level j.
    """

    def __init__(self, instrument: bool = False):
        self.degree: dict[int, int] = {}
        self.q: dict[int, list[int]] = {}
        self.slots: dict[int, dict[int, list[tuple[int, int]]]] = {}
        self.samples: dict[int, list[int]] = {}
        self.level: dict[int, int] = {}
        self.peeled: dict[int, int] = {}
        self.instrument = instrument
        self.executions: Counter = Counter()
        self.cost_log: list[tuple[int, int, int, int]] = []
        self.write_log: list[tuple[int, int]] = []

    def qval(self, v: int, j: int) -> int:
        lst = self.q[v]
        return lst[j] if j < len(lst) else 0

    def status(self, v: int) -> tuple[str, int | None]:
        if v not in self.level:
            return ("Unvisited", None)
        if v in self.peeled:
            return ("Peeled", self.peeled[v])
        return ("Active", self.level[v])

    def peeled_upto(self, j: int) -> set[int]:
        """P_{<=j}: vertices peeled at some level <= j."""
        return {v for v, p in self.peeled.items() if p <= j}

    def peeled_at(self, j: int) -> set[int]:
        return {v for v, p in self.peeled.items() if p == j}


def peel_vertex(memo: PeelMemo, oracle: QueryOracle, config: PeelConfig, v: int, j: int) -> None:
    """Run level ``j`` of the peeling procedure on ``v``, updating ``memo``.

    Level 0 queries the degree. Level 1 draws ``q_1(v)`` neighbor samples.
    Every level ``j >= 1`` recurses at level ``j-1`` into the active slots,
    drops the peeled ones, prunes the ``cp*L`` costliest and peels ``v`` when
    at most ``tau(j)`` slots remain; otherwise ``q_{j+1}(v)`` is the summed
    j-cost of the remaining slots.
    """
    lvl = memo.level.get(v, -1)
    if lvl >= j or v in memo.peeled:
        return
    if lvl != j - 1:
        raise ValueError(f"level {j} requested for vertex {v} before level {j - 1}")
    start = oracle.Q
    if memo.instrument:
        memo.executions[(v, j)] += 1
        memo.write_log.append((v, j))

    if j == 0:
        d = oracle.degree(v)
        memo.degree[v] = d
        memo.slots[v] = {}
        if d <= config.degree_threshold_int:
            memo.q[v] = [1, 0]
            memo.slots[v][1] = []
            memo.peeled[v] = 0
        else:
            memo.q[v] = [1, config.sample_count(d)]
        memo.level[v] = 0
        if memo.instrument:
            memo.cost_log.append((v, 0, oracle.Q - start, 1))
        return

    slots = memo.slots[v]
    if j == 1:
        sample = oracle.sample_neighbors(v, memo.q[v][1])
        memo.samples[v] = sample
        previous = list(zip(sample, range(len(sample))))
        slots[0] = previous
    else:
        previous = slots[j - 1]

    level, peeled = memo.level, memo.peeled
    for u, _ in previous:
        if level.get(u, -1) < j - 1 and u not in peeled:
            peel_vertex(memo, oracle, config, u, j - 1)

    qmap = memo.q
    costs = []
    for u, _ in previous:
        lst = qmap[u]
        costs.append(lst[j] if j < len(lst) else 0)
    live = [i for i, c in enumerate(costs) if c > 0]
    k = config.prune_count
    if k >= len(live):
        kept: list[int] = []
    else:
        drop = set(heapq.nsmallest(k, live, key=lambda i: (-costs[i], previous[i][0], previous[i][1])))
        kept = [i for i in live if i not in drop]
    slots[j] = [previous[i] for i in kept]
    if len(kept) <= config.tau_int[j]:
        memo.q[v].append(0)
        slots[j + 1] = []
        memo.peeled[v] = j
    else:
        memo.q[v].append(sum(costs[i] for i in kept))
    memo.level[v] = j
    if memo.instrument:
        memo.cost_log.append((v, j, oracle.Q - start, memo.q[v][j]))


@dataclass(frozen=True)
class PeelDecision:
    verdict: Verdict
    reason: Reason
    queries_used: int
    sample: tuple[int, ...] = ()
    survivors: tuple[tuple[int, ...], ...] = ()
    budget: int = 0

    @property
    def survivor_counts(self) -> tuple[int, ...]:
        """|X_1|, |X_2|, ... for the levels that ran."""
        return tuple(len(s) for s in self.survivors)

    @property
    def yes(self) -> bool:
        return self.verdict is Verdict.YES


class PeelRun:
    """One Peel invocation, steppable one level at a time.

    ``peel`` simply runs all levels; the stream engine interleaves passes over
    the edge stream between levels.
    """

    def __init__(self, oracle: QueryOracle, config: PeelConfig,
                 rng: np.random.Generator | None = None, memo: PeelMemo | None = None):
        if config.n != oracle.n:
            raise ValueError(f"config is for n={config.n} but the graph has n={oracle.n}")
        self.oracle = oracle
        self.config = config
        self.rng = rng if rng is not None else oracle.rng
        self.memo = memo if memo is not None else PeelMemo()
        self.sample: list[int] | None = None
        self.frontier: list[int] = []
        self.survivors: list[tuple[int, ...]] = []
        self.j = 0
        self.decision: PeelDecision | None = None

    def draw_sample(self) -> list[int]:
        if self.sample is None:
            self.sample = self.rng.integers(0, self.config.n, size=self.config.t).tolist()
        return self.sample

    def _finish(self, verdict: Verdict, reason: Reason) -> PeelDecision:
        self.decision = PeelDecision(verdict, reason, self.oracle.Q, tuple(self.sample),
                                     tuple(self.survivors), self.config.budget_int)
        return self.decision

    def step(self) -> PeelDecision | None:
        """Run the next level; returns the decision once there is one."""
        if self.decision is not None:
            return self.decision
        memo, oracle, config, j = self.memo, self.oracle, self.config, self.j
        if j == 0:
            nxt: dict[int, None] = {}
            for x in self.draw_sample():
                if x in memo.level:
                    oracle.degree(x)  # a repeated draw is its own sampled copy
                else:
                    peel_vertex(memo, oracle, config, x, 0)
                if memo.qval(x, 1):
                    nxt[x] = None
            survivors = list(nxt)
        else:
            survivors = []
            cap = config.budget_int
            for x in self.frontier:
                if oracle.Q + memo.qval(x, j) > cap:
                    return self._finish(Verdict.NO, Reason.BUDGET_EXCEEDED)
                peel_vertex(memo, oracle, config, x, j)
                if memo.qval(x, j + 1):
                    survivors.append(x)
        self.survivors.append(tuple(survivors))
        self.frontier = survivors
        self.j = j + 1
        if not survivors:
            return self._finish(Verdict.YES, Reason.ALL_PEELED)
        if j >= config.ell:
            return self._finish(Verdict.NO, Reason.SURVIVOR_REMAINS)
        return None

    def run(self) -> PeelDecision:
        while self.step() is None:
            pass
        return self.decision


def peel(oracle: QueryOracle, config: PeelConfig, rng: np.random.Generator | None = None,
         memo: PeelMemo | None = None) -> PeelDecision:
    """Sample ``t`` vertices and try to peel all of them within ``ell`` levels.

    Yes means every sampled vertex was peeled; No means a survivor remained
    after level ``ell`` or the query budget ``cb*t`` would have been exceeded.
    """
    return PeelRun(oracle, config, rng, memo).run()


OracleFactory = Callable[[np.random.Generator], QueryOracle]


def oracle_factory(graph: Graph) -> OracleFactory:
    return lambda rng: QueryOracle(graph, rng=rng)


def trial_rng(seed, *path: int) -> np.random.Generator:
    """Independent generator for one trial, a pure function of (seed, path)."""
    base = list(seed) if isinstance(seed, (tuple, list)) else [int(seed)]
    return np.random.default_rng(base + [int(p) for p in path])


@dataclass
class RepetitionResult:
    verdict: Verdict
    trials: list[PeelDecision] = field(default_factory=list)
    total_queries: int = 0
    aborted: bool = False

    @property
    def yes(self) -> bool:
        return self.verdict is Verdict.YES


def peel_with_reduced_error(make_oracle: Union[OracleFactory, Graph], config: PeelConfig,
                            seed: Union[int, Sequence[int]] = 0,
                            max_queries: int | None = None) -> RepetitionResult:
    """Up to ``ceil(cr*L)`` independent Peel trials; Yes on the first Yes.

    Trial ``r`` gets a fresh oracle, memo and generator seeded by ``(seed, r)``.
    With ``max_queries`` set, no new trial starts once the trials so far have
    spent more than that; the result is then flagged ``aborted``.
    """
    if isinstance(make_oracle, Graph):
        make_oracle = oracle_factory(make_oracle)
    result = RepetitionResult(Verdict.NO)
    for r in range(config.reps):
        if max_queries is not None and result.total_queries > max_queries:
            result.aborted = True
            return result
        decision = peel(make_oracle(trial_rng(seed, r)), config)
        result.trials.append(decision)
        result.total_queries += decision.queries_used
        if decision.yes:
            result.verdict = Verdict.YES
            return result
    return result
