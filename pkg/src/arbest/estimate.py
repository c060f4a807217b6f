"""Arboricity estimation by geometric halving of the guess."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from arbest.graph import Graph
from arbest.peeling import (
    OracleFactory,
    PeelConfig,
    Verdict,
    oracle_factory,
    peel_with_reduced_error,
)


@dataclass(frozen=True)
class GuessRecord:
    alpha: int
    verdict: Verdict
    queries: int
    repetitions: int
    aborted: bool = False
    trial_queries: tuple[int, ...] = ()
    budget: int = 0

    def token(self) -> str:
        mark = "A" if self.aborted else self.verdict.value[0]
        return f"{self.alpha}:{mark}"


@dataclass
class EstimateReport:
    alpha_hat: int
    trace: list[GuessRecord] = field(default_factory=list)
    total_queries: int = 0
    aborted: bool = False

    def verdict_trace(self) -> str:
        """Compact ``alpha:verdict`` tokens, e.g. ``16:Y|8:Y|4:N``."""
        return "|".join(g.token() for g in self.trace)


def halving_sequence(n: int) -> list[int]:
    """n, ceil(n/2), ..., 1."""
    seq = [n]
    while seq[-1] > 1:
        seq.append(-(-seq[-1] // 2))
    return seq


def estimate_arboricity(source: Union[OracleFactory, Graph], n: int, template: PeelConfig,
                        seed: int = 0) -> EstimateReport:
    """Return the first guess, going down from ``n`` by halving, at which the
    repeated peel answers No; 1 if every guess above 1 answers Yes.

    Each guess may spend at most ``reps * cb * t`` queries over its trials. If
    a guess runs past that cap the search stops and reports ``alpha_hat = 1``
    with ``aborted`` set.
    """
    if n < 2:
        raise ValueError("estimate_arboricity needs n >= 2")
    if template.n != n:
        raise ValueError(f"template is for n={template.n}, expected {n}")
    make = oracle_factory(source) if isinstance(source, Graph) else source
    report = EstimateReport(alpha_hat=1)
    for k, guess in enumerate(halving_sequence(n)[:-1]):
        cfg = template.with_alpha(guess)
        cap = cfg.budget_int * cfg.reps
        res = peel_with_reduced_error(make, cfg, seed=[int(seed), k], max_queries=cap)
        report.total_queries += res.total_queries
        report.trace.append(GuessRecord(guess, res.verdict, res.total_queries, len(res.trials),
                                        res.aborted, tuple(t.queries_used for t in res.trials),
                                        cfg.budget_int))
        if res.aborted:
            report.aborted = True
            report.alpha_hat = 1
            return report
        if res.verdict is Verdict.NO:
            report.alpha_hat = guess
            return report
    return report
