"""Retrieval-accuracy metrics and the two-sample proportion test.

Average precision uses the interpolated N-point formula: precision is read
off at N evenly spaced recall levels, where the interpolated precision at
recall rho is the best precision achieved at any rank reaching recall >= rho
(zero when that recall is never reached).
"""

from __future__ import annotations

import math
from dataclasses import dataclass


def n_point_avg_precision(ranked, relevant, n_points: int = 11) -> float:
    """Interpolated average precision over n_points recall levels.

    ranked is the retrieved document list in rank order; relevant is the
    (nonempty) set of relevant document ids for the query.
    """
    if n_points < 2:
        raise ValueError("n_points must be at least 2")
    relevant = set(relevant)
    if not relevant:
        raise ValueError("relevant set must be nonempty")
    total = len(relevant)
    # precision and recall after each rank position
    found = 0
    points = []
    for position, doc in enumerate(ranked, start=1):
        if doc in relevant:
            found += 1
            points.append((found / total, found / position))
    # best precision at recall >= rho, scanning from the deepest rank up
    best_at = []
    best = 0.0
    for recall, precision in reversed(points):
        best = max(best, precision)
        best_at.append((recall, best))
    best_at.reverse()
    acc = 0.0
    for j in range(n_points):
        rho = j / (n_points - 1)
        value = 0.0
        for recall, precision in best_at:
            if recall >= rho - 1e-12:
                value = precision
                break
        acc += value
    return acc / n_points


def mean_avg_precision(values) -> float:
    values = list(values)
    if not values:
        raise ValueError("need at least one per-query value")
    return sum(values) / len(values)


def relevant_in_top(ranked, relevant, j: int) -> int:
    if j < 1:
        raise ValueError("cutoff must be >= 1")
    relevant = set(relevant)
    return sum(1 for doc in ranked[:j] if doc in relevant)


def _normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def two_proportion_test(x1: int, n1: int, x2: int, n2: int) -> float:
    """Two-tailed pooled z-test p-value for x1/n1 vs x2/n2.

    Under the null both counts come from one binomial proportion. Returns 1.0
    for equal sample proportions, including the degenerate pooled 0 or 1.
    """
    if n1 < 1 or n2 < 1:
        raise ValueError("sample sizes must be >= 1")
    if not (0 <= x1 <= n1 and 0 <= x2 <= n2):
        raise ValueError("counts must lie within their sample sizes")
    pooled = (x1 + x2) / (n1 + n2)
    if pooled in (0.0, 1.0):
        return 1.0
    z = (x1 / n1 - x2 / n2) / math.sqrt(pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2))
    if z == 0.0:
        return 1.0
    return 2.0 * _normal_cdf(-abs(z))


@dataclass(frozen=True)
class PrecisionReport:
    """Per-step retrieval accuracy summary.

    per_query maps query id to its average precision; relevant_counts maps a
    cutoff j to the mean over queries of the relevant-in-top-j count (so each
    value is at most j).
    """

    per_query: dict[int, float]
    mean: float
    relevant_counts: dict[int, float]
    n_queries: int

    def __post_init__(self):
        values = list(self.per_query.values()) + [self.mean]
        if any(not 0.0 <= v <= 1.0 for v in values):
            raise ValueError("precisions must lie in [0, 1]")
        if any(count > cutoff for cutoff, count in self.relevant_counts.items()):
            raise ValueError("relevant count exceeds its cutoff")


def precision_report(rankings: dict[int, list], qrels: dict[int, set],
                     n_points: int = 11,
                     cutoffs: tuple[int, ...] = (10, 30, 40, 70)) -> PrecisionReport:
    """Evaluate ranked lists against qrels; queries without judgments are skipped."""
    per_query: dict[int, float] = {}
    count_sums = {j: 0.0 for j in cutoffs}
    for qid, ranked in rankings.items():
        relevant = qrels.get(qid)
        if not relevant:
            continue
        per_query[qid] = n_point_avg_precision(ranked, relevant, n_points)
        for j in cutoffs:
            count_sums[j] += relevant_in_top(ranked, relevant, j)
    if not per_query:
        raise ValueError("no query had relevance judgments")
    n_q = len(per_query)
    return PrecisionReport(
        per_query=per_query,
        mean=mean_avg_precision(per_query.values()),
        relevant_counts={j: count_sums[j] / n_q for j in cutoffs},
        n_queries=n_q,
    )
