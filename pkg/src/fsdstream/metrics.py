"""Clustering agreement metrics: adjusted Rand index and adjusted mutual
information, computed from a contingency table.

ARI uses exact integer pair counting; AMI uses natural-log entropies and
the exact hypergeometric expectation of mutual information (no sampling),
normalized by the arithmetic mean of the two entropies.  Documents
without a gold label are excluded from scoring upstream.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, NamedTuple, Sequence

import numpy as np
from scipy.special import gammaln

from .core import Document, FsdError


class LengthMismatchError(FsdError):
    def __init__(self, n_pred: int, n_gold: int):
        super().__init__(f"label lists differ in length: {n_pred} vs {n_gold}")


class TooFewItemsError(FsdError):
    def __init__(self, n: int):
        super().__init__(f"need at least 2 co-labeled items, got {n}")


class NoGoldLabelsError(FsdError):
    def __init__(self) -> None:
        super().__init__("fewer than 2 documents carry gold labels")


@dataclass(frozen=True)
class ContingencyTable:
    """k_pred x k_gold co-occurrence counts with marginals."""

    counts: np.ndarray
    row_sums: np.ndarray
    col_sums: np.ndarray
    total_n: int


def build_contingency(
    pred: Sequence[Hashable], gold: Sequence[Hashable]
) -> ContingencyTable:
    """Count co-occurrences of predicted clusters and gold events.

    Labels are mapped to dense indices in order of first appearance.
    """
    if len(pred) != len(gold):
        raise LengthMismatchError(len(pred), len(gold))
    pred_index: dict[Hashable, int] = {}
    gold_index: dict[Hashable, int] = {}
    pairs = []
    for p, g in zip(pred, gold):
        pairs.append(
            (
                pred_index.setdefault(p, len(pred_index)),
                gold_index.setdefault(g, len(gold_index)),
            )
        )
    counts = np.zeros((len(pred_index), len(gold_index)), dtype=np.int64)
    for i, j in pairs:
        counts[i, j] += 1
    return ContingencyTable(
        counts=counts,
        row_sums=counts.sum(axis=1),
        col_sums=counts.sum(axis=0),
        total_n=int(counts.sum()),
    )


def _pairs(x: np.ndarray) -> int:
    """Sum over x of C(x_i, 2), exactly."""
    return int(sum(int(v) * (int(v) - 1) // 2 for v in x.ravel()))


def adjusted_rand_index(table: ContingencyTable) -> float:
    """Chance-corrected pair-counting agreement, in [-0.5, 1]."""
    n = table.total_n
    if n < 2:
        raise TooFewItemsError(n)
    index = _pairs(table.counts)
    a = _pairs(table.row_sums)
    b = _pairs(table.col_sums)
    c2n = n * (n - 1) // 2
    # ARI = (index - a*b/c2n) / ((a+b)/2 - a*b/c2n), in exact integers
    num = 2 * (c2n * index - a * b)
    den = c2n * (a + b) - 2 * a * b
    if den == 0:
        # both labelings identical and degenerate (all-singleton or single-cluster)
        return 1.0
    return num / den


def _entropy(marginal: np.ndarray, n: int) -> float:
    p = marginal[marginal > 0] / n
    return float(-np.sum(p * np.log(p)))


def _mutual_information(table: ContingencyTable) -> float:
    nz = table.counts > 0
    nij = table.counts[nz].astype(np.float64)
    outer = np.outer(table.row_sums, table.col_sums)[nz].astype(np.float64)
    n = table.total_n
    return float(np.sum(nij / n * (np.log(n * nij) - np.log(outer))))


def expected_mutual_information(table: ContingencyTable) -> float:
    """Exact expectation of MI under the hypergeometric null model.

    For each marginal pair (a_i, b_j) the feasible cell values
    n_ij in [max(1, a_i + b_j - n), min(a_i, b_j)] are summed with their
    hypergeometric probabilities, using log-factorial tables.
    """
    n = table.total_n
    lgam = gammaln(np.arange(n + 2, dtype=np.float64))  # lgam[x] = log((x-1)!)
    log_n = np.log(float(n))
    emi = 0.0
    for ai in table.row_sums:
        ai = int(ai)
        for bj in table.col_sums:
            bj = int(bj)
            lo = max(1, ai + bj - n)
            hi = min(ai, bj)
            if hi < lo:
                continue
            nij = np.arange(lo, hi + 1)
            log_p = (
                lgam[ai + 1]
                + lgam[bj + 1]
                + lgam[n - ai + 1]
                + lgam[n - bj + 1]
                - lgam[n + 1]
                - lgam[nij + 1]
                - lgam[ai - nij + 1]
                - lgam[bj - nij + 1]
                - lgam[n - ai - bj + nij + 1]
            )
            terms = nij / n * (log_n + np.log(nij) - np.log(float(ai) * bj))
            emi += float(np.sum(terms * np.exp(log_p)))
    return emi


def _identical_partitions(table: ContingencyTable) -> bool:
    nz = table.counts > 0
    return bool(np.all(nz.sum(axis=0) == 1) and np.all(nz.sum(axis=1) == 1))


def adjusted_mutual_information(table: ContingencyTable) -> float:
    """AMI = (MI - E[MI]) / (mean(H_pred, H_gold) - E[MI]), in nats."""
    n = table.total_n
    if n < 2:
        raise TooFewItemsError(n)
    if _identical_partitions(table):
        # AMI of identical partitions is exactly 1 whenever defined, and the
        # degenerate rule below also yields 1; skip the float round trip
        return 1.0
    mi = _mutual_information(table)
    emi = expected_mutual_information(table)
    h_pred = _entropy(table.row_sums, n)
    h_gold = _entropy(table.col_sums, n)
    numerator = mi - emi
    denominator = 0.5 * (h_pred + h_gold) - emi
    if abs(denominator) < 1e-12 and abs(numerator) < 1e-12:
        # both labelings degenerate: agreement is only meaningful if they
        # are the same partition
        return 1.0 if _identical_partitions(table) else 0.0
    # MI <= mean(H) holds exactly in real arithmetic; trim float overshoot
    return min(1.0, numerator / denominator)


class EvalReport(NamedTuple):
    ari: float
    ami: float
    n_scored: int


def evaluate(
    pred_labels: Sequence[int], documents: Sequence[Document]
) -> EvalReport:
    """Score predicted cluster ids against gold event labels.

    Only documents carrying a gold label are scored; ``pred_labels`` is
    indexed by document row over the full corpus.
    """
    if len(pred_labels) != len(documents):
        raise LengthMismatchError(len(pred_labels), len(documents))
    pred = []
    gold = []
    for doc in documents:
        if doc.gold_label is not None:
            pred.append(int(pred_labels[doc.row]))
            gold.append(doc.gold_label)
    if len(gold) < 2:
        raise NoGoldLabelsError()
    table = build_contingency(pred, gold)
    return EvalReport(
        ari=adjusted_rand_index(table),
        ami=adjusted_mutual_information(table),
        n_scored=len(gold),
    )
