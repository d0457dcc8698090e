"""Classification quality metrics and the nonparametric comparison protocol.

Metrics come from a confusion matrix under a one-vs-rest reduction with
macro averaging; accuracy is the overall fraction correct.  Classifier
comparison over the disjoint test partitions uses the Friedman rank test,
then pairwise two-sided Wilcoxon signed-rank tests with Holm correction,
summarized as a win matrix.  scipy supplies distribution tails only; the
test statistics themselves are computed here.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2 as _chi2

from .errors import OntoselectError

WILCOXON_EXACT_MAX_N = 25


@dataclass(frozen=True)
class ConfusionMatrix:
    """counts[i][j] = samples of true class i predicted as class j."""

    labels: tuple
    counts: np.ndarray

    def __post_init__(self):
        k = len(self.labels)
        if self.counts.shape != (k, k):
            raise ValueError("counts must be square over labels")
        if (self.counts < 0).any():
            raise ValueError("counts must be non-negative")

    @classmethod
    def from_predictions(cls, labels, y_true, y_pred):
        labels = tuple(labels)
        index = {lab: i for i, lab in enumerate(labels)}
        counts = np.zeros((len(labels), len(labels)), dtype=np.int64)
        for t, p in zip(y_true, y_pred):
            counts[index[t], index[p]] += 1
        return cls(labels=labels, counts=counts)

    @property
    def total(self):
        return int(self.counts.sum())


@dataclass(frozen=True)
class MetricReport:
    accuracy: float
    macro_precision: float
    macro_recall: float
    macro_f1: float

    def to_dict(self):
        return {
            "accuracy": self.accuracy,
            "macro_precision": self.macro_precision,
            "macro_recall": self.macro_recall,
            "macro_f1": self.macro_f1,
        }


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float
    method: str    # friedman | wilcoxon_exact | wilcoxon_normal
    n: int


def class_metrics(cm):
    """Per-class one-vs-rest (precision, recall, f1); 0 where undefined."""
    counts = cm.counts.astype(np.float64)
    tp = np.diag(counts)
    fp = counts.sum(axis=0) - tp
    fn = counts.sum(axis=1) - tp
    with np.errstate(invalid="ignore", divide="ignore"):
        precision = np.where(tp + fp > 0, tp / (tp + fp), 0.0)
        recall = np.where(tp + fn > 0, tp / (tp + fn), 0.0)
        pr = precision + recall
        f1 = np.where(pr > 0, 2.0 * precision * recall / np.where(pr > 0, pr, 1.0), 0.0)
    return precision, recall, f1


def compute_metrics(cm):
    """Accuracy (overall fraction correct) and macro precision/recall/F1."""
    if cm.total == 0:
        raise OntoselectError("empty confusion matrix")
    precision, recall, f1 = class_metrics(cm)
    return MetricReport(
        accuracy=float(np.trace(cm.counts) / cm.total),
        macro_precision=float(precision.mean()),
        macro_recall=float(recall.mean()),
        macro_f1=float(f1.mean()),
    )


def average_ranks(row):
    """Ranks 1..k with ties replaced by the mean of the tied ranks."""
    row = np.asarray(row, dtype=np.float64)
    order = np.argsort(row, kind="stable")
    ranks = np.empty(len(row))
    i = 0
    while i < len(row):
        j = i
        while j + 1 < len(row) and row[order[j + 1]] == row[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def friedman_test(scores):
    """Friedman chi-square over an n-datasets x k-classifiers score matrix.

    Per-row average ranks (mean ranks on ties); the statistic
    12/(n k (k+1)) * sum(R_j^2) - 3 n (k+1) is divided by the standard tie
    correction 1 - sum(t^3 - t) / (n k (k^2 - 1)).  All-equal rows are the
    degenerate case: statistic 0, p 1.
    """
    scores = np.asarray(scores, dtype=np.float64)
    if scores.ndim != 2 or scores.shape[0] < 2 or scores.shape[1] < 2:
        raise ValueError("friedman_test needs an n >= 2 by k >= 2 matrix")
    n, k = scores.shape
    ranks = np.vstack([average_ranks(row) for row in scores])
    column_sums = ranks.sum(axis=0)
    statistic = 12.0 / (n * k * (k + 1)) * float(np.sum(column_sums**2)) - 3.0 * n * (k + 1)
    ties = 0.0
    for row in scores:
        _, tie_counts = np.unique(row, return_counts=True)
        ties += float(np.sum(tie_counts**3 - tie_counts))
    correction = 1.0 - ties / (n * k * (k * k - 1))
    if correction <= 0.0:
        return TestResult(statistic=0.0, p_value=1.0, method="friedman", n=n)
    statistic /= correction
    p = float(_chi2.sf(statistic, k - 1))
    return TestResult(statistic=statistic, p_value=p, method="friedman", n=n)


def _exact_wilcoxon_p(ranks, w_statistic):
    """P(min(W+, W-) <= w) over all 2^n sign assignments of the given ranks.

    Exact count by subset-sum convolution over doubled ranks (mean ranks
    are multiples of 1/2, so doubling makes them integers); equivalent to
    full enumeration of the 2^n assignments.
    """
    doubled = np.rint(2.0 * np.asarray(ranks)).astype(np.int64)
    total = int(doubled.sum())
    counts = np.zeros(total + 1, dtype=np.float64)
    counts[0] = 1.0
    for r in doubled:
        shifted = np.zeros_like(counts)
        shifted[r:] = counts[: total + 1 - r]
        counts += shifted
    w2 = int(round(2.0 * w_statistic))
    sums = np.arange(total + 1)
    include = np.minimum(sums, total - sums) <= w2
    return float(counts[include].sum() / 2.0 ** len(doubled))


def wilcoxon_signed_rank(a, b):
    """Two-sided Wilcoxon signed-rank test on paired samples.

    Zero differences are dropped (n reports the effective count).  The
    statistic is W = min(W+, W-); p is exact (all 2^n sign assignments)
    for n <= 25 and a normal approximation with continuity correction and
    tie-corrected variance beyond.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1 or len(a) < 1:
        raise ValueError("wilcoxon_signed_rank needs two equal-length 1-d samples")
    diff = a - b
    diff = diff[diff != 0.0]
    n = len(diff)
    if n == 0:
        return TestResult(statistic=0.0, p_value=1.0, method="wilcoxon_exact", n=0)
    ranks = average_ranks(np.abs(diff))
    w_plus = float(ranks[diff > 0].sum())
    w_minus = float(ranks[diff < 0].sum())
    w = min(w_plus, w_minus)
    if n <= WILCOXON_EXACT_MAX_N:
        return TestResult(
            statistic=w, p_value=_exact_wilcoxon_p(ranks, w), method="wilcoxon_exact", n=n
        )
    return TestResult(
        statistic=w, p_value=_normal_wilcoxon_p(w, np.abs(diff)),
        method="wilcoxon_normal", n=n,
    )


def _normal_wilcoxon_p(w, abs_diff):
    """Two-sided normal approximation with continuity correction and
    tie-corrected variance."""
    n = len(abs_diff)
    mean = n * (n + 1) / 4.0
    _, tie_counts = np.unique(abs_diff, return_counts=True)
    variance = n * (n + 1) * (2 * n + 1) / 24.0 - float(
        np.sum(tie_counts**3 - tie_counts)
    ) / 48.0
    if variance <= 0.0:
        return 1.0
    z = (abs(w - mean) - 0.5) / math.sqrt(variance)
    return min(1.0, math.erfc(max(z, 0.0) / math.sqrt(2.0)))


def holm_correction(p_values):
    """Step-down Holm adjustment, returned in the original order."""
    p = np.asarray(p_values, dtype=np.float64)
    if p.ndim != 1:
        raise ValueError("holm_correction expects a 1-d list of p-values")
    if ((p < 0) | (p > 1)).any():
        raise ValueError("p-values must lie in [0, 1]")
    m = len(p)
    order = np.argsort(p, kind="stable")
    adjusted = np.empty(m)
    running = 0.0
    for i, idx in enumerate(order):
        running = max(running, min(1.0, (m - i) * p[idx]))
        adjusted[idx] = running
    return adjusted


@dataclass
class WinMatrix:
    """Pairwise dataset win counts with Holm-corrected significance."""

    classifiers: tuple
    wins: np.ndarray          # wins[i][j]: datasets where i beats j
    ties: np.ndarray
    significant: np.ndarray   # boolean, symmetric
    p_values: np.ndarray      # raw Wilcoxon p per pair (symmetric, diag 1)
    p_adjusted: np.ndarray
    summary_score: np.ndarray

    def to_dict(self):
        k = len(self.classifiers)
        pairs = [
            {
                "a": self.classifiers[i],
                "b": self.classifiers[j],
                "wins_a": int(self.wins[i, j]),
                "wins_b": int(self.wins[j, i]),
                "ties": int(self.ties[i, j]),
                "p_value": float(self.p_values[i, j]),
                "p_adjusted": float(self.p_adjusted[i, j]),
                "significant": bool(self.significant[i, j]),
            }
            for i in range(k)
            for j in range(i + 1, k)
        ]
        return {
            "classifiers": list(self.classifiers),
            "wins": self.wins.tolist(),
            "summary_score": self.summary_score.tolist(),
            "pairs": pairs,
        }

    def to_text(self):
        """Aligned win-count table; significant higher counts get a '*'."""
        names = list(self.classifiers)
        width = max(len(n) for n in names + ["summary"]) + 2
        header = " " * width + "".join(f"{n:>{width}}" for n in names)
        header += f"{'summary':>{width}}"
        lines = [header]
        for i, name in enumerate(names):
            cells = []
            for j in range(len(names)):
                if i == j:
                    cells.append(f"{'-':>{width}}")
                    continue
                mark = "*" if self.significant[i, j] and self.wins[i, j] > self.wins[j, i] else ""
                cells.append(f"{str(self.wins[i, j]) + mark:>{width}}")
            cells.append(f"{int(self.summary_score[i]):>{width}}")
            lines.append(f"{name:<{width}}" + "".join(cells))
        return "\n".join(lines)


def pairwise_comparison(scores, alpha=0.05, names=None):
    """Win counts plus per-pair Wilcoxon tests, Holm-corrected at alpha."""
    scores = np.asarray(scores, dtype=np.float64)
    if scores.ndim != 2 or scores.shape[0] < 2:
        raise ValueError("pairwise_comparison needs an n >= 2 by k matrix")
    n, k = scores.shape
    if names is None:
        names = tuple(f"clf{i}" for i in range(k))
    wins = np.zeros((k, k), dtype=np.int64)
    ties = np.zeros((k, k), dtype=np.int64)
    raw_p = np.ones((k, k))
    pair_index = []
    pair_p = []
    for i in range(k):
        for j in range(i + 1, k):
            wins[i, j] = int(np.sum(scores[:, i] > scores[:, j]))
            wins[j, i] = int(np.sum(scores[:, j] > scores[:, i]))
            ties[i, j] = ties[j, i] = n - wins[i, j] - wins[j, i]
            p = wilcoxon_signed_rank(scores[:, i], scores[:, j]).p_value
            raw_p[i, j] = raw_p[j, i] = p
            pair_index.append((i, j))
            pair_p.append(p)
    adjusted = holm_correction(pair_p)
    adj = np.ones((k, k))
    significant = np.zeros((k, k), dtype=bool)
    for (i, j), p_adj in zip(pair_index, adjusted):
        adj[i, j] = adj[j, i] = p_adj
        significant[i, j] = significant[j, i] = bool(p_adj < alpha)
    return WinMatrix(
        classifiers=tuple(names),
        wins=wins,
        ties=ties,
        significant=significant,
        p_values=raw_p,
        p_adjusted=adj,
        summary_score=wins.sum(axis=1),
    )
