"""Empirical inequality indices on finite income samples.

All estimators work on the order statistics X_{1:n} <= ... <= X_{n:n}.
Let M = ceil(n/2) (the median person's rank) and m = floor(n/2) (the
size of the struggling half).  The three median-based indices are

    psi1_n : 1 - mean over k <= m of X_{k:n} / X_{M:n}
    psi2_n : 1 - mean over k <= m of X_{k:n} / X_{M+k:n}
    psi3_n : 1 - mean over k <= m of X_{k:n} / X_{n-k+1:n}

and the classical comparisons are the Gini index, the Zenga index
(lower-mean over upper-mean at every split point), a top-share variant
that divides each prefix sum by the sum of the same number of largest
incomes, and a median-normalized Gini variant g2_n which is not confined
to [0, 1] (a constant sample yields -1/n).

Values of 0 in denominators raise DegenerateSampleError naming the
offending order statistic; for n = 1 the struggling half is empty and
the three median-based indices are 0 by the empty-sum convention.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

__all__ = [
    "DegenerateSampleError", "Sample", "make_sample", "empirical_quantile",
    "psi1_n", "psi2_n", "psi3_n", "gini_n", "zenga_n", "dg_n", "g2_n",
    "IndexReport", "full_report", "REPORT_COLUMNS",
    "csv_cell", "report_csv_header", "report_csv_row",
]

_KAHAN_THRESHOLD = 10_000


class DegenerateSampleError(ValueError):
    """A required denominator in an index formula is zero."""

    def __init__(self, message: str, order_stat: str | None = None):
        super().__init__(message)
        self.order_stat = order_stat


def _stat_name(rank: int, n: int) -> str:
    return f"X_{{{rank}:{n}}}"


@dataclass(frozen=True)
class Sample:
    """An ordered income sample with precomputed prefix sums."""

    values: np.ndarray
    prefix_sums: np.ndarray

    @property
    def n(self) -> int:
        return int(self.values.size)

    @property
    def median_rank(self) -> int:
        """M = ceil(n/2), the rank of the median person."""
        return (self.n + 1) // 2

    @property
    def median(self) -> float:
        return float(self.values[self.median_rank - 1])

    @property
    def total(self) -> float:
        return float(self.prefix_sums[-1])

    @property
    def mean(self) -> float:
        return self.total / self.n

    def order(self, rank: int) -> float:
        """Order statistic by 1-based rank."""
        if not 1 <= rank <= self.n:
            raise IndexError(
                f"order statistic {_stat_name(rank, self.n)} out of range")
        return float(self.values[rank - 1])


def _kahan_cumsum(arr: np.ndarray) -> np.ndarray:
    out = np.empty(arr.size)
    total = 0.0
    comp = 0.0
    for i, v in enumerate(arr.tolist()):
        y = v - comp
        t = total + y
        comp = (t - total) - y
        total = t
        out[i] = total
    return out


def make_sample(values: Iterable[float]) -> Sample:
    """Sort, validate, and wrap raw incomes (nonnegative, finite, >= 1 value).

    Prefix sums switch to compensated (Kahan) accumulation above 10^4
    observations, where plain running sums start losing digits.
    """
    arr = np.sort(np.asarray(list(values) if not isinstance(values, np.ndarray)
                             else values, dtype=float).ravel())
    if arr.size == 0:
        raise ValueError("sample must contain at least one value")
    if not np.isfinite(arr).all():
        raise ValueError("sample values must be finite")
    if arr[0] < 0.0:
        raise ValueError(f"sample values must be nonnegative, got {arr[0]}")
    prefix = _kahan_cumsum(arr) if arr.size > _KAHAN_THRESHOLD else np.cumsum(arr)
    arr.flags.writeable = False
    prefix.flags.writeable = False
    return Sample(values=arr, prefix_sums=prefix)


def empirical_quantile(s: Sample, p: float) -> float:
    """Lower empirical quantile X_{ceil(n p):n} for 0 < p <= 1."""
    if not 0.0 < p <= 1.0:
        raise ValueError(f"empirical quantile requires 0 < p <= 1, got {p!r}")
    rank = min(s.n, max(1, math.ceil(s.n * p)))
    return float(s.values[rank - 1])


def _require_positive(s: Sample, rank: int, needed_for: str) -> float:
    value = float(s.values[rank - 1])
    if value <= 0.0:
        name = _stat_name(rank, s.n)
        raise DegenerateSampleError(
            f"degenerate sample: {name} = 0, needed as a denominator for {needed_for}",
            order_stat=name)
    return value


def psi1_n(s: Sample) -> float:
    """Median-denominator index: struggling incomes against the median."""
    m = s.n // 2
    if m == 0:
        return 0.0
    med = _require_positive(s, s.median_rank, "psi1")
    return 1.0 - float(s.values[:m].sum()) / (m * med)


def psi2_n(s: Sample) -> float:
    """Step-up index: k-th struggling income against the (M+k)-th."""
    m = s.n // 2
    if m == 0:
        return 0.0
    M = s.median_rank
    _require_positive(s, M + 1, "psi2")
    ratios = s.values[:m] / s.values[M:M + m]
    return 1.0 - float(ratios.mean())


def psi3_n(s: Sample) -> float:
    """Top-down index: k-th struggling income against the k-th richest."""
    m = s.n // 2
    if m == 0:
        return 0.0
    n = s.n
    _require_positive(s, n - m + 1, "psi3")
    ratios = s.values[:m] / s.values[n - m:][::-1]
    return 1.0 - float(ratios.mean())


def gini_n(s: Sample) -> float:
    """Classical Gini index of the sample."""
    n = s.n
    _require_positive(s, n, "the Gini index")
    coeff = 2.0 * (n - np.arange(1, n + 1)) + 1.0
    return 1.0 - float(coeff @ s.values) / (s.mean * n * n)


def zenga_n(s: Sample) -> float:
    """Zenga index: 1 - mean of (lower mean / upper mean) over split points.

    A constant sample gives 1/n, not 0: with every split the lower and
    upper means are equal, and the n-th split term is skipped.
    """
    n = s.n
    _require_positive(s, n, "the Zenga index")
    if n == 1:
        return 1.0
    i = np.arange(1, n)
    lower = s.prefix_sums[:n - 1] / i
    upper = (s.total - s.prefix_sums[:n - 1]) / (n - i)
    return 1.0 - float((lower / upper).sum()) / n


def dg_n(s: Sample) -> float:
    """Bottom-versus-top share index: prefix sums over equal-count top sums."""
    n = s.n
    _require_positive(s, n, "the share-ratio index")
    pref0 = np.concatenate(([0.0], np.asarray(s.prefix_sums[:-1])))
    top = s.total - pref0[::-1]
    return 1.0 - float((s.prefix_sums / top).sum()) / n


def g2_n(s: Sample) -> float:
    """Median-normalized Gini variant; ranges outside [0, 1] (constant -> -1/n)."""
    med = _require_positive(s, s.median_rank, "the median-normalized Gini")
    n = s.n
    return s.mean / med - 2.0 * float(s.prefix_sums.sum()) / (n * n * med)


REPORT_COLUMNS = ("label", "mean", "median", "n_T", "n_P",
                  "G", "Z", "D", "G2", "Psi1", "Psi2", "Psi3")


@dataclass(frozen=True)
class IndexReport:
    """Every index of one sample, plus size bookkeeping.

    n_T counts all records of the underlying population slice; n_P counts
    the strictly positive incomes that the estimators actually use.
    """

    mean: float
    median: float
    n_T: int
    n_P: int
    gini: float
    zenga: float
    dg: float
    g2: float
    psi1: float
    psi2: float
    psi3: float


def full_report(s: Sample, n_total: int | None = None) -> IndexReport:
    """Compute all seven indices of the sample in one pass."""
    n_T = s.n if n_total is None else int(n_total)
    if n_T < s.n:
        raise ValueError(f"n_total={n_T} cannot be smaller than the sample size {s.n}")
    return IndexReport(
        mean=s.mean, median=s.median, n_T=n_T, n_P=s.n,
        gini=gini_n(s), zenga=zenga_n(s), dg=dg_n(s), g2=g2_n(s),
        psi1=psi1_n(s), psi2=psi2_n(s), psi3=psi3_n(s),
    )


def csv_cell(text: str) -> str:
    """Quote a free-text CSV field per RFC 4180 when it needs escaping."""
    if any(ch in text for ch in ',"\n\r'):
        return '"' + text.replace('"', '""') + '"'
    return text


def report_csv_header(include_ranks: bool = False) -> str:
    cols = ",".join(REPORT_COLUMNS)
    return cols + ",rank1,rank2,rank3" if include_ranks else cols


def report_csv_row(label: str, report: IndexReport, precision: int = 4,
                   ranks: tuple[int, int, int] | None = None) -> str:
    def f(x: float) -> str:
        return f"{x:.{precision}f}"

    cells = [csv_cell(label), f(report.mean), f(report.median),
             str(report.n_T), str(report.n_P),
             f(report.gini), f(report.zenga), f(report.dg), f(report.g2),
             f(report.psi1), f(report.psi2), f(report.psi3)]
    if ranks is not None:
        cells.extend(str(r) for r in ranks)
    return ",".join(cells)
