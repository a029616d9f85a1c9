"""Descriptive summaries, the paired t-test and Wilcoxon tests.

The Student-t CDF is computed from the regularized incomplete beta function
(continued fraction, modified Lentz), so no statistics package is needed at
runtime.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .core import StructuralError

ALPHA = 0.05
VERY_SIGNIFICANT = 0.001
WILCOXON_MODES = ("signed_rank", "rank_sum")
_EXACT_LIMIT = 5


@dataclass(frozen=True)
class TrialSummary:
    min: float
    max: float
    std: float
    average: float
    median: float
    n: int

    def as_row(self) -> dict:
        return {
            "Min": self.min,
            "Max": self.max,
            "Std": self.std,
            "Average": self.average,
            "Median": self.median,
        }


def summarize(samples) -> TrialSummary:
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise StructuralError("cannot summarize an empty sample")
    std = float(np.std(x, ddof=1)) if x.size > 1 else 0.0
    return TrialSummary(
        min=float(x.min()),
        max=float(x.max()),
        std=std,
        average=float(np.mean(x)),
        median=float(np.median(x)),
        n=int(x.size),
    )


def _beta_continued_fraction(a: float, b: float, x: float) -> float:
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    d = tiny if abs(d) < tiny else d
    d = 1.0 / d
    h = d
    for m in range(1, 1000):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = tiny if abs(d) < tiny else d
        c = 1.0 + aa / c
        c = tiny if abs(c) < tiny else c
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = tiny if abs(d) < tiny else d
        c = 1.0 + aa / c
        c = tiny if abs(c) < tiny else c
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-15:
            return h
    raise ArithmeticError("incomplete beta continued fraction did not converge")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) for a, b > 0 and 0 <= x <= 1."""
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    if x == 0.0 or x == 1.0:
        return x
    log_front = math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b) + a * math.log(x) + b * math.log1p(-x)
    front = math.exp(log_front)
    # the fraction converges fast only on this side of the mean
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_continued_fraction(a, b, x) / a
    return 1.0 - front * _beta_continued_fraction(b, a, 1.0 - x) / b


def t_cdf(t: float, df: float) -> float:
    if math.isinf(t):
        return 1.0 if t > 0 else 0.0
    tail = 0.5 * regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t))
    return 1.0 - tail if t > 0 else tail


def t_two_sided_p(t: float, df: float) -> float:
    if math.isinf(t):
        return 0.0
    return regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t))


def t_quantile(q: float, df: float) -> float:
    """Inverse of ``t_cdf`` by bisection."""
    if not 0.0 < q < 1.0:
        raise ValueError("q must lie in (0, 1)")
    if q == 0.5:
        return 0.0
    if q < 0.5:
        return -t_quantile(1.0 - q, df)
    lo, hi = 0.0, 1.0
    while t_cdf(hi, df) < q:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if t_cdf(mid, df) < q:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-14 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def normal_cdf(z: float) -> float:
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def significance_label(p: float) -> str:
    """'a+' very significant (p <= 0.001), 'a' significant (p <= 0.05), else 'b'."""
    if p > ALPHA:
        return "b"
    if p > VERY_SIGNIFICANT:
        return "a"
    return "a+"


@dataclass(frozen=True)
class TTestResult:
    mean_diff: float
    std_diff: float
    std_error: float
    ci_low: float
    ci_high: float
    t: float
    df: int
    p: float
    label: str


def paired_t_test(a, b, confidence: float = 0.95) -> TTestResult:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise StructuralError("paired samples must be 1-D and of equal length")
    n = a.size
    if n < 2:
        raise StructuralError("paired t-test needs at least two pairs")
    d = a - b
    mean = float(np.mean(d))
    sd = float(np.std(d, ddof=1))
    se = sd / math.sqrt(n)
    df = n - 1
    if se == 0.0:
        t = 0.0 if mean == 0.0 else math.copysign(math.inf, mean)
        p = 1.0 if mean == 0.0 else 0.0
        return TTestResult(mean, sd, se, mean, mean, t, df, p, significance_label(p))
    t = mean / se
    p = min(1.0, t_two_sided_p(t, df))
    half = t_quantile(0.5 + confidence / 2.0, df) * se
    return TTestResult(mean, sd, se, mean - half, mean + half, t, df, p, significance_label(p))


def rankdata(values) -> np.ndarray:
    """1-based ranks with ties given their average (mid) rank."""
    x = np.asarray(values, dtype=float)
    order = np.argsort(x, kind="mergesort")
    ranks = np.empty(x.size, dtype=float)
    sorted_x = x[order]
    i = 0
    while i < x.size:
        j = i
        while j + 1 < x.size and sorted_x[j + 1] == sorted_x[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def _tie_term(ranks) -> float:
    _, counts = np.unique(ranks, return_counts=True)
    return float(np.sum(counts.astype(float) ** 3 - counts))


@dataclass(frozen=True)
class WilcoxonResult:
    z: float
    p: float
    sign: str
    mode: str
    statistic: float
    n: int
    p_one_sided: float
    exact: bool


def _exact_signed_rank(ranks, w_plus):
    totals = [sum(r for r, s in zip(ranks, signs) if s) for signs in itertools.product((0, 1), repeat=len(ranks))]
    totals = np.array(totals)
    p_low = float(np.mean(totals <= w_plus + 1e-9))
    p_high = float(np.mean(totals >= w_plus - 1e-9))
    return min(1.0, 2.0 * min(p_low, p_high)), p_low


def _exact_rank_sum(ranks, n1, r1):
    totals = np.array([sum(c) for c in itertools.combinations(ranks, n1)])
    p_low = float(np.mean(totals <= r1 + 1e-9))
    p_high = float(np.mean(totals >= r1 - 1e-9))
    return min(1.0, 2.0 * min(p_low, p_high)), p_low


def _signed_rank(a, b) -> WilcoxonResult:
    if a.shape != b.shape:
        raise StructuralError("signed-rank test needs paired samples of equal length")
    d = a - b
    d = d[d != 0]
    n = d.size
    if n == 0:
        return WilcoxonResult(0.0, 1.0, "-", "signed_rank", 0.0, 0, 1.0, True)
    ranks = rankdata(np.abs(d))
    w_plus = float(ranks[d > 0].sum())
    w_minus = float(ranks[d < 0].sum())
    statistic = min(w_plus, w_minus)
    mean = n * (n + 1) / 4.0
    var = n * (n + 1) * (2 * n + 1) / 24.0 - _tie_term(ranks) / 48.0
    sd = math.sqrt(var) if var > 0 else 0.0
    z = (statistic - mean) / sd if sd > 0 else 0.0
    if n < _EXACT_LIMIT:
        p, p_less = _exact_signed_rank(ranks, w_plus)
        exact = True
    else:
        p = min(1.0, 2.0 * normal_cdf(-abs(z)))
        p_less = normal_cdf((w_plus - mean) / sd) if sd > 0 else 0.5
        exact = False
    sign = "+" if p < ALPHA and w_plus < w_minus else "-"
    return WilcoxonResult(z, p, sign, "signed_rank", statistic, n, p_less, exact)


def _rank_sum(a, b) -> WilcoxonResult:
    n1, n2 = a.size, b.size
    if n1 == 0 or n2 == 0:
        raise StructuralError("rank-sum test needs two non-empty samples")
    ranks = rankdata(np.concatenate([a, b]))
    N = n1 + n2
    r1 = float(ranks[:n1].sum())
    mean = n1 * (N + 1) / 2.0
    var = n1 * n2 / 12.0 * ((N + 1) - _tie_term(ranks) / (N * (N - 1)))
    sd = math.sqrt(var) if var > 0 else 0.0
    z = (r1 - mean) / sd if sd > 0 else 0.0
    if min(n1, n2) < _EXACT_LIMIT and math.comb(N, n1) <= 200_000:
        p, p_less = _exact_rank_sum(list(ranks), n1, r1)
        exact = True
    else:
        p = min(1.0, 2.0 * normal_cdf(-abs(z)))
        p_less = normal_cdf(z) if sd > 0 else 0.5
        exact = False
    sign = "+" if p < ALPHA and r1 < mean else "-"
    return WilcoxonResult(z, p, sign, "rank_sum", r1, N, p_less, exact)


def wilcoxon_test(a, b, mode: str = "signed_rank") -> WilcoxonResult:
    """Compare ``a`` (the proposed algorithm) against ``b``.

    ``sign`` is '+' when ``a`` is significantly smaller at the 5% level,
    '-' otherwise.  Small samples use the exact permutation distribution.
    """
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if mode == "signed_rank":
        return _signed_rank(a, b)
    if mode == "rank_sum":
        return _rank_sum(a, b)
    raise ValueError(f"unknown Wilcoxon mode {mode!r}; expected one of {WILCOXON_MODES}")
