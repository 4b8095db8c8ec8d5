"""
Variance ladder
Per-term variances, prefix sums s_n^2, the ratio bound D and the
variance-to-index map h(n) = max{k : s_k^2 <= n}.

All arrays are 1-based: index 0 holds a zero pad so prefix[n] is s_n^2.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Protocol, Tuple

import numpy as np

from app.errors import DegenerateProfileError, DomainError, HorizonExceededError, RangeError

logger = logging.getLogger(__name__)

# relative slack for comparisons between independently rounded square roots
REL_TOL = 1e-12


def compensated_cumsum(values) -> np.ndarray:
    """
    Cumulative sum with TwoSum error correction.

    The naive running sum c is exact up to one rounding per step; the rounding
    error of each step is recovered exactly (TwoSum) and accumulated separately.
    For non-negative inputs the output is non-decreasing.
    """
    x = np.asarray(values, dtype=np.float64)
    if x.size == 0:
        return x.copy()
    c = np.add.accumulate(x)
    a = np.concatenate(([0.0], c[:-1]))
    bb = c - a
    err = (a - (c - bb)) + (x - bb)
    out = c + np.add.accumulate(err)
    if np.all(x >= 0):
        out = np.maximum.accumulate(out)
    return out


class WidthRule(Protocol):
    """Anything that maps a level N to the window width f_N"""

    def width(self, N: float) -> float: ...


# ----------------------------
# Domain types
# ----------------------------

@dataclass(frozen=True, eq=False)
class VarianceProfile:
    """Per-term variances sigma_j^2 with their prefix sums s_n^2 (immutable)"""
    sigma_sq: np.ndarray
    prefix: np.ndarray
    label: str = "custom"

    @classmethod
    def from_variances(cls, variances, label: str = "custom") -> "VarianceProfile":
        """Build from sigma_1^2, ..., sigma_n^2"""
        v = np.asarray(variances, dtype=np.float64).ravel()
        if v.size == 0:
            raise RangeError("variance profile needs at least one term")
        if not np.all(np.isfinite(v)):
            raise DomainError("variances must be finite")
        if np.any(v < 0):
            raise DomainError("variances must be non-negative")
        sigma_sq = np.concatenate(([0.0], v))
        prefix = np.concatenate(([0.0], compensated_cumsum(v)))
        if prefix[-1] <= 0:
            raise DegenerateProfileError(f"profile '{label}' has zero total variance")
        if v.size >= 2 and not prefix[-1] > prefix[1]:
            raise DegenerateProfileError(f"profile '{label}' does not grow past its first term")
        sigma_sq.setflags(write=False)
        prefix.setflags(write=False)
        return cls(sigma_sq=sigma_sq, prefix=prefix, label=label)

    @property
    def length(self) -> int:
        return int(self.prefix.size - 1)

    @property
    def max_level(self) -> float:
        """Largest representable variance level s_{n_max}^2"""
        return float(self.prefix[-1])

    @property
    def first_positive(self) -> int:
        """Smallest index with s_n > 0"""
        return int(np.argmax(self.prefix > 0))

    def s(self, n: int) -> float:
        return math.sqrt(cumulative_variance(self, n))

    def s_array(self) -> np.ndarray:
        return np.sqrt(self.prefix)


@dataclass(frozen=True)
class IndexWindow:
    """Indices n with lo < n <= hi, i.e. N < s_n^2 <= N*f_N"""
    lo: int
    hi: int
    N: float
    width: float

    @property
    def is_empty(self) -> bool:
        return self.hi <= self.lo

    @property
    def size(self) -> int:
        return max(0, self.hi - self.lo)

    def indices(self) -> range:
        return range(self.lo + 1, self.hi + 1)


@dataclass(frozen=True)
class RatioBound:
    """Empirical D = max s_{j+1}/s_j over the horizon and where it is attained"""
    value: float
    argmax: Optional[int]

    def __float__(self) -> float:
        return self.value


@dataclass
class BracketReport:
    """Result of checking D^-1 sqrt(L) <= s_{h(L)} <= sqrt(L) on schedule levels"""
    D: float
    checked: int = 0
    skipped_beyond_horizon: int = 0
    skipped_below_first_positive: int = 0
    violations: List[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "D": self.D,
            "checked": self.checked,
            "skipped_beyond_horizon": self.skipped_beyond_horizon,
            "skipped_below_first_positive": self.skipped_below_first_positive,
            "violations": self.violations,
            "ok": self.ok,
        }


# ----------------------------
# Operations
# ----------------------------

def cumulative_variance(profile: VarianceProfile, n: int) -> float:
    """s_n^2 for 1 <= n <= length"""
    if not 1 <= n <= profile.length:
        raise RangeError(f"index {n} outside 1..{profile.length}", {"index": n, "length": profile.length})
    return float(profile.prefix[n])


def ratio_bound(profile: VarianceProfile) -> RatioBound:
    """
    D = max s_{j+1}/s_j over represented j with s_j > 0.

    Leading indices with s_j = 0 are skipped. A profile whose only positive
    prefix is its last entry has no ratio to take; D = 1 is reported then.
    """
    prefix = profile.prefix
    if prefix[-1] <= 0:
        raise DegenerateProfileError(f"profile '{profile.label}' has all prefix sums zero")
    lower = prefix[1:-1]
    upper = prefix[2:]
    positive = lower > 0
    if not np.any(positive):
        return RatioBound(value=1.0, argmax=None)
    ratios = np.zeros_like(lower)
    ratios[positive] = np.sqrt(upper[positive] / lower[positive])
    j = int(np.argmax(ratios))
    return RatioBound(value=float(max(ratios[j], 1.0)), argmax=j + 1)


def index_of_variance(profile: VarianceProfile, level: float) -> int:
    """h(level): the largest k with s_k^2 <= level (binary search)"""
    level = float(level)
    if math.isnan(level):
        raise DomainError("variance level is NaN")
    if level > profile.max_level:
        raise HorizonExceededError(level, profile.max_level)
    if level < profile.prefix[1]:
        raise DomainError(
            f"level {level!r} is below s_1^2 = {float(profile.prefix[1])!r}; h is undefined there",
            {"level": level},
        )
    return int(np.searchsorted(profile.prefix[1:], level, side="right"))


def index_of_variance_many(profile: VarianceProfile, levels) -> np.ndarray:
    """Vectorized h over an array of levels (same errors as index_of_variance)"""
    arr = np.asarray(levels, dtype=np.float64)
    if arr.size and np.any(np.isnan(arr)):
        raise DomainError("variance level is NaN")
    if arr.size and arr.max() > profile.max_level:
        raise HorizonExceededError(float(arr.max()), profile.max_level)
    if arr.size and arr.min() < profile.prefix[1]:
        raise DomainError(f"level {float(arr.min())!r} is below s_1^2")
    return np.searchsorted(profile.prefix[1:], arr, side="right").astype(np.int64)


def window(profile: VarianceProfile, N: float, f: WidthRule) -> IndexWindow:
    """Index window (h(N), h(N*f_N)] for level N under width rule f"""
    if not N >= 1:
        raise DomainError(f"window level must be >= 1, got {N!r}")
    width = float(f.width(N))
    top = N * width
    if top > profile.max_level:
        raise HorizonExceededError(top, profile.max_level, what="window top N*f_N")
    lo = index_of_variance(profile, N)
    hi = index_of_variance(profile, top)
    return IndexWindow(lo=lo, hi=hi, N=float(N), width=width)


def bracket_check(profile: VarianceProfile, levels: Iterable[Tuple[int, int, float]], D: Optional[float] = None) -> BracketReport:
    """
    Check D^-1 sqrt(L) <= s_{h(L)} <= sqrt(L) on (j, t, log L) grid points.

    Points beyond the horizon, or whose h(L) still has s = 0, are counted as
    skipped rather than checked.
    """
    if D is None:
        D = ratio_bound(profile).value
    report = BracketReport(D=float(D))
    s1_sq = float(profile.prefix[1])
    for j, t, log_level in levels:
        if log_level > math.log(profile.max_level):
            report.skipped_beyond_horizon += 1
            continue
        level = math.exp(log_level)
        if level > profile.max_level:
            report.skipped_beyond_horizon += 1
            continue
        if level < s1_sq:
            report.skipped_below_first_positive += 1
            continue
        u = index_of_variance(profile, level)
        s_u = math.sqrt(profile.prefix[u])
        if s_u <= 0:
            report.skipped_below_first_positive += 1
            continue
        upper = math.sqrt(level)
        lower = upper / D
        report.checked += 1
        if s_u > upper * (1 + REL_TOL) or s_u < lower * (1 - REL_TOL):
            report.violations.append(
                {"j": j, "t": t, "level": level, "index": u, "s": s_u, "lower": lower, "upper": upper}
            )
    if report.violations:
        logger.warning(f"Level bracket violated at {len(report.violations)} grid points of '{profile.label}'")
    return report
