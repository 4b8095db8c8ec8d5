"""
Prime-factor statistics
rho(m, t) = |omega(m, t) - loglog t| / sqrt(loglog t), its Mertens-normalized
twin rho_tilde, the min-max statistic over level windows, density scans over
all m <= x, and the sieve-versus-Kubilius-model comparison.

loglog always means the iterated logarithm log(log t), never a base-2 log.
Thresholds are evaluated at primes only: omega(m, t) and the Mertens sums
jump nowhere else.
"""

import logging
import math
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from app.errors import ConfigError, DomainError, HorizonExceededError, InvariantViolation, RangeError
from app.generators import GeneratorSpec, variance_profile_of
from app.settings import get_settings
from app.sieve import (
    MertensTables,
    OmegaThresholdProfile,
    SieveTable,
    omega_all,
    omega_profile,
    table_mertens,
)
from app.utils.parallel import map_chunks, map_items
from app.utils.rng import STREAM_MODEL, path_rng
from app.utils.stats import RunningMoments
from app.variance_ladder import ratio_bound
from app.windows import WindowFamily

logger = logging.getLogger(__name__)

PART_I = "part_i"
PART_II = "part_ii"
MODES = (PART_I, PART_II)

# fixed trial chunk for model sampling; one Philox stream per chunk
MODEL_CHUNK = 65536


def loglog(t: float) -> float:
    """log(log t); DomainError unless t > e"""
    if not t > math.e:
        raise DomainError(f"loglog needs t > e, got {t!r}")
    return math.log(math.log(t))


def script_l(x: float) -> float:
    """loglog x - 1/2 logloglog x, defined for x > e^e"""
    if not x > math.exp(math.e):
        raise DomainError(f"script_l needs x > e^e, got {x!r}")
    ll = math.log(math.log(x))
    return ll - 0.5 * math.log(ll)


def minmax_K(M: float, D: float) -> float:
    """K = 30 D^2 sqrt(M+1)"""
    if not M > 0 or not D >= 1:
        raise DomainError(f"need M > 0 and D >= 1, got M={M!r}, D={D!r}")
    return 30.0 * D * D * math.sqrt(M + 1.0)


def prime_model_D(n_max: int = 1000) -> float:
    """Ratio bound of the prime-model variance profile"""
    return ratio_bound(variance_profile_of(GeneratorSpec("prime_bernoulli"), n_max)).value


# ----------------------------
# rho and rho_tilde
# ----------------------------

def rho(omega: int, t: float) -> float:
    """|omega(m, t) - loglog t| / sqrt(loglog t) for the count omega = omega(m, t)"""
    L = loglog(t)
    return abs(omega - L) / math.sqrt(L)


def rho_tilde(omega: int, t: float, mertens: MertensTables) -> float:
    """|omega - sum_{p<=t} 1/p| / sqrt(sum_{p<=t} (1/p - 1/p^2))"""
    if t < 2:
        raise DomainError(f"rho_tilde needs t >= 2, got {t!r}")
    mean = mertens.recip_at(t)
    var = mertens.var_at(t)
    return abs(omega - mean) / math.sqrt(var)


def mertens_check(table: SieveTable, lo: int = 100) -> dict:
    """max |sum_{p<=t}(1/p - 1/p^2) - loglog t| over primes t >= lo, and the gap at the last prime"""
    mertens = table_mertens(table)
    mask = mertens.primes >= lo
    if not np.any(mask):
        raise RangeError(f"no primes in [{lo}, {table.x}]")
    primes = mertens.primes[mask]
    gap = mertens.var_sum[mask] - np.log(np.log(primes))
    worst = int(np.argmax(np.abs(gap)))
    return {
        "x": table.x,
        "lo": lo,
        "primes_checked": int(primes.size),
        "max_abs_gap": float(np.abs(gap[worst])),
        "argmax_prime": int(primes[worst]),
        "final_prime": int(primes[-1]),
        "final_gap": float(gap[-1]),
    }


# ----------------------------
# Level grids
# ----------------------------

def _doubling(lo: float, hi: float) -> List[float]:
    """lo, 2lo, 4lo, ... below hi, plus hi"""
    levels = []
    level = lo
    while level < hi:
        levels.append(level)
        level *= 2.0
    levels.append(hi)
    return levels


def levels_part_i(g: float) -> List[float]:
    """Doubling grid on [g, g^2]"""
    if not g > 1:
        raise DomainError(f"g must be > 1, got {g!r}")
    return _doubling(float(g), float(g) * float(g))


def _largest_within_budget(f: WindowFamily, g: float, budget: float) -> Optional[float]:
    """Largest N >= g with N f_N <= budget (N f_N is increasing)"""
    if g * f.width(g) > budget:
        return None
    lo, hi = g, 2.0 * g
    while hi * f.width(hi) <= budget:
        lo, hi = hi, 2.0 * hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid * f.width(mid) <= budget:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-13 * hi:
            break
    return lo


def levels_part_ii(g: float, f: WindowFamily, budget: float) -> List[float]:
    """
    Admissible levels N >= g with N f_N <= budget and f_N <= N: the doubling
    grid from g plus the largest N inside the budget.
    """
    if not g > 1:
        raise DomainError(f"g must be > 1, got {g!r}")
    top = _largest_within_budget(f, g, budget)
    if top is None:
        return []
    return [N for N in _doubling(float(g), top) if f.width(N) <= N]


def _window_tops(levels: Sequence[float], f: WindowFamily) -> List[float]:
    return [N * f.width(N) for N in levels]


# ----------------------------
# Min-max statistic
# ----------------------------

@dataclass
class MinMaxResult:
    value: Optional[float]
    level: Optional[float]
    levels: int
    empty_levels: int
    mode: str

    @property
    def empty(self) -> bool:
        return self.value is None

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "level": self.level,
            "levels": self.levels,
            "empty_levels": self.empty_levels,
            "mode": self.mode,
        }


def minmax_statistic(
    profile: OmegaThresholdProfile,
    g: float,
    f: WindowFamily,
    mode: str = PART_I,
    budget: Optional[float] = None,
    horizon_t: Optional[float] = None,
) -> MinMaxResult:
    """
    min over levels N of max over prime thresholds in the window of rho(m, t).

    part_i: N on the doubling grid of [g, g^2], windows N < loglog t <= N f_N.
    part_ii: N >= g with N f_N <= budget, windows N <= loglog t <= N f_N;
    budget defaults to loglog m capped at the top threshold.

    Thresholds are assumed to include every prime up to horizon_t (default
    the last threshold), so windows are exact up to loglog horizon_t.
    """
    if mode not in MODES:
        raise DomainError(f"unknown mode '{mode}'")
    ts = profile.thresholds
    if ts.size == 0:
        raise RangeError("profile has no thresholds")
    horizon_t = float(horizon_t if horizon_t is not None else ts[-1])
    cover = loglog(horizon_t)
    keep = ts >= 3
    L = np.log(np.log(ts[keep].astype(np.float64)))
    counts = profile.counts[keep].astype(np.float64)

    if mode == PART_I:
        levels = levels_part_i(g)
        tops = _window_tops(levels, f)
        if tops[-1] > cover:
            raise HorizonExceededError(tops[-1], cover, what="window top loglog t")
    else:
        if budget is None:
            budget = min(loglog(profile.m), cover) if profile.m > math.e else 0.0
        if budget > cover:
            raise HorizonExceededError(budget, cover, what="budget loglog t")
        levels = levels_part_ii(g, f, budget)
        tops = _window_tops(levels, f)

    best_value, best_level, empty = None, None, 0
    for N, top in zip(levels, tops):
        lower = L > N if mode == PART_I else L >= N
        mask = lower & (L <= top)
        if not np.any(mask):
            empty += 1
            continue
        value = float(np.max(np.abs(counts[mask] - L[mask]) / np.sqrt(L[mask])))
        if best_value is None or value < best_value:
            best_value, best_level = value, N
    return MinMaxResult(best_value, best_level, len(levels), empty, mode)


class PrimeLadder:
    """
    loglog p at every prime of a table, for window lookups by binary search.

    On a stretch of thresholds where omega(m, t) is constant, |c - L|/sqrt(L)
    is quasi-convex in L, so a window maximum is attained at the window ends
    or next to a prime factor of m. statistic() only evaluates those points.
    """

    def __init__(self, table: SieveTable):
        self.table = table
        self.primes = table.primes
        with np.errstate(invalid="ignore"):
            L = np.log(np.log(self.primes.astype(np.float64)))
        self.L = L
        self.sqrt_L = np.sqrt(np.where(L > 0, L, np.nan))

    def windows(self, levels: Sequence[float], f: WindowFamily, closed: bool) -> List[Tuple[int, int]]:
        """(first, last) prime positions of each level window (last < first when empty)"""
        side = "left" if closed else "right"
        out = []
        for N, top in zip(levels, _window_tops(levels, f)):
            lo = int(np.searchsorted(self.L, N, side=side))
            hi = int(np.searchsorted(self.L, top, side="right")) - 1
            out.append((lo, hi))
        return out

    def factor_positions(self, m: int) -> List[int]:
        factors = self.table.prime_factors(m)
        return [int(i) for i in np.searchsorted(self.primes, factors)]

    def statistic(self, positions: List[int], windows: List[Tuple[int, int]]) -> Optional[float]:
        best = None
        L, sqrt_L = self.L, self.sqrt_L
        for lo, hi in windows:
            if hi < lo:
                continue
            candidates = {lo, hi}
            for q in positions:
                if lo <= q <= hi:
                    candidates.add(q)
                if lo <= q - 1 <= hi:
                    candidates.add(q - 1)
            value = max(abs(float(bisect_right(positions, i)) - L[i]) / sqrt_L[i] for i in candidates)
            if best is None or value < best:
                best = float(value)
        return best


# ----------------------------
# Density scans
# ----------------------------

@dataclass(frozen=True)
class GRule:
    """Monotone g(m): constant c or c (loglog m)^a"""
    kind: str = "constant"
    c: float = 1.2
    a: float = 0.0

    def __post_init__(self):
        if self.kind not in ("constant", "loglog_power"):
            raise DomainError(f"unknown g rule '{self.kind}'")
        if not self.c > 0 or self.a < 0:
            raise DomainError("g rule needs c > 0 and a >= 0")

    def value(self, m: float) -> float:
        if self.kind == "constant":
            return self.c
        return self.c * loglog(max(m, 3.0)) ** self.a

    def value_at_loglog(self, y: float) -> float:
        return self.c if self.kind == "constant" else self.c * y ** self.a

    def describe(self) -> dict:
        return {"kind": self.kind, "c": self.c, "a": self.a}


@dataclass
class DensityReport:
    x: int
    mode: str
    g_rule: dict
    family: dict
    K: Optional[float]
    level: Optional[float]
    scanned: int
    satisfied_count: int
    empty_count: int
    m_min: int
    below_g_count: int = 0
    scan_start: Optional[int] = None
    error_budget: dict = field(default_factory=dict)

    @property
    def fraction(self) -> float:
        return self.satisfied_count / self.scanned if self.scanned else float("nan")

    def to_dict(self) -> dict:
        return {
            "x": self.x,
            "mode": self.mode,
            "g_rule": self.g_rule,
            "family": self.family,
            "K": self.K,
            "level": self.level,
            "m_min": self.m_min,
            "below_g_count": self.below_g_count,
            "scan_start": self.scan_start,
            "scanned": self.scanned,
            "satisfied_count": self.satisfied_count,
            "empty_count": self.empty_count,
            "fraction": self.fraction,
            "error_budget": self.error_budget,
        }


def error_budget(x: float, u: float, c: float) -> dict:
    """x^-c + e^(-u log u)"""
    if not 0 < c < 1:
        raise DomainError(f"c must lie in (0, 1), got {c!r}")
    tail = math.exp(-u * math.log(u)) if u > 0 else 1.0
    return {"c": c, "u": u, "x_term": x ** -c, "u_term": tail, "total": x ** -c + tail}


def _feasible(mode: str, rule: GRule, f: WindowFamily, y: float) -> bool:
    """Is the scan feasible at loglog x = y?"""
    g = rule.value_at_loglog(y)
    if g <= 1:
        return False
    if mode == PART_I:
        G = g * g
        return G * f.width(G) <= y
    if g > y ** 0.1:
        return False
    budget = y - 0.5 * math.log(y) if y > 1 else 0.0
    return bool(levels_part_ii(g, f, budget))


def smallest_feasible_loglog(mode: str, rule: GRule, f: WindowFamily, y_max: float = 1e6) -> Optional[float]:
    """Smallest loglog x (to bisection precision) at which the scan becomes feasible"""
    lo, hi = 1.0, 2.0
    while not _feasible(mode, rule, f, hi):
        lo, hi = hi, 2.0 * hi
        if hi > y_max:
            return None
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if _feasible(mode, rule, f, mid):
            hi = mid
        else:
            lo = mid
    return hi


def density_scan(
    table: SieveTable,
    g_rule: GRule,
    f: WindowFamily,
    K: Optional[float] = None,
    mode: str = PART_I,
    level: Optional[float] = None,
    x: Optional[int] = None,
    m_min: Optional[int] = None,
    c: float = 0.5,
    workers: Optional[int] = None,
) -> DensityReport:
    """
    Fraction of m in [m_min, x] with statistic <= K (part_i) or >= level (part_ii).

    g is evaluated at the lower end of each dyadic block of m. Blocks where
    g <= 1 have no level grid; their m are counted in below_g_count and left
    out of the fraction. part_ii uses the
    budget loglog x - 1/2 logloglog x for every m and scans m >= sqrt(x) by
    default. Infeasible parameters raise ConfigError naming the smallest
    feasible horizon.
    """
    if mode not in MODES:
        raise DomainError(f"unknown mode '{mode}'")
    x = int(x or table.x)
    if x > table.x:
        raise RangeError(f"scan horizon {x} exceeds sieve horizon {table.x}")
    if x < 16:
        raise DomainError(f"density scans need x >= 16, got {x}")
    if mode == PART_I and K is None:
        raise DomainError("part_i scans need K")
    if mode == PART_II and level is None:
        raise DomainError("part_ii scans need a growth level")

    y = math.log(math.log(x))
    if not _feasible(mode, g_rule, f, y):
        y_min = smallest_feasible_loglog(mode, g_rule, f)
        detail = {"x": x, "loglog_x": y, "smallest_feasible_loglog_x": y_min}
        if y_min is not None:
            detail["smallest_feasible_log10_x"] = math.exp(y_min) / math.log(10.0)
            where = f"smallest feasible x = 10^{detail['smallest_feasible_log10_x']:.3f}"
        else:
            where = "no feasible x found"
        raise ConfigError(f"g rule infeasible at x={x} (loglog x = {y:.4f}); {where}", detail)

    ladder = PrimeLadder(table)
    if m_min is None:
        m_min = math.isqrt(x) if mode == PART_II else 3
    m_min = max(int(m_min), 3)
    budget = script_l(x) if mode == PART_II else None

    # dyadic blocks, split further into segment-sized pieces sharing one g
    pieces = []
    below_g = 0
    k = m_min.bit_length() - 1
    while (1 << k) <= x:
        lo, hi = max(1 << k, m_min), min((1 << (k + 1)) - 1, x)
        if lo <= hi:
            g = g_rule.value(lo)
            if not g > 1:
                below_g += hi - lo + 1
                k += 1
                continue
            for start in range(lo, hi + 1, table.segment_size):
                pieces.append((start, min(start + table.segment_size - 1, hi), g))
        k += 1

    def scan(piece) -> Tuple[int, int, int, float]:
        lo, hi, g = piece
        if mode == PART_I:
            windows = ladder.windows(levels_part_i(g), f, closed=False)
        else:
            windows = ladder.windows(levels_part_ii(g, f, budget), f, closed=True)
        satisfied = empty = 0
        top_L = max((ladder.L[b] for a, b in windows if b >= a), default=0.0)
        for m in range(lo, hi + 1):
            value = ladder.statistic(ladder.factor_positions(m), windows)
            if value is None:
                empty += 1
            elif (value <= K) if mode == PART_I else (value >= level):
                satisfied += 1
        return hi - lo + 1, satisfied, empty, float(top_L)

    results = map_items(scan, pieces, workers)
    scanned = sum(r[0] for r in results)
    satisfied = sum(r[1] for r in results)
    empty = sum(r[2] for r in results)
    if mode == PART_I:
        top_L = max((r[3] for r in results), default=0.0)
        u = math.log(x) / math.exp(top_L) if top_L > 0 else math.log(x)
    else:
        u = math.sqrt(y)
    report = DensityReport(
        x=x,
        mode=mode,
        g_rule=g_rule.describe(),
        family=f.describe(),
        K=K,
        level=level,
        scanned=scanned,
        satisfied_count=satisfied,
        empty_count=empty,
        m_min=m_min,
        below_g_count=below_g,
        scan_start=pieces[0][0] if pieces else None,
        error_budget=error_budget(x, max(u, 1.0), c),
    )
    logger.info(f"DENSITY | {mode} | x={x} | fraction={report.fraction:.6f} | empty={empty}")
    return report


# ----------------------------
# Kubilius model comparison
# ----------------------------

def poisson_binomial_pmf(probabilities: Iterable[float]) -> np.ndarray:
    """
    Exact law of a sum of independent Bernoulli(p_i).

    Coefficients of prod (1 - p + p z), built one factor at a time.
    """
    pmf = np.array([1.0])
    for p in probabilities:
        nxt = np.zeros(pmf.size + 1)
        nxt[:-1] = pmf * (1.0 - p)
        nxt[1:] += pmf * p
        pmf = nxt
    return pmf


def tv_distance(p: np.ndarray, q: np.ndarray) -> float:
    """Half the L1 distance between two histograms (zero-padded to equal length)"""
    n = max(p.size, q.size)
    a = np.zeros(n)
    b = np.zeros(n)
    a[:p.size] = p
    b[:q.size] = q
    return 0.5 * float(np.abs(a - b).sum())


@dataclass(frozen=True)
class StatisticRule:
    """Integer statistic of omega(m, r): the count itself or the indicator count >= k"""
    kind: str = "omega"
    k: int = 1

    def __post_init__(self):
        if self.kind not in ("omega", "omega_above"):
            raise DomainError(f"unknown statistic rule '{self.kind}'")

    def apply(self, counts: np.ndarray) -> np.ndarray:
        if self.kind == "omega":
            return counts.astype(np.int64)
        return (counts >= self.k).astype(np.int64)

    def pushforward(self, pmf: np.ndarray) -> np.ndarray:
        """Law of the statistic given the law of the count"""
        if self.kind == "omega":
            return pmf
        return np.array([pmf[: self.k].sum(), pmf[self.k:].sum()])

    def describe(self) -> dict:
        return {"kind": self.kind, "k": self.k} if self.kind == "omega_above" else {"kind": self.kind}


def model_histogram_mc(
    primes: np.ndarray,
    rule: StatisticRule,
    trials: int,
    seed: int,
    workers: Optional[int] = None,
) -> np.ndarray:
    """Monte Carlo law of rule(T_r) with T_r = sum_{p<=r} Y_p"""
    probs = 1.0 / primes.astype(np.float64)

    def draw(r: range) -> np.ndarray:
        rng = path_rng(seed, r.start // MODEL_CHUNK, STREAM_MODEL)
        totals = np.zeros(len(r), dtype=np.int64)
        for p in probs:
            totals += rng.random(len(r)) < p
        return np.bincount(rule.apply(totals), minlength=probs.size + 1 if rule.kind == "omega" else 2)

    parts = map_chunks(draw, trials, workers, chunk=MODEL_CHUNK)
    hist = np.zeros(max(part.size for part in parts), dtype=np.int64)
    for part in parts:
        hist[:part.size] += part
    return hist / trials


def kubilius_compare(
    table: SieveTable,
    x: int,
    r: int,
    rule: Optional[StatisticRule] = None,
    trials: int = 0,
    seed: int = 0,
    c: float = 0.5,
    workers: Optional[int] = None,
) -> dict:
    """
    TV distance between the sieve law of rule(omega(m, r)) over m <= x and the
    prime-model law of rule(T_r).

    The model side is the exact Poisson-binomial convolution while pi(r) is
    within LAB_EXACT_CONVOLUTION_LIMIT, and Monte Carlo when trials > 0.
    """
    rule = rule or StatisticRule()
    if not 2 <= x <= table.x:
        raise RangeError(f"x={x} outside 2..{table.x}")
    if not 2 <= r <= x:
        raise RangeError(f"r={r} outside 2..{x}")
    u = math.log(x) / math.log(r)
    if u < 2:
        raise DomainError(f"r = x^(1/u) needs u >= 2, got u={u:.4f}")

    primes = table.primes[table.primes <= r]
    counts = omega_all(table, t=r, workers=workers)[1:x + 1]
    sieve = np.bincount(rule.apply(counts)) / x

    report = {
        "x": x,
        "r": r,
        "u": u,
        "primes": int(primes.size),
        "rule": rule.describe(),
        "sieve_histogram": sieve.tolist(),
        "error_budget": error_budget(x, u, c),
    }
    exact = None
    if primes.size <= get_settings().exact_convolution_limit:
        exact = rule.pushforward(poisson_binomial_pmf(1.0 / primes.astype(np.float64)))
        report["model_histogram"] = exact.tolist()
        report["tv_exact"] = tv_distance(sieve, exact)
    if trials > 0:
        mc = model_histogram_mc(primes, rule, trials, seed, workers)
        report["model_histogram_mc"] = mc.tolist()
        report["tv_monte_carlo"] = tv_distance(sieve, mc)
        reference = exact if exact is not None else mc
        report["mc_stderr"] = 0.5 * float(np.sum(np.sqrt(reference * (1.0 - reference) / trials)))
        report["trials"] = trials
    if exact is None and trials <= 0:
        raise ConfigError(
            f"pi(r) = {primes.size} exceeds the exact convolution limit; set trials > 0",
            {"r": r, "primes": int(primes.size)},
        )
    report["tv"] = report.get("tv_exact", report.get("tv_monte_carlo"))
    return report


# ----------------------------
# Sieve-wide properties
# ----------------------------

def late_growth_check(table: SieveTable, workers: Optional[int] = None) -> dict:
    """
    omega(m, x) - omega(m, x^(1/sqrt(loglog x))) <= sqrt(loglog x) for every m <= x.

    The bound is forced: m <= x has fewer than sqrt(loglog x) prime factors
    above y = x^(1/sqrt(loglog x)). A violation raises InvariantViolation.
    """
    x = table.x
    root = math.sqrt(loglog(x))
    y = int(math.floor(x ** (1.0 / root)))
    diff = omega_all(table, workers=workers) - omega_all(table, t=y, workers=workers)
    worst = int(np.argmax(diff))
    report = {
        "x": x,
        "y": y,
        "bound": root,
        "max_difference": int(diff[worst]),
        "argmax_m": worst,
        "violations": int(np.count_nonzero(diff > root)),
    }
    if report["violations"]:
        raise InvariantViolation(f"late growth exceeded sqrt(loglog x) for {report['violations']} m", report)
    return report


def erdos_kac_moments(table: SieveTable, workers: Optional[int] = None) -> dict:
    """Mean and variance of (omega(m, x) - loglog x)/sqrt(loglog x) over 2 <= m <= x"""
    L = loglog(table.x)
    z = (omega_all(table, workers=workers)[2:].astype(np.float64) - L) / math.sqrt(L)
    moments = RunningMoments.of(z)
    return {"x": table.x, "loglog_x": L, "count": moments.count, "mean": moments.mean, "variance": moments.variance}


def rho_gap_constant(table: SieveTable, ms: Iterable[int], thresholds: Sequence[int]) -> dict:
    """max over (m, t) of |rho_tilde - rho| * sqrt(loglog t)"""
    ts = np.asarray(thresholds, dtype=np.int64)
    if ts.size == 0 or ts[0] <= math.e:
        raise DomainError("thresholds must be > e")
    mertens = table_mertens(table)
    L = np.log(np.log(ts.astype(np.float64)))
    mean = mertens.recip_at(ts)
    sd = np.sqrt(mertens.var_at(ts))
    best = {"constant": 0.0, "m": None, "t": None, "pairs": 0}
    for m in ms:
        counts = omega_profile(table, int(m), ts).counts.astype(np.float64)
        gap = np.abs(np.abs(counts - mean) / sd - np.abs(counts - L) / np.sqrt(L)) * np.sqrt(L)
        k = int(np.argmax(gap))
        best["pairs"] += int(ts.size)
        if gap[k] > best["constant"]:
            best.update(constant=float(gap[k]), m=int(m), t=int(ts[k]))
    return best
