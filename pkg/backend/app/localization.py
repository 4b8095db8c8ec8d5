"""
Localized maxima
max_{N < s_n^2 <= N f_N} |S_n|/s_n for single paths, the finite min-max
surrogate over a level grid, and the Monte Carlo event checks built on the
block schedules (Kolmogorov maximal inequality, A_j/B_j/C_j, condition (c),
star-block maxima).

Empty windows are flagged and skipped by every min-aggregation.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from app.errors import DegenerateProfileError, DomainError, HorizonExceededError, InvariantViolation
from app.generators import GeneratorSpec, PartialSumPath, sample_path, sample_support, variance_profile_of
from app.schedules import BlockSchedule, StarSchedule, block_schedule, star_schedule
from app.utils.parallel import map_chunks
from app.utils.stats import FrequencyCounter, binomial_stderr
from app.variance_ladder import IndexWindow, VarianceProfile, index_of_variance, ratio_bound, window
from app.windows import WindowFamily

__all__ = [
    "WindowFamily", "BlockSchedule", "StarSchedule", "block_schedule", "star_schedule",
    "LocalizedMaxRecord", "localized_max", "surrogate_levels", "i_surrogate", "paper_bound",
    "kolmogorov_check", "event_frequencies", "condition_c_estimate", "star_block_maxima",
    "star_tail_frequency", "ensemble_i_surrogate",
]

logger = logging.getLogger(__name__)

DEFAULT_EXPONENT = 5.0 / 3.0


@dataclass(frozen=True)
class LocalizedMaxRecord:
    N: float
    f_N: float
    window: IndexWindow
    max_value: Optional[float]
    argmax_n: Optional[int]

    @property
    def empty(self) -> bool:
        return self.window.is_empty

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "f_N": self.f_N,
            "lo": self.window.lo,
            "hi": self.window.hi,
            "empty": self.empty,
            "max_value": self.max_value,
            "argmax_n": self.argmax_n,
        }


def _window_max(path: PartialSumPath, lo: int, hi: int):
    """(max, argmax) of |S_n|/s_n over lo < n <= hi; ties go to the smallest n"""
    s_sq = path.profile.prefix[lo + 1:hi + 1]
    if np.any(s_sq <= 0):
        raise DegenerateProfileError(f"window ({lo}, {hi}] contains indices with s_n = 0")
    values = np.abs(path.sums[lo + 1:hi + 1]) / np.sqrt(s_sq)
    k = int(np.argmax(values))
    return float(values[k]), lo + 1 + k


def localized_max(path: PartialSumPath, N: float, f: WindowFamily) -> LocalizedMaxRecord:
    """Exact max of |S_n|/s_n over h(N) < n <= h(N f_N)"""
    w = window(path.profile, N, f)
    if w.is_empty:
        return LocalizedMaxRecord(N=w.N, f_N=w.width, window=w, max_value=None, argmax_n=None)
    value, arg = _window_max(path, w.lo, w.hi)
    return LocalizedMaxRecord(N=w.N, f_N=w.width, window=w, max_value=value, argmax_n=arg)


def paper_bound(M: float, D: float) -> float:
    """15 sqrt(M+1) D^2"""
    if not M > 0:
        raise DomainError(f"M must be > 0, got {M!r}")
    if not D >= 1:
        raise DomainError(f"D must be >= 1, got {D!r}")
    return 15.0 * math.sqrt(M + 1.0) * D * D


# ----------------------------
# Min-max surrogate
# ----------------------------

def surrogate_levels(G: float, exponent: float = DEFAULT_EXPONENT, dense: bool = False) -> List[float]:
    """
    Levels G, 2G, 4G, ... below G^exponent, plus G^exponent itself.

    dense=True uses every integer level in [G, G^exponent] plus both endpoints.
    Grids for exponents e1 < e2 are nested when G^e1 lies on the doubling grid.
    """
    if not G >= 2:
        raise DomainError(f"G must be >= 2, got {G!r}")
    if not exponent >= 1:
        raise DomainError(f"exponent must be >= 1, got {exponent!r}")
    top = G ** exponent
    if dense:
        levels = {float(G), float(top)}
        levels.update(float(n) for n in range(math.ceil(G), math.floor(top) + 1))
        return sorted(levels)
    levels = []
    level = float(G)
    while level < top:
        levels.append(level)
        level *= 2.0
    levels.append(float(top))
    return levels


@dataclass
class SurrogateResult:
    value: Optional[float]
    level: Optional[float]
    levels: int
    empty_levels: int
    grid: str
    max_level_ratio: float
    records: List[LocalizedMaxRecord] = field(default_factory=list)

    @property
    def empty(self) -> bool:
        return self.value is None

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "level": self.level,
            "levels": self.levels,
            "empty_levels": self.empty_levels,
            "grid": self.grid,
            "max_level_ratio": self.max_level_ratio,
        }


def i_surrogate(
    path: PartialSumPath,
    f: WindowFamily,
    G: float,
    exponent: float = DEFAULT_EXPONENT,
    dense: bool = False,
    keep_records: bool = False,
) -> SurrogateResult:
    """
    min over grid levels N in [G, G^exponent] of localized_max(path, N, f).

    The whole grid is checked against the horizon before any window is read.
    """
    levels = surrogate_levels(G, exponent, dense)
    top = levels[-1]
    if top * f.width(top) > path.profile.max_level:
        raise HorizonExceededError(top * f.width(top), path.profile.max_level, what="window top N*f_N")

    best: Optional[LocalizedMaxRecord] = None
    empty = 0
    records = []
    for level in levels:
        record = localized_max(path, level, f)
        if keep_records:
            records.append(record)
        if record.empty:
            empty += 1
            continue
        if best is None or record.max_value < best.max_value:
            best = record
    ratios = [b / a for a, b in zip(levels, levels[1:])]
    return SurrogateResult(
        value=best.max_value if best else None,
        level=best.N if best else None,
        levels=len(levels),
        empty_levels=empty,
        grid="dense" if dense else "geometric",
        max_level_ratio=max(ratios) if ratios else 1.0,
        records=records,
    )


def _ensemble(trials: int, fn: Callable[[int], object], workers: Optional[int]) -> list:
    chunks = map_chunks(lambda r: [fn(i) for i in r], trials, workers)
    return [item for chunk in chunks for item in chunk]


def ensemble_i_surrogate(
    spec: GeneratorSpec,
    f: WindowFamily,
    G: float,
    n_max: int,
    trials: int,
    seed: int,
    exponent: float = DEFAULT_EXPONENT,
    workers: Optional[int] = None,
) -> List[SurrogateResult]:
    """i_surrogate on paths 0..trials-1 of one seed"""
    profile = variance_profile_of(spec, n_max)
    top = G ** exponent
    if top * f.width(top) > profile.max_level:
        raise HorizonExceededError(top * f.width(top), profile.max_level, what="window top N*f_N")

    def one(i: int) -> SurrogateResult:
        path = sample_path(spec, n_max, seed, i, profile=profile)
        return i_surrogate(path, f, G, exponent)

    return _ensemble(trials, one, workers)


# ----------------------------
# Kolmogorov maximal inequality
# ----------------------------

@dataclass
class KolmogorovResult:
    lam: float
    k: int
    trials: int
    hits: int
    empirical: float
    bound: float
    stderr: float

    @property
    def passes(self) -> bool:
        return self.empirical <= self.bound + 3.0 * self.stderr

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "k": self.k,
            "trials": self.trials,
            "empirical": self.empirical,
            "bound": self.bound,
            "stderr": self.stderr,
        }


def kolmogorov_check(
    spec: GeneratorSpec,
    k: int,
    lam: float,
    trials: int,
    seed: int,
    workers: Optional[int] = None,
) -> KolmogorovResult:
    """Frequency of max_{j<=k} |S_j| >= lam s_k over seeded paths, against 1/lam^2"""
    if not lam > 0:
        raise DomainError(f"lambda must be > 0, got {lam!r}")
    if k < 1 or trials < 1:
        raise DomainError(f"k and trials must be >= 1, got k={k}, trials={trials}")
    profile = variance_profile_of(spec, k)
    s_k = math.sqrt(profile.max_level)
    if s_k <= 0:
        raise DegenerateProfileError(f"s_{k} = 0")
    threshold = lam * s_k

    def count(r: range) -> FrequencyCounter:
        hits = 0
        for i in r:
            _, values = sample_support(spec, k, seed, i)
            if values.size and np.max(np.abs(np.cumsum(values))) >= threshold:
                hits += 1
        return FrequencyCounter(hits, len(r))

    total = FrequencyCounter()
    for part in map_chunks(count, trials, workers):
        total = total.merge(part)
    return KolmogorovResult(
        lam=float(lam),
        k=int(k),
        trials=total.trials,
        hits=total.hits,
        empirical=total.frequency,
        bound=1.0 / (lam * lam),
        stderr=total.stderr,
    )


# ----------------------------
# Events A_j, B_j, C_j
# ----------------------------

@dataclass
class EventCounts:
    trials: int = 0
    a: int = 0
    b: int = 0
    c: int = 0
    bc: int = 0
    abc: int = 0
    implication_violations: int = 0
    paper_bound_exceedances: int = 0
    max_ratio_given_abc: float = 0.0

    def merge(self, other: "EventCounts") -> "EventCounts":
        return EventCounts(
            trials=self.trials + other.trials,
            a=self.a + other.a,
            b=self.b + other.b,
            c=self.c + other.c,
            bc=self.bc + other.bc,
            abc=self.abc + other.abc,
            implication_violations=self.implication_violations + other.implication_violations,
            paper_bound_exceedances=self.paper_bound_exceedances + other.paper_bound_exceedances,
            max_ratio_given_abc=max(self.max_ratio_given_abc, other.max_ratio_given_abc),
        )


def _covariance(counts: EventCounts):
    """Sample covariance of 1_B and 1_C and its standard error"""
    n = counts.trials
    if n < 2:
        return float("nan"), float("nan")
    pb = counts.b / n
    pc = counts.c / n
    cells = {
        (1, 1): counts.bc,
        (1, 0): counts.b - counts.bc,
        (0, 1): counts.c - counts.bc,
        (0, 0): n - counts.b - counts.c + counts.bc,
    }
    z = {key: (key[0] - pb) * (key[1] - pc) for key in cells}
    mean = sum(cells[key] * z[key] for key in cells) / n
    var = sum(cells[key] * (z[key] - mean) ** 2 for key in cells) / (n - 1)
    return mean, math.sqrt(var / n)


def event_level_required(schedule: BlockSchedule, j: int) -> float:
    """Largest variance level read by event_frequencies for block j"""
    return schedule.block(j + 1).level(schedule.block(j).t)


def implication_bound(k: float) -> float:
    """Deterministic bound on |S_n|/s_n over (U_{j+1}, U_{j+1,t(j)}] when A_j, B_j, C_j hold"""
    return 3.0 + (3.0 + math.sqrt(2.0)) * k


def event_frequencies(
    spec: GeneratorSpec,
    schedule: BlockSchedule,
    j: int,
    trials: int,
    seed: int,
    n_max: int,
    D: Optional[float] = None,
    workers: Optional[int] = None,
) -> dict:
    """
    Monte Carlo frequencies of A_j, B_j, C_j and A_j B_j C_j.

    A_j: |S_{V_j}| <= s_{U_{j+1}}
    B_j: for 0 <= t < t(j), max_{U_{j+1,t} <= n <= U_{j+1,t+1}} |S_{U_{j+1,t+1}} - S_n| <= k s_{U_{j+1,t}}
    C_j: |S_{U_{j+1}} - S_{V_j}| <= 2 s_{U_{j+1}}
    with k = 3 D sqrt(M+1). On A_j B_j C_j every n in (U_{j+1}, U_{j+1,t(j)}]
    has |S_n|/s_n <= implication_bound(k); a violation raises InvariantViolation.
    """
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials}")
    profile = variance_profile_of(spec, n_max)
    if D is None:
        D = ratio_bound(profile).value
    M = schedule.M
    k = 3.0 * D * math.sqrt(M + 1.0)
    block, nxt = schedule.block(j), schedule.block(j + 1)
    top = event_level_required(schedule, j)
    if top > profile.max_level:
        raise HorizonExceededError(top, profile.max_level, what=f"block {j + 1} level")

    V = index_of_variance(profile, block.level(block.t))
    U = [index_of_variance(profile, nxt.level(t)) for t in range(block.t + 1)]
    s = profile.s_array()
    s_U = s[U[0]]
    if s_U <= 0:
        raise DegenerateProfileError(f"s at U_{j + 1} is zero; raise the schedule base")
    bound_det = implication_bound(k)
    bound_paper = paper_bound(M, max(D, 1.0))
    last = U[-1]

    def count(r: range) -> EventCounts:
        out = EventCounts()
        for i in r:
            path = sample_path(spec, n_max, seed, i, profile=profile)
            S = path.sums
            a = bool(abs(S[V]) <= s_U)
            c = bool(abs(S[U[0]] - S[V]) <= 2.0 * s_U)
            b = True
            for t in range(block.t):
                lo, hi = U[t], U[t + 1]
                if hi > lo and np.max(np.abs(S[hi] - S[lo:hi + 1])) > k * s[lo]:
                    b = False
                    break
            out.trials += 1
            out.a += a
            out.b += b
            out.c += c
            out.bc += b and c
            if a and b and c:
                out.abc += 1
                if last > U[0]:
                    ratio = float(np.max(np.abs(S[U[0] + 1:last + 1]) / s[U[0] + 1:last + 1]))
                    out.max_ratio_given_abc = max(out.max_ratio_given_abc, ratio)
                    out.implication_violations += ratio > bound_det
                    out.paper_bound_exceedances += ratio > bound_paper
        return out

    counts = EventCounts()
    for part in map_chunks(count, trials, workers):
        counts = counts.merge(part)

    if counts.implication_violations:
        raise InvariantViolation(
            f"A_j B_j C_j held but |S_n|/s_n exceeded {bound_det!r} on {counts.implication_violations} paths",
            {"j": j, "violations": counts.implication_violations},
        )

    n = counts.trials
    cov, cov_se = _covariance(counts)
    freq = {name: getattr(counts, name) / n for name in ("a", "b", "c", "abc")}
    report = {
        "j": j,
        "trials": n,
        "k": k,
        "D": D,
        "M": M,
        "V_j": V,
        "U_j1": U[0],
        "U_j1_tj": last,
        "freq_A": freq["a"],
        "freq_B": freq["b"],
        "freq_C": freq["c"],
        "freq_ABC": freq["abc"],
        "stderr_A": binomial_stderr(freq["a"], n),
        "stderr_B": binomial_stderr(freq["b"], n),
        "stderr_C": binomial_stderr(freq["c"], n),
        "stderr_ABC": binomial_stderr(freq["abc"], n),
        "bound_not_A_block": D * D * math.exp(block.log_top - nxt.log_N),
        "bound_not_A": D * D / (j * j),
        "bound_B_block": (1.0 - 2.0 * D * D / (k * k)) ** block.t,
        "bound_B": j ** -0.5,
        "bound_C": 0.75,
        "cov_BC": cov,
        "cov_BC_stderr": cov_se,
        "implication_bound": bound_det,
        "paper_bound": bound_paper,
        "implication_violations": counts.implication_violations,
        "paper_bound_exceedances": counts.paper_bound_exceedances,
        "max_ratio_given_ABC": counts.max_ratio_given_abc,
    }
    logger.info(
        f"EVENTS | j={j} | A={freq['a']:.4f} B={freq['b']:.4f} C={freq['c']:.4f} ABC={freq['abc']:.4f}"
    )
    return report


# ----------------------------
# Condition (c) and star blocks
# ----------------------------

def condition_c_estimate(
    spec: GeneratorSpec,
    n: int,
    m: int,
    lam: float,
    trials: int,
    seed: int,
    workers: Optional[int] = None,
) -> dict:
    """Frequency of |S_m - S_n| >= lam s_m; requires s_m^2 > 2 s_n^2"""
    if not lam > 0:
        raise DomainError(f"lambda must be > 0, got {lam!r}")
    if not 1 <= n < m:
        raise DomainError(f"need 1 <= n < m, got n={n}, m={m}")
    profile = variance_profile_of(spec, m)
    s_n_sq, s_m_sq = float(profile.prefix[n]), float(profile.prefix[m])
    if not s_m_sq > 2.0 * s_n_sq:
        raise DomainError(f"condition (c) needs s_m^2 > 2 s_n^2 (s_n^2={s_n_sq!r}, s_m^2={s_m_sq!r})")
    threshold = lam * math.sqrt(s_m_sq)

    def count(r: range) -> FrequencyCounter:
        hits = 0
        for i in r:
            idx, values = sample_support(spec, m, seed, i)
            if abs(values[idx > n].sum()) >= threshold:
                hits += 1
        return FrequencyCounter(hits, len(r))

    total = FrequencyCounter()
    for part in map_chunks(count, trials, workers):
        total = total.merge(part)
    return {
        "n": n,
        "m": m,
        "lambda": float(lam),
        "trials": total.trials,
        "c_lambda": total.frequency,
        "stderr": total.stderr,
    }


def _star_bounds(profile: VarianceProfile, star: StarSchedule) -> List[tuple]:
    """(j, U*_j, U*_{j+1}) for every star block inside the horizon"""
    out = []
    log_max = math.log(profile.max_level)
    steps = star.steps
    for a, b in zip(steps, steps[1:]):
        if b.log_N > log_max:
            break
        level_a = math.exp(a.log_N)
        if level_a < profile.prefix[1]:
            continue
        lo = index_of_variance(profile, level_a)
        if profile.prefix[lo] <= 0:
            continue
        out.append((a.j, lo, index_of_variance(profile, math.exp(b.log_N))))
    return out


def star_block_maxima(path: PartialSumPath, star: StarSchedule) -> List[dict]:
    """Y_j = max_{n in [U*_j, U*_{j+1}]} |S_n|/s_n per star block within the horizon"""
    rows = []
    for j, lo, hi in _star_bounds(path.profile, star):
        value, arg = _window_max(path, lo - 1, hi)
        rows.append({"j": j, "U_star": lo, "U_star_next": hi, "Y": value, "argmax_n": arg})
    return rows


def star_tail_frequency(
    spec: GeneratorSpec,
    star: StarSchedule,
    lam: float,
    trials: int,
    seed: int,
    n_max: int,
    workers: Optional[int] = None,
) -> List[dict]:
    """Per star block, the frequency of Y_j <= lam/2"""
    if not lam > 0:
        raise DomainError(f"lambda must be > 0, got {lam!r}")
    profile = variance_profile_of(spec, n_max)
    if len(star.steps) < 2:
        raise DomainError("star tail frequencies need at least two star levels")
    blocks = _star_bounds(profile, star)
    if not blocks:
        second = star.steps[1].log_N
        raise HorizonExceededError(math.exp(min(second, 700.0)), profile.max_level, what="second star level")

    def count(r: range) -> List[int]:
        hits = [0] * len(blocks)
        for i in r:
            path = sample_path(spec, n_max, seed, i, profile=profile)
            for pos, (_, lo, hi) in enumerate(blocks):
                value, _ = _window_max(path, lo - 1, hi)
                hits[pos] += value <= lam / 2.0
        return hits

    totals = [0] * len(blocks)
    for part in map_chunks(count, trials, workers):
        totals = [x + y for x, y in zip(totals, part)]
    return [
        {
            "j": j,
            "u": star.steps[j - 1].u,
            "frequency": hit / trials,
            "stderr": binomial_stderr(hit / trials, trials),
        }
        for (j, _, _), hit in zip(blocks, totals)
    ]
