"""
Sample-path generators
Seeded partial-sum paths S_n for the families the lab studies:

- rademacher: X_j = +-sigma_j with equal probability
- gaussian: X_j ~ Normal(0, sigma_j^2)
- prime_bernoulli: X_p = Y_p - 1/p with P(Y_p = 1) = 1/p at primes, X_j = 0 elsewhere
- lacunary: X_j = {n_j w} - 1/2 with one uniform w per path

sigma_j = sigma * j^sigma_power for j > zero_prefix and 0 before.
Each path draws from its own Philox stream keyed by (seed, path index).
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np
from scipy import special, stats

from app.errors import CapacityError, DegenerateProfileError, RangeError, SpecError
from app.settings import get_settings
from app.sieve import primes_up_to
from app.utils.rng import STREAM_OMEGA, STREAM_PATHS, path_rng
from app.variance_ladder import VarianceProfile, compensated_cumsum

logger = logging.getLogger(__name__)

KINDS = ("rademacher", "gaussian", "prime_bernoulli", "lacunary")
INDEPENDENT_KINDS = ("rademacher", "gaussian", "prime_bernoulli")


@dataclass(frozen=True)
class GeneratorSpec:
    """Family of centered increments plus its reproducibility seed"""
    kind: str
    sigma: float = 1.0
    sigma_power: float = 0.0
    zero_prefix: int = 0
    ratio: float = 2.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SpecError(f"unknown generator kind '{self.kind}' (known: {', '.join(KINDS)})")
        if self.kind in ("rademacher", "gaussian"):
            if not (math.isfinite(self.sigma) and self.sigma > 0):
                raise SpecError(f"sigma must be a positive finite number, got {self.sigma!r}")
            if not math.isfinite(self.sigma_power):
                raise SpecError("sigma_power must be finite")
            if self.zero_prefix < 0:
                raise SpecError("zero_prefix must be >= 0")
        if self.kind == "lacunary" and not self.ratio > 1:
            raise SpecError(f"lacunary ratio must be > 1, got {self.ratio!r}")
        if self.seed < 0:
            raise SpecError("seed must be non-negative")

    @property
    def independent(self) -> bool:
        return self.kind in INDEPENDENT_KINDS

    @property
    def label(self) -> str:
        if self.kind in ("rademacher", "gaussian"):
            return f"{self.kind}(sigma={self.sigma!r},power={self.sigma_power!r},zero_prefix={self.zero_prefix})"
        if self.kind == "lacunary":
            return f"lacunary(ratio={self.ratio!r})"
        return "prime_bernoulli"

    def with_seed(self, seed: int) -> "GeneratorSpec":
        return GeneratorSpec(self.kind, self.sigma, self.sigma_power, self.zero_prefix, self.ratio, seed)


@dataclass(frozen=True, eq=False)
class PartialSumPath:
    """One realization S_0 = 0, S_1, ..., S_n (index 0 is the zero pad)"""
    sums: np.ndarray
    profile: VarianceProfile
    seed: Optional[int] = None
    path_index: int = 0
    kind: str = "custom"

    @classmethod
    def from_sums(cls, sums, profile: VarianceProfile, kind: str = "custom") -> "PartialSumPath":
        """Wrap an injected path S_1..S_n (test drifts, zero paths)"""
        arr = np.concatenate(([0.0], np.asarray(sums, dtype=np.float64).ravel()))
        if arr.size - 1 != profile.length:
            raise RangeError(f"path length {arr.size - 1} does not match profile length {profile.length}")
        return cls(sums=arr, profile=profile, kind=kind)

    @property
    def length(self) -> int:
        return int(self.sums.size - 1)

    @property
    def increments(self) -> np.ndarray:
        """X_n = S_n - S_{n-1} for n = 1..length"""
        return np.diff(self.sums)

    def normalized(self) -> np.ndarray:
        """|S_n|/s_n, NaN where s_n = 0 (index 0 included)"""
        s = self.profile.s_array()
        out = np.full(self.sums.shape, np.nan)
        positive = s > 0
        out[positive] = np.abs(self.sums[positive]) / s[positive]
        return out

    def counts(self) -> np.ndarray:
        """Prime-model raw counts T_n = S_n + sum_{p<=n} 1/p"""
        if self.kind != "prime_bernoulli":
            raise SpecError("raw counts T_n exist only for prime_bernoulli paths")
        return np.rint(self.sums + _prime_mean_prefix(self.length)).astype(np.int64)


# ----------------------------
# Per-family tables
# ----------------------------

def _sigma_sq(spec: GeneratorSpec, n_max: int) -> np.ndarray:
    j = np.arange(1, n_max + 1, dtype=np.float64)
    v = spec.sigma ** 2 * j ** (2.0 * spec.sigma_power)
    v[: min(spec.zero_prefix, n_max)] = 0.0
    return v


def _primes(n_max: int) -> np.ndarray:
    return primes_up_to(n_max)


@lru_cache(maxsize=8)
def _prime_mean_prefix(n_max: int) -> np.ndarray:
    """sum_{p <= n} 1/p for n = 0..n_max"""
    recip = np.zeros(n_max + 1)
    p = _primes(n_max)
    recip[p] = 1.0 / p
    out = compensated_cumsum(recip)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=8)
def lacunary_sequence(ratio: float, length: int) -> Tuple[int, ...]:
    """
    n_j = floor(q^j), j = 1..length, in exact integer arithmetic.

    Raises:
        SpecError: the sequence is not strictly increasing (inf n_{j+1}/n_j <= 1)
    """
    q = Fraction(str(ratio))
    num_pow, den_pow = 1, 1
    seq: List[int] = []
    for _ in range(length):
        num_pow *= q.numerator
        den_pow *= q.denominator
        seq.append(num_pow // den_pow)
    for a, b in zip(seq, seq[1:]):
        if b <= a:
            raise SpecError(
                f"lacunary ratio {ratio!r} gives n_j = {a}, n_(j+1) = {b}; need inf n_(j+1)/n_j > 1",
                {"ratio": ratio},
            )
    return tuple(seq)


def lacunary_min_ratio(ratio: float, length: int) -> float:
    seq = lacunary_sequence(ratio, length)
    if len(seq) < 2:
        return float("inf")
    return min(b / a for a, b in zip(seq, seq[1:]))


def variance_profile_of(spec: GeneratorSpec, n_max: int) -> VarianceProfile:
    """Exact per-term variances of the family over 1..n_max"""
    if n_max < 1:
        raise RangeError(f"n_max must be >= 1, got {n_max}")
    if spec.kind in ("rademacher", "gaussian"):
        v = _sigma_sq(spec, n_max)
    elif spec.kind == "prime_bernoulli":
        v = np.zeros(n_max)
        p = _primes(n_max)
        v[p - 1] = (1.0 - 1.0 / p) / p
    else:
        _check_lacunary_length(n_max)
        lacunary_sequence(spec.ratio, n_max)
        v = np.full(n_max, 1.0 / 12.0)
    return VarianceProfile.from_variances(v, label=spec.label)


def _check_lacunary_length(n_max: int) -> None:
    limit = get_settings().lacunary_max_length
    if n_max > limit:
        raise CapacityError(
            f"lacunary paths are limited to {limit} terms (LAB_LACUNARY_MAX_LENGTH), got {n_max}",
            {"n_max": n_max, "limit": limit},
        )


# ----------------------------
# Sampling
# ----------------------------

def _lacunary_increments(spec: GeneratorSpec, n_max: int, seed: int, path_index: int) -> np.ndarray:
    seq = lacunary_sequence(spec.ratio, n_max)
    bits = seq[-1].bit_length() + 64
    words = (bits + 63) // 64
    raw = path_rng(seed, path_index, STREAM_OMEGA).bit_generator.random_raw(words)
    mask = (1 << bits) - 1
    omega = 0
    for i, word in enumerate(raw.tolist()):
        omega |= int(word) << (64 * i)
    omega &= mask
    shift = bits - 53
    # {n_j w} with w = omega / 2^bits, truncated to 53 bits so the value stays < 1
    frac = np.array([((n * omega) & mask) >> shift for n in seq], dtype=np.float64) / float(1 << 53)
    return frac - 0.5


def sample_support(
    spec: GeneratorSpec,
    n_max: int,
    seed: Optional[int] = None,
    path_index: int = 0,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Increments at the positive-variance indices only.

    Returns (indices, increments) with 1-based indices. sample_path scatters
    exactly these values, so both forms agree draw for draw.
    """
    if n_max < 1:
        raise RangeError(f"n_max must be >= 1, got {n_max}")
    seed = spec.seed if seed is None else int(seed)
    if spec.kind == "lacunary":
        _check_lacunary_length(n_max)
        return np.arange(1, n_max + 1), _lacunary_increments(spec, n_max, seed, path_index)

    rng = path_rng(seed, path_index, STREAM_PATHS)
    if spec.kind == "prime_bernoulli":
        p = _primes(n_max)
        hits = rng.random(p.size) < 1.0 / p
        return p, hits.astype(np.float64) - 1.0 / p

    sigma = np.sqrt(_sigma_sq(spec, n_max))
    start = min(spec.zero_prefix, n_max)
    idx = np.arange(start + 1, n_max + 1)
    sigma = sigma[start:]
    if spec.kind == "rademacher":
        signs = rng.integers(0, 2, size=idx.size, dtype=np.int8).astype(np.float64) * 2.0 - 1.0
        return idx, signs * sigma
    return idx, rng.standard_normal(idx.size) * sigma


def sample_path(
    spec: GeneratorSpec,
    n_max: int,
    seed: Optional[int] = None,
    path_index: int = 0,
    profile: Optional[VarianceProfile] = None,
) -> PartialSumPath:
    """
    One seeded path of length n_max.

    The prime model is summed as integer counts T_n minus the compensated
    Mertens prefix, so T_n is recovered exactly from S_n.
    """
    if n_max < 1:
        raise RangeError(f"n_max must be >= 1, got {n_max}")
    if profile is None:
        profile = variance_profile_of(spec, n_max)
    seed = spec.seed if seed is None else int(seed)
    idx, values = sample_support(spec, n_max, seed, path_index)

    if spec.kind == "prime_bernoulli":
        hits = np.zeros(n_max + 1, dtype=np.int64)
        hits[idx] = np.rint(values + 1.0 / idx).astype(np.int64)
        sums = np.cumsum(hits).astype(np.float64) - _prime_mean_prefix(n_max)
    else:
        dense = np.zeros(n_max + 1)
        dense[idx] = values
        sums = np.cumsum(dense)
    return PartialSumPath(sums=sums, profile=profile, seed=seed, path_index=path_index, kind=spec.kind)


# ----------------------------
# Lindeberg / Lyapunov diagnostics
# ----------------------------

def _s_n(spec: GeneratorSpec, n: int) -> float:
    profile = variance_profile_of(spec, n)
    s = math.sqrt(profile.max_level)
    if s <= 0:
        raise DegenerateProfileError(f"s_{n} = 0 for {spec.label}")
    return s


def lindeberg_diagnostic(spec: GeneratorSpec, n: int, eps: float) -> float:
    """
    sum_{j<=n} E(X_j^2 ; |X_j| > eps s_n) / s_n^2 in closed form.

    Gaussian tails use E(Z^2; |Z| > z) = 2(z phi(z) + P(Z > z)); the lacunary
    family uses its uniform marginal on [-1/2, 1/2).
    """
    if eps <= 0:
        raise SpecError(f"eps must be > 0, got {eps!r}")
    s = _s_n(spec, n)
    a = eps * s
    if spec.kind in ("rademacher", "gaussian"):
        sigma = np.sqrt(_sigma_sq(spec, n))
        sigma = sigma[sigma > 0]
        if spec.kind == "rademacher":
            total = float(np.sum(sigma[sigma > a] ** 2))
        else:
            z = a / sigma
            total = float(np.sum(sigma ** 2 * 2.0 * (z * stats.norm.pdf(z) + stats.norm.sf(z))))
    elif spec.kind == "prime_bernoulli":
        p = _primes(n).astype(np.float64)
        up = 1.0 - 1.0 / p
        down = 1.0 / p
        total = float(np.sum(np.where(up > a, up ** 2 / p, 0.0) + np.where(down > a, down ** 2 * up, 0.0)))
    else:
        per_term = (2.0 / 3.0) * (0.125 - a ** 3) if a < 0.5 else 0.0
        total = n * per_term
    return total / (s * s)


def _abs_moment(spec: GeneratorSpec, n: int, power: float) -> np.ndarray:
    """E|X_j|^power for the positive-variance terms j <= n"""
    if spec.kind in ("rademacher", "gaussian"):
        sigma = np.sqrt(_sigma_sq(spec, n))
        sigma = sigma[sigma > 0]
        if spec.kind == "rademacher":
            return sigma ** power
        gauss = 2.0 ** (power / 2.0) * special.gamma((power + 1.0) / 2.0) / math.sqrt(math.pi)
        return sigma ** power * gauss
    if spec.kind == "prime_bernoulli":
        p = _primes(n).astype(np.float64)
        up = 1.0 - 1.0 / p
        return up ** power / p + (1.0 / p) ** power * up
    return np.full(n, 2.0 * 0.5 ** (power + 1.0) / (power + 1.0))


def lyapunov_ratio(spec: GeneratorSpec, n: int, delta: float = 1.0) -> float:
    """sum_{j<=n} E|X_j|^(2+delta) / s_n^(2+delta)"""
    if delta <= 0:
        raise SpecError(f"delta must be > 0, got {delta!r}")
    s = _s_n(spec, n)
    power = 2.0 + delta
    return float(np.sum(_abs_moment(spec, n, power)) / s ** power)


@dataclass
class WitnessReport:
    checked: int
    max_ratio: float
    violations: List[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def lyapunov_witness(n: int) -> WitnessReport:
    """Check E|X_p|^3 <= 1/p for every prime p <= n of the prime model"""
    p = _primes(n)
    third = _abs_moment(GeneratorSpec("prime_bernoulli"), n, 3.0)
    ratio = third * p
    bad = p[ratio > 1.0]
    return WitnessReport(
        checked=int(p.size),
        max_ratio=float(ratio.max()) if ratio.size else 0.0,
        violations=[int(v) for v in bad],
    )
