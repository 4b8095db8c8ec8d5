"""
Sieve tables
Segmented smallest-prime-factor sieve, the prime list it yields, Mertens
prefix tables and omega(m, t) threshold profiles.

Conventions:
- spf is uint32 with spf[0] = 0, spf[1] = 1 and spf[p] = p for primes
- thresholds t are integers; omega(m, t) counts distinct primes p <= t dividing m
"""

import logging
import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence

import numpy as np
import psutil

from app.errors import CapacityError, DomainError, RangeError
from app.settings import get_settings
from app.utils.cache import sieve_cache
from app.utils.parallel import map_items
from app.utils.serialization import rows_to_csv
from app.variance_ladder import compensated_cumsum

logger = logging.getLogger(__name__)

# bytes per integer held while sieving (spf entry plus segment scratch)
_BYTES_PER_ENTRY = 4 + 1


def simple_sieve(limit: int) -> np.ndarray:
    """Primes <= limit by the plain sieve of Eratosthenes"""
    if limit < 2:
        return np.array([], dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p: limit + 1: p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def primes_up_to(limit: int) -> np.ndarray:
    """Prime list used by the prime model; shared through the table cache"""
    return sieve_cache.get_or_build(("primes", int(limit)), lambda: simple_sieve(int(limit)))


# ----------------------------
# Domain types
# ----------------------------

@dataclass(frozen=True, eq=False)
class SieveTable:
    """Smallest prime factors for 0..x plus the primes <= x (immutable)"""
    x: int
    spf: np.ndarray
    primes: np.ndarray
    segment_size: int

    def smallest_factor(self, m: int) -> int:
        if not 2 <= m <= self.x:
            raise RangeError(f"m={m} outside 2..{self.x}", {"m": m, "x": self.x})
        return int(self.spf[m])

    def prime_factors(self, m: int) -> List[int]:
        """Distinct prime factors of m in increasing order"""
        if not 2 <= m <= self.x:
            raise RangeError(f"m={m} outside 2..{self.x}", {"m": m, "x": self.x})
        factors = []
        while m > 1:
            p = int(self.spf[m])
            if not factors or factors[-1] != p:
                factors.append(p)
            m //= p
        return factors

    @property
    def prime_count(self) -> int:
        return int(self.primes.size)


@dataclass(frozen=True, eq=False)
class MertensTables:
    """Prefix sums of 1/p and of 1/p - 1/p^2 at every prime"""
    primes: np.ndarray
    recip_sum: np.ndarray
    var_sum: np.ndarray

    def _position(self, t) -> np.ndarray:
        return np.searchsorted(self.primes, np.asarray(t, dtype=np.float64), side="right")

    def recip_at(self, t):
        """sum_{p <= t} 1/p (0 below the first prime)"""
        pos = self._position(t)
        padded = np.concatenate(([0.0], self.recip_sum))
        out = padded[pos]
        return float(out) if np.ndim(out) == 0 else out

    def var_at(self, t):
        """sum_{p <= t} (1/p - 1/p^2)"""
        pos = self._position(t)
        padded = np.concatenate(([0.0], self.var_sum))
        out = padded[pos]
        return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True, eq=False)
class OmegaThresholdProfile:
    """omega(m, t_i) at increasing thresholds t_1 < ... < t_r"""
    m: int
    thresholds: np.ndarray
    counts: np.ndarray
    factors: tuple = ()

    def to_rows(self) -> List[dict]:
        return [
            {"m": self.m, "t": int(t), "omega": int(c)}
            for t, c in zip(self.thresholds, self.counts)
        ]


# ----------------------------
# Sieve construction
# ----------------------------

def _check_capacity(x: int) -> None:
    settings = get_settings()
    if x > settings.sieve_max_x:
        raise CapacityError(
            f"sieve horizon {x} exceeds configured maximum {settings.sieve_max_x} (LAB_SIEVE_MAX_X)",
            {"x": x, "max_x": settings.sieve_max_x},
        )
    needed = (x + 1) * _BYTES_PER_ENTRY
    available = psutil.virtual_memory().available
    if needed > available:
        raise CapacityError(
            f"sieve up to {x} needs ~{needed / 1e6:.1f} MB, only {available / 1e6:.1f} MB available",
            {"x": x, "needed_bytes": needed, "available_bytes": available},
        )


def _sieve_segment(spf: np.ndarray, base: np.ndarray, lo: int, hi: int) -> np.ndarray:
    """Fill spf[lo:hi] in place and return the primes found there"""
    seg = np.zeros(hi - lo, dtype=np.uint32)
    for p in base:
        p = int(p)
        if p * p >= hi:
            break
        start = max(p * p, ((lo + p - 1) // p) * p)
        if start >= hi:
            continue
        view = seg[start - lo::p]
        view[view == 0] = p
    unmarked = np.flatnonzero(seg == 0) + lo
    unmarked = unmarked[unmarked >= 2]
    seg[unmarked - lo] = unmarked.astype(np.uint32)
    spf[lo:hi] = seg
    return unmarked.astype(np.int64)


def _build(x: int, segment_size: int, workers: Optional[int]) -> SieveTable:
    _check_capacity(x)
    base = simple_sieve(math.isqrt(x))
    spf = np.zeros(x + 1, dtype=np.uint32)
    bounds = [(lo, min(lo + segment_size, x + 1)) for lo in range(0, x + 1, segment_size)]

    # segments write disjoint slices of spf
    found = map_items(lambda b: _sieve_segment(spf, base, b[0], b[1]), bounds, workers)

    spf[0] = 0
    if x >= 1:
        spf[1] = 1
    primes = np.concatenate(found) if found else np.array([], dtype=np.int64)
    spf.setflags(write=False)
    primes.setflags(write=False)
    logger.info(f"SIEVE | x={x} | segments={len(bounds)} | primes={primes.size}")
    return SieveTable(x=x, spf=spf, primes=primes, segment_size=segment_size)


def build_sieve(x: int, segment_size: Optional[int] = None, workers: Optional[int] = None) -> SieveTable:
    """
    Segmented smallest-prime-factor sieve for 2..x.

    Raises:
        DomainError: x < 2
        CapacityError: x above LAB_SIEVE_MAX_X or the available memory
    """
    x = int(x)
    if x < 2:
        raise DomainError(f"sieve horizon must be >= 2, got {x}")
    segment_size = int(segment_size or get_settings().segment_size)
    if segment_size < 2:
        raise DomainError(f"segment size must be >= 2, got {segment_size}")
    return sieve_cache.get_or_build(("sieve", x, segment_size), lambda: _build(x, segment_size, workers))


def mertens_tables(primes: Sequence[int], x: Optional[int] = None) -> MertensTables:
    """Compensated prefix sums of 1/p and 1/p - 1/p^2 over primes (<= x if given)"""
    p = np.asarray(primes, dtype=np.float64)
    if x is not None:
        p = p[p <= x]
    recip = 1.0 / p
    recip_sum = compensated_cumsum(recip)
    var_sum = compensated_cumsum(recip - recip * recip)
    for arr in (p, recip_sum, var_sum):
        arr.setflags(write=False)
    return MertensTables(primes=p, recip_sum=recip_sum, var_sum=var_sum)


def table_mertens(table: SieveTable) -> MertensTables:
    """Mertens tables of a sieve, built once per table"""
    return sieve_cache.get_or_build(("mertens", table.x), lambda: mertens_tables(table.primes))


# ----------------------------
# Omega
# ----------------------------

def omega_profile(table: SieveTable, m: int, thresholds: Iterable[int]) -> OmegaThresholdProfile:
    """
    omega(m, t) at each threshold.

    For m <= x the factors come from spf peeling. Larger m are accepted when
    every threshold is <= x; the factors below the top threshold are then found
    by divisibility against the table's primes.
    """
    m = int(m)
    ts = np.asarray(list(thresholds), dtype=np.int64)
    if ts.size and np.any(np.diff(ts) <= 0):
        raise DomainError("thresholds must be strictly increasing")
    if m < 2:
        raise RangeError(f"m={m} must be >= 2", {"m": m})
    if m <= table.x:
        factors = table.prime_factors(m)
    else:
        top = int(ts[-1]) if ts.size else 0
        if top > table.x:
            raise RangeError(
                f"m={m} exceeds sieve horizon {table.x} and thresholds reach {top}",
                {"m": m, "x": table.x},
            )
        candidates = table.primes[table.primes <= top]
        factors = [int(p) for p in candidates[(m % candidates) == 0]]
    counts = np.searchsorted(np.asarray(factors, dtype=np.int64), ts, side="right").astype(np.int64)
    return OmegaThresholdProfile(m=m, thresholds=ts, counts=counts, factors=tuple(factors))


def _omega_block(spf: np.ndarray, lo: int, hi: int, t: Optional[int]) -> np.ndarray:
    """Distinct prime factors (<= t) of every m in [lo, hi) by vectorized spf peeling"""
    n = np.arange(lo, hi, dtype=np.int64)
    counts = np.zeros(hi - lo, dtype=np.int16)
    idx = np.arange(hi - lo)
    prev = np.zeros(hi - lo, dtype=np.int64)
    keep = n > 1
    n, idx, prev = n[keep], idx[keep], prev[keep]
    while n.size:
        p = spf[n].astype(np.int64)
        new = p != prev
        if t is not None:
            new &= p <= t
        counts[idx[new]] += 1
        n //= p
        prev = p
        # factors come out in increasing order, so nothing past t can count
        keep = n > 1 if t is None else (n > 1) & (p <= t)
        n, idx, prev = n[keep], idx[keep], prev[keep]
    return counts


def omega_all(table: SieveTable, t: Optional[int] = None, workers: Optional[int] = None) -> np.ndarray:
    """omega(m, t) for every 0 <= m <= x (entries 0 and 1 are 0); t=None means t = x"""
    bounds = [(lo, min(lo + table.segment_size, table.x + 1)) for lo in range(0, table.x + 1, table.segment_size)]
    parts = map_items(lambda b: _omega_block(table.spf, b[0], b[1], t), bounds, workers)
    return np.concatenate(parts)


def profiles_to_csv(profiles: Iterable[OmegaThresholdProfile]) -> str:
    """Threshold-profile dump with header m,t,omega"""
    rows = [row for profile in profiles for row in profile.to_rows()]
    return rows_to_csv(rows, columns=["m", "t", "omega"])
