"""
Block schedules
The doubling grids used to localize large values:

- BlockSchedule: N_j = j^((M+3) j) (paper_exact) or a desk-scale surrogate
  N_1 = base, N_{j+1} = growth * H_j * N_j; inside block j the levels are
  2^t N_j for 0 <= t <= t(j), t(j) = floor((M+1) log2 j), H_j = 2^t(j)
- StarSchedule: K = 2 D^2, N*_{j+1} = N*_j K^u(j), u(j) = floor(log f_{N*_j} / log K)

Levels are kept as natural logs; N_j overflows a float from j = 5 on.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Tuple

from app.errors import DomainError, InvariantViolation, RangeError, ScheduleInfeasibleError
from app.windows import WindowFamily

logger = logging.getLogger(__name__)

LOG2 = math.log(2.0)
# slack for floor() of exact integers computed through logs
FLOOR_EPS = 1e-12

MODES = ("paper_exact", "scaled_surrogate")


def block_length(M: float, j: int) -> int:
    """t(j) = floor((M+1) log j / log 2)"""
    if j < 1:
        raise DomainError(f"block index must be >= 1, got {j}")
    return int(math.floor((M + 1.0) * math.log2(j) + FLOOR_EPS))


def _to_linear(log_level: float) -> float:
    try:
        return math.exp(log_level)
    except OverflowError:
        raise RangeError(
            f"level exp({log_level!r}) is not representable as a float",
            {"log_level": log_level},
        ) from None


# ----------------------------
# Block schedule
# ----------------------------

@dataclass(frozen=True)
class Block:
    j: int
    t: int
    log_N: float
    covers_window: Optional[bool]

    @property
    def log_H(self) -> float:
        return self.t * LOG2

    @property
    def H(self) -> int:
        return 2 ** self.t

    def log_level(self, t: int) -> float:
        if not 0 <= t <= self.t:
            raise RangeError(f"t={t} outside 0..{self.t} in block {self.j}")
        return self.log_N + t * LOG2

    def level(self, t: int) -> float:
        return _to_linear(self.log_level(t))

    @property
    def log_top(self) -> float:
        """log(H_j N_j), the last level of the block"""
        return self.log_N + self.log_H


@dataclass(frozen=True)
class BlockSchedule:
    mode: str
    M: float
    blocks: Tuple[Block, ...]
    base: Optional[float] = None
    growth: Optional[float] = None

    @property
    def j_max(self) -> int:
        return self.blocks[-1].j

    def block(self, j: int) -> Block:
        if not 1 <= j <= len(self.blocks):
            raise RangeError(f"block {j} outside 1..{len(self.blocks)}")
        return self.blocks[j - 1]

    def grid(self) -> Iterator[Tuple[int, int, float]]:
        """(j, t, log level) for every materialized level"""
        for b in self.blocks:
            for t in range(b.t + 1):
                yield b.j, t, b.log_level(t)

    def covers_from(self) -> Optional[int]:
        """Smallest j from which every block satisfies H_j N_j >= N_j f_{N_j}"""
        start = None
        for b in self.blocks:
            if b.covers_window:
                start = b.j if start is None else start
            else:
                start = None
        return start

    def rows(self) -> List[dict]:
        out = []
        for j, t, log_level in self.grid():
            b = self.blocks[j - 1]
            out.append({
                "j": j,
                "t": t,
                "t_j": b.t,
                "H_j": b.H,
                "log_level": log_level,
                "level": math.exp(log_level) if log_level < 700 else None,
                "covers_window": b.covers_window,
            })
        return out


def block_schedule(
    M: float,
    j_max: int,
    mode: str = "paper_exact",
    base: float = 2.0,
    growth: float = 2.0,
) -> BlockSchedule:
    """
    Materialize blocks 1..j_max.

    covers_window records whether H_j >= f_{N_j} under (log N)^M; the relation
    is only claimed for large j, so small blocks may report False.
    """
    if not M > 0:
        raise DomainError(f"M must be > 0, got {M!r}")
    if j_max < 2:
        raise DomainError(f"j_max must be >= 2, got {j_max}")
    if mode not in MODES:
        raise DomainError(f"unknown schedule mode '{mode}' (known: {', '.join(MODES)})")
    if mode == "scaled_surrogate":
        if not base >= 1:
            raise DomainError(f"surrogate base must be >= 1, got {base!r}")
        if not growth > 1:
            raise DomainError(f"surrogate growth must be > 1, got {growth!r}")

    family = WindowFamily.power_log(M)
    blocks: List[Block] = []
    log_N = math.log(base) if mode == "scaled_surrogate" else 0.0
    for j in range(1, j_max + 1):
        if mode == "paper_exact":
            log_N = (M + 3.0) * j * math.log(j)
        t = block_length(M, j)
        covers = t * LOG2 >= family.log_width_at(log_N) if log_N > 0 else None
        block = Block(j=j, t=t, log_N=log_N, covers_window=covers)
        if blocks and not block.log_N > blocks[-1].log_N:
            raise InvariantViolation(f"block levels not increasing at j={j}")
        blocks.append(block)
        if mode == "scaled_surrogate":
            log_N = math.log(growth) + block.log_top

    schedule = BlockSchedule(
        mode=mode,
        M=float(M),
        blocks=tuple(blocks),
        base=float(base) if mode == "scaled_surrogate" else None,
        growth=float(growth) if mode == "scaled_surrogate" else None,
    )
    logger.debug(f"Block schedule {mode} M={M} j_max={j_max} covers_from={schedule.covers_from()}")
    return schedule


# ----------------------------
# Star schedule
# ----------------------------

@dataclass(frozen=True)
class StarStep:
    j: int
    log_N: float
    u: int
    square_bound_ok: Optional[bool] = None

    @property
    def level(self) -> float:
        return _to_linear(self.log_N)


@dataclass(frozen=True)
class StarSchedule:
    K: float
    D: float
    steps: Tuple[StarStep, ...]
    family: dict = field(default_factory=dict)

    @property
    def log_levels(self) -> List[float]:
        return [s.log_N for s in self.steps]

    def implication_holds(self) -> bool:
        """u(j) >= 1 implies N*_{j+1} >= K N*_j on every materialized step"""
        log_k = math.log(self.K)
        for a, b in zip(self.steps, self.steps[1:]):
            if a.u >= 1 and b.log_N < a.log_N + log_k - 1e-9:
                return False
        return True

    def rows(self) -> List[dict]:
        return [
            {
                "j": s.j,
                "log_level": s.log_N,
                "level": math.exp(s.log_N) if s.log_N < 700 else None,
                "u": s.u,
                "square_bound_ok": s.square_bound_ok,
            }
            for s in self.steps
        ]


def _find_start(f: WindowFamily, K: float, log_horizon: float) -> float:
    """Smallest log N (to bisection precision) with f_N >= K inside the horizon"""
    log_k = math.log(K)
    if f.kind == "constant":
        if f.log_width_at(0.0) >= log_k:
            return 0.0
        raise ScheduleInfeasibleError(f"constant width {f.c!r} is below K={K!r}", {"K": K})

    # log widths need N > 1; try log N = 2^i / 64
    lo, hi = None, None
    log_n = 1.0 / 64.0
    while log_n <= log_horizon:
        if f.log_width_at(log_n) >= log_k:
            hi = log_n
            break
        lo = log_n
        log_n *= 2.0
    if hi is None:
        if f.log_width_at(log_horizon) >= log_k:
            hi = log_horizon
        else:
            raise ScheduleInfeasibleError(
                f"no N*_1 <= exp({log_horizon!r}) with f_N >= K={K!r}",
                {"K": K, "log_horizon": log_horizon},
            )
    if lo is None:
        return hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f.log_width_at(mid) >= log_k:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-12 * hi:
            break
    return hi


def star_schedule(
    f: WindowFamily,
    D: float,
    j_max: int,
    start: Optional[float] = None,
    horizon: float = 1e300,
) -> StarSchedule:
    """
    Materialize N*_1..N*_{j_max}.

    With a width cap f_N <= N every step also satisfies N*_{j+1} <= (N*_j)^2;
    a failure of either provable relation raises InvariantViolation.
    """
    if not D >= 1:
        raise DomainError(f"D must be >= 1, got {D!r}")
    if j_max < 1:
        raise DomainError(f"j_max must be >= 1, got {j_max}")
    K = 2.0 * D * D
    log_k = math.log(K)
    log_horizon = math.log(horizon)

    if start is None:
        log_n = _find_start(f, K, log_horizon)
    else:
        if not start >= 1:
            raise DomainError(f"N*_1 must be >= 1, got {start!r}")
        log_n = math.log(start)
        if f.log_width_at(log_n) < log_k:
            raise ScheduleInfeasibleError(f"f at N*_1={start!r} is below K={K!r}", {"K": K, "start": start})

    steps: List[StarStep] = []
    for j in range(1, j_max + 1):
        u = int(math.floor(f.log_width_at(log_n) / log_k + FLOOR_EPS))
        if u < 1:
            raise InvariantViolation(f"u({j}) = {u} < 1; the width family is not non-decreasing", {"j": j})
        next_log = log_n + u * log_k
        square_ok = None
        if f.cap_at_n:
            square_ok = next_log <= 2.0 * log_n * (1 + FLOOR_EPS) + FLOOR_EPS
            if not square_ok:
                raise InvariantViolation(f"N*_{j + 1} > (N*_{j})^2 under the cap f_N <= N", {"j": j})
        steps.append(StarStep(j=j, log_N=log_n, u=u, square_bound_ok=square_ok))
        log_n = next_log

    schedule = StarSchedule(K=K, D=float(D), steps=tuple(steps), family=f.describe())
    if not schedule.implication_holds():
        raise InvariantViolation("u(j) >= 1 did not imply N*_{j+1} >= K N*_j")
    return schedule
