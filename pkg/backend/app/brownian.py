"""
Brownian analog
W(t) sampled on a time grid starting at t_0 >= 1, the localized sup of
|W(t)|/sqrt(t) over (N, N f_N], bridge refinement of a sampled path and the
law-of-the-iterated-logarithm envelope.

The sup is taken over grid points only; records carry the grid resolution.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from scipy import stats

from app.errors import DomainError, HorizonExceededError
from app.localization import DEFAULT_EXPONENT, surrogate_levels
from app.settings import get_settings
from app.utils.parallel import map_chunks
from app.utils.rng import STREAM_BRIDGE, STREAM_PATHS, path_rng
from app.windows import WindowFamily

logger = logging.getLogger(__name__)

# bridge refinements per path draw from separate sub-streams
_MAX_REFINEMENTS = 64


@dataclass(frozen=True)
class GridRule:
    kind: str = "geometric"
    t0: float = 1.0
    points_per_octave: Optional[int] = None
    step: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("geometric", "uniform"):
            raise DomainError(f"unknown grid kind '{self.kind}'")
        if not self.t0 >= 1:
            raise DomainError(f"grid must start at t0 >= 1, got {self.t0!r}")
        if self.kind == "geometric" and self.points_per_octave is not None and self.points_per_octave < 1:
            raise DomainError("points_per_octave must be >= 1")
        if self.kind == "uniform" and not (self.step is not None and self.step > 0):
            raise DomainError("uniform grid needs step > 0")

    @property
    def octave_points(self) -> int:
        return self.points_per_octave or get_settings().points_per_octave

    def points(self, T: float) -> np.ndarray:
        if not T >= self.t0:
            raise DomainError(f"horizon T={T!r} is below t0={self.t0!r}")
        if self.kind == "geometric":
            ppo = self.octave_points
            count = int(math.floor(ppo * math.log2(T / self.t0) + 1e-9))
            grid = self.t0 * np.exp2(np.arange(count + 1) / ppo)
        else:
            count = int(math.floor((T - self.t0) / self.step + 1e-9))
            grid = self.t0 + self.step * np.arange(count + 1)
        grid = grid[grid <= T]
        if grid[-1] < T:
            grid = np.append(grid, T)
        return grid

    def resolution(self) -> float:
        """Ratio between neighbours (geometric) or step (uniform)"""
        if self.kind == "geometric":
            return 2.0 ** (1.0 / self.octave_points)
        return float(self.step)


@dataclass(frozen=True, eq=False)
class BrownianPath:
    grid: np.ndarray
    values: np.ndarray
    rule: GridRule
    seed: Optional[int] = None
    path_index: int = 0
    refinements: int = 0

    @property
    def horizon(self) -> float:
        return float(self.grid[-1])

    def resolution(self) -> float:
        base = self.rule.resolution()
        if self.rule.kind == "geometric":
            return base ** (0.5 ** self.refinements)
        return base * 0.5 ** self.refinements


@dataclass(frozen=True)
class BrownianSupRecord:
    N: float
    f_N: float
    max_value: Optional[float]
    arg_time: Optional[float]
    points: int
    resolution: float

    @property
    def empty(self) -> bool:
        return self.points == 0

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "f_N": self.f_N,
            "max_value": self.max_value,
            "arg_time": self.arg_time,
            "points": self.points,
            "resolution": self.resolution,
            "empty": self.empty,
        }


# ----------------------------
# Simulation
# ----------------------------

def simulate_brownian(T: float, rule: GridRule, seed: int, path_index: int = 0) -> BrownianPath:
    """W on rule.points(T): W(t_0) ~ Normal(0, t_0) then independent increments"""
    grid = rule.points(T)
    rng = path_rng(seed, path_index, STREAM_PATHS)
    dt = np.diff(grid, prepend=0.0)
    values = np.cumsum(np.sqrt(dt) * rng.standard_normal(grid.size))
    return BrownianPath(grid=grid, values=values, rule=rule, seed=seed, path_index=path_index)


def simulate_brownian_ensemble(
    T: float,
    rule: GridRule,
    seed: int,
    paths: int,
    workers: Optional[int] = None,
) -> List[BrownianPath]:
    chunks = map_chunks(lambda r: [simulate_brownian(T, rule, seed, i) for i in r], paths, workers)
    return [p for chunk in chunks for p in chunk]


def refine_brownian(path: BrownianPath, seed: Optional[int] = None) -> BrownianPath:
    """
    Insert one bridge-sampled midpoint between every pair of grid points.

    Geometric grids get the geometric mean sqrt(t_i t_{i+1}), doubling the
    points per octave; uniform grids get the arithmetic midpoint. Existing
    values are kept, so the refined grid nests the old one.
    """
    if path.refinements >= _MAX_REFINEMENTS:
        raise DomainError(f"at most {_MAX_REFINEMENTS} refinements per path")
    seed = path.seed if seed is None else seed
    if seed is None:
        raise DomainError("refinement needs a seed")
    t, w = path.grid, path.values
    left, right = t[:-1], t[1:]
    mid = np.sqrt(left * right) if path.rule.kind == "geometric" else 0.5 * (left + right)
    span = right - left
    mean = w[:-1] + (mid - left) / span * (w[1:] - w[:-1])
    var = (mid - left) * (right - mid) / span
    rng = path_rng(seed, path.path_index * _MAX_REFINEMENTS + path.refinements, STREAM_BRIDGE)
    sampled = mean + np.sqrt(var) * rng.standard_normal(mid.size)

    grid = np.empty(t.size + mid.size)
    values = np.empty_like(grid)
    grid[0::2], values[0::2] = t, w
    grid[1::2], values[1::2] = mid, sampled
    return BrownianPath(
        grid=grid,
        values=values,
        rule=path.rule,
        seed=seed,
        path_index=path.path_index,
        refinements=path.refinements + 1,
    )


# ----------------------------
# Statistics
# ----------------------------

def interval_sup(path: BrownianPath, a: float, b: float):
    """(max, arg time, point count) of |W(t)|/sqrt(t) over grid points in (a, b]"""
    lo = int(np.searchsorted(path.grid, a, side="right"))
    hi = int(np.searchsorted(path.grid, b, side="right"))
    if hi <= lo:
        return None, None, 0
    vals = np.abs(path.values[lo:hi]) / np.sqrt(path.grid[lo:hi])
    k = int(np.argmax(vals))
    return float(vals[k]), float(path.grid[lo + k]), hi - lo


def localized_sup(path: BrownianPath, N: float, f: WindowFamily) -> BrownianSupRecord:
    """sup over grid points t in (N, N f_N] of |W(t)|/sqrt(t)"""
    if not N >= 1:
        raise DomainError(f"window level must be >= 1, got {N!r}")
    width = f.width(N)
    top = N * width
    if top > path.horizon:
        raise HorizonExceededError(top, path.horizon, what="window top N*f_N")
    value, arg, points = interval_sup(path, N, top)
    return BrownianSupRecord(
        N=float(N), f_N=width, max_value=value, arg_time=arg, points=points, resolution=path.resolution()
    )


def brownian_i_surrogate(
    path: BrownianPath,
    f: WindowFamily,
    G: float,
    exponent: float = DEFAULT_EXPONENT,
) -> Optional[float]:
    """min over the doubling level grid of localized_sup; empty windows skipped"""
    best = None
    for level in surrogate_levels(G, exponent):
        record = localized_sup(path, level, f)
        if record.empty:
            continue
        if best is None or record.max_value < best:
            best = record.max_value
    return best


def lil_envelope(t: float) -> float:
    """sqrt(2 t loglog t)"""
    if not t > math.e:
        raise DomainError(f"lil_envelope needs t > e, got {t!r}")
    return math.sqrt(2.0 * t * math.log(math.log(t)))


def scaling_ks(
    N: float,
    c: float,
    f: WindowFamily,
    rule: GridRule,
    seed: int,
    paths: int,
    workers: Optional[int] = None,
) -> dict:
    """
    Compare sup over (N, N f_N] with sup over (cN, cN f_N] across paths.

    |W(ct)|/sqrt(ct) has the law of |W(t)|/sqrt(t), so both samples share one
    distribution; the report carries the two-sample Kolmogorov-Smirnov result.
    """
    if not c > 1:
        raise DomainError(f"scale c must be > 1, got {c!r}")
    width = f.width(N)
    T = c * N * width

    def one(i: int):
        path = simulate_brownian(T, rule, seed, i)
        base, _, _ = interval_sup(path, N, N * width)
        scaled, _, _ = interval_sup(path, c * N, c * N * width)
        return base, scaled

    pairs = [p for chunk in map_chunks(lambda r: [one(i) for i in r], paths, workers) for p in chunk]
    base = np.array([p[0] for p in pairs if p[0] is not None])
    scaled = np.array([p[1] for p in pairs if p[1] is not None])
    result = stats.ks_2samp(base, scaled)
    return {
        "N": float(N),
        "c": float(c),
        "paths": paths,
        "ks_statistic": float(result.statistic),
        "p_value": float(result.pvalue),
    }
