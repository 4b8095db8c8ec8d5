"""
Window families
The localization width rule f_N: power-log (log N)^M, growing-log
(log N)^xi(N), or a constant diagnostic family. Every rule is clamped below
at 1 + 1/N.

Levels past the float range (block schedules) are handled in log space by
log_width_at.
"""

import math
from dataclasses import dataclass
from typing import Callable, Dict

from app.errors import DomainError


# xi functions take log N
def _loglog(log_n: float) -> float:
    return math.log(log_n) if log_n > 0 else -math.inf


def _logloglog(log_n: float) -> float:
    ll = _loglog(log_n)
    return math.log(ll) if ll > 0 else -math.inf


def _sqrt_loglog(log_n: float) -> float:
    ll = _loglog(log_n)
    return math.sqrt(ll) if ll > 0 else 0.0


XI_FUNCTIONS: Dict[str, Callable[[float], float]] = {
    "loglog": _loglog,
    "logloglog": _logloglog,
    "sqrt_loglog": _sqrt_loglog,
}

KINDS = ("power_log", "growing_log", "constant")


@dataclass(frozen=True)
class WindowFamily:
    """Width rule N -> f_N"""
    kind: str
    M: float = 1.0
    xi: str = "loglog"
    xi_scale: float = 1.0
    xi_floor: float = 1.0
    cap_at_n: bool = False
    c: float = 2.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown window family kind '{self.kind}'")
        if self.kind == "power_log" and not self.M > 0:
            raise DomainError(f"power-log exponent M must be > 0, got {self.M!r}")
        if self.kind == "growing_log":
            if self.xi not in XI_FUNCTIONS:
                raise DomainError(f"unknown xi function '{self.xi}' (known: {sorted(XI_FUNCTIONS)})")
            if not self.xi_scale > 0:
                raise DomainError("xi_scale must be > 0")
        if self.kind == "constant" and not self.c > 0:
            raise DomainError("constant width must be > 0")

    # ----------------------------
    # Constructors
    # ----------------------------

    @classmethod
    def power_log(cls, M: float, cap_at_n: bool = False) -> "WindowFamily":
        return cls(kind="power_log", M=float(M), cap_at_n=cap_at_n)

    @classmethod
    def growing_log(cls, xi: str = "loglog", scale: float = 1.0, floor: float = 1.0,
                    cap_at_n: bool = False) -> "WindowFamily":
        return cls(kind="growing_log", xi=xi, xi_scale=float(scale), xi_floor=float(floor), cap_at_n=cap_at_n)

    @classmethod
    def constant(cls, c: float) -> "WindowFamily":
        return cls(kind="constant", c=float(c))

    # ----------------------------
    # Evaluation
    # ----------------------------

    def _xi_from_log(self, log_n: float) -> float:
        if self.kind != "growing_log":
            raise DomainError(f"xi is only defined for growing_log families, not {self.kind}")
        return max(self.xi_floor, self.xi_scale * XI_FUNCTIONS[self.xi](log_n))

    def raw_width(self, N: float) -> float:
        """f_N before the 1 + 1/N floor"""
        if self.kind == "constant":
            raw = self.c
        else:
            if not N > 1:
                raise DomainError(f"log-based width needs N > 1, got N={N!r}")
            log_n = math.log(N)
            exponent = self.M if self.kind == "power_log" else self._xi_from_log(log_n)
            raw = log_n ** exponent
        if self.cap_at_n:
            raw = min(raw, N)
        return raw

    def width(self, N: float) -> float:
        N = float(N)
        if not N > 0:
            raise DomainError(f"window level must be positive, got {N!r}")
        return max(self.raw_width(N), 1.0 + 1.0 / N)

    def log_width_at(self, log_n: float) -> float:
        """log f_N given log N; usable far beyond the float range of N"""
        if self.kind == "constant":
            raw = math.log(self.c)
        else:
            if not log_n > 0:
                raise DomainError(f"log-based width needs N > 1, got log N={log_n!r}")
            exponent = self.M if self.kind == "power_log" else self._xi_from_log(log_n)
            raw = exponent * math.log(log_n)
        if self.cap_at_n:
            raw = min(raw, log_n)
        floor = math.log1p(math.exp(-log_n)) if log_n > -700 else -log_n
        return max(raw, floor)

    def describe(self) -> dict:
        if self.kind == "power_log":
            return {"kind": self.kind, "M": self.M, "cap_at_n": self.cap_at_n}
        if self.kind == "growing_log":
            return {"kind": self.kind, "xi": self.xi, "xi_scale": self.xi_scale,
                    "xi_floor": self.xi_floor, "cap_at_n": self.cap_at_n}
        return {"kind": self.kind, "c": self.c}
