"""
Run summaries
Human-readable notes attached to subcommand payloads: the desk-scale regime
caveat for arithmetic runs and one-line digests for logs.
"""

import logging
import math
from typing import Any, Dict, Optional

logger = logging.getLogger(__name__)


def regime_caveat(x: float, g: Optional[float] = None) -> str:
    """
    Caveat printed with every density and Kubilius report.

    At reachable x, loglog x stays near 3, so limits in g(m) or in u are far
    away; the numbers are finite-x measurements, not density-1 statements.
    """
    if not x > math.e:
        return f"x={x:g} is below e; iterated logarithms are undefined here."
    ll = math.log(math.log(x))
    text = (
        f"Finite-x regime: loglog x = {ll:.4f} at x = {x:g}. "
        "Growth of g(m) and the x^-c + e^(-u log u) error budget are not small at this scale; "
        "fractions are measurements at this horizon only."
    )
    if g is not None:
        text += f" g = {g:g} is held at desk scale (g^2 = {g * g:.4f})."
    return text


def _fmt(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def generate_summary(subcommand: str, summary: Dict[str, Any]) -> str:
    """One-line digest of a payload summary (keys in a fixed order per subcommand)"""
    keys = {
        "kolmogorov": ("cells", "failing_cells", "max_ratio"),
        "localized": ("median", "q1", "q3", "empty_trials"),
        "brownian": ("median", "q1", "q3", "lil_envelope"),
        "omega-scan": ("x", "profiles", "mertens_max_gap"),
        "density": ("x", "mode", "scanned", "min_fraction", "max_fraction"),
        "kubilius": ("x", "r", "tv"),
        "schedule": ("mode", "blocks", "covers_from", "bracket_ok"),
    }.get(subcommand, ())
    parts = [f"{key}={_fmt(summary[key])}" for key in keys if key in summary]
    if not parts:
        return subcommand
    return f"{subcommand}: " + ", ".join(parts)
