"""
density subcommand
Density scans of the min-max omega statistic over all m <= x, one row per
K (part_i) or growth level (part_ii).
"""

import logging

from app.arithmetic import PART_I, density_scan, minmax_K, prime_model_D
from app.models import DensityConfig
from app.sieve import build_sieve
from app.utils.summary_generator import regime_caveat

logger = logging.getLogger(__name__)

COLUMNS = ["K", "level", "scanned", "satisfied_count", "empty_count", "fraction"]


def run(config: DensityConfig) -> dict:
    table = build_sieve(config.x, workers=config.threads)
    rule = config.g.to_rule()
    family = config.window.to_family()
    D = prime_model_D()
    model_K = minmax_K(family.M, D)

    if config.mode == PART_I:
        targets = [(K, None) for K in (config.K or [model_K])]
    else:
        targets = [(None, level) for level in config.level]

    rows = []
    report = None
    for K, level in targets:
        report = density_scan(
            table, rule, family, K=K, mode=config.mode, level=level,
            m_min=config.m_min, c=config.c, workers=config.threads,
        )
        rows.append({
            "K": K,
            "level": level,
            "scanned": report.scanned,
            "satisfied_count": report.satisfied_count,
            "empty_count": report.empty_count,
            "fraction": report.fraction,
        })

    fractions = [row["fraction"] for row in rows]
    summary = {
        "x": config.x,
        "mode": config.mode,
        "g_rule": rule.describe(),
        "family": family.describe(),
        "prime_model_D": D,
        "prime_model_K": model_K,
        "m_min": report.m_min,
        "below_g_count": report.below_g_count,
        "scan_start": report.scan_start,
        "scanned": report.scanned,
        "min_fraction": min(fractions),
        "max_fraction": max(fractions),
        "error_budget": report.error_budget,
        "regime_caveat": regime_caveat(config.x, rule.value(config.x)),
    }
    return {"rows": rows, "summary": summary, "columns": COLUMNS}
