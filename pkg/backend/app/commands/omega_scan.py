"""
omega-scan subcommand
Threshold profiles omega(m, t) for chosen m, plus the sieve-wide checks:
Mertens gap, bounded late growth, Erdos-Kac moments and the rho_tilde - rho
constant.
"""

import logging
import math

from app.arithmetic import erdos_kac_moments, late_growth_check, mertens_check, rho, rho_gap_constant
from app.errors import RangeError
from app.models import OmegaScanConfig
from app.sieve import build_sieve, omega_profile
from app.utils.rng import STREAM_MODEL, path_rng

logger = logging.getLogger(__name__)

COLUMNS = ["m", "t", "omega", "rho"]


def run(config: OmegaScanConfig) -> dict:
    table = build_sieve(config.x, workers=config.threads)
    if config.thresholds is not None:
        thresholds = config.thresholds
    else:
        t_max = config.t_max or min(config.x, 1000)
        if t_max > config.x:
            raise RangeError(f"t_max={t_max} exceeds sieve horizon {config.x}")
        thresholds = table.primes[table.primes <= t_max].tolist()

    rows = []
    for m in config.ms:
        profile = omega_profile(table, m, thresholds)
        for t, count in zip(profile.thresholds, profile.counts):
            rows.append({
                "m": profile.m,
                "t": int(t),
                "omega": int(count),
                "rho": rho(int(count), float(t)) if t > math.e else None,
            })

    summary = {"x": config.x, "profiles": len(config.ms), "thresholds": len(thresholds)}
    if config.mertens:
        check = mertens_check(table, config.mertens_lo)
        summary["mertens"] = check
        summary["mertens_max_gap"] = check["max_abs_gap"]
    if config.late_growth:
        summary["late_growth"] = late_growth_check(table, config.threads)
    if config.erdos_kac:
        summary["erdos_kac"] = erdos_kac_moments(table, config.threads)
    if config.rho_gap is not None:
        gap = config.rho_gap
        if gap.t_max > config.x:
            raise RangeError(f"rho_gap t_max={gap.t_max} exceeds sieve horizon {config.x}")
        rng = path_rng(config.seed, 0, STREAM_MODEL)
        ms = rng.integers(2, gap.m_max + 1, size=gap.samples)
        primes = table.primes
        ts = primes[(primes >= gap.t_min) & (primes <= gap.t_max)]
        summary["rho_gap"] = rho_gap_constant(table, ms.tolist(), ts.tolist())
    logger.debug(f"omega-scan x={config.x} rows={len(rows)}")
    return {"rows": rows, "summary": summary, "columns": COLUMNS}
