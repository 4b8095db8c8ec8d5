"""
brownian subcommand
Localized sups of |W(t)|/sqrt(t) on the surrogate level grid for an ensemble
of grid-sampled Brownian paths.
"""

import logging
import math

from app.brownian import lil_envelope, localized_sup, refine_brownian, scaling_ks, simulate_brownian
from app.localization import surrogate_levels
from app.models import BrownianConfig
from app.utils.parallel import map_chunks
from app.utils.stats import quantile_summary

logger = logging.getLogger(__name__)

COLUMNS = ["path", "N", "f_N", "max_value", "arg_time", "points", "resolution"]


def run(config: BrownianConfig) -> dict:
    rule = config.grid.to_rule()
    family = config.window.to_family()
    levels = surrogate_levels(config.G, config.exponent)

    def paths(r: range) -> list:
        out = []
        for i in r:
            path = simulate_brownian(config.T, rule, config.seed, i)
            for _ in range(config.refinements):
                path = refine_brownian(path)
            out.append((i, [localized_sup(path, N, family) for N in levels]))
        return out

    results = [item for chunk in map_chunks(paths, config.paths, config.threads) for item in chunk]

    rows = []
    values = []
    for i, records in results:
        best = None
        for record in records:
            rows.append({
                "path": i,
                "N": record.N,
                "f_N": record.f_N,
                "max_value": record.max_value,
                "arg_time": record.arg_time,
                "points": record.points,
                "resolution": record.resolution,
            })
            if not record.empty and (best is None or record.max_value < best):
                best = record.max_value
        values.append(best)

    summary = {
        "T": config.T,
        "family": family.describe(),
        "G": config.G,
        "exponent": config.exponent,
        "paths": config.paths,
        "refinements": config.refinements,
        **quantile_summary(values),
        "lil_envelope": lil_envelope(config.T) / math.sqrt(config.T) if config.T > math.e else None,
    }
    if config.scaling is not None:
        sc = config.scaling
        summary["scaling"] = scaling_ks(sc.N, sc.c, family, rule, config.seed, sc.paths, config.threads)
    return {"rows": rows, "summary": summary, "columns": COLUMNS}
