"""
localized subcommand
Per-trial localized maxima on the surrogate level grid, the ensemble summary
of i_surrogate, and optional block-event and star-block diagnostics.
"""

import logging
import math

from app.generators import sample_path, variance_profile_of
from app.localization import (
    block_schedule,
    event_frequencies,
    i_surrogate,
    paper_bound,
    star_schedule,
    star_tail_frequency,
)
from app.models import LocalizedConfig
from app.utils.parallel import map_chunks
from app.utils.stats import quantile_summary
from app.variance_ladder import ratio_bound

logger = logging.getLogger(__name__)

COLUMNS = ["trial", "N", "f_N", "max_value", "argmax_n", "empty"]


def run(config: LocalizedConfig) -> dict:
    spec = config.generator.to_spec(config.seed)
    family = config.window.to_family()
    profile = variance_profile_of(spec, config.n_max)
    D = ratio_bound(profile).value

    def trials(r: range) -> list:
        out = []
        for i in r:
            path = sample_path(spec, config.n_max, config.seed, i, profile=profile)
            out.append((i, i_surrogate(path, family, config.G, config.exponent, config.dense, keep_records=True)))
        return out

    results = [item for chunk in map_chunks(trials, config.trials, config.threads) for item in chunk]

    rows = []
    for i, result in results:
        for record in result.records:
            rows.append({
                "trial": i,
                "N": record.N,
                "f_N": record.f_N,
                "max_value": record.max_value,
                "argmax_n": record.argmax_n,
                "empty": record.empty,
            })

    values = [result.value for _, result in results]
    summary = {
        "generator": spec.label,
        "family": family.describe(),
        "G": config.G,
        "exponent": config.exponent,
        "trials": config.trials,
        "D": D,
        **quantile_summary(values),
        "empty_trials": sum(v is None for v in values),
    }
    if family.kind == "power_log":
        summary["paper_bound"] = paper_bound(family.M, D)

    if config.events is not None:
        ev = config.events
        schedule = block_schedule(ev.M, ev.j_max or ev.j + 1, ev.mode, ev.base, ev.growth)
        summary["events"] = event_frequencies(
            spec, schedule, ev.j, ev.trials, config.seed, config.n_max, ev.D, config.threads
        )

    if config.star is not None:
        st = config.star
        star_D = st.D if st.D is not None else D
        star = star_schedule(family, star_D, st.j_max, st.start, horizon=max(profile.max_level, math.e))
        summary["star"] = {
            "K": star.K,
            "levels": star.rows(),
            "tail": star_tail_frequency(spec, star, st.lam, st.trials, config.seed, config.n_max, config.threads),
        }

    logger.debug(f"localized median={summary['median']} over {config.trials} trials")
    return {"rows": rows, "summary": summary, "columns": COLUMNS}
