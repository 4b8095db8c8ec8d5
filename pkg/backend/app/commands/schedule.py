"""
schedule subcommand
Materialized block and star schedules; optionally the variance-ladder bounds
checked on every block level against a generator profile.
"""

import logging
import math

from app.generators import variance_profile_of
from app.models import ScheduleConfig
from app.schedules import block_schedule, star_schedule
from app.variance_ladder import bracket_check

logger = logging.getLogger(__name__)

COLUMNS = ["schedule", "j", "t", "t_j", "H_j", "log_level", "level", "covers_window", "u", "square_bound_ok"]


def run(config: ScheduleConfig) -> dict:
    blocks = block_schedule(config.M, config.j_max, config.mode, config.base, config.growth)
    rows = [{"schedule": "block", **row} for row in blocks.rows()]
    summary = {
        "mode": blocks.mode,
        "M": blocks.M,
        "blocks": len(blocks.blocks),
        "levels": len(rows),
        "covers_from": blocks.covers_from(),
    }

    if config.star is not None:
        st = config.star
        star = star_schedule(st.window.to_family(), st.D, st.j_max, st.start)
        rows.extend({"schedule": "star", **row} for row in star.rows())
        summary["star"] = {"K": star.K, "D": star.D, "family": star.family, "steps": len(star.steps)}

    if config.bracket is not None:
        spec = config.bracket.generator.to_spec(config.seed)
        profile = variance_profile_of(spec, config.bracket.n_max)
        report = bracket_check(profile, blocks.grid(), config.bracket.D)
        summary["bracket"] = report.to_dict()
        summary["bracket_ok"] = report.ok
        summary["bracket_horizon_log"] = math.log(profile.max_level) if profile.max_level > 0 else None
    return {"rows": rows, "summary": summary, "columns": COLUMNS}
