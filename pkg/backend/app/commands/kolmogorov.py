"""
kolmogorov subcommand
Kolmogorov maximal inequality cells over (generator, lambda, k), plus optional
condition (c) estimates.
"""

import logging

from app.localization import condition_c_estimate, kolmogorov_check
from app.models import KolmogorovConfig

logger = logging.getLogger(__name__)

COLUMNS = ["generator", "lambda", "k", "trials", "empirical", "bound", "stderr"]


def run(config: KolmogorovConfig) -> dict:
    rows = []
    failing = 0
    max_ratio = 0.0
    for gen in config.generators:
        spec = gen.to_spec(config.seed)
        for k in config.ks:
            for lam in config.lambdas:
                result = kolmogorov_check(spec, k, lam, config.trials, config.seed, config.threads)
                rows.append({"generator": spec.label, **result.to_dict()})
                failing += not result.passes
                max_ratio = max(max_ratio, result.empirical / result.bound)
                logger.debug(f"kolmogorov cell {spec.label} k={k} lambda={lam} -> {result.empirical:.5f}")

    estimates = []
    for check in config.condition_c:
        spec = config.generators[0].to_spec(config.seed)
        estimate = condition_c_estimate(spec, check.n, check.m, check.lam, check.trials, config.seed, config.threads)
        estimates.append(estimate)

    summary = {
        "cells": len(rows),
        "failing_cells": failing,
        "max_ratio": max_ratio,
        "condition_c": estimates,
    }
    return {"rows": rows, "summary": summary, "columns": COLUMNS}
