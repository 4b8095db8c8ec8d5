"""
kubilius subcommand
Sieve histogram of a statistic of omega(m, r) over m <= x against the
prime-model law, with the TV distance and its error budget.
"""

import logging

from app.arithmetic import kubilius_compare
from app.models import KubiliusConfig
from app.sieve import build_sieve
from app.utils.summary_generator import regime_caveat

logger = logging.getLogger(__name__)

COLUMNS = ["value", "sieve", "model", "model_mc"]


def _at(values, i):
    return values[i] if values is not None and i < len(values) else 0.0


def run(config: KubiliusConfig) -> dict:
    table = build_sieve(config.x, workers=config.threads)
    report = kubilius_compare(
        table, config.x, config.r, config.rule.to_rule(),
        trials=config.trials, seed=config.seed, c=config.c, workers=config.threads,
    )
    sieve = report.pop("sieve_histogram")
    exact = report.pop("model_histogram", None)
    mc = report.pop("model_histogram_mc", None)
    size = max(len(sieve), len(exact or []), len(mc or []))
    rows = [
        {
            "value": i,
            "sieve": _at(sieve, i),
            "model": _at(exact, i) if exact is not None else None,
            "model_mc": _at(mc, i) if mc is not None else None,
        }
        for i in range(size)
    ]
    summary = {**report, "regime_caveat": regime_caveat(config.x)}
    return {"rows": rows, "summary": summary, "columns": COLUMNS}
