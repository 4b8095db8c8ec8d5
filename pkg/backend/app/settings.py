"""
Runtime settings
Read from the environment (and a local .env file) once per process
"""

import os
from dataclasses import dataclass
from functools import lru_cache

import psutil
from dotenv import load_dotenv


@dataclass(frozen=True)
class Settings:
    """Process-wide knobs that are not part of an experiment config"""
    log_level: str
    log_dir: str
    sieve_max_x: int
    segment_size: int
    threads: int
    lacunary_max_length: int
    exact_convolution_limit: int
    points_per_octave: int
    cache_size: int


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    # accept 1e8 style values
    return int(float(raw))


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    load_dotenv()
    return Settings(
        log_level=os.getenv("LAB_LOG_LEVEL", "INFO").upper(),
        log_dir=os.getenv("LAB_LOG_DIR", "logs"),
        sieve_max_x=_int_env("LAB_SIEVE_MAX_X", 10**8),
        segment_size=_int_env("LAB_SEGMENT_SIZE", 2**18),
        threads=_int_env("LAB_THREADS", psutil.cpu_count(logical=True) or 1),
        lacunary_max_length=_int_env("LAB_LACUNARY_MAX_LENGTH", 20000),
        exact_convolution_limit=_int_env("LAB_EXACT_CONVOLUTION_LIMIT", 10**4),
        points_per_octave=_int_env("LAB_POINTS_PER_OCTAVE", 64),
        cache_size=_int_env("LAB_CACHE_SIZE", 4),
    )
