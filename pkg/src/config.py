import os
from dataclasses import dataclass
from typing import Optional, Tuple

from dotenv import load_dotenv

load_dotenv()


def _env_int(name: str, default: int) -> int:
    value = os.getenv(name)
    if value is None or not value.strip():
        return default
    try:
        return int(value)
    except ValueError:
        return default


APP_NAME = "hopfcheck"
APP_VERSION = "1.0.0"
SCHEMA_VERSION = 1
DSL_EXTENSION = ".hopf"

# Rewriting engine
DEFAULT_DEGREE_BOUND = _env_int("HOPFCHECK_DEGREE_BOUND", 8)
DEFAULT_ORDER = ("a", "b", "c", "d")  # glgh declares c, a, d, b instead
STEP_BUDGET = 10**6
MAX_RULES = 5000
NON_MEMBER_SLACK = 0
CANCEL_CACHE_SIZE = 1 << 16

# Linear-algebra oracle
DEFAULT_SEED = _env_int("HOPFCHECK_SEED", 42)
DEFAULT_TRIALS = _env_int("HOPFCHECK_TRIALS", 5)
ORACLE_DEGREE_CAP = 4
RANDOM_POINT_RANGE = 97
POINT_RETRIES = 50
RANK_AGREEMENT = (4, 5)  # equal ranks at no fewer than 4 of every 5 points

# Run archive
ARCHIVE_HOME = os.getenv("HOPFCHECK_HOME", os.path.join(os.path.expanduser("~"), ".hopfcheck"))
ARCHIVE_DB_NAME = "hopfcheck_runs.db"


@dataclass(frozen=True)
class EngineSettings:
    degree_bound: int = DEFAULT_DEGREE_BOUND
    order: Optional[Tuple[str, ...]] = None
    seed: int = DEFAULT_SEED
    trials: int = DEFAULT_TRIALS
    oracle_cap: int = ORACLE_DEGREE_CAP
    oracle: bool = True
    trace: bool = False
