import os
import sys
import json
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

__version__ = "1.0.0"

# -------------------------------------------------
# Solver defaults
# -------------------------------------------------
DEFAULT_BISECTION_TOLERANCE = 1e-12
DEFAULT_MAX_BISECTION_ITERS = 200
DEFAULT_SWEEP_GRID_STEP = 1e-4
DEFAULT_SWEEP_REFINEMENT_ITERS = 60
DEFAULT_PHI_ITERATION_CAP = 10_000
DEFAULT_SERIES_TERM_FLOOR = 1e-18
DEFAULT_SWEEP_MAX_K = 60
DEFAULT_WORKERS = 1

# keeps ln(1/(2-2*alpha)) finite inside bisection
ALPHA_LOWER_GUARD = 1e-15
ALPHA_UPPER_GUARD = 1e-12
PSI_SCAN_STEP = 1e-3
SERIES_MAX_TERMS = 100_000
SWEEP_COARSE_POINTS = 256       # first-pass samples of the sweep grid

# -------------------------------------------------
# Caps
# -------------------------------------------------
TABLE_MAX_K = 60
SEQUENCE_MAX_TERMS = 100
MATERIALIZE_CAP = 10**5          # n^k for explicit point sets
SUMFREE_WORK_CAP = 10**8         # candidate tuples the sumfree predicate may visit
EXHAUSTIVE_CELL_CAP = 24         # n^k for exact search
DEFAULT_NODE_BUDGET = 10**8

# -------------------------------------------------
# Output
# -------------------------------------------------
DEFAULT_DECIMALS = 6
DEFAULT_CONFIG_FILE = "solver_config.json"


class SolverConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    bisection_tolerance: float = Field(DEFAULT_BISECTION_TOLERANCE, gt=0)
    max_bisection_iters: int = Field(DEFAULT_MAX_BISECTION_ITERS, gt=0)
    sweep_grid_step: float = Field(DEFAULT_SWEEP_GRID_STEP, gt=0)
    sweep_refinement_iters: int = Field(DEFAULT_SWEEP_REFINEMENT_ITERS, gt=0)
    phi_iteration_cap: int = Field(DEFAULT_PHI_ITERATION_CAP, gt=0)
    series_term_floor: float = Field(DEFAULT_SERIES_TERM_FLOOR, gt=0)
    sweep_max_k: int = Field(DEFAULT_SWEEP_MAX_K, gt=0)
    workers: int = Field(DEFAULT_WORKERS, ge=1)

    @model_validator(mode="after")
    def _tolerance_is_tight(self):
        if self.bisection_tolerance >= 1e-6:
            raise ValueError(
                f"bisection_tolerance must be < 1e-6, got {self.bisection_tolerance}"
            )
        return self


class OutputFormat(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["text", "csv", "json"] = "text"
    decimals: int = Field(DEFAULT_DECIMALS, ge=1, le=15)


def load_solver_config(filepath: Optional[str] = None, **overrides) -> SolverConfig:
    """
    Build a SolverConfig from an optional JSON file plus explicit overrides.
    A missing or unreadable file falls back to the defaults with a warning;
    out-of-range values are still rejected by validation.
    """
    data = {}
    if filepath:
        if not os.path.exists(filepath):
            print(f"⚠️ Warning: config file {filepath} not found, using defaults", file=sys.stderr)
        else:
            try:
                with open(filepath, "r", encoding="utf-8") as f:
                    loaded = json.load(f)
                if isinstance(loaded, dict):
                    data.update(loaded)
                else:
                    print(f"⚠️ Warning: {filepath} is not a JSON object, using defaults", file=sys.stderr)
            except json.JSONDecodeError as e:
                print(f"❌ Error: {filepath} is not valid JSON ({e}), using defaults", file=sys.stderr)

    data.update({key: value for key, value in overrides.items() if value is not None})
    return SolverConfig(**data)
