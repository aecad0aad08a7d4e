import os
import logging
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

logger = logging.getLogger(__name__)

DEFAULT_SEED = 20240917

SEED_ENV_VAR = "MONOGAMY_SEED"
LOG_LEVEL_ENV_VAR = "MONOGAMY_LOG_LEVEL"


class Tolerances(BaseModel):
    """Every numeric tolerance used for pass/fail decisions."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    hermitian: float = Field(default=1e-10, gt=0)
    """Maximum elementwise deviation |rho - rho^dagger|"""
    trace: float = Field(default=1e-10, gt=0)
    """Maximum |Tr(rho) - 1|"""
    psd: float = Field(default=1e-10, gt=0)
    """Smallest eigenvalue allowed is -psd"""
    norm: float = Field(default=1e-10, gt=0)
    """Maximum | ||psi|| - 1 | for pure states"""
    rank_cutoff: float = Field(default=1e-10, gt=0)
    """Eigenvalues at or below this are outside the numerical support"""
    isometry: float = Field(default=1e-10, gt=0)
    """Maximum elementwise deviation of V^dagger V from the identity"""
    ensemble_probability: float = Field(default=1e-10, gt=0)
    """Maximum |sum p_i - 1| for an ensemble"""
    ensemble_reconstruction: float = Field(default=1e-8, gt=0)
    """Maximum elementwise deviation of sum p_i |psi_i><psi_i| from rho"""
    simplex: float = Field(default=1e-12, gt=0)
    """Maximum |sum w - 1| for weight vectors"""
    estimated_inequality: float = Field(default=5e-3, gt=0)
    """Inequality slack when any term is an optimizer estimate"""
    exact_inequality: float = Field(default=1e-9, gt=0)
    """Inequality slack when every term is a closed form"""
    clamp_report: float = Field(default=1e-9, gt=0)
    """Clamping larger than this is logged"""
    weight_consistency: float = Field(default=1e-9, gt=0)
    """Agreement required between the aggregated and term-by-term Theorem-4 bounds"""


DEFAULT_TOLERANCES = Tolerances()


class OptimizerSettings(BaseModel):
    """Settings of the isometry search behind convex-roof estimates."""

    model_config = ConfigDict(frozen=True)

    seed: int = Field(ge=0)
    """Root seed; restart i draws from the i-th spawned child stream"""
    restarts: Optional[int] = Field(default=None, ge=1)
    """Random isometry samples; None picks 64 (total <= 16) or 256"""
    extra_members: int = Field(default=2, ge=0)
    """Decompositions use k from r up to min(r^2, r + extra_members) members"""
    patience: int = Field(default=16, ge=1)
    """Trailing window over which the best sample must stay unchanged"""
    refine_rank: int = Field(default=3, ge=1)
    """A sample is refined when it ranks among this many best samples seen so far"""
    refine_tolerance: float = Field(default=1e-8, gt=0)
    """A sweep gaining less than this halves the rotation step"""
    initial_step: float = Field(default=0.5, gt=0)
    """First Givens rotation angle tried during refinement"""
    min_step: float = Field(default=1e-6, gt=0)
    """Refinement stops once the rotation step drops below this"""
    max_sweeps: int = Field(default=400, ge=1)
    """Hard cap on refinement sweeps per candidate"""
    escalation_factor: int = Field(default=4, ge=2)
    """Restart multiplier applied when the dual-CoA check fails"""
    max_escalations: int = Field(default=2, ge=0)
    """How many times the dual-CoA check may escalate before failing"""

    def restarts_for(self, total: int) -> int:
        if self.restarts is not None:
            return self.restarts
        return 64 if total <= 16 else 256

    def with_restarts(self, restarts: int) -> "OptimizerSettings":
        return self.model_copy(update={"restarts": restarts})


def default_seed() -> int:
    """Seed from MONOGAMY_SEED, falling back to DEFAULT_SEED."""
    raw = os.getenv(SEED_ENV_VAR)
    if not raw:
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        logger.warning(f"[Config] Ignoring non-integer {SEED_ENV_VAR}={raw!r}")
        return DEFAULT_SEED


def default_log_level() -> str:
    return os.getenv(LOG_LEVEL_ENV_VAR, "WARNING").upper()
