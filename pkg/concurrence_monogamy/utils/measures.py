import logging
from typing import List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from concurrence_monogamy.config import DEFAULT_TOLERANCES, OptimizerSettings, Tolerances
from concurrence_monogamy.utils.errors import DimensionError, StateValidationError
from concurrence_monogamy.utils.roof import CutTerm, IsometrySearch, RoofObjective, support
from concurrence_monogamy.utils.tensor_core import (
    DensityMatrix,
    Partition,
    PureState,
    cut_for_state,
    kron,
    partial_trace,
    purity,
    reduced_state,
    require_parties,
)

logger = logging.getLogger(__name__)

Direction = Literal["upper-bound-of-min", "lower-bound-of-max"]

SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SPIN_FLIP = kron(SIGMA_Y, SIGMA_Y).real

FOUR_PARTY_CUTS: Tuple[Partition, ...] = tuple(
    Partition.of(a, b)
    for a, b in (
        ((0,), (1, 2, 3)),
        ((1,), (0, 2, 3)),
        ((2,), (0, 1, 3)),
        ((3,), (0, 1, 2)),
        ((0, 1), (2, 3)),
        ((0, 2), (1, 3)),
        ((0, 3), (1, 2)),
    )
)


class Ensemble(BaseModel):
    """Pure-state decomposition sum_i p_i |psi_i><psi_i| of ``realized``."""

    model_config = ConfigDict(frozen=True)

    members: List[Tuple[float, PureState]]
    realized: DensityMatrix

    @model_validator(mode="after")
    def _check_realization(self):
        tol = DEFAULT_TOLERANCES
        probabilities = np.array([p for p, _ in self.members])
        if np.any(probabilities < 0):
            raise StateValidationError("ensemble probabilities must be nonnegative")
        if abs(probabilities.sum() - 1.0) > tol.ensemble_probability:
            raise StateValidationError(
                f"ensemble probabilities sum to {probabilities.sum():.12f} "
                f"(tolerance ensemble_probability={tol.ensemble_probability:g})"
            )
        mixture = sum(p * np.outer(psi.amplitudes, psi.amplitudes.conj()) for p, psi in self.members)
        deviation = float(np.max(np.abs(mixture - self.realized.matrix)))
        if deviation > tol.ensemble_reconstruction:
            raise StateValidationError(
                f"ensemble reconstructs rho only to {deviation:.3e} "
                f"(tolerance ensemble_reconstruction={tol.ensemble_reconstruction:g})"
            )
        return self

    def average(self, cut: Partition) -> float:
        """Probability-weighted pure-state concurrence at ``cut``."""
        return float(sum(p * concurrence_pure(psi, cut) for p, psi in self.members))


class RoofEstimate(BaseModel):
    """Optimized decomposition average with the direction of its error."""

    model_config = ConfigDict(frozen=True)

    value: float = Field(ge=0)
    direction: Direction
    witness: Ensemble
    """Decomposition of rho whose average attains ``value``"""
    restarts_used: int = Field(ge=0)
    converged: bool
    exact: bool = False
    """True for rank-one states and for minima that reach 0 on a product witness"""
    cut: Optional[str] = None


def _clamp(value_squared: float, ceiling: float, what: str, tolerances: Tolerances) -> float:
    """sqrt of a squared concurrence kept inside [0, ceiling]."""
    if value_squared < 0:
        if -value_squared > tolerances.clamp_report:
            logger.warning(f"[Measure] {what}: clamping negative square {value_squared:.3e} to 0")
        return 0.0
    value = float(np.sqrt(value_squared))
    if value > ceiling:
        if value - ceiling > tolerances.clamp_report:
            logger.warning(f"[Measure] {what}: clamping {value:.12f} to ceiling {ceiling:.12f}")
        return ceiling
    return value


def ceiling_for(dim_a: int, dim_b: int) -> float:
    d = min(dim_a, dim_b)
    return float(np.sqrt(2.0 * (d - 1) / d))


def concurrence_pure(psi: PureState, cut: Partition, tolerances: Tolerances = DEFAULT_TOLERANCES) -> float:
    """C(|psi>) = sqrt(2 (1 - Tr rho_A^2)) across ``cut``."""
    cut_for_state(cut, psi.profile)
    rho_a = reduced_state(psi, cut.side_a)
    ceiling = ceiling_for(psi.profile.size_of(cut.side_a), psi.profile.size_of(cut.side_b))
    return _clamp(2.0 * (1.0 - purity(rho_a)), ceiling, f"C({cut})", tolerances)


def concurrence_two_qubit(rho: DensityMatrix, tolerances: Tolerances = DEFAULT_TOLERANCES) -> float:
    """Wootters closed form max{0, l1 - l2 - l3 - l4}.

    The l_i are the singular values of tau = W^T (sy x sy) W for rho = W W^dagger
    restricted to the support, which equal the square roots of the eigenvalues
    of rho (sy x sy) rho* (sy x sy) without taking square roots of rounding noise.
    """
    if tuple(rho.profile.dims) != (2, 2):
        raise DimensionError(f"two-qubit concurrence needs profile 2⊗2, got {rho.profile}")
    values, vectors = support(rho, tolerances)
    factor = vectors * np.sqrt(values)
    tau = factor.T @ SPIN_FLIP @ factor
    singular = np.sort(np.linalg.svd(tau, compute_uv=False))[::-1]
    singular = np.pad(singular, (0, 4 - singular.size))
    return float(max(0.0, singular[0] - singular[1] - singular[2] - singular[3]))


def _reduce_to_cut(rho: DensityMatrix, cut: Partition) -> Tuple[DensityMatrix, Partition]:
    cut.check_against(rho.profile)
    if cut.covers(rho.profile):
        return rho, cut
    logger.debug(f"[Measure] reducing {rho.profile} to parties {cut.parties} for cut {cut}")
    return partial_trace(rho, cut.parties), cut.relabeled()


def _ensemble(objective: RoofObjective, isometry: np.ndarray, rho: DensityMatrix) -> Ensemble:
    vectors, probabilities = objective.members(isometry)
    members = []
    for vector, probability in zip(vectors, probabilities):
        # members with vanishing weight carry no state
        if probability <= 1e-15:
            continue
        members.append((float(probability), PureState.normalized(vector, rho.profile)))
    return Ensemble(members=members, realized=rho)


def decompose_from_isometry(
    rho: DensityMatrix, mixing: np.ndarray, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> Ensemble:
    """Ensemble |phi_j> ~ sum_i mixing[j, i] sqrt(lambda_i) |e_i> on the numerical support of rho."""
    mixing = np.asarray(mixing, dtype=np.complex128)
    values, _ = support(rho, tolerances)
    rank = values.size
    if mixing.ndim != 2 or mixing.shape[1] != rank or mixing.shape[0] < rank:
        raise StateValidationError(f"mixing must be k x {rank} with k >= {rank}, got shape {mixing.shape}")
    deviation = float(np.max(np.abs(mixing.conj().T @ mixing - np.eye(rank))))
    if deviation > tolerances.isometry:
        raise StateValidationError(
            f"mixing is not an isometry: deviation {deviation:.3e} > isometry={tolerances.isometry:g}"
        )
    return _ensemble(RoofObjective(rho, [], tolerances), mixing, rho)


def _roof(
    rho: DensityMatrix,
    cut: Partition,
    opts: OptimizerSettings,
    sense: Literal["min", "max"],
    tolerances: Tolerances,
) -> RoofEstimate:
    state, local_cut = _reduce_to_cut(rho, cut)
    objective = RoofObjective(state, [CutTerm(local_cut.side_a, local_cut.side_b, 1.0)], tolerances)
    result = IsometrySearch(objective, sense, opts).run()
    value = _clamp(result.value**2, objective.ceiling, f"roof {sense} at {cut}", tolerances)
    direction = "upper-bound-of-min" if sense == "min" else "lower-bound-of-max"
    return RoofEstimate(
        value=value,
        direction=direction,
        witness=_ensemble(objective, result.isometry, state),
        restarts_used=result.restarts_used,
        converged=result.converged,
        exact=result.exact,
        cut=str(cut),
    )


def convex_roof_concurrence(
    rho: DensityMatrix, cut: Partition, opts: OptimizerSettings, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> RoofEstimate:
    """Minimum decomposition average of C at ``cut``; the estimate bounds the true value from above."""
    return _roof(rho, cut, opts, "min", tolerances)


def concurrence_assistance(
    rho: DensityMatrix, cut: Partition, opts: OptimizerSettings, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> RoofEstimate:
    """Maximum decomposition average of C at ``cut``; the estimate bounds the true value from below."""
    return _roof(rho, cut, opts, "max", tolerances)


def coa_upper_bound(rho: DensityMatrix, cut: Partition, tolerances: Tolerances = DEFAULT_TOLERANCES) -> float:
    """min over the two sides of sqrt(2 (1 - Tr rho_side^2))."""
    state, local_cut = _reduce_to_cut(rho, cut)
    caps = []
    for side in (local_cut.side_a, local_cut.side_b):
        d = state.profile.size_of(side)
        caps.append(_clamp(2.0 * (1.0 - purity(partial_trace(state, side))), ceiling_for(d, d), "coa cap", tolerances))
    return min(caps)


def concurrence_4partite_pure(psi: PureState, tolerances: Tolerances = DEFAULT_TOLERANCES) -> float:
    """sqrt of one quarter of the summed squared concurrences over the seven bipartitions."""
    require_parties(psi, 4, "four-partite concurrence")
    squares = [concurrence_pure(psi, cut, tolerances) ** 2 for cut in FOUR_PARTY_CUTS]
    return float(np.sqrt(sum(squares) / 4.0))


def convex_roof_4partite(
    rho: DensityMatrix, opts: OptimizerSettings, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> RoofEstimate:
    """Convex roof of the four-partite concurrence; an upper bound of the true minimum."""
    require_parties(rho, 4, "four-partite convex roof")
    objective = RoofObjective(rho, [CutTerm(c.side_a, c.side_b, 0.25) for c in FOUR_PARTY_CUTS], tolerances)
    result = IsometrySearch(objective, "min", opts).run()
    return RoofEstimate(
        value=_clamp(result.value**2, objective.ceiling, "four-partite roof", tolerances),
        direction="upper-bound-of-min",
        witness=_ensemble(objective, result.isometry, rho),
        restarts_used=result.restarts_used,
        converged=result.converged,
        exact=result.exact,
        cut="1|2|3|4",
    )

