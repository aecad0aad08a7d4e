"""Weighted monogamy inequalities and their certified evaluation.

Every number in a BoundReport says whether it is exact, an upper bound or a
lower bound of the true quantity. From those directions the report derives
what a pass or a failure actually establishes.
"""

import logging
from typing import Dict, List, Literal, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from concurrence_monogamy.config import DEFAULT_TOLERANCES, OptimizerSettings, Tolerances
from concurrence_monogamy.utils.errors import DimensionError, MonogamyError, StateValidationError, WeightError
from concurrence_monogamy.utils.measures import (
    concurrence_4partite_pure,
    concurrence_assistance,
    coa_upper_bound,
    concurrence_pure,
    concurrence_two_qubit,
    convex_roof_4partite,
    convex_roof_concurrence,
)
from concurrence_monogamy.utils.tensor_core import (
    Partition,
    PureState,
    StateLike,
    as_density,
    partial_trace,
    require_parties,
)
from concurrence_monogamy.utils.weights import (
    PAIRS,
    THEOREM3_PAIRS,
    Objective,
    Pair,
    WeightPoint,
    best_vertex,
    literal_coefficients,
    objective_pairs,
    pair_coefficients,
    theorem3_t,
    theorem4_from_coefficients,
    theorem4_from_terms,
)

logger = logging.getLogger(__name__)

TermDirection = Literal["exact", "upper-bound", "lower-bound"]
Certificate = Literal["exact", "sufficient", "necessary", "heuristic", "bound-only"]
Quantity = Literal["concurrence", "assistance"]


class TermProvenance(BaseModel):
    """Where one squared quantity in a report came from."""

    model_config = ConfigDict(frozen=True)

    label: str
    squared: float = Field(ge=0)
    direction: TermDirection
    method: str
    coefficient: Optional[float] = None
    restarts: int = 0
    converged: bool = True


class BoundReport(BaseModel):
    """lhs and rhs are squared quantities; margin is the signed slack in the direction of ``relation``."""

    model_config = ConfigDict(frozen=True)

    inequality: str
    lhs: Optional[float]
    rhs: float
    relation: Literal[">=", "<="] = ">="
    margin: Optional[float]
    satisfied: Optional[bool]
    tolerance: float
    weights: WeightPoint
    certificate: Certificate
    lhs_term: Optional[TermProvenance] = None
    terms: List[TermProvenance] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def _margin_matches_verdict(self):
        if (self.margin is None) != (self.satisfied is None):
            raise MonogamyError("margin and satisfied must both be present or both absent")
        if self.margin is not None and self.satisfied != (self.margin >= -self.tolerance):
            raise MonogamyError(f"satisfied={self.satisfied} contradicts margin {self.margin:.3e}")
        return self


def combine_directions(directions: Sequence[TermDirection]) -> Optional[TermDirection]:
    """Direction of a nonnegative combination; None when upper and lower bounds mix."""
    inexact = set(directions) - {"exact"}
    if not inexact:
        return "exact"
    if len(inexact) == 1:
        return inexact.pop()
    return None


def certificate_for(
    lhs: Optional[TermDirection], rhs: Optional[TermDirection], relation: str = ">="
) -> Certificate:
    """What a pass means given the error directions of both sides.

    ``sufficient``: the larger side is not over-estimated and the smaller side
    is not under-estimated, so a pass holds for the true values.
    ``necessary``: the opposite; the inequality on true values implies a pass.
    """
    if lhs is None:
        return "bound-only"
    big, small = (lhs, rhs) if relation == ">=" else (rhs, lhs)
    if big == "exact" and small == "exact":
        return "exact"
    if big in ("exact", "lower-bound") and small in ("exact", "upper-bound"):
        return "sufficient"
    if big in ("exact", "upper-bound") and small in ("exact", "lower-bound"):
        return "necessary"
    return "heuristic"


class PairEvaluator:
    """Squared pair quantities of one state, cached per (pair, quantity)."""

    def __init__(self, state: StateLike, opts: OptimizerSettings, tolerances: Tolerances = DEFAULT_TOLERANCES):
        self.state = state
        self.rho = as_density(state)
        self.opts = opts
        self.tolerances = tolerances
        self._cache: Dict[Tuple[Pair, Quantity], TermProvenance] = {}

    def term(self, pair: Pair, quantity: Quantity) -> TermProvenance:
        key = (tuple(pair), quantity)
        if key not in self._cache:
            self._cache[key] = self._evaluate(*key)
        return self._cache[key]

    def squares(self, pairs: Sequence[Pair], quantity: Quantity) -> Dict[Pair, float]:
        return {tuple(pair): self.term(pair, quantity).squared for pair in pairs}

    def _evaluate(self, pair: Pair, quantity: Quantity) -> TermProvenance:
        i, j = pair
        symbol = "C" if quantity == "concurrence" else "Ca"
        label = f"{symbol}^2(rho_{i}{j})"
        cut = Partition.of((i,), (j,))
        if quantity == "concurrence" and tuple(self.rho.profile.dims[k] for k in pair) == (2, 2):
            value = concurrence_two_qubit(partial_trace(self.rho, pair), self.tolerances)
            return TermProvenance(label=label, squared=value**2, direction="exact", method="two-qubit closed form")
        if quantity == "concurrence":
            estimate = convex_roof_concurrence(self.rho, cut, self.opts, self.tolerances)
            inexact: TermDirection = "upper-bound"
        else:
            estimate = concurrence_assistance(self.rho, cut, self.opts, self.tolerances)
            inexact = "lower-bound"
        if estimate.exact:
            method = "rank-one reduction" if len(estimate.witness.members) == 1 else "product decomposition"
        else:
            method = "convex roof search" if quantity == "concurrence" else "assistance search"
        return TermProvenance(
            label=label,
            squared=estimate.value**2,
            direction="exact" if estimate.exact else inexact,
            method=method,
            restarts=estimate.restarts_used,
            converged=estimate.converged,
        )


def _rest(parties: int, first: int = 0) -> Tuple[int, ...]:
    return tuple(i for i in range(parties) if i != first)


def _lhs_term(state: StateLike, cut: Partition, opts: OptimizerSettings, tolerances: Tolerances) -> TermProvenance:
    label = f"C^2({cut})"
    if isinstance(state, PureState):
        value = concurrence_pure(state, cut, tolerances)
        return TermProvenance(label=label, squared=value**2, direction="exact", method="pure-state formula")
    estimate = convex_roof_concurrence(state, cut, opts, tolerances)
    if estimate.exact:
        method = "rank-one state" if len(estimate.witness.members) == 1 else "product decomposition"
    else:
        method = "convex roof search"
    return TermProvenance(
        label=label,
        squared=estimate.value**2,
        direction="exact" if estimate.exact else "upper-bound",
        method=method,
        restarts=estimate.restarts_used,
        converged=estimate.converged,
    )


def _report(
    inequality: str,
    lhs_term: Optional[TermProvenance],
    terms: List[TermProvenance],
    weights: WeightPoint,
    tolerances: Tolerances,
    relation: Literal[">=", "<="] = ">=",
    notes: Optional[List[str]] = None,
    rhs: Optional[float] = None,
    tolerance: Optional[float] = None,
) -> BoundReport:
    """Assemble a report; terms with coefficient 0 were never evaluated and are not listed."""
    if rhs is None:
        rhs = float(sum(term.coefficient * term.squared for term in terms))
    rhs_direction = combine_directions([term.direction for term in terms])
    lhs_direction = lhs_term.direction if lhs_term is not None else None
    all_exact = rhs_direction == "exact" and lhs_direction in ("exact", None)
    if tolerance is None:
        tolerance = tolerances.exact_inequality if all_exact else tolerances.estimated_inequality
    margin = satisfied = lhs = None
    if lhs_term is not None:
        lhs = lhs_term.squared
        margin = lhs - rhs if relation == ">=" else rhs - lhs
        satisfied = bool(margin >= -tolerance)
    report = BoundReport(
        inequality=inequality,
        lhs=lhs,
        rhs=rhs,
        relation=relation,
        margin=margin,
        satisfied=satisfied,
        tolerance=tolerance,
        weights=weights,
        certificate=certificate_for(lhs_direction, rhs_direction, relation),
        lhs_term=lhs_term,
        terms=terms,
        notes=notes or [],
    )
    verdict = "n/a" if satisfied is None else ("satisfied" if satisfied else "VIOLATED")
    logger.info(
        f"[Monogamy] {inequality}: lhs={lhs} {relation} rhs={rhs:.9f} margin={margin} "
        f"{verdict} ({report.certificate}, tolerance {tolerance:g})"
    )
    return report


def _weighted_terms(
    evaluator: PairEvaluator, coefficients: Dict[Pair, float], quantity: Quantity
) -> List[TermProvenance]:
    terms = []
    for pair, coefficient in coefficients.items():
        if coefficient == 0:
            continue
        terms.append(evaluator.term(pair, quantity).model_copy(update={"coefficient": float(coefficient)}))
    return terms


def _pair_sum(
    state: StateLike,
    coefficients: Dict[Pair, float],
    quantity: Quantity,
    inequality: str,
    weights: WeightPoint,
    opts: OptimizerSettings,
    tolerances: Tolerances,
    evaluator: Optional[PairEvaluator],
) -> BoundReport:
    evaluator = evaluator or PairEvaluator(state, opts, tolerances)
    cut = Partition.of((0,), _rest(state.profile.parties))
    lhs_term = _lhs_term(state, cut, opts, tolerances)
    terms = _weighted_terms(evaluator, coefficients, quantity)
    return _report(inequality, lhs_term, terms, weights, tolerances)


def check_theorem1(
    psi: PureState,
    x: float,
    opts: OptimizerSettings,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    evaluator: Optional[PairEvaluator] = None,
) -> BoundReport:
    """C^2(A|BC) >= x Ca^2(rho_AB) + (1 - x) Ca^2(rho_AC) for a pure tripartite state.

    The Ca terms are optimizer lower bounds, so the inequality implies a pass
    and a failure beyond tolerance would contradict it.
    """
    if not isinstance(psi, PureState):
        raise StateValidationError("theorem1 needs a pure state")
    require_parties(psi, 3, "theorem1")
    weights = WeightPoint(x=x)
    return _pair_sum(
        psi, {(0, 1): x, (0, 2): 1.0 - x}, "assistance", "theorem1", weights, opts, tolerances, evaluator
    )


def check_theorem2(
    rho: StateLike,
    x: float,
    opts: OptimizerSettings,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    evaluator: Optional[PairEvaluator] = None,
) -> BoundReport:
    """C^2(rho_{A|B1B2}) >= x C^2(rho_AB1) + (1 - x) C^2(rho_AB2)."""
    require_parties(rho, 3, "theorem2")
    weights = WeightPoint(x=x)
    return _pair_sum(
        rho, {(0, 1): x, (0, 2): 1.0 - x}, "concurrence", "theorem2", weights, opts, tolerances, evaluator
    )


def check_corollary(
    state: StateLike,
    p: Sequence[float],
    opts: OptimizerSettings,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    evaluator: Optional[PairEvaluator] = None,
) -> BoundReport:
    """C^2(A|B1...B_{N-1}) >= sum_i p_i Q^2(rho_ABi).

    Q is the concurrence of assistance for a PureState input and the
    concurrence for a DensityMatrix input.
    """
    parties = state.profile.parties
    if parties < 3:
        raise DimensionError(f"the corollary needs at least 3 subsystems, got profile {state.profile}")
    if len(p) != parties - 1:
        raise WeightError(f"p needs {parties - 1} weights for {parties} subsystems, got {len(p)}")
    weights = WeightPoint(p=tuple(p))
    quantity: Quantity = "assistance" if isinstance(state, PureState) else "concurrence"
    coefficients = {(0, j + 1): weight for j, weight in enumerate(weights.p)}
    return _pair_sum(state, coefficients, quantity, "corollary", weights, opts, tolerances, evaluator)


def _strengthened(state: StateLike, strengthen_qubits: bool) -> bool:
    return strengthen_qubits and isinstance(state, PureState) and state.profile.is_qubits()


def theorem3_rhs(
    psi: StateLike,
    w: WeightPoint,
    opts: OptimizerSettings,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    strengthen_qubits: bool = True,
    evaluator: Optional[PairEvaluator] = None,
) -> BoundReport:
    """C^2(A1A2|B1B2) >= sum_ij T_ij C^2(rho_{AiBj}) on the cut 0,1|2,3.

    On pure 2x2x2x2 states the qubit form of T is used unless
    ``strengthen_qubits`` is False. A mixed input is accepted and evaluated
    through the convex-roof extension of the bound.
    """
    require_parties(psi, 4, "theorem3")
    w.require("t3_x", "t3_y")
    strengthen = _strengthened(psi, strengthen_qubits)
    t_weights = theorem3_t(w.t3_x, w.t3_y, strengthen)
    evaluator = evaluator or PairEvaluator(psi, opts, tolerances)
    notes = []
    if strengthen:
        notes.append("qubit form T11=x1+x3, T12=x2+x3, T21=x1+x4, T22=x2+x4")
    if not isinstance(psi, PureState):
        notes.append("mixed input: bound applied through the convex-roof extension")
    lhs_term = _lhs_term(psi, Partition.of((0, 1), (2, 3)), opts, tolerances)
    terms = _weighted_terms(evaluator, dict(zip(THEOREM3_PAIRS, t_weights)), "concurrence")
    return _report("theorem3", lhs_term, terms, w, tolerances, notes=notes)


def theorem4_lower_bound(
    rho: StateLike,
    w: WeightPoint,
    opts: OptimizerSettings,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    estimate_lhs: bool = False,
    evaluator: Optional[PairEvaluator] = None,
) -> BoundReport:
    """C^2(rho_1234) >= 1/4 sum_{i<j} L_ij C^2(rho_ij).

    The bound is evaluated twice, through the aggregated L_ij and through the
    seven un-aggregated cut bounds; the two must agree to weight_consistency.
    The left-hand side is exact for pure input. For mixed input it is the
    four-partite convex roof, computed only when ``estimate_lhs`` is set or
    the state has rank one.
    """
    require_parties(rho, 4, "theorem4")
    w.require("t4_p", "t4_x")
    evaluator = evaluator or PairEvaluator(rho, opts, tolerances)
    coefficients = pair_coefficients(w)
    terms = _weighted_terms(evaluator, coefficients, "concurrence")
    squares = {pair: 0.0 for pair in PAIRS}
    squares.update({pair: evaluator.term(pair, "concurrence").squared for pair in PAIRS if coefficients[pair] != 0})

    aggregated = theorem4_from_coefficients(w, squares)
    by_terms = theorem4_from_terms(w, squares)
    if abs(aggregated - by_terms) > tolerances.weight_consistency:
        raise MonogamyError(
            f"aggregated bound {aggregated:.15f} and cut-by-cut bound {by_terms:.15f} differ by more than "
            f"weight_consistency={tolerances.weight_consistency:g}"
        )

    notes = []
    literal = literal_coefficients(w)
    differing = [pair for pair in PAIRS if abs(literal[pair] - coefficients[pair]) > tolerances.weight_consistency]
    if differing:
        shown = ", ".join(f"L{i}{j}={coefficients[(i, j)]:.6g} (printed {literal[(i, j)]:.6g})" for i, j in differing)
        notes.append(f"pair coefficients from the cut-by-cut derivation: {shown}")
        logger.warning(
            f"[Monogamy] theorem4: the printed L_ij (p_ij + p_ji + 2) differs from the derivation for "
            f"{len(differing)} pairs; using the derivation"
        )

    lhs_term = None
    if isinstance(rho, PureState):
        value = concurrence_4partite_pure(rho, tolerances)
        lhs_term = TermProvenance(label="C^2(1|2|3|4)", squared=value**2, direction="exact", method="pure-state formula")
    elif estimate_lhs or rho.rank(tolerances) == 1:
        estimate = convex_roof_4partite(rho, opts, tolerances)
        lhs_term = TermProvenance(
            label="C^2(1|2|3|4)",
            squared=estimate.value**2,
            direction="exact" if estimate.exact else "upper-bound",
            method="rank-one state" if estimate.exact else "convex roof search",
            restarts=estimate.restarts_used,
            converged=estimate.converged,
        )
    else:
        notes.append("mixed-state left-hand side not estimated; pass estimate_lhs to compute it")
    if not isinstance(rho, PureState):
        notes.append("2|2 bounds on a mixed state use Theorem-3 weights through the convex-roof extension")
    return _report("theorem4", lhs_term, terms, w, tolerances, notes=notes, rhs=aggregated)


def _quantity_for(objective: Objective, state: StateLike) -> Quantity:
    if objective == "theorem1" or (objective == "corollary" and isinstance(state, PureState)):
        return "assistance"
    return "concurrence"


def optimize_weights(
    objective: Objective,
    state: StateLike,
    opts: OptimizerSettings,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    strengthen_qubits: bool = True,
    estimate_lhs: bool = False,
) -> Tuple[WeightPoint, BoundReport]:
    """Weight vertex with the largest right-hand side and the report at that vertex.

    Pair quantities are computed once; every vertex reuses them.
    """
    parties = state.profile.parties
    if objective in ("theorem3", "theorem4"):
        require_parties(state, 4, objective)
    elif objective in ("theorem1", "theorem2"):
        require_parties(state, 3, objective)
    elif parties < 3:
        raise DimensionError(f"the corollary needs at least 3 subsystems, got profile {state.profile}")

    evaluator = PairEvaluator(state, opts, tolerances)
    squares = evaluator.squares(objective_pairs(objective, parties), _quantity_for(objective, state))
    strengthen = objective == "theorem3" and _strengthened(state, strengthen_qubits)
    best, value, count = best_vertex(objective, squares, parties, strengthen)

    if objective == "theorem1":
        report = check_theorem1(state, best.x, opts, tolerances, evaluator)
    elif objective == "theorem2":
        report = check_theorem2(state, best.x, opts, tolerances, evaluator)
    elif objective == "corollary":
        report = check_corollary(state, best.p, opts, tolerances, evaluator)
    elif objective == "theorem3":
        report = theorem3_rhs(state, best, opts, tolerances, strengthen_qubits, evaluator)
    else:
        report = theorem4_lower_bound(state, best, opts, tolerances, estimate_lhs, evaluator)
    note = f"weights: best of {count} vertices (rhs {value:.9g})"
    return best, report.model_copy(update={"notes": report.notes + [note]})


def ckw_sum(
    state: StateLike,
    opts: OptimizerSettings,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    inequality: str = "ckw-sum",
) -> BoundReport:
    """C^2(A|rest) >= sum_i C^2(rho_ABi) with unit weights, in any dimension.

    Qubit states always satisfy it; a negative margin witnesses that the plain
    sum fails beyond qubits.
    """
    parties = state.profile.parties
    if parties < 3:
        raise DimensionError(f"{inequality} needs at least 3 subsystems, got profile {state.profile}")
    coefficients = {(0, j): 1.0 for j in range(1, parties)}
    return _pair_sum(state, coefficients, "concurrence", inequality, WeightPoint(), opts, tolerances, None)


def check_qubit_ckw(
    state: StateLike, opts: OptimizerSettings, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> BoundReport:
    """CKW at power 2 for qubit systems; pair terms use the two-qubit closed form."""
    if not state.profile.is_qubits():
        raise DimensionError(f"qubit CKW needs every local dimension to be 2, got {state.profile}")
    return ckw_sum(state, opts, tolerances, inequality="qubit-ckw")


def check_dual_coa(
    psi: PureState, opts: OptimizerSettings, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> BoundReport:
    """C^2(A|B1...B_{N-1}) <= sum_i Ca^2(rho_ABi) for pure qubit states.

    The Ca estimates are lower bounds, so a pass is sufficient. A failed
    check is retried with escalation_factor times more restarts, at most
    max_escalations times.
    """
    if not isinstance(psi, PureState):
        raise StateValidationError("the dual assistance inequality needs a pure state")
    if not psi.profile.is_qubits():
        raise DimensionError(f"the dual assistance inequality needs qubits, got {psi.profile}")
    parties = psi.profile.parties
    if parties < 3:
        raise DimensionError(f"the dual assistance inequality needs at least 3 subsystems, got {psi.profile}")
    lhs_term = _lhs_term(psi, Partition.of((0,), _rest(parties)), opts, tolerances)
    coefficients = {(0, j): 1.0 for j in range(1, parties)}
    base = opts.restarts_for(4)
    notes: List[str] = []
    attempt_opts = opts
    for attempt in range(opts.max_escalations + 1):
        evaluator = PairEvaluator(psi, attempt_opts, tolerances)
        terms = _weighted_terms(evaluator, coefficients, "assistance")
        report = _report("dual-coa", lhs_term, terms, WeightPoint(), tolerances, relation="<=", notes=list(notes))
        if report.satisfied or attempt == opts.max_escalations:
            return report
        restarts = base * opts.escalation_factor ** (attempt + 1)
        logger.warning(
            f"[Monogamy] dual-coa margin {report.margin:.3e} below -{report.tolerance:g}; retrying with {restarts} restarts"
        )
        notes.append(f"escalated to {restarts} restarts after margin {report.margin:.3e}")
        attempt_opts = opts.with_restarts(restarts)
    return report


def pair_squares(state: StateLike, opts: OptimizerSettings, tolerances: Tolerances = DEFAULT_TOLERANCES) -> Dict[Pair, float]:
    """C^2 of every pair reduction of a four-partite state."""
    require_parties(state, 4, "pair squares")
    return PairEvaluator(state, opts, tolerances).squares(PAIRS, "concurrence")


def check_coa_cap(
    rho: StateLike,
    cut: Partition,
    opts: OptimizerSettings,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> BoundReport:
    """Ca estimate against the reduced-purity cap min_side sqrt(2 (1 - Tr rho_side^2)).

    Every decomposition average is at most the cap, so the estimate must stay
    below it to exact_inequality even though it is a search result.
    """
    rho = as_density(rho)
    cap = coa_upper_bound(rho, cut, tolerances)
    estimate = concurrence_assistance(rho, cut, opts, tolerances)
    lhs_term = TermProvenance(label=f"cap^2({cut})", squared=cap**2, direction="exact", method="reduced purities")
    term = TermProvenance(
        label=f"Ca^2({cut})",
        squared=estimate.value**2,
        direction="exact" if estimate.exact else "lower-bound",
        method="rank-one state" if estimate.exact else "assistance search",
        coefficient=1.0,
        restarts=estimate.restarts_used,
        converged=estimate.converged,
    )
    return _report("lemma1", lhs_term, [term], WeightPoint(), tolerances, tolerance=tolerances.exact_inequality)
