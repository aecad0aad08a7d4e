"""Weight simplices of the monogamy bounds and their aggregation into pair coefficients.

Subsystems are indexed 0..3. The Theorem-3 cut is A1 A2 | B1 B2 = 0,1 | 2,3, so
the coefficient T_ij multiplies C^2(rho_{A_i B_j}) for the pairs

    T11 -> (0, 2)    T12 -> (0, 3)    T21 -> (1, 2)    T22 -> (1, 3)

Each 2|2 bipartition of Theorem 4 is written with the side holding subsystem 0
first, (a1 a2 | b1 b2), and its four weights are the T components of the cross
pairs (a1 b1), (a1 b2), (a2 b1), (a2 b2) in that order.
"""

import itertools
import logging
from typing import Dict, Iterator, List, Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from concurrence_monogamy.config import DEFAULT_TOLERANCES
from concurrence_monogamy.utils.errors import WeightError

logger = logging.getLogger(__name__)

Pair = Tuple[int, int]
Objective = Literal["theorem1", "theorem2", "corollary", "theorem3", "theorem4"]

PAIRS: Tuple[Pair, ...] = tuple(itertools.combinations(range(4), 2))
THEOREM3_PAIRS: Tuple[Pair, ...] = ((0, 2), (0, 3), (1, 2), (1, 3))
BIPARTITIONS: Tuple[Tuple[Tuple[int, int], Tuple[int, int]], ...] = (
    ((0, 1), (2, 3)),
    ((0, 2), (1, 3)),
    ((0, 3), (1, 2)),
)


def _check_simplex(vector: Sequence[float], what: str) -> Tuple[float, ...]:
    values = tuple(float(v) for v in vector)
    if not values:
        raise WeightError(f"{what} is empty")
    if min(values) < 0:
        raise WeightError(f"{what} has a negative entry: {values}")
    total = sum(values)
    if abs(total - 1.0) > DEFAULT_TOLERANCES.simplex:
        raise WeightError(f"{what} sums to {total:.15f}, not 1 (tolerance simplex={DEFAULT_TOLERANCES.simplex:g})")
    return values


def _check_blocks(blocks, count: int, length: int, what: str):
    if blocks is None:
        return None
    blocks = tuple(blocks)
    if len(blocks) != count:
        raise WeightError(f"{what} needs {count} vectors, got {len(blocks)}")
    checked = []
    for index, block in enumerate(blocks):
        block = tuple(block)
        if len(block) != length:
            raise WeightError(f"{what}[{index}] needs length {length}, got {len(block)}")
        checked.append(_check_simplex(block, f"{what}[{index}]"))
    return tuple(checked)


class WeightPoint(BaseModel):
    """One point of the weight polytope; only the fields the chosen bound reads are set."""

    model_config = ConfigDict(frozen=True)

    x: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    """Weight of C^2(rho_AB1) against (1 - x) for C^2(rho_AB2)"""
    p: Optional[Tuple[float, ...]] = None
    """Corollary weights, one per B party"""
    t3_x: Optional[Tuple[float, ...]] = None
    """Theorem-3 x_1..x_4"""
    t3_y: Optional[Tuple[Tuple[float, ...], ...]] = None
    """Theorem-3 (y_t1, y_t2) for t = 1..4"""
    t4_p: Optional[Tuple[Tuple[float, ...], ...]] = None
    """Theorem-4 p_ti: for each t, weights over the other three subsystems in ascending order"""
    t4_x: Optional[Tuple[Tuple[float, ...], ...]] = None
    """Theorem-4 cross-pair weights of the bipartitions 01|23, 02|13, 03|12"""

    @field_validator("p", mode="after")
    @classmethod
    def _p_simplex(cls, value):
        return None if value is None else _check_simplex(value, "p")

    @field_validator("t3_x", mode="after")
    @classmethod
    def _t3_x_simplex(cls, value):
        if value is not None and len(value) != 4:
            raise WeightError(f"t3_x needs length 4, got {len(value)}")
        return None if value is None else _check_simplex(value, "t3_x")

    @field_validator("t3_y", mode="after")
    @classmethod
    def _t3_y_simplices(cls, value):
        return _check_blocks(value, 4, 2, "t3_y")

    @field_validator("t4_p", mode="after")
    @classmethod
    def _t4_p_simplices(cls, value):
        return _check_blocks(value, 4, 3, "t4_p")

    @field_validator("t4_x", mode="after")
    @classmethod
    def _t4_x_simplices(cls, value):
        return _check_blocks(value, 3, 4, "t4_x")

    def require(self, *fields: str) -> None:
        missing = [name for name in fields if getattr(self, name) is None]
        if missing:
            raise WeightError(f"weight point is missing {', '.join(missing)}")


def uniform_theorem3() -> WeightPoint:
    return WeightPoint(t3_x=(0.25,) * 4, t3_y=((0.5, 0.5),) * 4)


def uniform_theorem4() -> WeightPoint:
    return WeightPoint(t4_p=((1 / 3, 1 / 3, 1 / 3),) * 4, t4_x=((0.25,) * 4,) * 3)


def theorem3_t(t3_x: Sequence[float], t3_y: Sequence[Sequence[float]], strengthen_qubits: bool = False) -> Tuple[float, ...]:
    """(T11, T12, T21, T22).

    With ``strengthen_qubits`` every y weight counts as 1, the qubit form
    T11 = x1 + x3, T12 = x2 + x3, T21 = x1 + x4, T22 = x2 + x4.
    """
    x1, x2, x3, x4 = t3_x
    if strengthen_qubits:
        return (x1 + x3, x2 + x3, x1 + x4, x2 + x4)
    y1, y2, y3, y4 = t3_y
    return (
        x1 * y1[0] + x3 * y3[0],
        x2 * y2[0] + x3 * y3[1],
        x1 * y1[1] + x4 * y4[0],
        x2 * y2[1] + x4 * y4[1],
    )


def realize_t_weights(t: Sequence[float]) -> WeightPoint:
    """Theorem-3 weights whose T coefficients equal ``t`` = (T11, T12, T21, T22)."""
    t11, t12, t21, t22 = _check_simplex(t, "T")
    return WeightPoint(t3_x=(t11, t22, t12, t21), t3_y=((1.0, 0.0), (0.0, 1.0), (0.0, 1.0), (1.0, 0.0)))


def cross_pairs(bipartition: Tuple[Tuple[int, int], Tuple[int, int]]) -> Tuple[Pair, ...]:
    (a1, a2), (b1, b2) = bipartition
    return tuple(tuple(sorted(pair)) for pair in ((a1, b1), (a1, b2), (a2, b1), (a2, b2)))


def others(t: int) -> Tuple[int, ...]:
    return tuple(i for i in range(4) if i != t)


def p_weight(t4_p, i: int, j: int) -> float:
    """p_ij: the share subsystem i gives to pair (i, j) in its 1|3 bound."""
    return t4_p[i][others(i).index(j)]


def pair_coefficients(w: WeightPoint) -> Dict[Pair, float]:
    """Aggregated L_ij = p_ij + p_ji + the cross-pair weights of (i, j) in the two bipartitions separating them."""
    w.require("t4_p", "t4_x")
    coefficients = {pair: p_weight(w.t4_p, *pair) + p_weight(w.t4_p, *reversed(pair)) for pair in PAIRS}
    for block, bipartition in zip(w.t4_x, BIPARTITIONS):
        for weight, pair in zip(block, cross_pairs(bipartition)):
            coefficients[pair] += weight
    return coefficients


def literal_coefficients(w: WeightPoint) -> Dict[Pair, float]:
    """L_ij read with every x component of both separating bipartitions summed, i.e. p_ij + p_ji + 2."""
    w.require("t4_p")
    return {pair: p_weight(w.t4_p, *pair) + p_weight(w.t4_p, *reversed(pair)) + 2.0 for pair in PAIRS}


def theorem4_terms(w: WeightPoint, squares: Dict[Pair, float]) -> List[Tuple[str, float]]:
    """The seven un-aggregated bounds: four 1|3 sums with p_ti and three 2|2 sums with Theorem-3 T weights."""
    w.require("t4_p", "t4_x")
    terms = []
    for t in range(4):
        value = sum(p_weight(w.t4_p, t, j) * squares[tuple(sorted((t, j)))] for j in others(t))
        rest = ",".join(map(str, others(t)))
        terms.append((f"{t}|{rest}", value))
    for block, bipartition in zip(w.t4_x, BIPARTITIONS):
        realized = realize_t_weights(block)
        t_weights = theorem3_t(realized.t3_x, realized.t3_y)
        value = sum(tw * squares[pair] for tw, pair in zip(t_weights, cross_pairs(bipartition)))
        (a1, a2), (b1, b2) = bipartition
        terms.append((f"{a1},{a2}|{b1},{b2}", value))
    return terms


def theorem4_from_terms(w: WeightPoint, squares: Dict[Pair, float]) -> float:
    return 0.25 * sum(value for _, value in theorem4_terms(w, squares))


def theorem4_from_coefficients(w: WeightPoint, squares: Dict[Pair, float]) -> float:
    coefficients = pair_coefficients(w)
    return 0.25 * sum(coefficients[pair] * squares[pair] for pair in PAIRS)


def paper_weights_2223() -> WeightPoint:
    """Weights reducing the four-partite bound to C^2(rho_01).

    p_01 = p_10 = 1, p_20 = p_30 = 1; bipartition 01|23 puts its weight on
    pair (0, 2), bipartitions 02|13 and 03|12 put theirs on pair (0, 1).
    """
    return WeightPoint(
        t4_p=((1.0, 0.0, 0.0), (1.0, 0.0, 0.0), (1.0, 0.0, 0.0), (1.0, 0.0, 0.0)),
        t4_x=((1.0, 0.0, 0.0, 0.0), (1.0, 0.0, 0.0, 0.0), (1.0, 0.0, 0.0, 0.0)),
    )


def objective_pairs(objective: Objective, parties: int) -> Tuple[Pair, ...]:
    """Pairs whose squared concurrences the objective's right-hand side reads."""
    if objective in ("theorem1", "theorem2", "corollary"):
        return tuple((0, j) for j in range(1, parties))
    if objective == "theorem3":
        return THEOREM3_PAIRS
    return PAIRS


def rhs_from_pairs(
    objective: Objective, w: WeightPoint, squares: Dict[Pair, float], strengthen_qubits: bool = False
) -> float:
    """Right-hand side of ``objective`` at ``w`` from precomputed squared pair concurrences."""
    if objective in ("theorem1", "theorem2"):
        w.require("x")
        return w.x * squares[(0, 1)] + (1.0 - w.x) * squares[(0, 2)]
    if objective == "corollary":
        w.require("p")
        return sum(p * squares[(0, j + 1)] for j, p in enumerate(w.p))
    if objective == "theorem3":
        w.require("t3_x", "t3_y")
        t_weights = theorem3_t(w.t3_x, w.t3_y, strengthen_qubits)
        return sum(tw * squares[pair] for tw, pair in zip(t_weights, THEOREM3_PAIRS))
    return theorem4_from_coefficients(w, squares)


def _corners(length: int) -> List[Tuple[float, ...]]:
    return [tuple(1.0 if i == j else 0.0 for i in range(length)) for j in range(length)]


def vertices(objective: Objective, parties: int = 3) -> Iterator[WeightPoint]:
    """Every vertex of the objective's weight polytope in lexicographic order."""
    if objective in ("theorem1", "theorem2"):
        for x in (0.0, 1.0):
            yield WeightPoint(x=x)
    elif objective == "corollary":
        for p in _corners(parties - 1):
            yield WeightPoint(p=p)
    elif objective == "theorem3":
        for t3_x, *t3_y in itertools.product(_corners(4), *[_corners(2)] * 4):
            yield WeightPoint(t3_x=t3_x, t3_y=tuple(t3_y))
    else:
        for choice in itertools.product(*[_corners(3)] * 4, *[_corners(4)] * 3):
            yield WeightPoint(t4_p=choice[:4], t4_x=choice[4:])


def random_point(objective: Objective, rng: np.random.Generator, parties: int = 3) -> WeightPoint:
    """Uniform interior point of the weight polytope."""

    def simplex(length: int) -> Tuple[float, ...]:
        draw = rng.dirichlet(np.ones(length))
        draw[-1] = 1.0 - float(np.sum(draw[:-1]))
        return tuple(float(v) for v in np.clip(draw, 0.0, None))

    if objective in ("theorem1", "theorem2"):
        return WeightPoint(x=float(rng.uniform()))
    if objective == "corollary":
        return WeightPoint(p=simplex(parties - 1))
    if objective == "theorem3":
        return WeightPoint(t3_x=simplex(4), t3_y=tuple(simplex(2) for _ in range(4)))
    return WeightPoint(t4_p=tuple(simplex(3) for _ in range(4)), t4_x=tuple(simplex(4) for _ in range(3)))


def best_vertex(
    objective: Objective, squares: Dict[Pair, float], parties: int = 3, strengthen_qubits: bool = False
) -> Tuple[WeightPoint, float, int]:
    """Vertex maximizing the right-hand side; the first strict maximum wins ties.

    The right-hand side is affine in each simplex block separately, so its
    maximum over the polytope sits on a vertex.
    """
    best, best_value, count = None, -np.inf, 0
    for point in vertices(objective, parties):
        count += 1
        value = rhs_from_pairs(objective, point, squares, strengthen_qubits)
        if value > best_value:
            best, best_value = point, value
    logger.info(f"[Weights] {objective}: best of {count} vertices gives rhs {best_value:.9f}")
    return best, float(best_value), count
