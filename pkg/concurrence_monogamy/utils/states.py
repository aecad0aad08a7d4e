"""Named states and seeded random states."""

import itertools
import logging
from typing import Callable, Dict, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from concurrence_monogamy.utils.errors import StateValidationError
from concurrence_monogamy.utils.tensor_core import DensityMatrix, DimProfile, PureState, StateLike, profile_of

logger = logging.getLogger(__name__)

ParameterValue = Union[int, float, str]


def state_generator(seed: int) -> np.random.Generator:
    """Counter-based Philox stream, identical on every platform for a given seed."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def _basis(profile: DimProfile, *kets: Sequence[int], coefficients: Optional[Sequence[complex]] = None) -> PureState:
    amplitudes = np.zeros(profile.total, dtype=np.complex128)
    coefficients = coefficients or [1.0] * len(kets)
    for ket, coefficient in zip(kets, coefficients):
        amplitudes[profile.index_of(ket)] += coefficient
    return PureState.normalized(amplitudes, profile)


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise StateValidationError(message)


def bell() -> PureState:
    """(|01> + |10>) / sqrt(2)."""
    return _basis(profile_of(2, 2), (0, 1), (1, 0))


def phi_plus() -> PureState:
    """(|00> + |11>) / sqrt(2)."""
    return _basis(profile_of(2, 2), (0, 0), (1, 1))


def ghz(n: int = 3, d: int = 2) -> PureState:
    _require(n >= 2 and d >= 2, f"ghz needs n >= 2 and d >= 2, got n={n}, d={d}")
    return _basis(profile_of(*[d] * n), *[(i,) * n for i in range(d)])


def w(n: int = 3) -> PureState:
    _require(n >= 2, f"w needs n >= 2, got n={n}")
    return _basis(profile_of(*[2] * n), *[tuple(int(i == j) for i in range(n)) for j in range(n)])


def max_entangled(d: int = 2) -> PureState:
    _require(d >= 2, f"max_entangled needs d >= 2, got d={d}")
    return _basis(profile_of(d, d), *[(i, i) for i in range(d)])


def paper_state_223() -> PureState:
    """(|000> + |111> + |phi+>|2>) / sqrt(3) on 2x2x3, with |phi+> = (|01> + |10>) / sqrt(2)."""
    root = 1.0 / np.sqrt(2.0)
    return _basis(profile_of(2, 2, 3), (0, 0, 0), (1, 1, 1), (0, 1, 2), (1, 0, 2), coefficients=[1.0, 1.0, root, root])


def _parity(permutation: Sequence[int]) -> int:
    inversions = sum(1 for a, b in itertools.combinations(permutation, 2) if a > b)
    return -1 if inversions % 2 else 1


def antisymmetric_qutrit() -> PureState:
    """Totally antisymmetric three-qutrit state, digits 1..3 written as 0..2."""
    permutations = list(itertools.permutations(range(3)))
    return _basis(profile_of(3, 3, 3), *permutations, coefficients=[_parity(p) for p in permutations])


def werner(t: float) -> DensityMatrix:
    """(1 - t) I/4 + t |Phi+><Phi+| on two qubits."""
    _require(0.0 <= t <= 1.0, f"t must lie in [0, 1], got {t}")
    matrix = (1.0 - t) * np.eye(4) / 4.0 + t * phi_plus().projector().matrix
    return DensityMatrix(matrix=matrix, profile=profile_of(2, 2))


def paper_family_2223(t: float) -> DensityMatrix:
    """(1 - t) I/24 + t |psi><psi| on 2x2x2x3 with |psi> = (|0000> + |0012> + |1100> + |1112>) / 2.

    The identity is normalized on the full 24-dimensional space.
    """
    _require(0.0 <= t <= 1.0, f"t must lie in [0, 1], got {t}")
    profile = profile_of(2, 2, 2, 3)
    psi = _basis(profile, (0, 0, 0, 0), (0, 0, 1, 2), (1, 1, 0, 0), (1, 1, 1, 2))
    matrix = (1.0 - t) * np.eye(profile.total) / profile.total + t * psi.projector().matrix
    return DensityMatrix(matrix=matrix, profile=profile)


def product_state(profile: DimProfile, digits: Optional[Sequence[int]] = None) -> PureState:
    digits = tuple(digits) if digits is not None else (0,) * profile.parties
    _require(len(digits) == profile.parties, f"product_state needs {profile.parties} digits, got {len(digits)}")
    _require(all(0 <= k < d for k, d in zip(digits, profile.dims)), f"digits {digits} out of range for {profile}")
    return _basis(profile, digits)


def haar_random_pure(profile: DimProfile, seed: int) -> PureState:
    """Normalized complex Gaussian vector, which is Haar distributed."""
    rng = state_generator(seed)
    vector = rng.normal(size=profile.total) + 1j * rng.normal(size=profile.total)
    return PureState.normalized(vector, profile)


def random_density(profile: DimProfile, rank: int, seed: int) -> DensityMatrix:
    """Reduction of a Haar pure state on profile x C^rank to ``profile``."""
    _require(1 <= rank <= profile.total, f"rank must lie in 1..{profile.total}, got {rank}")
    joint = haar_random_pure(profile_of(profile.total, rank), seed)
    factor = joint.amplitudes.reshape(profile.total, rank)
    matrix = factor @ factor.conj().T
    return DensityMatrix(matrix=(matrix + matrix.conj().T) / 2, profile=profile)


def parse_profile(text: str) -> DimProfile:
    """``"2x2x3"`` (also ``2,2,3`` or ``2⊗2⊗3``) to a DimProfile."""
    tokens = text.replace("⊗", "x").replace(",", "x").lower().split("x")
    try:
        return profile_of(*[int(token) for token in tokens if token.strip()])
    except ValueError as exc:
        raise StateValidationError(f"cannot read dimension profile {text!r}") from exc


def _int(parameters: Dict[str, ParameterValue], key: str, default: Optional[int] = None) -> int:
    if key not in parameters:
        if default is None:
            raise StateValidationError(f"missing parameter {key!r}")
        return default
    return int(parameters[key])


def _float(parameters: Dict[str, ParameterValue], key: str) -> float:
    if key not in parameters:
        raise StateValidationError(f"missing parameter {key!r}")
    return float(parameters[key])


def _digits(parameters: Dict[str, ParameterValue]) -> Optional[Sequence[int]]:
    raw = parameters.get("digits")
    return None if raw is None else [int(ch) for ch in str(raw) if ch.isdigit()]


CATALOG: Dict[str, Callable[[Dict[str, ParameterValue]], StateLike]] = {
    "bell": lambda p: bell(),
    "phi-plus": lambda p: phi_plus(),
    "ghz": lambda p: ghz(_int(p, "n", 3), _int(p, "d", 2)),
    "w": lambda p: w(_int(p, "n", 3)),
    "max-entangled": lambda p: max_entangled(_int(p, "d", 2)),
    "paper-223": lambda p: paper_state_223(),
    "antisymmetric-qutrit": lambda p: antisymmetric_qutrit(),
    "paper-2223": lambda p: paper_family_2223(_float(p, "t")),
    "werner": lambda p: werner(_float(p, "t")),
    "haar": lambda p: haar_random_pure(parse_profile(str(p.get("dims", "2x2x2"))), _int(p, "seed", 0)),
    "random-density": lambda p: random_density(
        parse_profile(str(p.get("dims", "2x2"))), _int(p, "rank", 2), _int(p, "seed", 0)
    ),
    "product": lambda p: product_state(parse_profile(str(p.get("dims", "2x2x2"))), _digits(p)),
}


class StateSpec(BaseModel):
    """A catalog name plus its parameters; enough to rebuild the state."""

    model_config = ConfigDict(frozen=True)

    name: str
    parameters: Dict[str, ParameterValue] = Field(default_factory=dict)

    def build(self) -> StateLike:
        if self.name not in CATALOG:
            raise StateValidationError(f"unknown state {self.name!r}; known: {', '.join(sorted(CATALOG))}")
        state = CATALOG[self.name](dict(self.parameters))
        logger.debug(f"[States] built {self.name} {self.parameters} on {state.profile}")
        return state

    @property
    def profile(self) -> DimProfile:
        return self.build().profile

    def label(self) -> str:
        if not self.parameters:
            return self.name
        return self.name + "(" + ",".join(f"{k}={v}" for k, v in sorted(self.parameters.items())) + ")"


def build_state(name: str, **parameters: ParameterValue) -> StateLike:
    return StateSpec(name=name, parameters=parameters).build()
