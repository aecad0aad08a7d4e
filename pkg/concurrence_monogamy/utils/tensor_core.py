"""Dense linear algebra over multipartite index structures.

Amplitude index i encodes the subsystem digits in big-endian mixed radix
over ``DimProfile.dims``: the leftmost subsystem is the most significant
digit, matching kets written |i1 i2 ... iN>.
"""

import logging
from functools import reduce
from typing import Annotated, Iterable, List, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from concurrence_monogamy.config import DEFAULT_TOLERANCES, Tolerances
from concurrence_monogamy.utils.errors import (
    DimensionError,
    PartitionError,
    StateValidationError,
    SubsystemIndexError,
)

logger = logging.getLogger(__name__)


def _frozen_array(value, dtype=np.complex128) -> np.ndarray:
    array = np.array(value, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


class DimProfile(BaseModel):
    """Local dimensions m1, ..., mN of the subsystems."""

    model_config = ConfigDict(frozen=True)

    dims: Tuple[Annotated[int, Field(ge=1)], ...] = Field(min_length=1)

    @property
    def total(self) -> int:
        return int(np.prod(self.dims))

    @property
    def parties(self) -> int:
        return len(self.dims)

    def restrict(self, keep: Sequence[int]) -> "DimProfile":
        return DimProfile(dims=tuple(self.dims[i] for i in keep))

    def size_of(self, indices: Iterable[int]) -> int:
        return int(np.prod([self.dims[i] for i in indices]))

    def digits(self, index: int) -> Tuple[int, ...]:
        return tuple(int(d) for d in np.unravel_index(index, self.dims))

    def index_of(self, digits: Sequence[int]) -> int:
        return int(np.ravel_multi_index(tuple(digits), self.dims))

    def is_qubits(self) -> bool:
        return all(d == 2 for d in self.dims)

    def __str__(self) -> str:
        return "⊗".join(str(d) for d in self.dims)


def profile_of(*dims: int) -> DimProfile:
    return DimProfile(dims=tuple(dims))


class PureState(BaseModel):
    """Normalized amplitude vector on a multipartite profile."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    amplitudes: np.ndarray
    profile: DimProfile

    @field_validator("amplitudes", mode="before")
    @classmethod
    def _as_vector(cls, value):
        return _frozen_array(np.ravel(value))

    @model_validator(mode="after")
    def _check_norm(self):
        if self.amplitudes.shape != (self.profile.total,):
            raise StateValidationError(
                f"amplitude vector has length {self.amplitudes.size}, profile {self.profile} needs {self.profile.total}"
            )
        deviation = abs(np.linalg.norm(self.amplitudes) - 1.0)
        if deviation > DEFAULT_TOLERANCES.norm:
            raise StateValidationError(
                f"state norm deviates from 1 by {deviation:.3e} (tolerance norm={DEFAULT_TOLERANCES.norm:g})"
            )
        return self

    @classmethod
    def normalized(cls, amplitudes, profile: DimProfile) -> "PureState":
        vector = np.asarray(amplitudes, dtype=np.complex128).ravel()
        norm = np.linalg.norm(vector)
        if norm == 0:
            raise StateValidationError("cannot normalize the zero vector")
        return cls(amplitudes=vector / norm, profile=profile)

    def projector(self) -> "DensityMatrix":
        matrix = np.outer(self.amplitudes, self.amplitudes.conj())
        return DensityMatrix.model_construct(matrix=_frozen_array(matrix), profile=self.profile)

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.profile.dims)


class DensityReport(BaseModel):
    """Outcome of validate_density, with the tolerances it applied."""

    hermitian_deviation: float
    trace_deviation: float
    min_eigenvalue: float
    hermitian_tolerance: float
    trace_tolerance: float
    psd_tolerance: float
    failures: List[str] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


class DensityMatrix(BaseModel):
    """Hermitian, trace-one, positive semidefinite matrix on a profile."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    matrix: np.ndarray
    profile: DimProfile

    @field_validator("matrix", mode="before")
    @classmethod
    def _as_matrix(cls, value):
        return _frozen_array(value)

    @model_validator(mode="after")
    def _check_state(self):
        side = self.profile.total
        if self.matrix.shape != (side, side):
            raise StateValidationError(
                f"matrix shape {self.matrix.shape} does not match profile {self.profile} ({side}x{side})"
            )
        report = validate_density(self.matrix)
        if not report.passed:
            raise StateValidationError("; ".join(report.failures))
        return self

    @classmethod
    def trusted(cls, matrix: np.ndarray, profile: DimProfile) -> "DensityMatrix":
        """Wrap a matrix produced by an invariant-preserving operation without re-validating."""
        return cls.model_construct(matrix=_frozen_array(matrix), profile=profile)

    def rank(self, tolerances: Tolerances = DEFAULT_TOLERANCES) -> int:
        values, _ = hermitian_eig(self, tolerances)
        return int(np.count_nonzero(values > tolerances.rank_cutoff))


class Partition(BaseModel):
    """Ordered split of subsystem indices into the two sides of a cut."""

    model_config = ConfigDict(frozen=True)

    side_a: Tuple[Annotated[int, Field(ge=0)], ...]
    side_b: Tuple[Annotated[int, Field(ge=0)], ...]

    @field_validator("side_a", "side_b", mode="after")
    @classmethod
    def _sorted_nonempty(cls, value):
        if not value:
            raise PartitionError("both sides of a cut must be nonempty")
        if len(set(value)) != len(value):
            raise PartitionError(f"duplicate subsystem index in {value}")
        return tuple(sorted(value))

    @model_validator(mode="after")
    def _disjoint(self):
        overlap = set(self.side_a) & set(self.side_b)
        if overlap:
            raise PartitionError(f"cut sides overlap on {sorted(overlap)}")
        return self

    @classmethod
    def of(cls, side_a: Iterable[int], side_b: Iterable[int]) -> "Partition":
        return cls(side_a=tuple(side_a), side_b=tuple(side_b))

    @classmethod
    def parse(cls, text: str) -> "Partition":
        """Parse ``"0,2|1,3"`` style cut syntax; ``"0|12"`` reads as ``"0|1,2"``."""
        if text.count("|") != 1:
            raise PartitionError(f"cut {text!r} must contain exactly one '|'")
        try:
            side_a, side_b = (_parse_side(side) for side in text.split("|"))
        except ValueError as exc:
            raise PartitionError(f"cut {text!r} contains a non-integer index") from exc
        return cls(side_a=side_a, side_b=side_b)

    @property
    def parties(self) -> Tuple[int, ...]:
        return tuple(sorted(self.side_a + self.side_b))

    def swapped(self) -> "Partition":
        return Partition(side_a=self.side_b, side_b=self.side_a)

    def covers(self, profile: DimProfile) -> bool:
        return self.parties == tuple(range(profile.parties))

    def check_against(self, profile: DimProfile) -> None:
        bad = [i for i in self.parties if i >= profile.parties]
        if bad:
            raise PartitionError(
                f"cut {self} uses indices {bad} but the profile {profile} has {profile.parties} subsystems"
            )

    def relabeled(self) -> "Partition":
        """The same cut expressed on the reduced state of its own parties."""
        position = {party: i for i, party in enumerate(self.parties)}
        return Partition(
            side_a=tuple(position[i] for i in self.side_a),
            side_b=tuple(position[i] for i in self.side_b),
        )

    def __str__(self) -> str:
        return ",".join(map(str, self.side_a)) + "|" + ",".join(map(str, self.side_b))


def _parse_side(text: str) -> Tuple[int, ...]:
    text = text.strip()
    if "," not in text and text.isdigit():
        return tuple(int(ch) for ch in text)
    return tuple(int(tok) for tok in text.split(",") if tok.strip())


StateLike = Union[PureState, DensityMatrix]


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.kron(a, b)


def kron_all(*operands: np.ndarray) -> np.ndarray:
    return reduce(np.kron, operands)


def _checked_keep(keep: Sequence[int], profile: DimProfile) -> Tuple[int, ...]:
    keep = tuple(int(i) for i in keep)
    if not keep:
        raise SubsystemIndexError("keep must name at least one subsystem")
    if any(i < 0 or i >= profile.parties for i in keep):
        raise SubsystemIndexError(f"keep={keep} out of range for {profile.parties} subsystems")
    if any(b <= a for a, b in zip(keep, keep[1:])):
        raise SubsystemIndexError(f"keep={keep} must be strictly increasing")
    return keep


def partial_trace(rho: DensityMatrix, keep: Sequence[int]) -> DensityMatrix:
    """Trace out every subsystem not listed in ``keep``."""
    keep = _checked_keep(keep, rho.profile)
    dims = rho.profile.dims
    n = len(dims)
    if keep == tuple(range(n)):
        return rho
    tensor = rho.matrix.reshape(dims + dims)
    rows = list(range(n))
    cols = [i + n if i in keep else i for i in range(n)]
    out = list(keep) + [i + n for i in keep]
    reduced = np.einsum(tensor, rows + cols, out)
    side = int(np.prod([dims[i] for i in keep]))
    return DensityMatrix.trusted(reduced.reshape(side, side), rho.profile.restrict(keep))


def grouped_amplitudes(vectors: np.ndarray, dims: Sequence[int], side_a: Sequence[int], side_b: Sequence[int]) -> np.ndarray:
    """Reshape a batch of vectors (m, total) into (m, dim_A, dim_B) for the cut side_a|side_b."""
    vectors = np.asarray(vectors)
    m = vectors.shape[0]
    tensor = vectors.reshape((m,) + tuple(dims))
    order = [0] + [1 + i for i in side_a] + [1 + i for i in side_b]
    dim_a = int(np.prod([dims[i] for i in side_a]))
    dim_b = int(np.prod([dims[i] for i in side_b]))
    return tensor.transpose(order).reshape(m, dim_a, dim_b)


def reduced_state(state: StateLike, keep: Sequence[int]) -> DensityMatrix:
    """Reduced density matrix of a pure or mixed state on ``keep``."""
    if isinstance(state, DensityMatrix):
        return partial_trace(state, keep)
    keep = _checked_keep(keep, state.profile)
    rest = [i for i in range(state.profile.parties) if i not in keep]
    if not rest:
        return state.projector()
    block = grouped_amplitudes(state.amplitudes[None, :], state.profile.dims, keep, rest)[0]
    return DensityMatrix.trusted(block @ block.conj().T, state.profile.restrict(keep))


def as_density(state: StateLike) -> DensityMatrix:
    return state.projector() if isinstance(state, PureState) else state


def purity(rho: DensityMatrix) -> float:
    """Tr(rho^2)."""
    value = float(np.real(np.einsum("ij,ji->", rho.matrix, rho.matrix)))
    return min(max(value, 0.0), 1.0)


def hermitian_deviation(matrix: np.ndarray) -> float:
    return float(np.max(np.abs(matrix - matrix.conj().T))) if matrix.size else 0.0


def hermitian_eig(
    rho: Union[DensityMatrix, np.ndarray], tolerances: Tolerances = DEFAULT_TOLERANCES
) -> Tuple[np.ndarray, np.ndarray]:
    """Eigenvalues in descending order and the matching eigenvector columns.

    Vectors inside a degenerate eigenspace are whatever the solver returns.
    """
    matrix = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=np.complex128)
    deviation = hermitian_deviation(matrix)
    if deviation > tolerances.hermitian:
        raise StateValidationError(
            f"matrix is not Hermitian: deviation {deviation:.3e} > hermitian={tolerances.hermitian:g}"
        )
    values, vectors = np.linalg.eigh(matrix)
    return values[::-1].copy(), vectors[:, ::-1].copy()


def validate_density(
    rho: Union[DensityMatrix, np.ndarray], tolerances: Tolerances = DEFAULT_TOLERANCES
) -> DensityReport:
    """Report Hermiticity, trace and positivity of a candidate density matrix."""
    matrix = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=np.complex128)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {matrix.shape}")
    herm = hermitian_deviation(matrix)
    trace_dev = float(abs(np.trace(matrix) - 1.0))
    # eigenvalues of the Hermitian part; a non-Hermitian input already fails above
    min_eig = float(np.linalg.eigvalsh((matrix + matrix.conj().T) / 2)[0])
    failures = []
    if herm > tolerances.hermitian:
        failures.append(f"hermitian deviation {herm:.3e} > hermitian={tolerances.hermitian:g}")
    if trace_dev > tolerances.trace:
        failures.append(f"trace deviation {trace_dev:.3e} > trace={tolerances.trace:g}")
    if min_eig < -tolerances.psd:
        failures.append(f"minimum eigenvalue {min_eig:.3e} < -psd={tolerances.psd:g}")
    return DensityReport(
        hermitian_deviation=herm,
        trace_deviation=trace_dev,
        min_eigenvalue=min_eig,
        hermitian_tolerance=tolerances.hermitian,
        trace_tolerance=tolerances.trace,
        psd_tolerance=tolerances.psd,
        failures=failures,
    )


def require_parties(state: StateLike, count: int, what: str) -> None:
    if state.profile.parties != count:
        raise DimensionError(f"{what} needs exactly {count} subsystems, got profile {state.profile}")


def cut_for_state(cut: Partition, profile: DimProfile) -> Partition:
    cut.check_against(profile)
    if not cut.covers(profile):
        raise PartitionError(f"cut {cut} does not cover all {profile.parties} subsystems of {profile}")
    return cut

