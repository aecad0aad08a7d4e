"""Isometry search behind the convex-roof and assistance estimates.

Every decomposition of rho = sum_i lambda_i |e_i><e_i| into k pure members
is |phi_j> = sum_i U[j, i] sqrt(lambda_i) |e_i> for a k x r isometry U
(r = numerical rank). The search samples Haar isometries over a range of
k, then refines with Givens rotations on pairs of members every sample
that ranked among the best few seen so far when it was drawn. The
spectral decomposition is always refined as well. Restart i always draws
from the i-th spawned child stream, so adding restarts can only improve
the result.
"""

import logging
from typing import List, Literal, NamedTuple, Sequence, Tuple

import numpy as np
from scipy.stats import unitary_group

from concurrence_monogamy.config import DEFAULT_TOLERANCES, OptimizerSettings, Tolerances
from concurrence_monogamy.utils.tensor_core import DensityMatrix, grouped_amplitudes, hermitian_eig

logger = logging.getLogger(__name__)

Sense = Literal["min", "max"]


class CutTerm(NamedTuple):
    side_a: Tuple[int, ...]
    side_b: Tuple[int, ...]
    weight: float


class SearchResult(NamedTuple):
    value: float
    isometry: np.ndarray
    restarts_used: int
    converged: bool
    exact: bool


def restart_generator(seed: int, index: int) -> np.random.Generator:
    """Counter-based stream for restart ``index``; independent of the restart count."""
    child = np.random.SeedSequence(seed, spawn_key=(index,))
    return np.random.Generator(np.random.Philox(child))


def haar_isometry(k: int, r: int, rng: np.random.Generator) -> np.ndarray:
    return unitary_group.rvs(k, random_state=rng)[:, :r]


def member_counts(rank: int, extra_members: int) -> List[int]:
    upper = min(rank * rank, rank + extra_members)
    return list(range(rank, max(rank, upper) + 1))


def support(rho: DensityMatrix, tolerances: Tolerances = DEFAULT_TOLERANCES) -> Tuple[np.ndarray, np.ndarray]:
    """Eigenvalues above the rank cutoff and their eigenvectors."""
    values, vectors = hermitian_eig(rho, tolerances)
    keep = values > tolerances.rank_cutoff
    return values[keep], vectors[:, keep]


class RoofObjective:
    """Sum over members of p_j * f(phi_j / sqrt(p_j)) for a concurrence-type f.

    f^2 = sum_c w_c * 2 * (1 - Tr rho_{A_c}^2) over the configured cuts, so the
    weighted member term is sqrt(sum_c w_c * 2 * (p_j^2 - ||M_c M_c^dagger||_F^2))
    with M_c the unnormalized member reshaped across cut c.
    """

    def __init__(self, rho: DensityMatrix, cuts: Sequence[CutTerm], tolerances: Tolerances = DEFAULT_TOLERANCES):
        self.profile = rho.profile
        self.cuts = list(cuts)
        self.values, self.vectors = support(rho, tolerances)
        self.rank = int(self.values.size)
        # row i is sqrt(lambda_i) e_i
        self.basis = (self.vectors * np.sqrt(self.values)).T
        self.blocks = [
            grouped_amplitudes(self.basis, self.profile.dims, cut.side_a, cut.side_b) for cut in self.cuts
        ]
        self.weights = np.array([cut.weight for cut in self.cuts])
        sides = [min(block.shape[1], block.shape[2]) for block in self.blocks]
        self.ceiling = float(np.sqrt(sum(cut.weight * 2.0 * (d - 1) / d for cut, d in zip(self.cuts, sides))))

    def member_terms(self, rows: np.ndarray) -> np.ndarray:
        """Weighted member contributions for isometry rows of shape (m, r)."""
        squared = np.zeros(rows.shape[0])
        probabilities = None
        for weight, block in zip(self.weights, self.blocks):
            members = np.einsum("ji,iab->jab", rows, block)
            if probabilities is None:
                probabilities = np.einsum("jab,jab->j", members, members.conj()).real
            if members.shape[1] <= members.shape[2]:
                gram = members @ members.conj().transpose(0, 2, 1)
            else:
                gram = members.conj().transpose(0, 2, 1) @ members
            purity = np.einsum("jab,jab->j", gram, gram.conj()).real
            squared += weight * 2.0 * (probabilities**2 - purity)
        return np.sqrt(np.clip(squared, 0.0, None))

    def evaluate(self, isometry: np.ndarray) -> float:
        return float(np.sum(self.member_terms(isometry)))

    def members(self, isometry: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Unnormalized member vectors and their probabilities."""
        vectors = isometry @ self.basis
        probabilities = np.einsum("ja,ja->j", vectors, vectors.conj()).real
        return vectors, probabilities


class IsometrySearch:
    """Two-phase search: Haar sampling over k, then Givens refinement of record samples."""

    def __init__(
        self,
        objective: RoofObjective,
        sense: Sense,
        opts: OptimizerSettings,
    ):
        self.objective = objective
        self.sense = sense
        self.opts = opts

    def _better(self, candidate: float, incumbent: float) -> bool:
        return candidate < incumbent if self.sense == "min" else candidate > incumbent

    def run(self) -> SearchResult:
        rank = self.objective.rank
        if rank == 1:
            isometry = np.ones((1, 1), dtype=np.complex128)
            return SearchResult(self.objective.evaluate(isometry), isometry, 0, True, True)

        restarts = self.opts.restarts_for(self.objective.profile.total)
        counts = member_counts(rank, self.opts.extra_members)
        # the spectral decomposition is refined as record -1 next to the Haar records
        spectral = np.eye(rank, dtype=np.complex128)
        records: List[Tuple[int, np.ndarray, float]] = [(-1, spectral, self.objective.evaluate(spectral))]
        leaders: List[float] = []
        last_record = 0
        for index in range(restarts):
            rng = restart_generator(self.opts.seed, index)
            k = counts[index % len(counts)]
            isometry = haar_isometry(k, rank, rng)
            value = self.objective.evaluate(isometry)
            logger.debug(f"[Roof] restart {index}: k={k} sampled value {value:.9f}")
            if not leaders or self._better(value, leaders[0]):
                last_record = index
            # ranks only against earlier samples, so the refined set grows with the restart count
            if len(leaders) < self.opts.refine_rank or self._better(value, leaders[-1]):
                records.append((index, isometry, value))
                leaders = sorted(leaders + [value], reverse=self.sense == "max")[: self.opts.refine_rank]

        best = None
        refinements_settled = True
        for index, isometry, sampled in records:
            refined, value, settled = self.refine(isometry)
            refinements_settled = refinements_settled and settled
            logger.debug(f"[Roof] record {index}: sampled {sampled:.9f} refined {value:.9f}")
            if best is None or self._better(value, best[1]):
                best = (refined, value)

        window_quiet = restarts - 1 - last_record >= self.opts.patience
        converged = window_quiet and refinements_settled
        logger.info(
            f"[Roof] {self.sense} over {restarts} restarts (rank {rank}, k in {counts[0]}..{counts[-1]}, "
            f"{len(records)} refined): {best[1]:.9f} converged={converged}"
        )
        # C >= 0, so a minimum of exactly 0 is attained by the witness
        exact = self.sense == "min" and best[1] == 0.0
        return SearchResult(best[1], best[0], restarts, converged, exact)

    def refine(self, isometry: np.ndarray) -> Tuple[np.ndarray, float, bool]:
        """Coordinate search over Givens rotations of member pairs with a shrinking angle.

        Returns the refined isometry, its value and whether the step shrank below
        min_step before max_sweeps ran out.
        """
        objective = self.objective
        current = np.array(isometry, dtype=np.complex128, copy=True)
        terms = objective.member_terms(current)
        k = current.shape[0]
        step = self.opts.initial_step
        sweeps = 0
        sign = -1.0 if self.sense == "min" else 1.0
        while step >= self.opts.min_step and sweeps < self.opts.max_sweeps:
            sweeps += 1
            gain = 0.0
            c, s = np.cos(step), np.sin(step)
            for j in range(k - 1):
                for l in range(j + 1, k):
                    for phase in (1.0, 1j):
                        for direction in (1.0, -1.0):
                            w = direction * phase
                            row_j = c * current[j] - s * np.conj(w) * current[l]
                            row_l = s * w * current[j] + c * current[l]
                            new_terms = objective.member_terms(np.stack([row_j, row_l]))
                            delta = sign * (new_terms.sum() - terms[j] - terms[l])
                            if delta > 0:
                                current[j], current[l] = row_j, row_l
                                terms[j], terms[l] = new_terms
                                gain += delta
            if gain < self.opts.refine_tolerance:
                step *= 0.5
        return current, objective.evaluate(current), step < self.opts.min_step
