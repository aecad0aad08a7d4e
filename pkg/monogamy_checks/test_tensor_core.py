"""
Checks for the dense multipartite linear algebra.
Tests: profiles, cuts, partial trace against the brute-force oracle, eigen decomposition, validation reports
"""

import sys
from pathlib import Path

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from concurrence_monogamy.utils.errors import PartitionError, StateValidationError, SubsystemIndexError
from concurrence_monogamy.utils.tensor_core import (
    DensityMatrix,
    DimProfile,
    Partition,
    PureState,
    hermitian_eig,
    kron,
    kron_all,
    partial_trace,
    profile_of,
    purity,
    reduced_state,
    validate_density,
)
from monogamy_checks.test_oracles import (
    SMALL_PROFILES,
    brute_partial_trace,
    random_density_matrix,
    random_pure_vector,
)


def _keeps(parties):
    for mask in range(1, 2**parties):
        yield tuple(i for i in range(parties) if mask >> i & 1)


def _check_partial_trace(dims, states, rng):
    profile = DimProfile(dims=dims)
    for _ in range(states):
        matrix = random_density_matrix(profile.total, 1 + rng.integers(profile.total), rng)
        rho = DensityMatrix(matrix=matrix, profile=profile)
        for keep in _keeps(profile.parties):
            reduced = partial_trace(rho, keep)
            expected = brute_partial_trace(matrix, dims, keep)
            assert np.max(np.abs(reduced.matrix - expected)) <= 1e-12
            assert reduced.profile.dims == tuple(dims[i] for i in keep)


def test_profile_digits():
    """Big-endian mixed radix: the leftmost subsystem is the most significant digit"""
    print("\n=== Test 1: Profile Digits ===")
    profile = profile_of(2, 2, 3)
    assert profile.total == 12
    assert profile.index_of((0, 1, 2)) == 5
    assert profile.digits(5) == (0, 1, 2)
    assert profile.index_of((1, 0, 2)) == 8
    assert str(profile) == "2⊗2⊗3"
    print(f"✅ {profile}: |012> -> 5, |102> -> 8")


def test_partition_parsing():
    """Cut syntax with commas and the compact digit form"""
    print("\n=== Test 2: Cut Parsing ===")
    cut = Partition.parse("0,2|1,3")
    assert cut.side_a == (0, 2) and cut.side_b == (1, 3)
    assert Partition.parse("0|12") == Partition.of((0,), (1, 2))
    assert Partition.parse("2,0|1") == Partition.of((0, 2), (1,))
    assert str(Partition.of((1, 3), (0,))) == "1,3|0"
    assert Partition.of((1,), (3,)).relabeled() == Partition.of((0,), (1,))
    print(f"✅ Parsed {cut} and compact 0|12")

    for bad in ("0,1", "0|", "0|0,1", "a|1", "0|1|2"):
        with pytest.raises(ValueError):
            Partition.parse(bad)
    print("✅ Rejected malformed cuts")


def test_partition_against_profile():
    print("\n=== Test 3: Cut Against Profile ===")
    profile = profile_of(2, 2, 3)
    assert Partition.parse("0|1,2").covers(profile)
    assert not Partition.parse("0|1").covers(profile)
    with pytest.raises(PartitionError):
        Partition.parse("0|3").check_against(profile)
    print("✅ Coverage and range checks")


def test_partial_trace_matches_oracle():
    """A few random states per profile with total dimension up to 36"""
    print("\n=== Test 4: Partial Trace Oracle (quick) ===")
    rng = np.random.default_rng(11)
    for dims in SMALL_PROFILES:
        _check_partial_trace(dims, 2, rng)
    print(f"✅ {len(SMALL_PROFILES)} profiles agree with brute force")


@pytest.mark.slow
def test_partial_trace_matches_oracle_full():
    """100 random states per profile"""
    print("\n=== Test 5: Partial Trace Oracle (full) ===")
    rng = np.random.default_rng(12)
    for dims in SMALL_PROFILES:
        _check_partial_trace(dims, 100, rng)
    print("✅ 100 states per profile")


def test_partial_trace_index_errors():
    print("\n=== Test 6: Keep Validation ===")
    rho = PureState.normalized(np.ones(8), profile_of(2, 2, 2)).projector()
    for keep in ((), (3,), (1, 0), (0, 0)):
        with pytest.raises(SubsystemIndexError):
            partial_trace(rho, keep)
    print("✅ Empty, out-of-range, unsorted and duplicate keeps rejected")


@settings(max_examples=30, deadline=None)
@given(dims=st.lists(st.integers(min_value=1, max_value=3), min_size=2, max_size=4), seed=st.integers(0, 2**32 - 1))
def test_reductions_keep_trace_and_compose(dims, seed):
    """Tracing out in two steps equals tracing out at once"""
    rng = np.random.default_rng(seed)
    profile = DimProfile(dims=tuple(dims))
    psi = PureState(amplitudes=random_pure_vector(profile.total, rng), profile=profile)
    keep = tuple(range(profile.parties - 1))
    one_step = reduced_state(psi, keep[:1])
    two_step = partial_trace(reduced_state(psi, keep), (0,))
    assert np.max(np.abs(one_step.matrix - two_step.matrix)) <= 1e-12
    assert abs(np.trace(one_step.matrix) - 1.0) <= 1e-12
    assert np.max(np.abs(reduced_state(psi, keep).matrix - partial_trace(psi.projector(), keep).matrix)) <= 1e-12


def test_validate_density_reports():
    """validate_density never raises on square input and lists each failure"""
    print("\n=== Test 7: Density Validation Reports ===")
    good = validate_density(np.eye(4) / 4)
    assert good.passed and good.trace_tolerance == 1e-10
    print(f"✅ I/4 passes: {good.failures}")

    bad = validate_density(np.array([[1.2, 0.3j], [0.0, -0.2]]))
    assert not bad.passed
    assert len(bad.failures) == 2
    print(f"✅ Non-Hermitian, negative matrix fails: {bad.failures}")

    with pytest.raises(ValueError):
        DensityMatrix(matrix=np.diag([0.7, 0.5]), profile=profile_of(2))
    with pytest.raises(ValueError):
        DensityMatrix(matrix=np.eye(3) / 3, profile=profile_of(2, 2))
    print("✅ Construction rejects trace and shape violations")


def test_pure_state_norm():
    print("\n=== Test 8: Pure State Norm ===")
    with pytest.raises(ValueError):
        PureState(amplitudes=[1.0, 1.0], profile=profile_of(2))
    psi = PureState.normalized([3.0, 4.0j], profile_of(2))
    assert abs(np.linalg.norm(psi.amplitudes) - 1.0) <= 1e-15
    with pytest.raises(StateValidationError):
        PureState.normalized([0.0, 0.0], profile_of(2))
    assert not psi.amplitudes.flags.writeable
    print("✅ Unnormalized vectors rejected; stored amplitudes are read-only")


def test_hermitian_eig_order_and_purity():
    print("\n=== Test 9: Eigen Order and Purity ===")
    rho = DensityMatrix(matrix=np.diag([0.1, 0.6, 0.3]), profile=profile_of(3))
    values, vectors = hermitian_eig(rho)
    assert np.allclose(values, [0.6, 0.3, 0.1])
    assert np.allclose(np.abs(vectors[:, 0]), [0, 1, 0])
    assert abs(purity(rho) - 0.46) <= 1e-12
    assert rho.rank() == 3
    with pytest.raises(StateValidationError):
        hermitian_eig(np.array([[0.5, 1.0], [0.0, 0.5]]))
    print("✅ Descending eigenvalues, purity 0.46")


@settings(max_examples=30, deadline=None)
@given(
    dims=st.lists(st.integers(min_value=2, max_value=3), min_size=2, max_size=4),
    split=st.integers(min_value=1, max_value=3),
    seed=st.integers(0, 2**32 - 1),
)
def test_pure_state_sides_share_purity(dims, split, seed):
    """Both sides of a pure state have the same Schmidt spectrum"""
    split = min(split, len(dims) - 1)
    profile = DimProfile(dims=tuple(dims))
    psi = PureState(amplitudes=random_pure_vector(profile.total, np.random.default_rng(seed)), profile=profile)
    side_a = tuple(range(split))
    side_b = tuple(range(split, len(dims)))
    assert abs(purity(reduced_state(psi, side_a)) - purity(reduced_state(psi, side_b))) <= 1e-12


def test_hermitian_eig_reconstructs():
    print("\n=== Test 10: Eigen Reconstruction ===")
    rng = np.random.default_rng(21)
    worst = 0.0
    for total in (2, 4, 6, 8, 12):
        for rank in (1, 2, total):
            matrix = random_density_matrix(total, rank, rng)
            values, vectors = hermitian_eig(matrix)
            rebuilt = vectors @ np.diag(values) @ vectors.conj().T
            worst = max(worst, float(np.max(np.abs(rebuilt - matrix))))
            assert np.all(np.diff(values) <= 0)
    assert worst <= 1e-10
    print(f"✅ Worst reconstruction error {worst:.2e}")


def test_validate_density_rejects_small_perturbations():
    """A 1e-3 change to a valid state is far outside every tolerance"""
    print("\n=== Test 11: Perturbed States ===")
    matrix = random_density_matrix(4, 4, np.random.default_rng(5))
    assert validate_density(matrix).passed

    skewed = matrix.copy()
    skewed[0, 1] += 1e-3
    report = validate_density(skewed)
    assert not report.passed and "hermitian" in report.failures[0]

    heavier = matrix + 1e-3 * np.eye(4) / 4
    report = validate_density(heavier)
    assert not report.passed and "trace" in report.failures[0]
    with pytest.raises(ValueError):
        DensityMatrix(matrix=heavier, profile=profile_of(2, 2))
    print(f"✅ Off-diagonal and trace perturbations rejected: {report.failures}")


def test_partial_traces_commute():
    """Tracing B then C, C then B and both at once agree"""
    print("\n=== Test 12: Partial Trace Order ===")
    rng = np.random.default_rng(8)
    for dims in ((2, 2, 2), (2, 3, 2), (3, 2, 3), (2, 2, 3)):
        profile = DimProfile(dims=dims)
        rho = DensityMatrix(matrix=random_density_matrix(profile.total, 3, rng), profile=profile)
        b_first = partial_trace(partial_trace(rho, (0, 2)), (0,))
        c_first = partial_trace(partial_trace(rho, (0, 1)), (0,))
        at_once = partial_trace(rho, (0,))
        assert np.max(np.abs(b_first.matrix - c_first.matrix)) <= 1e-12
        assert np.max(np.abs(b_first.matrix - at_once.matrix)) <= 1e-12
    print("✅ Four profiles agree in every order")


def test_kron_helpers():
    x = np.array([[0, 1], [1, 0]])
    assert np.array_equal(kron(x, x) @ np.array([1, 0, 0, 0]), [0, 0, 0, 1])
    rng = np.random.default_rng(3)
    a, b, c = (rng.normal(size=(2, 2)) for _ in range(3))
    assert np.allclose(kron_all(a, b, c), kron(kron(a, b), c))
    assert np.allclose(kron_all(a, b, c), kron(a, kron(b, c)))


def test_maximally_mixed_purity():
    rho = DensityMatrix(matrix=np.eye(3) / 3, profile=profile_of(3))
    assert abs(purity(rho) - 1.0 / 3.0) <= 1e-15
