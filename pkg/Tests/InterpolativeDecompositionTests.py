import math
import numpy as np

from PyButterfly.ButterflyError import ArgumentError, DimensionError
from PyButterfly.Helpers import RandomGenerator
from PyButterfly.InterpolativeDecomposition import IdAdaptive, IdFixedRank, IdReconstruct, InterpolativeDecomposition, entry_bound, entry_tolerance
from PyButterfly.Legendre import EVEN
from PyButterfly.LegendreTransform import LegendreColumnSource
from PyButterfly.Oracles import PlantedSpectrumMatrix, SingularValues, SpectralNorm
from PyButterfly.Quadrature import BuildRule
from Tests.TestHelpers import assert_close, assert_raises, assert_true, run_test_functions

def check_identity_columns(decomposition, description):
    selected = decomposition.interpolation[:, decomposition.column_indices]
    if not np.array_equal(selected, np.eye(decomposition.rank)):
        raise Exception(f"{description}: selected columns of the interpolation matrix are not the identity")

def test_identity_submatrix(logger):
    rng = RandomGenerator(11)
    for k in (1, 3, 7, 12):
        matrix = PlantedSpectrumMatrix(rng, 30, 20)
        decomposition = IdFixedRank(matrix, k)
        check_identity_columns(decomposition, f"rank {k}")
        assert_true(decomposition.rank == k, f"Expected rank {k}, got {decomposition.rank}")

def test_planted_spectrum_bounds(logger):
    rng = RandomGenerator(12)
    worst = 0.0
    for index in range(200):
        n_rows, n_cols = int(rng.integers(5, 30)), int(rng.integers(5, 30))
        matrix = PlantedSpectrumMatrix(rng, n_rows, n_cols, decay=float(rng.uniform(0.5, 0.9)))
        sigma = SingularValues(matrix)

        k = int(rng.integers(1, min(n_rows, n_cols)))
        decomposition = IdFixedRank(matrix, k)

        assert_true(decomposition.max_entry <= entry_bound + entry_tolerance,
                    f"Matrix {index}: interpolation entry {decomposition.max_entry} above {entry_bound}")

        error = SpectralNorm(matrix - IdReconstruct(decomposition, decomposition.Skeleton(matrix)))
        bound = math.sqrt(4 * k * (n_cols - k) + 1) * sigma[k]
        assert_true(error <= bound * (1 + 1e-8) + 1e-14, f"Matrix {index} ({n_rows}x{n_cols}, k={k}): error {error:.3e} above bound {bound:.3e}")
        worst = max(worst, error / bound if bound else 0.0)

    logger.info(f"Worst error to bound ratio: {worst:.3f}")

def test_adaptive_precision(logger):
    rng = RandomGenerator(13)
    for epsilon in (1e-4, 1e-8, 1e-12):
        matrix = PlantedSpectrumMatrix(rng, 60, 40, decay=0.5)
        decomposition = IdAdaptive(matrix, epsilon)
        check_identity_columns(decomposition, f"epsilon {epsilon}")

        error = np.linalg.norm(matrix - decomposition.Reconstruct(decomposition.Skeleton(matrix)))
        assert_true(error <= epsilon * np.linalg.norm(matrix) * (1 + 1e-10), f"epsilon {epsilon}: Frobenius error {error:.3e} too large")

        # Singular values decay by 1/2, so the rank tracks log2(1/epsilon)
        assert_true(decomposition.rank <= math.ceil(math.log2(1 / epsilon)) + 10, f"epsilon {epsilon}: rank {decomposition.rank} too large")
        logger.info(f"epsilon {epsilon:.0e}: rank {decomposition.rank}, error {error:.3e}")

def test_adaptive_rank_reproducible(logger):
    rng = RandomGenerator(14)
    for index in range(10):
        matrix = PlantedSpectrumMatrix(rng, 40, 30, decay=float(rng.uniform(0.3, 0.7)))
        adaptive = IdAdaptive(matrix, 1e-9)
        fixed = IdFixedRank(matrix, adaptive.rank)

        adaptive_error = np.linalg.norm(matrix - adaptive.Reconstruct(adaptive.Skeleton(matrix)))
        fixed_error = np.linalg.norm(matrix - fixed.Reconstruct(fixed.Skeleton(matrix)))
        assert_true(fixed_error <= 10 * adaptive_error + 1e-15, f"Matrix {index}: fixed-rank error {fixed_error:.3e} vs adaptive {adaptive_error:.3e}")

def test_exact_low_rank(logger):
    rng = RandomGenerator(15)
    matrix = rng.standard_normal((50, 3)) @ rng.standard_normal((3, 20))
    decomposition = IdAdaptive(matrix, 1e-12)
    assert_true(decomposition.rank == 3, f"Expected rank 3, got {decomposition.rank}")
    assert_close(decomposition.Reconstruct(decomposition.Skeleton(matrix)), matrix, 1e-11, "Rank 3 reconstruction")

def test_zero_block(logger):
    decomposition = IdAdaptive(np.zeros((5, 4)), 1e-14)
    assert_true(decomposition.rank == 1, "Zero block should have rank 1")
    assert_true(list(decomposition.column_indices) == [0], "Zero block should select column 0")
    assert_true(np.array_equal(decomposition.interpolation, np.array([[1.0, 0.0, 0.0, 0.0]])), "Zero block interpolation should be e_0")

    fixed = IdFixedRank(np.zeros((5, 4)), 2)
    check_identity_columns(fixed, "Zero block, rank 2")

def test_full_rank_identity(logger):
    decomposition = IdAdaptive(np.eye(6), 1e-14)
    assert_true(decomposition.rank == 6, f"Identity should have full rank, got {decomposition.rank}")
    assert_close(decomposition.Reconstruct(decomposition.Skeleton(np.eye(6))), np.eye(6), 0.0, "Identity reconstruction")

def kahan_matrix(size, c):
    s = math.sqrt(1 - c * c)
    matrix = np.diag(s ** np.arange(size)) @ (np.eye(size) - c * np.triu(np.ones((size, size)), 1))
    # Shrinking later columns keeps column pivoting in natural order
    return matrix * (1 - 1e-3) ** np.arange(size)

def test_graded_diagonal(logger):
    matrix = np.diag([1.0, 1e-4, 1e-16])
    decomposition = IdAdaptive(matrix, 1e-8)
    assert_true(decomposition.rank == 2, f"Expected rank 2, got {decomposition.rank}")

    error = np.linalg.norm(matrix - decomposition.Reconstruct(decomposition.Skeleton(matrix)))
    assert_true(error <= 1e-8 * np.linalg.norm(matrix), f"Frobenius error {error:.3e} too large")

def test_normal_matrix_rank_20(logger):
    matrix = RandomGenerator(16).standard_normal((50, 50))
    decomposition = IdFixedRank(matrix, 20)
    check_identity_columns(decomposition, "50x50 normal matrix")
    assert_true(decomposition.max_entry <= entry_bound + entry_tolerance, f"Interpolation entry {decomposition.max_entry:.3f} above {entry_bound}")

    error = SpectralNorm(matrix - decomposition.Reconstruct(decomposition.Skeleton(matrix)))
    bound = math.sqrt(4 * 20 * 30 + 1) * SingularValues(matrix)[20]
    assert_true(error <= bound * (1 + 1e-8), f"Spectral error {error:.3e} above bound {bound:.3e}")
    logger.info(f"50x50 normal matrix, k=20: error {error:.3e}, bound {bound:.3e}")

def test_legendre_block(logger):
    block = LegendreColumnSource(BuildRule(0, 512, EVEN)).Columns(60)[:64]
    decomposition = IdAdaptive(block, 1e-14)
    assert_true(decomposition.rank < 60, f"Expected rank below 60, got {decomposition.rank}")
    assert_true(decomposition.max_entry <= entry_bound + entry_tolerance, f"Interpolation entry {decomposition.max_entry:.3f} above {entry_bound}")

    # Allow for rounding in the product itself
    norm = np.linalg.norm(block)
    error = np.linalg.norm(block - decomposition.Reconstruct(decomposition.Skeleton(block)))
    assert_true(error <= 1e-14 * norm + 64 * np.finfo(np.float64).eps * norm, f"Frobenius error {error:.3e} for a block of norm {norm:.3e}")
    logger.info(f"64x60 Legendre block: rank {decomposition.rank}, relative error {error / norm:.2e}")

def test_entry_bound_needs_swaps(logger):
    matrix = kahan_matrix(20, 0.3)
    decomposition = IdFixedRank(matrix, 19)
    check_identity_columns(decomposition, "Kahan matrix")

    # Plain column pivoting keeps the first 19 columns, with coefficients near 0.3 * 1.3^18
    assert_true(sorted(decomposition.column_indices) != list(range(19)), "Expected the skeleton to change")
    assert_true(decomposition.max_entry <= entry_bound + entry_tolerance, f"Interpolation entry {decomposition.max_entry:.3f} above {entry_bound}")

    error = SpectralNorm(matrix - decomposition.Reconstruct(decomposition.Skeleton(matrix)))
    bound = math.sqrt(4 * 19 * 1 + 1) * SingularValues(matrix)[19]
    assert_true(error <= bound * (1 + 1e-8) + 1e-14, f"Spectral error {error:.3e} above bound {bound:.3e}")

    adaptive = IdAdaptive(matrix, 1e-6)
    assert_true(adaptive.max_entry <= entry_bound + entry_tolerance, f"Adaptive interpolation entry {adaptive.max_entry:.3f} above {entry_bound}")
    error = np.linalg.norm(matrix - adaptive.Reconstruct(adaptive.Skeleton(matrix)))
    assert_true(error <= 1e-6 * np.linalg.norm(matrix), f"Adaptive Frobenius error {error:.3e} too large")

def test_stored_words(logger):
    decomposition = IdFixedRank(RandomGenerator(17).standard_normal((8, 6)), 4)
    assert_true(decomposition.stored_words == 8, f"Rank 4 of 6 columns stores 8 entries, not {decomposition.stored_words}")
    assert_true(sorted(list(decomposition.free_columns) + list(decomposition.column_indices)) == list(range(6)), "Free and selected columns must partition the block")

    rebuilt = InterpolativeDecomposition.FromCoefficients(decomposition.column_indices, 6, decomposition.interpolation[:, decomposition.free_columns])
    assert_true(np.array_equal(rebuilt.interpolation, decomposition.interpolation), "Rebuilding from coefficients must be exact")

def test_argument_errors(logger):
    matrix = np.ones((4, 3))
    assert_raises(ArgumentError, lambda: IdFixedRank(matrix, 0), "Rank 0")
    assert_raises(ArgumentError, lambda: IdFixedRank(matrix, 4), "Rank above the column count")
    assert_raises(ArgumentError, lambda: IdAdaptive(matrix, 0.0), "Zero precision")
    assert_raises(ArgumentError, lambda: IdAdaptive(matrix, -1e-3), "Negative precision")
    assert_raises(ArgumentError, lambda: IdAdaptive(np.ones(3), 1e-3), "Vector input")

    decomposition = IdFixedRank(matrix, 1)
    assert_raises(DimensionError, lambda: IdReconstruct(decomposition, np.ones((4, 2))), "Skeleton with the wrong width")

def run_tests(results_path):
    tests = [
        ('identity submatrix', test_identity_submatrix),
        ('planted spectrum bounds', test_planted_spectrum_bounds),
        ('adaptive precision', test_adaptive_precision),
        ('adaptive rank reproducible', test_adaptive_rank_reproducible),
        ('exact low rank', test_exact_low_rank),
        ('zero block', test_zero_block),
        ('full rank identity', test_full_rank_identity),
        ('graded diagonal', test_graded_diagonal),
        ('normal matrix rank 20', test_normal_matrix_rank_20),
        ('legendre block', test_legendre_block),
        ('entry bound needs swaps', test_entry_bound_needs_swaps),
        ('stored words', test_stored_words),
        ('argument errors', test_argument_errors),
    ]

    return run_test_functions(tests, results_path, 'InterpolativeDecompositionTests')
