import logging
logging.basicConfig(encoding='utf-8')
import numpy as np
import scipy.linalg

from PyButterfly.ButterflyError import ArgumentError, DimensionError

entry_bound = 2.0
entry_tolerance = 1e-12
max_swaps_per_column = 4

class InterpolativeDecomposition:
    """
    Approximates a block A by A[:, column_indices] @ interpolation, where the columns of
    the interpolation matrix at column_indices form the identity.
    """
    def __init__(self, column_indices, interpolation):
        self.column_indices = np.ascontiguousarray(column_indices, dtype=np.int64)
        self.interpolation = np.ascontiguousarray(interpolation, dtype=np.float64)

        if self.interpolation.ndim != 2 or self.interpolation.shape[0] != len(self.column_indices):
            raise DimensionError("Interpolation matrix must have one row per selected column",
                                 expected=len(self.column_indices), actual=self.interpolation.shape)

    def __repr__(self) -> str:
        return f"InterpolativeDecomposition(rank={self.rank}, n_cols={self.n_cols})"

    @property
    def rank(self) -> int:
        return len(self.column_indices)

    @property
    def n_cols(self) -> int:
        return self.interpolation.shape[1]

    @classmethod
    def FromCoefficients(cls, column_indices, n_cols : int, coefficients):
        """
        Rebuild a decomposition from its selected columns and the entries of the remaining columns
        """
        column_indices = np.asarray(column_indices, dtype=np.int64)
        interpolation = np.zeros((len(column_indices), n_cols))
        interpolation[:, column_indices] = np.eye(len(column_indices))
        interpolation[:, np.setdiff1d(np.arange(n_cols), column_indices)] = coefficients
        return cls(column_indices, interpolation)

    @property
    def free_columns(self):
        """ Columns outside the skeleton, in increasing order """
        return np.setdiff1d(np.arange(self.n_cols), self.column_indices)

    @property
    def stored_words(self) -> int:
        """ Entries not fixed by the identity columns """
        return self.rank * (self.n_cols - self.rank)

    @property
    def max_entry(self) -> float:
        return float(np.max(np.abs(self.interpolation))) if self.interpolation.size else 0.0

    def Skeleton(self, block):
        """
        Extract the selected columns from the source block
        """
        return np.ascontiguousarray(np.asarray(block)[:, self.column_indices])

    def Reconstruct(self, skeleton):
        return IdReconstruct(self, skeleton)

def IdFixedRank(block, k : int) -> InterpolativeDecomposition:
    """
    Interpolative decomposition of a given rank, from a column-pivoted Householder QR
    """
    block = _as_block(block)
    n_rows, n_cols = block.shape
    if not isinstance(k, (int, np.integer)) or not 1 <= k <= min(n_rows, n_cols):
        raise ArgumentError(f"Rank {k} out of range for a {n_rows}x{n_cols} block")

    if not np.any(block):
        return _zero_block_decomposition(n_cols, k)

    _, R, perm = scipy.linalg.qr(block, mode='economic', pivoting=True)
    R, perm = _bound_interpolation(R, perm, int(k))
    return _decomposition_from_qr(R, perm, int(k))

def IdAdaptive(block, epsilon : float) -> InterpolativeDecomposition:
    """
    Interpolative decomposition with the smallest rank that reproduces the block to
    relative precision epsilon in the Frobenius norm.
    """
    if not epsilon > 0:
        raise ArgumentError(f"Precision must be positive (got {epsilon})")

    block = _as_block(block)
    n_rows, n_cols = block.shape
    norm = np.linalg.norm(block)
    if norm == 0.0:
        return _zero_block_decomposition(n_cols)

    _, R, perm = scipy.linalg.qr(block, mode='economic', pivoting=True)
    tolerance = epsilon * norm
    k = _adaptive_rank(R, n_cols, tolerance)

    # Swaps can move the residual, so grow k until the bounded decomposition is precise enough
    while True:
        bounded, order = _bound_interpolation(R, perm, k)
        if k == min(R.shape) or np.linalg.norm(bounded[k:, k:]) <= tolerance:
            return _decomposition_from_qr(bounded, order, k)
        k += 1

def IdReconstruct(decomposition : InterpolativeDecomposition, skeleton):
    skeleton = np.asarray(skeleton, dtype=np.float64)
    if skeleton.ndim != 2 or skeleton.shape[1] != decomposition.rank:
        raise DimensionError(f"Skeleton must have {decomposition.rank} columns",
                             expected=decomposition.rank, actual=skeleton.shape)

    return skeleton @ decomposition.interpolation

def _as_block(block):
    block = np.asarray(block, dtype=np.float64)
    if block.ndim != 2 or block.size == 0:
        raise ArgumentError(f"Expected a non-empty matrix, got shape {block.shape}")
    return block

def _adaptive_rank(R, n_cols : int, tolerance : float) -> int:
    """
    Stop at the first k where every remaining pivot column is below tolerance / sqrt(n_cols),
    then grow k until the trailing block (the exact Frobenius residual of the ID) is below tolerance.
    """
    max_rank = min(R.shape)
    R2 = np.square(R[:max_rank])

    # tails[i, j] = norm of R[i:, j], i.e. the norm of column j after i pivoting steps
    tails = np.sqrt(np.cumsum(R2[::-1], axis=0)[::-1])
    remaining = np.triu(tails).max(axis=1)

    candidates = np.nonzero(remaining[1:] <= tolerance / np.sqrt(n_cols))[0]
    k = int(candidates[0]) + 1 if len(candidates) else max_rank

    # residual[i] = Frobenius norm of R[i:, i:]
    trailing = np.cumsum(np.cumsum(R2[::-1, ::-1], axis=0), axis=1)[::-1, ::-1]
    while k < max_rank and np.sqrt(trailing[k, k]) > tolerance:
        k += 1

    return k

def _decomposition_from_qr(R, perm, k : int) -> InterpolativeDecomposition:
    n_cols = R.shape[1]
    interpolation = np.zeros((k, n_cols))
    interpolation[:, perm[:k]] = np.eye(k)
    interpolation[:, perm[k:]] = _interpolation_coefficients(R, k)

    decomposition = InterpolativeDecomposition(perm[:k], interpolation)

    if decomposition.max_entry > entry_bound + entry_tolerance:
        logging.warning(f"Interpolation matrix of rank {k} has an entry of magnitude {decomposition.max_entry:.3f}")

    return decomposition

def _interpolation_coefficients(R, k : int):
    """
    Solve R11 T = R12 for the columns left out of the skeleton
    """
    R11 = R[:k, :k]
    R12 = R[:k, k:]
    if R12.shape[1] == 0:
        return np.zeros((k, 0))

    diagonal = np.abs(np.diag(R11))
    if diagonal.min() > np.finfo(np.float64).eps * diagonal.max():
        return scipy.linalg.solve_triangular(R11, R12, lower=False)

    # Rank deficient leading block, fall back to the minimum norm solution
    return np.linalg.lstsq(R11, R12, rcond=None)[0]

def _bound_interpolation(R, perm, k : int):
    """
    Swap skeleton columns with left-out columns until no entry of T, and no ratio of a trailing
    column norm to a leading row scale, exceeds the entry bound. Each swap multiplies |det R11|
    by more than the bound, so the loop terminates.
    """
    perm = np.array(perm)
    if k >= R.shape[1]:
        return R, perm

    for _ in range(max_swaps_per_column * R.shape[1]):
        R11 = R[:k, :k]
        diagonal = np.abs(np.diag(R11))
        if diagonal.min() <= np.finfo(np.float64).eps * diagonal.max():
            break

        T = scipy.linalg.solve_triangular(R11, R[:k, k:], lower=False)
        inverse_rows = np.linalg.norm(scipy.linalg.solve_triangular(R11, np.eye(k), lower=False), axis=1)
        trailing = np.linalg.norm(R[k:, k:], axis=0) if R.shape[0] > k else np.zeros(R.shape[1] - k)

        growth = np.square(T) + np.square(np.outer(inverse_rows, trailing))
        i, j = np.unravel_index(np.argmax(growth), growth.shape)
        if growth[i, j] <= entry_bound * entry_bound:
            break

        order = np.arange(R.shape[1])
        order[[i, k + j]] = order[[k + j, i]]
        _, R = scipy.linalg.qr(R[:, order], mode='economic')
        perm = perm[order]

    else:
        logging.warning(f"Column swaps for a rank {k} decomposition did not settle")

    return R, perm

def _zero_block_decomposition(n_cols : int, k : int = 1) -> InterpolativeDecomposition:
    interpolation = np.zeros((k, n_cols))
    interpolation[:, :k] = np.eye(k)
    return InterpolativeDecomposition(np.arange(k), interpolation)
