import math
import numpy as np

from PyButterfly.ButterflyError import ArgumentError, DimensionError
from PyButterfly.InterpolativeDecomposition import InterpolativeDecomposition

class ButterflyStripe:
    """
    A horizontal slice of a block: the rows it covers, the interpolative decomposition
    mapping child coefficients to this stripe's coefficients, and (for roots only)
    the skeleton columns restricted to those rows.
    """
    def __init__(self, row_start : int, row_stop : int, decomposition : InterpolativeDecomposition, skeleton = None):
        self.row_start = int(row_start)
        self.row_stop = int(row_stop)
        self.decomposition = decomposition
        self.skeleton = np.ascontiguousarray(skeleton, dtype=np.float64) if skeleton is not None else None

        if self.skeleton is not None and self.skeleton.shape != (self.height, self.rank):
            raise DimensionError(f"Skeleton of shape {self.skeleton.shape} does not fit a stripe of {self.height} rows and rank {self.rank}",
                                 expected=(self.height, self.rank), actual=self.skeleton.shape)

    def __repr__(self) -> str:
        return f"ButterflyStripe(rows={self.row_start}:{self.row_stop}, rank={self.rank})"

    @property
    def height(self) -> int:
        return self.row_stop - self.row_start

    @property
    def rank(self) -> int:
        return self.decomposition.rank

    @property
    def interpolation(self):
        return self.decomposition.interpolation

class ButterflyNode:
    """
    A block of contiguous columns at some level. Level 1 nodes are leaves compressed directly
    from source columns; higher levels have one child (promoted) or two (merged), and each
    child stripe s feeds stripes 2s (top half) and 2s+1 (bottom half).
    """
    def __init__(self, level : int, column_start : int, column_stop : int, stripes : list[ButterflyStripe], children : list = None):
        self.level = int(level)
        self.column_start = int(column_start)
        self.column_stop = int(column_stop)
        self.stripes = stripes
        self.children = children or []

        if self.is_leaf and self.level != 1:
            raise ArgumentError(f"Leaf block must be at level 1 (got {self.level})")

        if len(self.children) > 2:
            raise ArgumentError(f"Block can have at most two children (got {len(self.children)})")

    def __repr__(self) -> str:
        return f"ButterflyNode(level={self.level}, columns={self.column_start}:{self.column_stop}, stripes={len(self.stripes)})"

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def width(self) -> int:
        return self.column_stop - self.column_start

    @property
    def ranks(self) -> list[int]:
        return [ stripe.rank for stripe in self.stripes ]

    @property
    def is_root(self) -> bool:
        return all(stripe.skeleton is not None for stripe in self.stripes)

    def Walk(self):
        """
        All nodes of the subtree in pre-order
        """
        yield self
        for child in self.children:
            yield from child.Walk()

    def Coefficients(self, v) -> list:
        """
        Per-stripe coefficients of the subtree's columns applied to v
        """
        if self.is_leaf:
            return [ self.stripes[0].interpolation @ v[self.column_start:self.column_stop] ]

        child_coefficients = [ child.Coefficients(v) for child in self.children ]

        coefficients = []
        for s in range(len(self.stripes) // 2):
            concatenated = np.concatenate([ c[s] for c in child_coefficients ])
            coefficients.append(self.stripes[2 * s].interpolation @ concatenated)
            coefficients.append(self.stripes[2 * s + 1].interpolation @ concatenated)

        return coefficients

    def DistributeTranspose(self, coefficients : list, out):
        """
        Push per-stripe coefficients back through the transposed interpolation matrices into out
        """
        if self.is_leaf:
            out[self.column_start:self.column_stop] += self.stripes[0].interpolation.T @ coefficients[0]
            return

        splits = [ child.ranks for child in self.children ]
        child_coefficients = [ [] for _ in self.children ]

        for s in range(len(self.stripes) // 2):
            concatenated = self.stripes[2 * s].interpolation.T @ coefficients[2 * s] \
                         + self.stripes[2 * s + 1].interpolation.T @ coefficients[2 * s + 1]

            offset = 0
            for index, ranks in enumerate(splits):
                child_coefficients[index].append(concatenated[offset:offset + ranks[s]])
                offset += ranks[s]

        for child, child_coefficient in zip(self.children, child_coefficients):
            child.DistributeTranspose(child_coefficient, out)

class PlanStatistics:
    """
    Rank and storage summary of a plan
    """
    def __init__(self, n_rows : int, n_cols : int, epsilon : float, block_width : int, k_max : int, k_avg : float, k_sigma : float,
                 id_count : int, levels : int, root_count : int, interpolation_words : int, skeleton_words : int,
                 m_max : int, t_comp : float):
        self.n_rows = n_rows
        self.n_cols = n_cols
        self.epsilon = epsilon
        self.block_width = block_width
        self.k_max = k_max
        self.k_avg = k_avg
        self.k_sigma = k_sigma
        self.id_count = id_count
        self.levels = levels
        self.root_count = root_count
        self.interpolation_words = interpolation_words
        self.skeleton_words = skeleton_words
        self.m_max = m_max
        self.t_comp = t_comp

    @property
    def stored_words(self) -> int:
        return self.interpolation_words + self.skeleton_words

    @property
    def values(self) -> dict:
        values = dict(vars(self))
        values['stored_words'] = self.stored_words
        return values

class ButterflyPlan:
    """
    Multilevel compressed representation of an n_rows x n_cols matrix: a forest of
    blocks over contiguous column ranges whose root stripes hold skeleton columns.
    """
    def __init__(self, n_rows : int, n_cols : int, epsilon : float, block_width : int, roots : list[ButterflyNode], m_max : int = 0, t_comp : float = 0.0):
        self.n_rows = int(n_rows)
        self.n_cols = int(n_cols)
        self.epsilon = float(epsilon)
        self.block_width = int(block_width)
        self.roots = sorted(roots, key=lambda root: root.column_start)
        self.m_max = int(m_max)
        self.t_comp = float(t_comp)

        self._check_roots()

    def __repr__(self) -> str:
        return f"ButterflyPlan({self.n_rows}x{self.n_cols}, levels={self.levels}, roots={len(self.roots)})"

    @property
    def shape(self):
        return (self.n_rows, self.n_cols)

    @property
    def levels(self) -> int:
        return max(root.level for root in self.roots) if self.roots else 0

    def Nodes(self):
        for root in self.roots:
            yield from root.Walk()

    def Decompositions(self):
        for node in self.Nodes():
            for stripe in node.stripes:
                yield stripe.decomposition

    def Apply(self, v):
        """
        A @ v for a vector (or the columns of a matrix) v
        """
        v = np.asarray(v, dtype=np.float64)
        if v.ndim not in (1, 2) or v.shape[0] != self.n_cols:
            raise DimensionError(f"Expected {self.n_cols} entries, got shape {v.shape}", expected=self.n_cols, actual=v.shape)

        out = np.zeros((self.n_rows,) + v.shape[1:])
        for root in self.roots:
            for stripe, coefficients in zip(root.stripes, root.Coefficients(v)):
                out[stripe.row_start:stripe.row_stop] += stripe.skeleton @ coefficients

        return out

    def ApplyTranspose(self, w):
        """
        A^T @ w, running the apply dataflow in reverse
        """
        w = np.asarray(w, dtype=np.float64)
        if w.ndim not in (1, 2) or w.shape[0] != self.n_rows:
            raise DimensionError(f"Expected {self.n_rows} entries, got shape {w.shape}", expected=self.n_rows, actual=w.shape)

        out = np.zeros((self.n_cols,) + w.shape[1:])
        for root in self.roots:
            coefficients = [ stripe.skeleton.T @ w[stripe.row_start:stripe.row_stop] for stripe in root.stripes ]
            root.DistributeTranspose(coefficients, out)

        return out

    def Stats(self) -> PlanStatistics:
        ranks = np.array([ decomposition.rank for decomposition in self.Decompositions() ])
        interpolation_words = sum(decomposition.stored_words for decomposition in self.Decompositions())
        skeleton_words = sum(stripe.skeleton.size for root in self.roots for stripe in root.stripes)

        return PlanStatistics(
            n_rows=self.n_rows,
            n_cols=self.n_cols,
            epsilon=self.epsilon,
            block_width=self.block_width,
            k_max=int(ranks.max()),
            k_avg=float(ranks.mean()),
            k_sigma=float(ranks.std()),
            id_count=len(ranks),
            levels=self.levels,
            root_count=len(self.roots),
            interpolation_words=int(interpolation_words),
            skeleton_words=int(skeleton_words),
            m_max=self.m_max,
            t_comp=self.t_comp
        )

    def DenseMatrix(self):
        return self.Apply(np.eye(self.n_cols))

    def _check_roots(self):
        if not self.roots:
            raise ArgumentError("Plan has no root blocks")

        column = 0
        for root in self.roots:
            if root.column_start != column:
                raise ArgumentError(f"Root blocks do not tile the columns: expected a root at column {column}, found {root.column_start}")
            if not root.is_root:
                raise ArgumentError(f"Root block at column {root.column_start} is missing skeleton columns")

            row = 0
            for stripe in root.stripes:
                if stripe.row_start != row:
                    raise ArgumentError(f"Stripes of the root at column {root.column_start} do not tile the rows")
                row = stripe.row_stop

            if row != self.n_rows:
                raise ArgumentError(f"Stripes of the root at column {root.column_start} cover {row} of {self.n_rows} rows")

            column = root.column_stop

        if column != self.n_cols:
            raise ArgumentError(f"Root blocks cover {column} of {self.n_cols} columns")

def ExpectedLevels(n_cols : int, block_width : int) -> int:
    """
    Level count of a fully merged plan: 1 + ceil(log2(leaf count))
    """
    leaves = math.ceil(n_cols / block_width)
    return 1 + math.ceil(math.log2(leaves)) if leaves > 1 else 1
