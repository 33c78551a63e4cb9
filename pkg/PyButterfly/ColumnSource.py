import numpy as np

from PyButterfly.ButterflyError import ArgumentError, DimensionError

class ColumnSource:
    """
    Yields the columns of a matrix left to right, each exactly once.

    Subclasses implement _generate (the next `count` columns as an n_rows x count array)
    and _reset (rewind to column 0).
    """
    def __init__(self, n_rows : int, n_cols : int):
        if n_rows < 1 or n_cols < 1:
            raise ArgumentError(f"Column source needs positive dimensions (got {n_rows}x{n_cols})")

        self.n_rows = int(n_rows)
        self.n_cols = int(n_cols)
        self.next_column = 0

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.n_rows}x{self.n_cols}, next={self.next_column})"

    @property
    def shape(self):
        return (self.n_rows, self.n_cols)

    @property
    def remaining(self) -> int:
        return self.n_cols - self.next_column

    @property
    def exhausted(self) -> bool:
        return self.next_column >= self.n_cols

    def Columns(self, count : int):
        """
        The next `count` columns, or fewer if the source runs out
        """
        if self.exhausted:
            raise ArgumentError("Column source is exhausted")

        count = min(int(count), self.remaining)
        if count < 1:
            raise ArgumentError(f"Must request at least one column (got {count})")

        block = np.asarray(self._generate(count), dtype=np.float64)
        if block.shape != (self.n_rows, count):
            raise DimensionError(f"Column source produced a block of shape {block.shape}",
                                 expected=(self.n_rows, count), actual=block.shape)

        self.next_column += count
        return block

    def Reset(self):
        self.next_column = 0
        self._reset()

    def ToDense(self):
        """
        Replay the source from column 0 into a dense matrix, leaving it rewound
        """
        self.Reset()
        dense = self.Columns(self.n_cols)
        self.Reset()
        return dense

    def _generate(self, count : int):
        raise NotImplementedError

    def _reset(self):
        pass

class DenseColumnSource(ColumnSource):
    """
    Serves the columns of an explicit matrix
    """
    def __init__(self, matrix):
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2:
            raise ArgumentError(f"Expected a matrix, got shape {matrix.shape}")

        super().__init__(*matrix.shape)
        self.matrix = matrix

    def _generate(self, count : int):
        return self.matrix[:, self.next_column:self.next_column + count]

def IdentitySource(n : int) -> DenseColumnSource:
    return DenseColumnSource(np.eye(n))
