"""
Forward and inverse associated Legendre transforms of fixed order m on one parity chain,
applied through a butterfly plan of the matrix A[i, j] = sqrt(w_i) P^m_{m+2j(+1)}(x_i).
"""
import logging
logging.basicConfig(encoding='utf-8')
import time
import numpy as np

from PyButterfly.ButterflyBuilder import BuildPlan
from PyButterfly.ButterflyError import ArgumentError, DimensionError
from PyButterfly.ButterflyEvents import ButterflyEvents
from PyButterfly.ButterflyPlan import ButterflyPlan
from PyButterfly.ColumnSource import ColumnSource
from PyButterfly.Legendre import DegreeSweep, ParseParity, RecurrenceCoefficients
from PyButterfly.Options import Options
from PyButterfly.Quadrature import BuildRule, QuadratureRule
from PyButterfly.QuadratureCache import QuadratureCache

TO_WEIGHTED = 'to_weighted'
FROM_WEIGHTED = 'from_weighted'

# Columns are unit-norm, so entries never need an exponent above this
max_column_exponent = 1

class LegendreColumnSource(ColumnSource):
    """
    Columns of the transform matrix. One degree sweep per node advances in lockstep, so the
    whole matrix costs a single recurrence pass over every node.
    """
    def __init__(self, rule : QuadratureRule):
        super().__init__(rule.n, rule.n)
        self.rule = rule
        self.sqrt_weights = rule.sqrt_weights
        self.coefficients = RecurrenceCoefficients(rule.m, rule.degree + 2)
        self._reset()

    def _reset(self):
        self.sweep = DegreeSweep(self.rule.m, self.rule.nodes, self.rule.parity, self.coefficients)

    def _generate(self, count : int):
        block = np.empty((self.n_rows, count))
        for column in range(count):
            values = self.sweep.Next() * self.sqrt_weights

            top = int(values.exponent.max())
            if top > max_column_exponent:
                logging.warning(f"Column {self.sweep.next_j - 1} has an entry of exponent {top}, above the unit-norm bound")

            block[:, column] = values.ToFloat()

        return block

class TransformPlan:
    """
    A butterfly plan bound to the quadrature rule of (m, n, parity).

    The matrix is orthogonal, so the inverse transform is the transpose.
    """
    def __init__(self, rule : QuadratureRule, plan : ButterflyPlan, t_quad : float = 0.0):
        if plan.shape != (rule.n, rule.n):
            raise DimensionError(f"Plan of shape {plan.shape} does not match a rule with {rule.n} nodes",
                                 expected=(rule.n, rule.n), actual=plan.shape)

        self.rule = rule
        self.plan = plan
        self.t_quad = float(t_quad)

    def __repr__(self) -> str:
        return f"TransformPlan(m={self.m}, n={self.n}, parity={self.parity})"

    @property
    def m(self) -> int:
        return self.rule.m

    @property
    def n(self) -> int:
        return self.rule.n

    @property
    def parity(self) -> str:
        return self.rule.parity

    def Forward(self, coefficients):
        """
        Values at the nodes (scaled by sqrt(w_i)) from expansion coefficients
        """
        return self.plan.Apply(coefficients)

    def Inverse(self, values):
        return self.plan.ApplyTranspose(values)

    def NodeScaling(self, values, direction : str):
        """
        Convert between values scaled by sqrt(w_i) and plain function values at the nodes
        """
        values = np.asarray(values, dtype=np.float64)
        if values.shape[0] != self.n:
            raise DimensionError(f"Expected {self.n} entries, got shape {values.shape}", expected=self.n, actual=values.shape)

        sqrt_weights = self.rule.sqrt_weights.reshape((-1,) + (1,) * (values.ndim - 1))
        if direction == TO_WEIGHTED:
            return values * sqrt_weights
        if direction == FROM_WEIGHTED:
            return values / sqrt_weights

        raise ArgumentError(f"Scaling direction must be '{TO_WEIGHTED}' or '{FROM_WEIGHTED}' (got '{direction}')")

    def DenseMatrix(self):
        """
        The transform matrix evaluated directly, without compression
        """
        return LegendreColumnSource(self.rule).ToDense()

def BuildTransform(m : int, n : int, parity : str, epsilon : float, block_width : int = None, options : Options = None,
                   cache : QuadratureCache = None, events : ButterflyEvents = None) -> TransformPlan:
    options = Options(options)
    parity = ParseParity(parity)
    block_width = block_width or options.block_width()

    if n < 1:
        raise ArgumentError(f"Transform size must be at least 1 (got {n})")

    start_time = time.perf_counter()
    max_iterations = options.get('max_newton_iterations')
    if cache:
        rule = cache.GetRule(m, n, parity, max_iterations=max_iterations)
    else:
        rule = BuildRule(m, n, parity, max_iterations=max_iterations)

    perturb = options.get('perturb', 0.0)
    if perturb:
        logging.warning(f"Perturbing quadrature weights by a factor of {1.0 + perturb}")
        rule = rule.Perturbed(perturb)

    t_quad = time.perf_counter() - start_time

    plan = BuildPlan(LegendreColumnSource(rule), epsilon, block_width, events)
    return TransformPlan(rule, plan, t_quad=t_quad)
