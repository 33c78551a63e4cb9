import logging
logging.basicConfig(encoding='utf-8')
import numpy as np

from PyButterfly.ButterflyError import ArgumentError, ComputationError
from PyButterfly.Legendre import EVEN, ODD, ChainDegree, ChainValue, ChainValueAndDerivative, ParseParity, RecurrenceCoefficients
from PyButterfly.ScaledReal import ScaledReal

default_max_iterations = 100
certificate_tolerance = 1e-11
min_grid_size = 64
max_grid_refinements = 6

class QuadratureRule:
    """
    Positive zeros of P^m_{m+2n} (even chain) or P^m_{m+2n+1} (odd chain) with their
    Gauss-Jacobi weights. The odd rule also carries the weight of the zero at the origin.

    Weights already include both halves of the symmetric interval, so for an even
    polynomial p the rule approximates the integral of (1-x^2)^m p(x) over [-1, 1].
    """
    def __init__(self, m : int, n : int, parity : str, nodes, weights, center_weight : float = None):
        self.m = int(m)
        self.n = int(n)
        self.parity = ParseParity(parity)
        self.nodes = np.ascontiguousarray(nodes, dtype=np.float64)
        self.weights = np.ascontiguousarray(weights, dtype=np.float64)
        self.center_weight = float(center_weight) if center_weight is not None else None

    def __repr__(self) -> str:
        return f"QuadratureRule(m={self.m}, n={self.n}, parity={self.parity})"

    @property
    def key(self):
        return (self.m, self.n, self.parity)

    @property
    def degree(self) -> int:
        """ Degree of the function whose zeros are the nodes """
        return ChainDegree(self.m, self.n, self.parity)

    @property
    def sqrt_weights(self):
        return np.sqrt(self.weights)

    def Validate(self):
        """
        Check the ordering and positivity invariants, raising ComputationError if they fail
        """
        nodes, weights = self.nodes, self.weights
        if len(nodes) != self.n or len(weights) != self.n:
            raise ComputationError(f"Rule for {self.key} has {len(nodes)} nodes and {len(weights)} weights, expected {self.n}")

        if not (nodes[0] > 0.0 and nodes[-1] < 1.0 and np.all(np.diff(nodes) > 0.0)):
            raise ComputationError(f"Nodes for {self.key} are not strictly increasing in (0, 1)")

        if not np.all(weights > 0.0):
            raise ComputationError(f"Rule for {self.key} has non-positive weights")

        if self.parity == ODD:
            if self.center_weight is None or not self.center_weight > 0.0:
                raise ComputationError(f"Odd rule for {self.key} needs a positive center weight")
        elif self.center_weight is not None:
            raise ComputationError(f"Even rule for {self.key} cannot have a center weight")

    def Integrate(self, p):
        """
        Apply the rule to the weighted integrand (1-x^2)^m p(x), for a callable even polynomial p
        """
        x = self.nodes
        total = np.sum(self.weights * ((1.0 - x) * (1.0 + x)) ** self.m * p(x))
        if self.center_weight is not None:
            total += self.center_weight * p(np.zeros(1))[0]
        return float(total)

    def Perturbed(self, perturb : float):
        """
        Copy of the rule with every weight scaled by (1 + perturb)
        """
        factor = 1.0 + perturb
        center = self.center_weight * factor if self.center_weight is not None else None
        return QuadratureRule(self.m, self.n, self.parity, self.nodes.copy(), self.weights * factor, center)

def _check_arguments(m : int, n : int):
    if m < 0:
        raise ArgumentError(f"Order must be non-negative (got {m})")
    if n < 1:
        raise ArgumentError(f"Node count must be at least 1 (got {n})")

def _bracketing_grid(degree : int, refinement : int):
    size = max(4 * (degree + 1), min_grid_size) << refinement
    theta = 0.5 * np.pi * (np.arange(size) + 0.5) / size
    return np.cos(theta)[::-1]

def _find_brackets(m : int, n : int, parity : str, coefficients : RecurrenceCoefficients):
    """
    Locate the n sign changes of the target function on a grid uniform in arccos(x)
    """
    degree = ChainDegree(m, n, parity)
    for refinement in range(max_grid_refinements):
        grid = _bracketing_grid(degree, refinement)
        signs = ChainValue(m, n, parity, grid, coefficients).Sign()

        changes = np.nonzero(signs[:-1] * signs[1:] < 0)[0]
        if len(changes) == n:
            return grid[changes], grid[changes + 1], signs[changes]

        logging.debug(f"Found {len(changes)} sign changes for (m={m}, n={n}, {parity}) on {len(grid)} points, refining")

    raise ComputationError(f"Could not isolate {n} zeros for (m={m}, n={n}, {parity})",
                           details={ 'm': m, 'n': n, 'parity': parity, 'sign_changes': len(changes) })

def FindZeros(m : int, n : int, parity : str, max_iterations : int = default_max_iterations, coefficients : RecurrenceCoefficients = None):
    """
    All n positive zeros of the designated chain function, in increasing order.

    Each zero is bracketed by a sign change and polished by safeguarded Newton iteration,
    all nodes advancing together.
    """
    _check_arguments(m, n)
    parity = ParseParity(parity)
    coefficients = coefficients or RecurrenceCoefficients(m, ChainDegree(m, n, parity) + 2)

    lower, upper, lower_sign = _find_brackets(m, n, parity, coefficients)

    x = 0.5 * (lower + upper)
    previous_step = np.full(n, np.inf)
    converged = np.zeros(n, dtype=bool)

    for iteration in range(max_iterations):
        active = np.nonzero(~converged)[0]
        if len(active) == 0:
            break

        xa = x[active]
        value, derivative = ChainValueAndDerivative(m, n, parity, xa, coefficients)
        if np.any(derivative.mantissa == 0.0):
            raise ComputationError(f"Zero derivative during Newton iteration for (m={m}, n={n}, {parity})")

        # Shrink the brackets using the sign at the current iterate
        same_side = value.Sign() == lower_sign[active]
        lower[active] = np.where(same_side, xa, lower[active])
        upper[active] = np.where(same_side, upper[active], xa)

        step = (value / derivative).ToFloat()
        candidate = xa - step

        # Bisect whenever Newton leaves the bracket
        outside = ~((candidate >= lower[active]) & (candidate <= upper[active]))
        bisected = 0.5 * (lower[active] + upper[active])
        candidate = np.where(outside, bisected, candidate)
        step = np.where(outside, xa - candidate, step)

        tiny = np.abs(step) <= 4.0 * np.spacing(xa)
        stalled = (np.abs(step) < np.sqrt(np.finfo(np.float64).eps) * xa) & (np.abs(step) > 0.5 * previous_step[active])

        # Rounding in the recurrence can stop Newton from settling, so a bracket of a few ulps is final
        collapsed = upper[active] - lower[active] <= 4.0 * np.spacing(xa)

        x[active] = candidate
        previous_step[active] = np.abs(step)
        converged[active] = ((tiny | stalled | (value.mantissa == 0.0)) & ~outside) | collapsed

    else:
        failed = np.nonzero(~converged)[0]
        if len(failed):
            index = failed[0]
            bracket = (float(lower[index]), float(upper[index]))
            raise ComputationError(f"Newton iteration did not converge for (m={m}, n={n}, {parity}) in bracket {bracket}",
                                   details={ 'm': m, 'n': n, 'parity': parity, 'bracket': bracket })

    _certify_zeros(m, n, parity, x, coefficients)
    logging.debug(f"Found {n} zeros for (m={m}, n={n}, {parity})")
    return x

def NodeSpacing(nodes, parity : str):
    """
    Distance from each node to its nearest neighbouring zero, counting the mirrored zeros
    on the negative half and the zero at the origin of the odd chain
    """
    nodes = np.asarray(nodes, dtype=np.float64)
    first = 2.0 * nodes[0] if parity == EVEN else nodes[0]
    left = np.concatenate(([first], np.diff(nodes)))
    right = np.concatenate((left[1:], [left[-1]]))
    return np.minimum(left, right)

def CertificateTolerance(n : int) -> float:
    """
    Residual allowed per unit of node spacing. Rounding in the recurrence grows roughly with
    the square of the number of steps, which sets a floor at large n.
    """
    steps = n + 1
    return max(certificate_tolerance, steps * steps * np.finfo(np.float64).eps)

def _certify_zeros(m : int, n : int, parity : str, x, coefficients : RecurrenceCoefficients):
    if not (x[0] > 0.0 and x[-1] < 1.0 and np.all(np.diff(x) > 0.0)):
        raise ComputationError(f"Zeros for (m={m}, n={n}, {parity}) are not strictly increasing in (0, 1)")

    value, derivative = ChainValueAndDerivative(m, n, parity, x, coefficients)
    residual = np.abs((value / derivative).ToFloat())

    bad = np.nonzero(residual > CertificateTolerance(n) * NodeSpacing(x, parity))[0]
    if len(bad):
        index = bad[0]
        raise ComputationError(f"Zero {index} for (m={m}, n={n}, {parity}) failed its residual certificate",
                               details={ 'm': m, 'n': n, 'parity': parity, 'node': float(x[index]), 'residual': float(residual[index]) })

def ComputeWeights(m : int, n : int, parity : str, nodes, coefficients : RecurrenceCoefficients = None):
    """
    Weights at the certified zeros, plus the center weight for the odd chain (None for even)
    """
    _check_arguments(m, n)
    parity = ParseParity(parity)
    coefficients = coefficients or RecurrenceCoefficients(m, ChainDegree(m, n, parity) + 2)
    nodes = np.asarray(nodes, dtype=np.float64)

    _, derivative = ChainValueAndDerivative(m, n, parity, nodes, coefficients)
    if np.any(derivative.mantissa == 0.0):
        raise ComputationError(f"Derivative vanishes at a node for (m={m}, n={n}, {parity})")

    numerator = 2 * (2 * m + 4 * n + 1) if parity == EVEN else 2 * (2 * m + 4 * n + 3)
    denominator = derivative * derivative * ((1.0 - nodes) * (1.0 + nodes))
    weights = (ScaledReal(np.full(nodes.shape, float(numerator))) / denominator).ToFloat()

    center_weight = None
    if parity == ODD:
        _, center_derivative = ChainValueAndDerivative(m, n, ODD, np.zeros(1), coefficients)
        if center_derivative.mantissa[0] == 0.0:
            raise ComputationError(f"Derivative vanishes at the origin for (m={m}, n={n}, odd)")
        center = ScaledReal(np.full(1, float(2 * m + 4 * n + 3))) / (center_derivative * center_derivative)
        center_weight = float(center.ToFloat()[0])

    return weights, center_weight

def BuildRule(m : int, n : int, parity : str, max_iterations : int = default_max_iterations) -> QuadratureRule:
    parity = ParseParity(parity)
    _check_arguments(m, n)
    coefficients = RecurrenceCoefficients(m, ChainDegree(m, n, parity) + 2)

    nodes = FindZeros(m, n, parity, max_iterations=max_iterations, coefficients=coefficients)
    weights, center_weight = ComputeWeights(m, n, parity, nodes, coefficients)

    rule = QuadratureRule(m, n, parity, nodes, weights, center_weight)
    rule.Validate()

    logging.info(f"Built {parity} quadrature rule for m={m}, n={n}")
    return rule
