"""
Slow, independent reference computations used to check the fast paths
"""
from fractions import Fraction
from math import comb
import mpmath
import numpy as np

base_digits = 50

def LegendreDirect(m : int, l : int, x) -> float:
    """
    Normalized P^m_l(x) by direct summation of the explicit polynomial, in enough digits
    to absorb the cancellation between its terms
    """
    with mpmath.workdps(base_digits + int(0.7 * l)):
        x = mpmath.mpf(x)
        derivative = mpmath.mpf(0)
        for k in range(0, (l - m) // 2 + 1):
            power = l - 2 * k
            term = mpmath.binomial(l, k) * mpmath.binomial(2 * l - 2 * k, l) * mpmath.factorial(power) / mpmath.factorial(power - m)
            derivative += (-1) ** k * term * x ** (power - m)

        p = derivative / mpmath.mpf(2) ** l * (1 - x * x) ** (mpmath.mpf(m) / 2)
        normalization = mpmath.sqrt((2 * l + 1) * mpmath.factorial(l - m) / (2 * mpmath.factorial(l + m)))
        return float(normalization * p)

def MonomialIntegral(m : int, q : int) -> Fraction:
    """
    Exact integral of x^(2q) (1-x^2)^m over [-1, 1]
    """
    return sum(Fraction((-1) ** i * comb(m, i) * 2, 2 * q + 2 * i + 1) for i in range(m + 1))

def PolynomialIntegral(m : int, coefficients) -> Fraction:
    """
    Exact integral of (1-x^2)^m sum_q a_q x^(2q) over [-1, 1]
    """
    return sum(Fraction(float(a)) * MonomialIntegral(m, q) for q, a in enumerate(coefficients))

def EvenPolynomial(coefficients):
    """
    Callable x -> sum_q a_q x^(2q)
    """
    coefficients = np.asarray(coefficients, dtype=np.float64)
    def evaluate(x):
        return np.polynomial.polynomial.polyval(np.asarray(x, dtype=np.float64) ** 2, coefficients)
    return evaluate

def PositiveGaussLegendreNodes(count : int):
    """
    Positive nodes of the classical Gauss-Legendre rule with `count` points
    """
    nodes, _ = np.polynomial.legendre.leggauss(count)
    return np.sort(nodes[nodes > 0.0])

def SingularValues(matrix):
    return np.linalg.svd(np.asarray(matrix, dtype=np.float64), compute_uv=False)

def SpectralNorm(matrix) -> float:
    matrix = np.asarray(matrix, dtype=np.float64)
    return float(SingularValues(matrix)[0]) if matrix.size else 0.0

def PlantedSpectrumMatrix(rng : np.random.Generator, n_rows : int, n_cols : int, decay : float = 0.5):
    """
    Random matrix U diag(s) V^T with geometrically decaying singular values s_i = decay^i
    """
    rank = min(n_rows, n_cols)
    u, _ = np.linalg.qr(rng.standard_normal((n_rows, rank)))
    v, _ = np.linalg.qr(rng.standard_normal((n_cols, rank)))
    spectrum = decay ** np.arange(rank)
    return (u * spectrum) @ v.T
