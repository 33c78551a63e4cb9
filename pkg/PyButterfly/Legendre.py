"""
Normalized associated Legendre functions of fixed order m, evaluated by the three-term
recurrence in x**2 that links degrees l-2, l and l+2, with exponents tracked explicitly.
"""
import logging
logging.basicConfig(encoding='utf-8')
import math
import numpy as np

from PyButterfly.ButterflyError import ArgumentError, DomainError
from PyButterfly.ScaledReal import ScaledReal

EVEN = 'even'
ODD = 'odd'
parities = (EVEN, ODD)

def ParseParity(parity) -> str:
    parity = str(parity).strip().lower()
    if parity not in parities:
        raise ArgumentError(f"Parity must be 'even' or 'odd' (got '{parity}')")
    return parity

def ChainDegree(m : int, j : int, parity : str) -> int:
    """
    Degree of the j-th member of the even (m+2j) or odd (m+2j+1) chain
    """
    return m + 2 * j + (1 if parity == ODD else 0)

class RecurrenceCoefficients:
    """
    c_l and d_l for l = m, m+1, ..., extended on demand
    """
    def __init__(self, m : int, max_degree : int = None):
        if m < 0:
            raise ArgumentError(f"Order must be non-negative (got {m})")

        self.m = m
        self.c = np.empty(0)
        self.d = np.empty(0)
        self.Extend(max_degree if max_degree is not None else m + 32)

    @property
    def max_degree(self) -> int:
        return self.m + len(self.c) - 1

    def Extend(self, max_degree : int):
        if max_degree <= self.max_degree:
            return

        m = self.m
        size = max(max_degree - m + 1, 2 * len(self.c))
        l = np.arange(m, m + size, dtype=np.float64)

        # Factored to keep the four-fold product inside the exact integer range of a double
        self.c = np.sqrt((l - m + 1) * (l + m + 1) / ((2 * l + 1) * (2 * l + 3))) \
               * np.sqrt((l - m + 2) * (l + m + 2) / ((2 * l + 3) * (2 * l + 5)))
        self.d = (2 * l * (l + 1) - 2 * m * m - 1) / ((2 * l - 1) * (2 * l + 3))

        if not (np.all(np.isfinite(self.c)) and np.all(np.isfinite(self.d))):
            raise ArgumentError(f"Recurrence coefficients for order {m} are not finite")

    def C(self, l : int) -> float:
        self.Extend(l)
        return self.c[l - self.m]

    def D(self, l : int) -> float:
        self.Extend(l)
        return self.d[l - self.m]

def _check_points(x):
    x = np.asarray(x, dtype=np.float64)
    if np.any(~(np.abs(x) < 1.0)):
        raise DomainError("Associated Legendre functions are evaluated on (-1, 1) only", points=x[~(np.abs(x) < 1.0)])
    return x

def FirstValues(m : int, x, coefficients : RecurrenceCoefficients = None):
    """
    P^m_m, P^m_{m+1}, P^m_{m+2} and P^m_{m+3} at x, as ScaledReal values
    """
    x = _check_points(x)
    coefficients = coefficients or RecurrenceCoefficients(m)

    # sqrt(1/2) * prod_{k=1..m} sqrt((2k+1)/(2k)) grows like m**(1/4), no scaling needed
    k = np.arange(1, m + 1, dtype=np.float64)
    constant = math.sqrt(0.5) * float(np.prod(np.sqrt((2 * k + 1) / (2 * k))))

    sine = ScaledReal(np.sqrt((1.0 - x) * (1.0 + x)))
    p_m = (sine ** m) * constant
    p_m1 = p_m * (math.sqrt(2 * m + 3) * x)

    x2 = x * x
    p_m2 = p_m * ((x2 - coefficients.D(m)) / coefficients.C(m))
    p_m3 = p_m1 * ((x2 - coefficients.D(m + 1)) / coefficients.C(m + 1))

    return p_m, p_m1, p_m2, p_m3

class DegreeSweep:
    """
    Walks one parity chain of P^m_l(x) upwards in degree, one O(1) step per value.

    x may be an array, in which case every point advances in lockstep.
    """
    def __init__(self, m : int, x, parity : str, coefficients : RecurrenceCoefficients = None):
        self.m = m
        self.x = _check_points(x)
        self.parity = ParseParity(parity)
        self.coefficients = coefficients or RecurrenceCoefficients(m)
        self.next_j = 0

        first = FirstValues(m, self.x, self.coefficients)
        if self.parity == EVEN:
            self._seeds = (first[0], first[2])
        else:
            self._seeds = (first[1], first[3])

        self._x2 = self.x * self.x
        self._previous = None
        self._current = None

    @property
    def degree(self) -> int:
        """ Degree of the value the next call to Next() returns """
        return ChainDegree(self.m, self.next_j, self.parity)

    def Next(self) -> ScaledReal:
        j = self.next_j
        if j < 2:
            value = self._seeds[j]
        else:
            l = ChainDegree(self.m, j - 1, self.parity)
            c = self.coefficients
            c_l = c.C(l)
            value = self._current * ((self._x2 - c.D(l)) / c_l) - self._previous * (c.C(l - 2) / c_l)

        self._previous, self._current = self._current, value
        self.next_j += 1
        return value

    def Advance(self, steps : int) -> ScaledReal:
        """
        Step forward and return the last value
        """
        value = None
        for _ in range(steps):
            value = self.Next()
        return value

def MakeSweep(m : int, x, parity : str) -> DegreeSweep:
    return DegreeSweep(m, x, parity)

def SweepNext(sweep : DegreeSweep) -> ScaledReal:
    return sweep.Next()

def ChainValue(m : int, j : int, parity : str, x, coefficients : RecurrenceCoefficients = None) -> ScaledReal:
    """
    Value of the j-th member of a chain at x
    """
    return DegreeSweep(m, x, parity, coefficients).Advance(j + 1)

def DerivativeScaled(m : int, l : int, x, p_l : ScaledReal, p_lm1 : ScaledReal) -> ScaledReal:
    """
    d/dx P^m_l(x) from (1-x^2) P' = -l x P_l + sqrt((2l+1)(l^2-m^2)/(2l-1)) P_{l-1}
    """
    x = _check_points(x)
    if l < m:
        raise ArgumentError(f"Degree {l} is below order {m}")

    ratio = (2 * l + 1) * (l * l - m * m) / (2 * l - 1)
    term = p_l * (-l * x) + p_lm1 * math.sqrt(max(ratio, 0.0))
    return term / ((1.0 - x) * (1.0 + x))

def Derivative(m : int, l : int, x, p_l : ScaledReal, p_lm1 : ScaledReal):
    derivative = DerivativeScaled(m, l, x, p_l, p_lm1).ToFloat()
    return float(derivative) if np.ndim(derivative) == 0 else derivative

def ChainValueAndDerivative(m : int, j : int, parity : str, x, coefficients : RecurrenceCoefficients = None):
    """
    Value and derivative of the j-th chain member at x.

    The derivative needs P^m_{l-1}, which lives on the opposite chain, so a second
    sweep over that chain runs alongside.
    """
    x = _check_points(x)
    parity = ParseParity(parity)
    coefficients = coefficients or RecurrenceCoefficients(m)

    l = ChainDegree(m, j, parity)
    p_l = ChainValue(m, j, parity, x, coefficients)

    if l == m:
        p_lm1 = ScaledReal.Zeros(x.shape)
    elif parity == EVEN:
        p_lm1 = ChainValue(m, j - 1, ODD, x, coefficients)
    else:
        p_lm1 = ChainValue(m, j, EVEN, x, coefficients)

    return p_l, DerivativeScaled(m, l, x, p_l, p_lm1)
