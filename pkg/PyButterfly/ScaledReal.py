import numpy as np

# ldexp shifts beyond this flush to zero (or overflow) anyway
_max_shift = 2200

class ScaledReal:
    """
    A real number, or an array of them, held as mantissa * 2**exponent with |mantissa| in [0.5, 1).

    Products and recurrences on these never underflow or overflow: the exponent is an
    unbounded integer and every operation renormalises the mantissa.
    """
    __slots__ = ('mantissa', 'exponent')

    def __init__(self, mantissa, exponent = 0):
        mantissa, shift = np.frexp(np.asarray(mantissa, dtype=np.float64))
        exponent = np.asarray(exponent, dtype=np.int64) + shift
        self.mantissa = mantissa
        self.exponent = np.where(mantissa == 0.0, 0, exponent).astype(np.int64)

    @classmethod
    def FromFloat(cls, value):
        return cls(value)

    @classmethod
    def Zeros(cls, shape):
        return cls(np.zeros(shape))

    def __repr__(self) -> str:
        return f"ScaledReal({self.mantissa!r}, {self.exponent!r})"

    def __float__(self) -> float:
        return float(self.ToFloat())

    def __len__(self) -> int:
        return len(self.mantissa)

    def __getitem__(self, index):
        return ScaledReal(self.mantissa[index], self.exponent[index])

    @property
    def shape(self):
        return self.mantissa.shape

    def ToFloat(self):
        """
        Convert to doubles; values below the double range flush to zero
        """
        exponent = np.clip(self.exponent, -_max_shift, _max_shift).astype(np.int32)
        return np.ldexp(self.mantissa, exponent)

    def Sign(self):
        return np.sign(self.mantissa)

    def Abs(self):
        return ScaledReal(np.abs(self.mantissa), self.exponent)

    def Sqrt(self):
        odd = (self.exponent % 2) != 0
        mantissa = np.where(odd, self.mantissa * 2.0, self.mantissa)
        exponent = np.where(odd, self.exponent - 1, self.exponent)
        return ScaledReal(np.sqrt(mantissa), exponent // 2)

    def __neg__(self):
        return ScaledReal(-self.mantissa, self.exponent)

    def __mul__(self, other):
        if isinstance(other, ScaledReal):
            return ScaledReal(self.mantissa * other.mantissa, self.exponent + other.exponent)
        return ScaledReal(self.mantissa * np.asarray(other, dtype=np.float64), self.exponent)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, ScaledReal):
            return ScaledReal(self.mantissa / other.mantissa, self.exponent - other.exponent)
        return ScaledReal(self.mantissa / np.asarray(other, dtype=np.float64), self.exponent)

    def __add__(self, other):
        if not isinstance(other, ScaledReal):
            other = ScaledReal(other)

        # Zero carries no exponent, so it must not set the common scale
        floor = np.iinfo(np.int64).min // 2
        left = np.where(self.mantissa == 0.0, floor, self.exponent)
        right = np.where(other.mantissa == 0.0, floor, other.exponent)
        exponent = np.maximum(left, right)
        exponent = np.where(exponent == floor, 0, exponent)

        mantissa = _shift(self.mantissa, left - exponent) + _shift(other.mantissa, right - exponent)
        return ScaledReal(mantissa, exponent)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, ScaledReal):
            other = ScaledReal(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __pow__(self, power : int):
        if int(power) != power or power < 0:
            raise ValueError("ScaledReal only supports non-negative integer powers")

        power = int(power)
        result = ScaledReal(np.ones_like(self.mantissa))
        base = self
        while power:
            if power & 1:
                result = result * base
            base = base * base
            power >>= 1

        return result

def _shift(mantissa, shift):
    return np.ldexp(mantissa, np.clip(shift, -_max_shift, 0).astype(np.int32))
