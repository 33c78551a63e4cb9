import logging
logging.basicConfig(encoding='utf-8')
import math
import numpy as np

from PyButterfly.ButterflyError import ButterflyError, VerificationError
from PyButterfly.Helpers import RandomGenerator, RandomUnitVector
from PyButterfly.InterpolativeDecomposition import IdFixedRank, entry_bound, entry_tolerance
from PyButterfly.Legendre import DegreeSweep, parities
from PyButterfly.LegendreTransform import BuildTransform
from PyButterfly.Options import Options
from PyButterfly.Oracles import EvenPolynomial, LegendreDirect, PlantedSpectrumMatrix, PolynomialIntegral, SpectralNorm, SingularValues
from PyButterfly.Quadrature import BuildRule
from PyButterfly.QuadratureCache import QuadratureCache

exactness_tolerance = 1e-12
recurrence_tolerance = 1e-12
adjoint_tolerance = 1e-12
round_trip_tolerance = 1e-10
dense_tolerance = 1e-12

class PropertyResult:
    def __init__(self, name : str, passed : bool, checked : int, failure : str = None):
        self.name = name
        self.passed = passed
        self.checked = checked
        self.failure = failure

    def __str__(self) -> str:
        if self.passed:
            return f"{self.name}: PASS ({self.checked} checks)"
        return f"{self.name}: FAIL {self.failure}"

class VerificationSuite:
    """
    Property checks over the whole pipeline, deterministic for a given seed
    """
    def __init__(self, options : Options, cache : QuadratureCache = None):
        self.options = Options(options)
        self.cache = cache or QuadratureCache(self.options.cache_dir())
        self.seed = self.options.seed()
        self.n = int(self.options.get('verify_n'))
        self.matrices = int(self.options.get('verify_matrices'))
        self.perturb = float(self.options.get('perturb') or 0.0)
        self._transforms = None

    @property
    def properties(self):
        return [
            ('id_bounds', self.CheckIdBounds),
            ('quadrature_exactness', self.CheckQuadratureExactness),
            ('recurrence_oracle', self.CheckRecurrenceOracle),
            ('adjoint_identity', self.CheckAdjointIdentity),
            ('round_trip', self.CheckRoundTrip),
            ('dense_oracle', self.CheckDenseOracle),
        ]

    def Run(self):
        """
        Yield one PropertyResult per property; a property stops at its first failing instance
        """
        for name, check in self.properties:
            try:
                checked = check()
                yield PropertyResult(name, True, checked)

            except VerificationError as e:
                yield PropertyResult(name, False, 0, f"{e} [instance: {e.instance}]")

            except ButterflyError as e:
                logging.error(f"Error checking {name}: {e}")
                yield PropertyResult(name, False, 0, f"error: {e}")

    def CheckIdBounds(self) -> int:
        rng = RandomGenerator(self.seed, 1)
        checked = 0
        for index in range(self.matrices):
            n_rows, n_cols = int(rng.integers(8, 40)), int(rng.integers(8, 40))
            matrix = PlantedSpectrumMatrix(rng, n_rows, n_cols, decay=float(rng.uniform(0.5, 0.8)))
            sigma = SingularValues(matrix)

            for k in range(1, min(n_rows, n_cols)):
                decomposition = IdFixedRank(matrix, k)
                instance = { 'matrix': index, 'shape': (n_rows, n_cols), 'k': k }

                if decomposition.max_entry > entry_bound + entry_tolerance:
                    raise VerificationError(f"Interpolation entry {decomposition.max_entry} exceeds {entry_bound}", 'id_bounds', instance)

                error = SpectralNorm(matrix - decomposition.Reconstruct(decomposition.Skeleton(matrix)))
                bound = math.sqrt(4 * k * (n_cols - k) + 1) * sigma[k]
                if error > bound * (1 + 1e-8) + 1e-14:
                    raise VerificationError(f"Reconstruction error {error:.3e} exceeds bound {bound:.3e}", 'id_bounds', instance)

                checked += 1

        return checked

    def CheckQuadratureExactness(self) -> int:
        rng = RandomGenerator(self.seed, 2)
        checked = 0
        for m in (0, 1, 2, 8):
            for n in (1, 2, 3, 8):
                for parity in parities:
                    rule = BuildRule(m, n, parity)
                    if self.perturb:
                        rule = rule.Perturbed(self.perturb)

                    degree = 2 * n - 1 if parity == 'even' else 2 * n
                    coefficients = rng.uniform(-1.0, 1.0, degree + 1)

                    exact = float(PolynomialIntegral(m, coefficients))
                    scale = float(PolynomialIntegral(m, np.abs(coefficients)))
                    error = abs(rule.Integrate(EvenPolynomial(coefficients)) - exact)

                    if error > exactness_tolerance * scale:
                        instance = { 'm': m, 'n': n, 'parity': parity }
                        raise VerificationError(f"Quadrature error {error:.3e} relative to {scale:.3e}", 'quadrature_exactness', instance)

                    checked += 1

        return checked

    def CheckRecurrenceOracle(self) -> int:
        # Fixed points, since rule nodes are zeros of one of the swept degrees
        x = np.linspace(0.05, 0.95, 19)
        checked = 0
        for m in (0, 5):
            for parity in parities:
                sweep = DegreeSweep(m, x, parity)
                for j in range(20):
                    values = sweep.Next().ToFloat()
                    l = sweep.degree - 2
                    exact = np.array([ LegendreDirect(m, l, point) for point in x ])

                    error = np.max(np.abs(values - exact))
                    if error > recurrence_tolerance * max(1.0, np.max(np.abs(exact))):
                        instance = { 'm': m, 'l': l }
                        raise VerificationError(f"Recurrence error {error:.3e} at degree {l}", 'recurrence_oracle', instance)

                    checked += 1

        return checked

    def CheckAdjointIdentity(self) -> int:
        checked = 0
        for stream, transform in enumerate(self._get_transforms()):
            v = RandomUnitVector(transform.n, self.seed, 100 + 2 * stream)
            w = RandomUnitVector(transform.n, self.seed, 101 + 2 * stream)

            difference = abs(np.dot(transform.Forward(v), w) - np.dot(v, transform.Inverse(w)))
            if difference > adjoint_tolerance:
                raise VerificationError(f"Adjoint mismatch {difference:.3e}", 'adjoint_identity', repr(transform))

            checked += 1

        return checked

    def CheckRoundTrip(self) -> int:
        checked = 0
        for stream, transform in enumerate(self._get_transforms()):
            v = RandomUnitVector(transform.n, self.seed, 200 + stream)
            error = np.max(np.abs(transform.Inverse(transform.Forward(v)) - v))
            if error > round_trip_tolerance:
                raise VerificationError(f"Round trip error {error:.3e}", 'round_trip', repr(transform))

            checked += 1

        return checked

    def CheckDenseOracle(self) -> int:
        checked = 0
        for stream, transform in enumerate(self._get_transforms()):
            v = RandomUnitVector(transform.n, self.seed, 300 + stream)
            error = np.max(np.abs(transform.Forward(v) - transform.DenseMatrix() @ v))
            if error > dense_tolerance:
                raise VerificationError(f"Forward transform differs from the dense product by {error:.3e}", 'dense_oracle', repr(transform))

            checked += 1

        return checked

    def _get_transforms(self):
        if self._transforms is None:
            options = self.options
            self._transforms = [ BuildTransform(m, self.n, parity, options.epsilon(), options.block_width(), options=options, cache=self.cache)
                                 for m in (0, 4) for parity in parities ]
        return self._transforms
