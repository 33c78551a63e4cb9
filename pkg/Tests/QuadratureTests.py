import json
import math
import os
import tempfile
import numpy as np

from PyButterfly.ButterflyError import ArgumentError, ComputationError
from PyButterfly.Helpers import RandomGenerator
from PyButterfly.Legendre import EVEN, ODD, ChainValue
from PyButterfly.Oracles import EvenPolynomial, MonomialIntegral, PositiveGaussLegendreNodes
from PyButterfly.Quadrature import BuildRule, CertificateTolerance, FindZeros, NodeSpacing, QuadratureRule
from PyButterfly.QuadratureCache import QuadratureCache
from PyButterfly.Serialisation import ButterflyDecoder, ButterflyEncoder
from Tests.TestHelpers import assert_close, assert_raises, assert_true, run_test_functions

def test_small_rules(logger):
    even = BuildRule(0, 1, EVEN)
    assert_close(even.nodes, [1 / math.sqrt(3)], 1e-15, "Even node for m=0, n=1")
    assert_close(even.weights, [2.0], 1e-14, "Even weight for m=0, n=1")
    assert_true(even.center_weight is None, "Even rules have no center weight")

    odd = BuildRule(0, 1, ODD)
    assert_close(odd.nodes, [math.sqrt(0.6)], 1e-15, "Odd node for m=0, n=1")
    assert_close(odd.weights, [10 / 9], 1e-14, "Odd weight for m=0, n=1")
    assert_close(odd.center_weight, 8 / 9, 1e-14, "Center weight for m=0, n=1")

def test_monomials(logger):
    rule = BuildRule(2, 8, EVEN)
    for q in range(15):
        exact = float(MonomialIntegral(2, q))
        actual = rule.Integrate(lambda x: np.asarray(x) ** (2 * q))
        assert_close(actual, exact, 1e-13 * exact, f"Integral of x^{2 * q} (1-x^2)^2")

def test_exactness_grid(logger):
    rng = RandomGenerator(21)
    for m in (0, 1, 2, 8, 32):
        for n in (1, 2, 3, 8, 64):
            for parity in (EVEN, ODD):
                rule = BuildRule(m, n, parity)
                count = 2 * n if parity == EVEN else 2 * n + 1
                integrals = np.array([ float(MonomialIntegral(m, q)) for q in range(count) ])

                worst = 0.0
                for _ in range(50):
                    coefficients = rng.uniform(-1.0, 1.0, count)
                    exact = math.fsum(coefficients * integrals)
                    scale = math.fsum(np.abs(coefficients) * integrals)
                    error = abs(rule.Integrate(EvenPolynomial(coefficients)) - exact) / scale
                    worst = max(worst, error)

                assert_true(worst <= 1e-12, f"m={m}, n={n}, {parity}: relative error {worst:.3e}")

            logger.info(f"m={m}, n={n}: exact through degree {4 * n}")

def test_one_degree_beyond(logger):
    # x^(4n) is the first even monomial the even rule cannot integrate
    for m, n in ((0, 3), (2, 5)):
        rule = BuildRule(m, n, EVEN)
        exact = float(MonomialIntegral(m, 2 * n))
        actual = rule.Integrate(lambda x: np.asarray(x) ** (4 * n))
        assert_true(abs(actual - exact) > 1e-10 * exact, f"m={m}, n={n}: x^{4 * n} should not be integrated exactly")

def test_interlacing(logger):
    for m in (0, 3, 40, 500):
        for n in (1, 7, 60):
            x = BuildRule(m, n, EVEN).nodes
            y = BuildRule(m, n, ODD).nodes
            assert_true(np.all(x < y), f"m={m}, n={n}: odd nodes must lie above the even nodes")
            assert_true(np.all(y[:-1] < x[1:]), f"m={m}, n={n}: odd nodes must lie below the next even node")

def test_gauss_legendre_nodes(logger):
    for n in (1, 4, 16, 32):
        even = BuildRule(0, n, EVEN)
        assert_close(even.nodes, PositiveGaussLegendreNodes(2 * n), 1e-13, f"Even nodes, n={n}")

        nodes, weights = np.polynomial.legendre.leggauss(2 * n)
        assert_close(even.weights, 2 * weights[nodes > 0][np.argsort(nodes[nodes > 0])], 1e-13, f"Even weights, n={n}")

        odd = BuildRule(0, n, ODD)
        assert_close(odd.nodes, PositiveGaussLegendreNodes(2 * n + 1), 1e-13, f"Odd nodes, n={n}")

        nodes, weights = np.polynomial.legendre.leggauss(2 * n + 1)
        center = weights[np.argmin(np.abs(nodes))]
        assert_close(odd.center_weight, center, 1e-13, f"Center weight, n={n}")

def test_nodes_are_zeros(logger):
    for m, n, parity in ((0, 10, EVEN), (7, 25, ODD), (300, 40, EVEN), (2000, 50, ODD)):
        nodes = FindZeros(m, n, parity)
        values = ChainValue(m, n, parity, nodes)
        neighbours = ChainValue(m, n, parity, np.clip(nodes + 1e-3 * np.diff(np.concatenate(([0.0], nodes))), 0.0, 1.0))
        assert_true(np.all(np.abs(values.ToFloat()) <= 1e-7 * np.abs(neighbours.ToFloat())),
                    f"m={m}, n={n}, {parity}: function is not small at its zeros")

def test_large_rules(logger):
    for n in (256, 1024, 2500):
        for parity in (EVEN, ODD):
            rule = BuildRule(0, n, parity)
            total = rule.Integrate(np.ones_like)
            assert_close(total, 2.0, 2e-11, f"n={n}, {parity}: weights must sum to the interval length")

            if n <= 1024:
                count = 2 * n if parity == EVEN else 2 * n + 1
                assert_close(rule.nodes, PositiveGaussLegendreNodes(count), 1e-12, f"n={n}, {parity}: Gauss-Legendre nodes")

            logger.info(f"m=0, n={n}, {parity}: weight sum error {abs(total - 2.0):.2e}")

    for parity in (EVEN, ODD):
        rule = BuildRule(1250, 1250, parity)
        exact = float(MonomialIntegral(1250, 0))
        assert_close(rule.Integrate(np.ones_like), exact, 1e-11 * exact, f"m=1250, n=1250, {parity}: integral of the weight function")

def test_node_spacing(logger):
    nodes = np.array([0.1, 0.3, 0.4])
    assert_close(NodeSpacing(nodes, EVEN), [0.2, 0.1, 0.1], 1e-15, "Even spacing mirrors the first node")
    assert_close(NodeSpacing(nodes, ODD), [0.1, 0.1, 0.1], 1e-15, "Odd spacing counts the zero at the origin")
    assert_close(NodeSpacing([0.5], EVEN), [1.0], 0.0, "Single even node")

    assert_true(CertificateTolerance(10) == 1e-11, "Small rules use the base tolerance")
    assert_true(CertificateTolerance(2500) > 1e-11, "Large rules allow for rounding in the recurrence")

def test_large_order_weights(logger):
    for m, n in ((1000, 20), (2000, 50)):
        rule = BuildRule(m, n, EVEN)
        assert_true(np.all(rule.weights > 0.0), f"m={m}, n={n}: weights must be positive")
        exact = float(MonomialIntegral(m, 0))
        assert_close(rule.Integrate(lambda x: np.ones_like(x)), exact, 1e-12 * exact, f"Integral of (1-x^2)^{m}")

def test_integrate_and_perturb(logger):
    rule = BuildRule(3, 6, ODD)
    exact = float(MonomialIntegral(3, 4))
    assert_close(rule.Integrate(lambda x: np.asarray(x) ** 8), exact, 1e-13 * exact, "Odd rule on x^8")

    perturbed = rule.Perturbed(1e-3)
    assert_close(perturbed.weights, rule.weights * 1.001, 1e-15, "Perturbed weights")
    assert_close(perturbed.center_weight, rule.center_weight * 1.001, 1e-15, "Perturbed center weight")
    assert_true(np.array_equal(perturbed.nodes, rule.nodes), "Perturbation must not move the nodes")
    assert_true(np.array_equal(rule.weights, BuildRule(3, 6, ODD).weights), "Perturbation must not modify the original rule")

def test_validate(logger):
    good = BuildRule(1, 4, EVEN)
    good.Validate()

    unordered = QuadratureRule(1, 4, EVEN, good.nodes[::-1], good.weights)
    assert_raises(ComputationError, unordered.Validate, "Decreasing nodes")

    negative = QuadratureRule(1, 4, EVEN, good.nodes, -good.weights)
    assert_raises(ComputationError, negative.Validate, "Negative weights")

    no_center = QuadratureRule(1, 4, ODD, good.nodes, good.weights)
    assert_raises(ComputationError, no_center.Validate, "Odd rule without a center weight")

    short = QuadratureRule(1, 5, EVEN, good.nodes, good.weights)
    assert_raises(ComputationError, short.Validate, "Wrong node count")

def test_argument_errors(logger):
    assert_raises(ArgumentError, lambda: BuildRule(-1, 2, EVEN), "Negative order")
    assert_raises(ArgumentError, lambda: BuildRule(0, 0, EVEN), "No nodes")
    assert_raises(ArgumentError, lambda: BuildRule(0, 2, 'sideways'), "Unknown parity")
    assert_raises(ComputationError, lambda: FindZeros(0, 8, EVEN, max_iterations=1), "Iteration limit")

def test_rule_json(logger):
    rule = BuildRule(5, 9, ODD)
    restored = json.loads(json.dumps(rule, cls=ButterflyEncoder), cls=ButterflyDecoder)
    assert_true(isinstance(restored, QuadratureRule), "Decoded object should be a QuadratureRule")
    assert_true(restored.key == rule.key, "Decoded rule has the wrong key")
    assert_true(np.array_equal(restored.nodes, rule.nodes) and np.array_equal(restored.weights, rule.weights), "JSON must preserve nodes and weights exactly")
    assert_true(restored.center_weight == rule.center_weight, "JSON must preserve the center weight")

def test_cache_memory(logger):
    cache = QuadratureCache()
    first = cache.GetRule(2, 10, 'even')
    assert_true(cache.GetRule(2, 10, EVEN) is first, "A second lookup should return the cached rule")

    cache.Clear()
    assert_true(cache.GetRule(2, 10, EVEN) is not first, "Clear should drop cached rules")

def test_cache_files(logger):
    with tempfile.TemporaryDirectory() as cache_dir:
        rule = QuadratureCache(cache_dir).GetRule(4, 12, ODD)
        filepath = QuadratureCache(cache_dir).GetRuleFilepath(rule.key)
        assert_true(os.path.exists(filepath), "Rule should be written to the cache directory")

        loaded = QuadratureCache(cache_dir).GetRule(4, 12, ODD)
        assert_true(np.array_equal(loaded.nodes, rule.nodes), "Rule read from file differs from the built rule")

        with open(filepath, 'w', encoding='utf-8') as f:
            f.write("{ not json")

        rebuilt = QuadratureCache(cache_dir).GetRule(4, 12, ODD)
        assert_true(np.array_equal(rebuilt.nodes, rule.nodes), "Corrupt cache file should be rebuilt")

        with open(filepath, 'r', encoding='utf-8') as f:
            assert_true(isinstance(json.load(f, cls=ButterflyDecoder), QuadratureRule), "Rebuilt rule should replace the corrupt file")

def run_tests(results_path):
    tests = [
        ('small rules', test_small_rules),
        ('monomials', test_monomials),
        ('exactness grid', test_exactness_grid),
        ('one degree beyond', test_one_degree_beyond),
        ('interlacing', test_interlacing),
        ('gauss-legendre nodes', test_gauss_legendre_nodes),
        ('nodes are zeros', test_nodes_are_zeros),
        ('large rules', test_large_rules),
        ('node spacing', test_node_spacing),
        ('large order weights', test_large_order_weights),
        ('integrate and perturb', test_integrate_and_perturb),
        ('validate', test_validate),
        ('argument errors', test_argument_errors),
        ('rule json', test_rule_json),
        ('cache memory', test_cache_memory),
        ('cache files', test_cache_files),
    ]

    return run_test_functions(tests, results_path, 'QuadratureTests')
