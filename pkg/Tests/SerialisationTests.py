import json
import os
import struct
import tempfile
import numpy as np

from PyButterfly.BenchmarkRow import BenchmarkRow
from PyButterfly.ButterflyBuilder import BuildPlan
from PyButterfly.ButterflyError import ComputationError, PlanFormatError
from PyButterfly.ButterflyPlan import ButterflyPlan
from PyButterfly.ColumnSource import DenseColumnSource
from PyButterfly.Helpers import RandomGenerator, RandomUnitVector
from PyButterfly.Legendre import EVEN, ODD
from PyButterfly.LegendreTransform import BuildTransform, TransformPlan
from PyButterfly.PlanSerialisation import DeserialisePlan, ReadPlanFile, SerialisePlan, WritePlanFile, magic
from PyButterfly.Serialisation import ButterflyDecoder, ButterflyEncoder
from Tests.TestHelpers import assert_raises, assert_true, run_test_functions

def test_transform_round_trip(logger):
    for parity in (EVEN, ODD):
        transform = BuildTransform(3, 150, parity, 1e-14, 20)
        data = SerialisePlan(transform)
        assert_true(data.startswith(magic), "Plan data must start with the magic bytes")

        restored = DeserialisePlan(data)
        assert_true(isinstance(restored, TransformPlan), "A transform plan should be restored as a TransformPlan")
        assert_true(SerialisePlan(restored) == data, f"{parity}: write, read, write is not byte-identical")
        assert_true(restored.rule.center_weight == transform.rule.center_weight, f"{parity}: center weight changed")

        v = RandomUnitVector(150, 10)
        assert_true(np.array_equal(restored.Forward(v), transform.Forward(v)), f"{parity}: forward results differ after reloading")
        assert_true(np.array_equal(restored.Inverse(v), transform.Inverse(v)), f"{parity}: inverse results differ after reloading")
        logger.info(f"{parity} plan for m=3, n=150: {len(data)} bytes")

def test_butterfly_plan_round_trip(logger):
    rng = RandomGenerator(41)
    matrix = rng.standard_normal((90, 3)) @ rng.standard_normal((3, 70))
    plan = BuildPlan(DenseColumnSource(matrix), 1e-12, 8)

    restored = DeserialisePlan(SerialisePlan(plan))
    assert_true(isinstance(restored, ButterflyPlan), "A bare plan should be restored as a ButterflyPlan")
    assert_true(restored.levels == plan.levels and restored.m_max == plan.m_max, "Plan header fields changed")
    assert_true(np.array_equal(restored.DenseMatrix(), plan.DenseMatrix()), "Reloaded plan applies differently")

def test_plan_files(logger):
    transform = BuildTransform(0, 64, EVEN, 1e-14, 16)
    with tempfile.TemporaryDirectory() as directory:
        filepath = os.path.join(directory, "plan.bfly")
        WritePlanFile(filepath, transform)
        restored = ReadPlanFile(filepath)

        with open(filepath, 'rb') as f:
            assert_true(f.read() == SerialisePlan(restored), "File contents differ from the reloaded plan's encoding")

def test_corrupt_data(logger):
    data = SerialisePlan(BuildTransform(1, 40, ODD, 1e-14, 10))

    error = assert_raises(PlanFormatError, lambda: DeserialisePlan(b"BFLY2" + data[5:]), "Wrong version")
    assert_true(error.offset == 0, f"Bad magic should be reported at offset 0, not {error.offset}")

    assert_raises(PlanFormatError, lambda: DeserialisePlan(data[:-3]), "Truncated plan")
    assert_raises(PlanFormatError, lambda: DeserialisePlan(data[:len(magic) + 10]), "Truncated header")
    assert_raises(PlanFormatError, lambda: DeserialisePlan(data + b"\0"), "Trailing byte")

    # levels field follows magic, n_rows, n_cols, epsilon and block_width
    wrong_levels = bytearray(data)
    struct.pack_into('<Q', wrong_levels, len(magic) + 32, 99)
    assert_raises(PlanFormatError, lambda: DeserialisePlan(bytes(wrong_levels)), "Header level count")

    error = assert_raises(PlanFormatError, lambda: DeserialisePlan(b""), "Empty data")
    assert_true("offset 0" in str(error), f"Error message should name the offset: {error}")

def test_rule_and_row_json(logger):
    row = BenchmarkRow(n=8, m=0, parity=EVEN, k_max=4, k_avg=3.5, k_sigma=0.5, t_fwd=1e-5, t_inv=2e-5, m_max=100, eps_inv=1e-16)
    text = json.dumps(row, cls=ButterflyEncoder)
    assert_true('"t_dir"' not in text, "Missing fields should be omitted from JSON")

    restored = json.loads(text, cls=ButterflyDecoder)
    assert_true(isinstance(restored, BenchmarkRow), "Decoded object should be a BenchmarkRow")
    assert_true(restored.values == row.values, "JSON must preserve the row")

    error = json.loads(json.dumps(ComputationError("no convergence"), cls=ButterflyEncoder))
    assert_true(error['type'] == 'ComputationError' and error['problem'] == 'no convergence', f"Unexpected error encoding {error}")

def run_tests(results_path):
    tests = [
        ('transform round trip', test_transform_round_trip),
        ('butterfly plan round trip', test_butterfly_plan_round_trip),
        ('plan files', test_plan_files),
        ('corrupt data', test_corrupt_data),
        ('rule and row json', test_rule_and_row_json),
    ]

    return run_test_functions(tests, results_path, 'SerialisationTests')
