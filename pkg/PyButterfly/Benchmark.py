import logging
logging.basicConfig(encoding='utf-8')
import time
import numpy as np

from PyButterfly.BenchmarkRow import BenchmarkRow
from PyButterfly.ButterflyEvents import ButterflyEvents
from PyButterfly.Helpers import RandomUnitVector
from PyButterfly.LegendreTransform import BuildTransform
from PyButterfly.Options import Options
from PyButterfly.QuadratureCache import QuadratureCache

def BenchmarkCases(ns : list[int], ms : list[int], parities : list[str]) -> list[tuple]:
    return [ (n, m, parity) for n in ns for m in ms for parity in parities ]

def MinimumTime(function, repeats : int):
    """
    Run function `repeats` times, returning the last result and the fastest wall-clock time
    """
    best = None
    result = None
    for _ in range(max(repeats, 1)):
        start_time = time.perf_counter()
        result = function()
        elapsed = time.perf_counter() - start_time
        best = elapsed if best is None else min(best, elapsed)

    return result, best

def DenseFits(n : int, dense_budget : int) -> bool:
    return 8 * n * n <= dense_budget

class Benchmark:
    """
    Reproduces the table protocol: for each case build the rule and plan, time the dense
    product (if it fits the budget), the forward and the inverse transform, and measure errors
    on a seeded random unit vector.
    """
    def __init__(self, options : Options, cache : QuadratureCache = None, events : ButterflyEvents = None):
        self.options = Options(options)
        self.cache = cache or QuadratureCache(self.options.cache_dir())
        self.events = events

    def Run(self, cases : list[tuple]):
        for stream, (n, m, parity) in enumerate(cases):
            yield self.RunCase(n, m, parity, stream)

    def RunCase(self, n : int, m : int, parity : str, stream : int = 0) -> BenchmarkRow:
        options = self.options
        repeats = int(options.get('timing_repeats'))

        logging.info(f"Benchmarking n={n}, m={m}, {parity}")
        transform = BuildTransform(m, n, parity, options.epsilon(), options.block_width(), options=options, cache=self.cache, events=self.events)
        stats = transform.plan.Stats()

        v = RandomUnitVector(n, options.seed(), stream)

        forward, t_fwd = MinimumTime(lambda: transform.Forward(v), repeats)
        round_trip, t_inv = MinimumTime(lambda: transform.Inverse(forward), repeats)

        t_dir = None
        eps_fwd = None
        if DenseFits(n, int(options.get('dense_budget'))):
            dense = transform.DenseMatrix()
            direct, t_dir = MinimumTime(lambda: dense @ v, repeats)
            eps_fwd = float(np.max(np.abs(forward - direct)))
        else:
            logging.info(f"Dense {n}x{n} matrix exceeds the memory budget, skipping the direct product")

        row = BenchmarkRow(
            n=n,
            m=m,
            parity=parity,
            k_max=stats.k_max,
            k_avg=stats.k_avg,
            k_sigma=stats.k_sigma,
            t_dir=t_dir,
            t_fwd=t_fwd,
            t_inv=t_inv,
            t_quad=transform.t_quad,
            t_comp=stats.t_comp,
            m_max=stats.m_max,
            eps_fwd=eps_fwd,
            eps_inv=float(np.max(np.abs(round_trip - v)))
        )

        problems = row.Validate()
        if problems:
            logging.warning(f"Inconsistent benchmark row for n={n}, m={m}, {parity}: {'; '.join(problems)}")

        return row
