import csv
import json
import logging
logging.basicConfig(encoding='utf-8')
import sys

from PyButterfly.Benchmark import Benchmark
from PyButterfly.BenchmarkRow import csv_header
from PyButterfly.ButterflyError import ArgumentError, ButterflyError
from PyButterfly.ButterflyEvents import ButterflyEvents
from PyButterfly.Helpers import FormatVector, ReadVectorFile, WriteVectorFile
from PyButterfly.LegendreTransform import BuildTransform, TransformPlan
from PyButterfly.Options import Options
from PyButterfly.PlanSerialisation import ReadPlanFile, WritePlanFile
from PyButterfly.QuadratureCache import QuadratureCache
from PyButterfly.Serialisation import ButterflyEncoder
from PyButterfly.Verification import VerificationSuite

EXIT_SUCCESS = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

class CommandError(Exception):
    def __init__(self, message, command):
        super().__init__(message)
        self.command = command

class Command:
    """
    A unit of command-line work. execute() does the work and returns True on success;
    run() maps the outcome and any library errors to an exit code.
    """
    def __init__(self, options : Options = None, output = None):
        self.options = Options(options)
        self.output = output or sys.stdout
        self.executed : bool = False

    def run(self) -> int:
        try:
            success = self.execute()
            self.executed = True
            return EXIT_SUCCESS if success else EXIT_FAILURE

        except (ArgumentError, CommandError) as e:
            logging.error(f"{type(self).__name__} failed: {e}")
            return EXIT_USAGE

        except ButterflyError as e:
            logging.error(f"{type(self).__name__} failed: {e}")
            return EXIT_FAILURE

        except OSError as e:
            logging.error(f"{type(self).__name__} failed: {e}")
            return EXIT_FAILURE

    def execute(self) -> bool:
        raise NotImplementedError

    @property
    def output_format(self) -> str:
        output_format = self.options.get('output_format', 'csv')
        if output_format not in ('csv', 'json'):
            raise CommandError(f"Unknown output format '{output_format}'", self)
        return output_format

    def GetCache(self) -> QuadratureCache:
        return QuadratureCache(self.options.cache_dir())

    def GetEvents(self) -> ButterflyEvents:
        events = ButterflyEvents()
        events.leaf_compressed += lambda node: logging.debug(f"Leaf {node.column_start}:{node.column_stop} compressed to rank {node.stripes[0].rank}")
        events.blocks_merged += lambda node: logging.debug(f"Level {node.level} block {node.column_start}:{node.column_stop} merged")
        events.block_finalised += lambda node: logging.debug(f"Level {node.level} block {node.column_start}:{node.column_stop} stored as a root")
        return events

    def WriteJson(self, obj):
        self.output.write(json.dumps(obj, cls=ButterflyEncoder, indent=4))
        self.output.write("\n")

def _single(values : list, name : str, command : Command):
    if len(values) != 1:
        raise CommandError(f"Expected a single value for --{name} (got {values})", command)
    return values[0]

class BenchCommand(Command):
    def __init__(self, cases : list[tuple], options : Options = None, output = None):
        super().__init__(options, output)
        self.cases = cases

    def execute(self) -> bool:
        if not self.cases:
            raise CommandError("Nothing to benchmark", self)

        output_format = self.output_format
        benchmark = Benchmark(self.options, self.GetCache(), self.GetEvents())
        rows = benchmark.Run(self.cases)

        if output_format == 'json':
            self.WriteJson(list(rows))
            return True

        mask_timings = bool(self.options.get('mask_timings'))
        writer = csv.writer(self.output, lineterminator="\n")
        writer.writerow(csv_header)
        for row in rows:
            writer.writerow(row.CsvFields(mask_timings))
            self.output.flush()

        return True

class VerifyCommand(Command):
    def execute(self) -> bool:
        suite = VerificationSuite(self.options, self.GetCache())

        all_passed = True
        for result in suite.Run():
            self.output.write(f"{result}\n")
            all_passed = all_passed and result.passed

        self.output.write("All properties passed\n" if all_passed else "Verification FAILED\n")
        return all_passed

class PlanBuildCommand(Command):
    def __init__(self, m : list[int], n : list[int], parity : list[str], filepath : str, options : Options = None, output = None):
        super().__init__(options, output)
        self.m = m
        self.n = n
        self.parity = parity
        self.filepath = filepath

    def execute(self) -> bool:
        if not self.filepath:
            raise CommandError("plan build needs --file", self)

        m, n, parity = _single(self.m, 'm', self), _single(self.n, 'n', self), _single(self.parity, 'parity', self)

        options = self.options
        transform = BuildTransform(m, n, parity, options.epsilon(), options.block_width(), options=options,
                                   cache=self.GetCache(), events=self.GetEvents())
        WritePlanFile(self.filepath, transform)
        return True

class PlanApplyCommand(Command):
    def __init__(self, filepath : str, vector_path : str, out_path : str = None, inverse : bool = False, options : Options = None, output = None):
        super().__init__(options, output)
        self.filepath = filepath
        self.vector_path = vector_path
        self.out_path = out_path
        self.inverse = inverse

    def execute(self) -> bool:
        if not self.filepath or not self.vector_path:
            raise CommandError("plan apply needs --file and --vector", self)

        plan = ReadPlanFile(self.filepath)
        vector = ReadVectorFile(self.vector_path)

        if isinstance(plan, TransformPlan):
            result = plan.Inverse(vector) if self.inverse else plan.Forward(vector)
        else:
            result = plan.ApplyTranspose(vector) if self.inverse else plan.Apply(vector)

        if self.out_path:
            WriteVectorFile(self.out_path, result)
        else:
            self.output.write(FormatVector(result))

        return True

class PlanInfoCommand(Command):
    def __init__(self, filepath : str, options : Options = None, output = None):
        super().__init__(options, output)
        self.filepath = filepath

    def execute(self) -> bool:
        if not self.filepath:
            raise CommandError("plan info needs --file", self)

        plan = ReadPlanFile(self.filepath)
        butterfly = plan.plan if isinstance(plan, TransformPlan) else plan
        values = butterfly.Stats().values
        if isinstance(plan, TransformPlan):
            values = { 'm': plan.m, 'n': plan.n, 'parity': plan.parity, 't_quad': plan.t_quad, **values }

        if self.output_format == 'json':
            self.WriteJson(values)
        else:
            writer = csv.writer(self.output, lineterminator="\n")
            writer.writerow(['key', 'value'])
            for key, value in values.items():
                writer.writerow([key, repr(value) if isinstance(value, float) else value])

        return True

class QuadCommand(Command):
    def __init__(self, m : list[int], n : list[int], parity : list[str], options : Options = None, output = None):
        super().__init__(options, output)
        self.m = m
        self.n = n
        self.parity = parity

    def execute(self) -> bool:
        m, n, parity = _single(self.m, 'm', self), _single(self.n, 'n', self), _single(self.parity, 'parity', self)
        rule = self.GetCache().GetRule(m, n, parity, max_iterations=self.options.get('max_newton_iterations'))

        if self.output_format == 'json':
            self.WriteJson(rule)
            return True

        writer = csv.writer(self.output, lineterminator="\n")
        writer.writerow(['node', 'weight'])
        for node, weight in zip(rule.nodes, rule.weights):
            writer.writerow([repr(float(node)), repr(float(weight))])

        if rule.center_weight is not None:
            writer.writerow([repr(0.0), repr(rule.center_weight)])

        return True
