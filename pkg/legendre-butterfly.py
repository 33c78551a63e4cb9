import os
import sys
import argparse
import logging
logging.basicConfig(encoding='utf-8')

from PyButterfly.Benchmark import BenchmarkCases
from PyButterfly.ButterflyError import ButterflyError
from PyButterfly.Commands import EXIT_USAGE, BenchCommand, PlanApplyCommand, PlanBuildCommand, PlanInfoCommand, QuadCommand, VerifyCommand
from PyButterfly.Helpers import ParseIntegerList, ParseParityList
from PyButterfly.Options import Options

logging_level = getattr(logging, os.getenv('LOG_LEVEL', 'INFO').upper(), logging.INFO)
logging.basicConfig(
    format='%(levelname)s: %(message)s',
    level=logging_level,
    encoding='utf-8',
    stream=sys.stderr,
    force=True
    )

# Flags shared by every command
common = argparse.ArgumentParser(add_help=False)
common.add_argument('--n', type=str, default=None, help="Transform size(s), comma separated")
common.add_argument('--m', type=str, default=None, help="Order(s) of the associated Legendre functions, comma separated")
common.add_argument('--parity', type=str, default=None, help="Degree chain: even, odd or both (default both for bench, even otherwise)")
common.add_argument('--eps', type=float, default=None, help="Precision of the interpolative decompositions (default 1e-14)")
common.add_argument('--block-width', type=int, default=None, help="Number of columns in each leaf block (default 60)")
common.add_argument('--seed', type=int, default=None, help="Seed for the pseudorandom test vectors (default 0)")
common.add_argument('--output', type=str, choices=['csv', 'json'], default=None, help="Output format")
common.add_argument('--dense-budget', type=int, default=None, help="Largest dense reference matrix in bytes (default 1 GiB)")
common.add_argument('--cache-dir', type=str, default=None, help="Directory for cached quadrature rules (empty to disable)")
common.add_argument('--perturb', type=float, default=None, help="Scale quadrature weights by (1 + perturb), for sensitivity checks")

parser = argparse.ArgumentParser(description='Butterfly-compressed associated Legendre transforms')
commands = parser.add_subparsers(dest='command', required=True)

bench = commands.add_parser('bench', parents=[common], help="Benchmark rank, timing and accuracy")
bench.add_argument('--mask-timings', action='store_true', help="Write timings as 0 so output is reproducible byte for byte")
bench.add_argument('--repeats', type=int, default=None, help="Timing repeats (the fastest is reported)")

verify = commands.add_parser('verify', parents=[common], help="Run the property checks")
verify.add_argument('--matrices', type=int, default=None, help="Number of random matrices for the decomposition bounds")

plan = commands.add_parser('plan', help="Build, apply or inspect plan files")
plan_commands = plan.add_subparsers(dest='plan_command', required=True)

plan_build = plan_commands.add_parser('build', parents=[common], help="Build a transform plan and write it to --file")
plan_build.add_argument('--file', type=str, required=True, help="Plan file path")

plan_apply = plan_commands.add_parser('apply', parents=[common], help="Apply a plan file to a vector file")
plan_apply.add_argument('--file', type=str, required=True, help="Plan file path")
plan_apply.add_argument('--vector', type=str, required=True, help="Input vector file, one number per line")
plan_apply.add_argument('--out', type=str, default=None, help="Output vector file (default stdout)")
plan_apply.add_argument('--inverse', action='store_true', help="Apply the transpose (inverse transform)")

plan_info = plan_commands.add_parser('info', parents=[common], help="Print plan statistics")
plan_info.add_argument('--file', type=str, required=True, help="Plan file path")

quad = commands.add_parser('quad', parents=[common], help="Print quadrature nodes and weights")

args = parser.parse_args()

try:
    options = Options({
        'epsilon': args.eps,
        'block_width': args.block_width,
        'seed': args.seed,
        'output_format': args.output,
        'dense_budget': args.dense_budget,
        'perturb': args.perturb,
        'mask_timings': getattr(args, 'mask_timings', None) or None,
        'timing_repeats': getattr(args, 'repeats', None),
        'verify_matrices': getattr(args, 'matrices', None),
    })

    if args.cache_dir is not None:
        options.add('cache_dir', args.cache_dir)

    ns = ParseIntegerList(args.n)
    ms = ParseIntegerList(args.m)

    if args.command == 'bench':
        if not ns:
            parser.error("bench needs --n")
        command = BenchCommand(BenchmarkCases(ns, ms or [0], ParseParityList(args.parity)), options)

    elif args.command == 'verify':
        if ns:
            options.add('verify_n', ns[0])
        command = VerifyCommand(options)

    elif args.command == 'plan':
        if args.plan_command == 'build':
            if not ns:
                parser.error("plan build needs --n")
            command = PlanBuildCommand(ms or [0], ns, ParseParityList(args.parity or 'even'), args.file, options)
        elif args.plan_command == 'apply':
            command = PlanApplyCommand(args.file, args.vector, args.out, args.inverse, options)
        else:
            command = PlanInfoCommand(args.file, options)

    else:
        if not ns:
            parser.error("quad needs --n")
        command = QuadCommand(ms or [0], ns, ParseParityList(args.parity or 'even'), options)

    sys.exit(command.run())

except ButterflyError as e:
    logging.error(f"Invalid arguments: {str(e)}")
    sys.exit(EXIT_USAGE)
