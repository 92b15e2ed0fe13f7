#
# Copyright Elasticsearch B.V. and/or licensed to Elasticsearch B.V. under one
# or more contributor license agreements. Licensed under the Elastic License 2.0;
# you may not use this file except in compliance with the Elastic License 2.0.
#
"""Cli module contains entry point for the package.

Endpoint provides bagged Gaussian process regression: subset sizing,
ensemble fitting, prediction, evaluation and benchmark reproduction
with subcommands."""

import sys
from argparse import ArgumentParser

from .bench_sinc_command import BenchSincCommand
from .eval_command import EvalCommand
from .fit_command import FitCommand
from .predict_command import PredictCommand
from .selftest_command import SelftestCommand
from .size_command import SizeCommand
from .sweep_command import SweepCommand

CMD_SIZE = 'size'
CMD_FIT = 'fit'
CMD_PREDICT = 'predict'
CMD_EVAL = 'eval'
CMD_BENCH_SINC = 'bench-sinc'
CMD_SWEEP = 'sweep'
CMD_SELFTEST = 'selftest'

commands = {
    CMD_SIZE: SizeCommand,
    CMD_FIT: FitCommand,
    CMD_PREDICT: PredictCommand,
    CMD_EVAL: EvalCommand,
    CMD_BENCH_SINC: BenchSincCommand,
    CMD_SWEEP: SweepCommand,
    CMD_SELFTEST: SelftestCommand,
}


def _add_data_arguments(parser):
    parser.add_argument('--data', type=str, metavar="DATA_FILE_PATH", help="delimited file with a header row")
    parser.add_argument('--target', type=str, metavar="COLUMN", help="name of the response column")
    parser.add_argument('--delimiter', type=str, metavar="CHARACTER", help="field delimiter (default ',')")


def _add_sizing_arguments(parser):
    parser.add_argument('--method', choices=['formula', 'infer', 'explicit'], help="subset sizing method")
    parser.add_argument('--epsilon', type=float, metavar="RMSE", help="acceptable test RMSE")
    parser.add_argument('--C', type=float, metavar="C", help="constant of the sizing formula")
    parser.add_argument('--noisy', action='store_true', default=None, help="use C=0.5 for noisy data")
    parser.add_argument('--delta', type=float, metavar="DELTA", help="explicit proportion, Ns = ceil(N^delta)")


def _add_ensemble_arguments(parser):
    parser.add_argument('--kernel', type=str, metavar="KERNEL_SPEC", help="kernel expression, e.g. 'rbf + linear'")
    parser.add_argument('--K', type=int, metavar="K", help="number of ensemble members")
    parser.add_argument('--combination', choices=['average', 'poe'], help="how member predictions are combined")
    parser.add_argument('--workers', type=int, metavar="THREADS", help="threads used to fit members")
    parser.add_argument('--restarts', type=int, metavar="RESTARTS", help="optimizer restarts per member")


def _add_run_arguments(parser, seed_required=False):
    parser.add_argument('--seed', type=int, required=seed_required, metavar="SEED", help="run seed")
    parser.add_argument('--split-fraction', type=float, metavar="FRACTION", help="training share of the rows")
    parser.add_argument('--report', type=str, metavar="REPORT_PATH", help="where to write the .json/.txt report")


def _parser():
    """Get a configured parser for the module.

    This method will initialize argument parser with a list
    of avaliable commands and their options."""
    parser = ArgumentParser(prog="bagged_gp")
    parser.add_argument(
        "-c",
        '--config-file',
        type=str,
        metavar="CONFIGURATION_FILE_PATH",
        help="path to the configuration file; its values override flags"
    )
    parser.add_argument('--log-level', choices=['DEBUG', 'INFO', 'WARN', 'ERROR'], help="log level")

    subparsers = parser.add_subparsers(dest="cmd")
    subparsers.required = True

    size = subparsers.add_parser(CMD_SIZE, help="compute the subset size only")
    _add_data_arguments(size)
    _add_sizing_arguments(size)
    _add_run_arguments(size)
    size.add_argument('--kernel', type=str, metavar="KERNEL_SPEC", help="kernel expression used by the probe")

    fit = subparsers.add_parser(CMD_FIT, help="fit an ensemble on every row and save it")
    _add_data_arguments(fit)
    _add_sizing_arguments(fit)
    _add_ensemble_arguments(fit)
    _add_run_arguments(fit)
    fit.add_argument('--model', type=str, metavar="ARCHIVE_PATH", help="where to save the ensemble")

    predict = subparsers.add_parser(CMD_PREDICT, help="predict with a saved ensemble")
    predict.add_argument('--model', type=str, required=True, metavar="ARCHIVE_PATH", help="saved ensemble")
    predict.add_argument('--data', type=str, required=True, metavar="DATA_FILE_PATH", help="file of query rows")
    predict.add_argument('--delimiter', type=str, metavar="CHARACTER", help="field delimiter (default ',')")
    predict.add_argument('--output', type=str, metavar="OUTPUT_PATH", help="CSV of means and variances")
    predict.add_argument(
        '--observation-variance',
        action='store_true',
        default=None,
        help="add the noise variance to the predictive variance"
    )

    evaluate = subparsers.add_parser(CMD_EVAL, help="split, size, fit and test, or test a saved ensemble")
    _add_data_arguments(evaluate)
    _add_sizing_arguments(evaluate)
    _add_ensemble_arguments(evaluate)
    _add_run_arguments(evaluate)
    evaluate.add_argument('--model', type=str, metavar="ARCHIVE_PATH", help="saved ensemble to test instead")

    bench = subparsers.add_parser(CMD_BENCH_SINC, help="run the sinc benchmark")
    _add_ensemble_arguments(bench)
    _add_run_arguments(bench, seed_required=True)
    bench.add_argument('--n', type=int, metavar="ROWS", help="number of generated rows")
    bench.add_argument('--repeats', type=int, default=1, metavar="R", help="run seeds seed ... seed+R-1")

    sweep = subparsers.add_parser(CMD_SWEEP, help="write an RMSE table over one parameter")
    sweep.add_argument('--kind', required=True, choices=['delta', 'estimators', 'dataset-size'])
    sweep.add_argument('--values', type=float, nargs='+', metavar="VALUE", help="parameter values to visit")
    sweep.add_argument('--ns', type=int, metavar="NS", help="fixed subset size of the estimators sweep")
    sweep.add_argument('--rows', type=int, metavar="ROWS", help="training rows used by the delta and estimators sweeps")
    sweep.add_argument('--output', dest='table', type=str, metavar="CSV_PATH", help="where to write the table")
    _add_data_arguments(sweep)
    _add_sizing_arguments(sweep)
    _add_ensemble_arguments(sweep)
    _add_run_arguments(sweep)

    selftest = subparsers.add_parser(CMD_SELFTEST, help="run the oracle suite")
    selftest.add_argument('pytest_args', nargs='*', help="extra arguments passed to pytest, after --")

    return parser


def main(args=None):
    """Entry point for the tool; returns the process exit status."""
    if args is None:
        parser = _parser()
        args = parser.parse_args()

    try:
        return run(args)
    except Exception as exception:
        print(f"bagged_gp {args.cmd} failed: {exception}", file=sys.stderr)
        return 1


def run(args):
    """Run the command from the parsed args.

    This method takes already parsed and validated arguments
    and attempts to run the command with specified arguments."""
    status = commands[args.cmd](args).execute()

    return status or 0
