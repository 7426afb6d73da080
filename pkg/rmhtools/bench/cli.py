"""Command-line interface: ``rmhtools <command> ...`` or ``python -m rmhtools <command> ...``"""
import argparse
import json
import sys
import pandas as pd
from ..version import version
from ..tools.fdata import Grid, load_dataset, save_dataset
from ..tools.synthetic_data import SyntheticProblem, generate_problem, bayes_error
from ..selection.dependence import relevance_curve, DCOV_METHODS
from ..selection.selectors import maxima_hunting_select, rmh_select
from .experiment import (ExperimentConfig, METHODS, run_synthetic, run_real, run_peak_lda,
                         run_sensitivity, run_near_bayes, run_method, emit_results, derived_seed,
                         NEAR_BAYES_MARGINS, _CV_STREAM)

PROBLEMS = ('peak', 'peak2', 'square', 'sin', 'zero')


def _add_common(parser, out_help):
    parser.add_argument('--seed', type=int, default=None, help='master random seed')
    parser.add_argument('--out', default=None, help=out_help)


def _add_bench_flags(parser):
    _add_common(parser, 'results file (printed summary only if omitted)')
    parser.add_argument('--format', choices=['csv', 'json'], default='csv',
                        help='results file format')
    parser.add_argument('--config', default=None, help='flat JSON configuration file')
    parser.add_argument('--problem', default=None,
                        help='synthetic trend name, or dataset path for `bench real`')
    parser.add_argument('--methods', nargs='+', choices=METHODS, default=None)
    parser.add_argument('--n-train', type=int, nargs='+', default=None, dest='n_train')
    parser.add_argument('--n-test', type=int, default=None, dest='n_test')
    parser.add_argument('--repetitions', '--reps', type=int, default=None, dest='repetitions')
    parser.add_argument('--r', type=float, default=None, help='RMH redundancy threshold')
    parser.add_argument('--s', type=float, nargs='+', default=None,
                        help='RMH relevance thresholds tried by cross-validation')
    parser.add_argument('--preprocessing', nargs='+', default=None,
                        help="e.g. second_derivative, smooth:0.05, truncate:50, drop_zero")
    parser.add_argument('--dcor-method', choices=DCOV_METHODS, default=None, dest='dcor_method')
    parser.add_argument('--n-jobs', type=int, default=None, dest='n_jobs')
    parser.add_argument('--no-progress', action='store_true')
    parser.add_argument('--no-timing', action='store_true',
                        help='record zero wall times, for reproducible output files')


def build_parser():
    parser = argparse.ArgumentParser(
        prog='rmhtools',
        description="Recursive Maxima Hunting: variable selection for functional data "
                    "classification")
    parser.add_argument('--version', action='version', version='%(prog)s ' + version)
    commands = parser.add_subparsers(dest='command', required=True)

    p = commands.add_parser('simulate', help='draw a synthetic dataset')
    p.add_argument('--problem', choices=PROBLEMS, default='peak')
    p.add_argument('--n', type=int, default=200, help='number of trajectories (even)')
    p.add_argument('--grid-size', type=int, default=200, dest='grid_size')
    _add_common(p, 'dataset CSV file')

    p = commands.add_parser('dcor', help='relevance curve of a dataset')
    p.add_argument('dataset')
    p.add_argument('--method', choices=DCOV_METHODS, default='naive')
    _add_common(p, 'CSV file with columns t, relevance')

    p = commands.add_parser('select', help='select time points of a dataset')
    p.add_argument('selector', choices=['mh', 'rmh'])
    p.add_argument('dataset')
    p.add_argument('--d', type=int, default=3, help='number of maxima (mh)')
    p.add_argument('--r', type=float, default=.8, help='redundancy threshold (rmh)')
    p.add_argument('--s', type=float, default=.05, help='relevance threshold (rmh)')
    p.add_argument('--method', choices=DCOV_METHODS, default='naive')
    _add_common(p, 'selection JSON file')

    p = commands.add_parser('classify', help='fit a method on a training file, score a test file')
    p.add_argument('train')
    p.add_argument('test')
    p.add_argument('--method', choices=METHODS, default='rmh')
    p.add_argument('--r', type=float, default=None)
    p.add_argument('--s', type=float, nargs='+', default=None)
    p.add_argument('--config', default=None, help='flat JSON configuration file')
    _add_common(p, 'JSON file with the record')

    p = commands.add_parser('bench', help='run a benchmark')
    kinds = p.add_subparsers(dest='kind', required=True)
    _add_bench_flags(kinds.add_parser('synthetic', help='methods on a synthetic problem'))
    _add_bench_flags(kinds.add_parser('real', help='methods on a dataset file'))
    _add_bench_flags(kinds.add_parser('sensitivity', help='RMH over fixed (r, s) pairs'))
    lda = kinds.add_parser('lda', help='Fisher discriminant on chosen points of the peak problem')
    _add_common(lda, 'results file')
    lda.add_argument('--format', choices=['csv', 'json'], default='csv')
    lda.add_argument('--n-train', type=int, default=1000, dest='n_train')
    lda.add_argument('--n-test', type=int, default=1000, dest='n_test')
    lda.add_argument('--repetitions', '--reps', type=int, default=100, dest='repetitions')
    lda.add_argument('--no-progress', action='store_true')
    near = kinds.add_parser('near-bayes', help='RMH with kNN against the Bayes error')
    _add_common(near, 'results file')
    near.add_argument('--format', choices=['csv', 'json'], default='csv')
    near.add_argument('--problem', choices=sorted(NEAR_BAYES_MARGINS), default='peak')
    near.add_argument('--fast', action='store_true',
                      help='20 repetitions, tolerance widened by one percentage point')
    near.add_argument('--repetitions', '--reps', type=int, default=None, dest='repetitions')
    near.add_argument('--n-train', type=int, default=1000, dest='n_train')
    near.add_argument('--dcor-method', choices=DCOV_METHODS, default='naive', dest='dcor_method')
    near.add_argument('--n-jobs', type=int, default=1, dest='n_jobs')
    near.add_argument('--no-progress', action='store_true')
    return parser


def _config(args):
    config = ExperimentConfig.from_json(args.config) if args.config else ExperimentConfig()
    overrides = {'seed': args.seed, 'r': args.r, 's_grid': args.s}
    for key in ('problem', 'methods', 'n_train', 'n_test', 'repetitions', 'preprocessing',
                'dcor_method', 'n_jobs'):
        overrides[key] = getattr(args, key, None)
    if getattr(args, 'no_progress', False):
        overrides['progress'] = False
    if getattr(args, 'no_timing', False):
        overrides['record_timing'] = False
    return config.updated(**overrides)


def _write_json(obj, path):
    text = json.dumps(obj, indent=2)
    if path is None:
        print(text)
    else:
        with open(path, 'w') as f:
            f.write(text + '\n')
        print("wrote %s" % path)


def _simulate(args):
    problem = SyntheticProblem(args.problem, Grid.equidistant(args.grid_size))
    seed = 0 if args.seed is None else args.seed
    data = generate_problem(problem, args.n, seed)
    out = args.out or '%s_n%d_seed%d.csv' % (args.problem, args.n, seed)
    save_dataset(data, out)
    print("wrote %s (%d trajectories, Bayes error %.4f)" % (out, len(data),
                                                           bayes_error(problem.trend)))


def _dcor(args):
    curve = relevance_curve(load_dataset(args.dataset), args.method)
    frame = pd.DataFrame({'t': curve.grid.points, 'relevance': curve.values})
    if args.out is None:
        print(frame.to_string(index=False))
    else:
        frame.to_csv(args.out, index=False, float_format='%.17g')
        print("wrote %s" % args.out)


def _select(args):
    data = load_dataset(args.dataset)
    if args.selector == 'mh':
        selection = maxima_hunting_select(data, args.d, args.method)
    else:
        selection = rmh_select(data, args.r, args.s, args.method)
    _write_json(selection.to_dict(), args.out)


def _classify(args):
    config = _config(args)
    train = load_dataset(args.train)
    test = load_dataset(args.test)
    record = run_method(args.method, train, test, config,
                        derived_seed(config.seed, 0, 0, _CV_STREAM))
    _write_json(record, args.out)


def _bench(args):
    status = 0
    if args.kind == 'lda':
        result = run_peak_lda(args.n_train, args.n_test, args.repetitions,
                              0 if args.seed is None else args.seed,
                              progress=not args.no_progress)
    elif args.kind == 'near-bayes':
        result, mean_error, limit = run_near_bayes(
            args.problem, args.fast, args.repetitions, args.n_train,
            0 if args.seed is None else args.seed, args.dcor_method, args.n_jobs,
            progress=not args.no_progress)
        status = 0 if mean_error <= limit else 1
    else:
        config = _config(args)
        if args.kind == 'synthetic':
            result = run_synthetic(config)
        elif args.kind == 'real':
            result = run_real(config)
        else:
            result = run_sensitivity(config)
    print(result.summary())
    if args.kind == 'near-bayes':
        print("mean error %.4f, limit %.4f: %s" % (mean_error, limit,
                                                  'passed' if status == 0 else 'FAILED'))
    if args.out is not None:
        emit_results(result, args.out, args.format)
        print("wrote %s" % args.out)
    return status


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {'simulate': _simulate, 'dcor': _dcor, 'select': _select,
                'classify': _classify, 'bench': _bench}
    try:
        status = handlers[args.command](args)
    except (ValueError, FileNotFoundError) as err:
        print("rmhtools: error: %s" % err, file=sys.stderr)
        return 1
    return status or 0
