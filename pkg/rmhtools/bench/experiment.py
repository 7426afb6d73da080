import json
import time
import warnings
from joblib import delayed, Parallel
import numpy as np
import pandas as pd
from tqdm import tqdm
from ..tools.fdata import Grid, load_dataset, apply_preprocessing, stratified_split
from ..tools.synthetic_data import (SyntheticProblem, TrendSpec, generate_problem, bayes_error,
                                    TREND_KINDS)
from ..tools.classify import (knn_classify, knn_cv_error_table, best_in_table, select_k_cv,
                              error_rate, fisher_lda_fit, fisher_lda_predict)
from ..tools.reducers import components_cv_errors, pca_fit, pls_fit
from ..tools.compare import compare_selection
from ..selection.dependence import relevance_curve, DCOV_METHODS
from ..selection.selectors import (find_local_maxima, maxima_hunting_select, rmh_select,
                                   reduce_dataset, SelectionResult)

METHODS = ('base', 'mh', 'rmh', 'pca', 'pls')

RESULT_COLUMNS = ['method', 'n_train', 'repetition', 'error', 'n_vars', 'seconds',
                  'selected_times', 'k', 'tuned']

# independent random streams of one repetition
_TRAIN_STREAM, _TEST_STREAM, _CV_STREAM, _EXTRA_STREAM = range(4)


class ExperimentConfig:
    """Settings of a benchmark run

    Every setting has a default and can be given as a keyword argument; unknown names raise a
    `ValueError`.

    Parameters
    ----------
    problem : `str`
        name of a synthetic trend (`'peak'`, `'peak2'`, `'square'`, `'sin'`, `'zero'`) or the path
        of a dataset CSV file
    preprocessing : `list` of `str`
        transforms applied to a loaded dataset, see `apply_preprocessing`
    rescale_grid : `bool`
        map the header times of a loaded dataset onto [0, 1]
    methods : `list` of `str`
        subset of `'base'` (kNN on complete trajectories), `'mh'`, `'rmh'`, `'pca'`, `'pls'`
    n_train : `list` of `int`
        training sizes (synthetic problems)
    n_test : `int`
        test size (synthetic problems)
    grid_size : `int`
        points of the synthetic grid j / grid_size, j = 1, ..., grid_size
    repetitions : `int`
    seed : `int`
        master seed; every repetition derives its own streams from it
    r : `float`
        RMH redundancy threshold
    s_grid : `list` of `float`
        RMH relevance thresholds, chosen by cross-validation
    c_max : `int`
        largest number of components (PCA, PLS) or of maxima (MH) tried
    folds : `int`
        cross-validation folds
    k_max : `int` or None
        largest number of neighbours; None means floor(sqrt(N_train))
    train_fraction : `float`
        training share of each class in the real-data splits
    dcor_method : {'naive', 'mergesort', 'avl'}
    n_jobs : `int`
        worker processes running repetitions
    progress : `bool`
        show a progress bar
    record_timing : `bool`
        record wall times; when False they are written as 0 so emitted files are reproducible
    """

    DEFAULTS = {
        'problem': 'peak',
        'preprocessing': [],
        'rescale_grid': False,
        'methods': list(METHODS),
        'n_train': [50, 100, 200, 500, 1000],
        'n_test': 1000,
        'grid_size': 200,
        'repetitions': 200,
        'seed': 0,
        'r': .8,
        's_grid': [.025, .05, .1],
        'c_max': 30,
        'folds': 10,
        'k_max': None,
        'train_fraction': 2 / 3,
        'dcor_method': 'naive',
        'n_jobs': 1,
        'progress': True,
        'record_timing': True,
    }

    def __init__(self, **kwargs):
        unknown = set(kwargs) - set(self.DEFAULTS)
        if unknown:
            raise ValueError("Unknown configuration keys: %s" % sorted(unknown))
        for key, default in self.DEFAULTS.items():
            value = kwargs.get(key, default)
            setattr(self, key, list(value) if isinstance(default, list) else value)
        if isinstance(self.n_train, int):
            self.n_train = [self.n_train]
        self._validate()

    def _validate(self):
        if not self.methods:
            raise ValueError("At least one method is needed")
        bad = [m for m in self.methods if m not in METHODS]
        if bad:
            raise ValueError("Unknown methods %s, must be among %s" % (bad, METHODS))
        if len(set(self.methods)) != len(self.methods):
            raise ValueError("Duplicated methods in %s" % self.methods)
        if self.repetitions < 1:
            raise ValueError("repetitions must be at least 1, got %d" % self.repetitions)
        if not self.n_train or min(self.n_train) < 2:
            raise ValueError("n_train must hold sizes of at least 2, got %s" % self.n_train)
        if not 0 < self.r < 1:
            raise ValueError("r must be in (0, 1), got %g" % self.r)
        if not self.s_grid or not all(0 < s < 1 for s in self.s_grid):
            raise ValueError("s_grid must hold values in (0, 1), got %s" % self.s_grid)
        if self.c_max < 1:
            raise ValueError("c_max must be at least 1, got %d" % self.c_max)
        if self.folds < 2:
            raise ValueError("folds must be at least 2, got %d" % self.folds)
        if self.k_max is not None and self.k_max < 1:
            raise ValueError("k_max must be at least 1, got %d" % self.k_max)
        if self.dcor_method not in DCOV_METHODS:
            raise ValueError("dcor_method must be one of %s, got %r" % (DCOV_METHODS,
                                                                        self.dcor_method))
        if self.n_jobs < 1:
            raise ValueError("n_jobs must be at least 1, got %d" % self.n_jobs)

    @property
    def is_synthetic(self):
        return self.problem in TREND_KINDS and self.problem != 'custom'

    def to_dict(self):
        return {key: getattr(self, key) for key in self.DEFAULTS}

    @classmethod
    def from_dict(cls, d):
        return cls(**d)

    @classmethod
    def from_json(cls, path):
        """Configuration from a flat JSON document"""
        with open(path) as f:
            d = json.load(f)
        if not isinstance(d, dict):
            raise ValueError("The configuration in %s must be a JSON object" % path)
        return cls(**d)

    def updated(self, **overrides):
        """Copy with the given settings replaced; None values are ignored"""
        d = self.to_dict()
        d.update({k: v for k, v in overrides.items() if v is not None})
        return ExperimentConfig(**d)

    def __repr__(self):
        return "ExperimentConfig(%s)" % ', '.join('%s=%r' % kv for kv in self.to_dict().items())


class ExperimentResult:
    """Records of a benchmark run

    Each record is a dict with the keys of `RESULT_COLUMNS`: the method, training size and
    repetition index, the test error, the number of variables (or components) used, the wall
    time, the selected times (MH, RMH), the number of neighbours and the tuned hyperparameter
    (s for RMH, d for MH, c for PCA/PLS).

    Parameters
    ----------
    records : `list` of `dict`
    targets : `list` of `float` or None
        reference times for the recovery rates of the selection methods
    tol : `float`
        distance to a target within which a selected time counts as recovered
    """

    def __init__(self, records, targets=None, tol=0.005):
        order = {}
        for rec in records:
            order.setdefault(rec['method'], len(order))
        self.records = sorted(records, key=lambda rec: (order[rec['method']], rec['n_train'],
                                                        rec['repetition']))
        self.targets = None if not targets else list(targets)
        self.tol = tol

    def __len__(self):
        return len(self.records)

    def aggregates(self):
        '''Mean and standard deviation per (method, training size)

        Returns
        -------
        aggregates : `list` of `dict`
            keys `method`, `n_train`, `count`, `mean_error`, `std_error`, `mean_n_vars`,
            `mean_seconds` and, for selection methods when targets are known, `recovery_rate`
        '''
        groups = {}
        for rec in self.records:
            groups.setdefault((rec['method'], rec['n_train']), []).append(rec)
        res = []
        for (method, n_train), recs in groups.items():
            errors = np.array([rec['error'] for rec in recs])
            agg = {'method': method, 'n_train': n_train, 'count': len(recs),
                   'mean_error': float(np.mean(errors)),
                   'std_error': float(np.std(errors, ddof=1)) if len(recs) > 1 else 0.,
                   'mean_n_vars': float(np.mean([rec['n_vars'] for rec in recs])),
                   'mean_seconds': float(np.mean([rec['seconds'] for rec in recs]))}
            if self.targets is not None and method in ('mh', 'rmh'):
                agg['recovery_rate'] = float(np.mean([
                    compare_selection(rec['selected_times'], self.targets, self.tol)
                    for rec in recs]))
            res.append(agg)
        return res

    def to_frame(self):
        """Records as a `pandas.DataFrame`, selected times joined with ';'"""
        rows = []
        for rec in self.records:
            row = dict(rec)
            row['selected_times'] = ';'.join(repr(float(t)) for t in rec['selected_times'])
            rows.append(row)
        return pd.DataFrame(rows, columns=RESULT_COLUMNS)

    def summary(self):
        """Aggregates as a printable table"""
        frame = pd.DataFrame(self.aggregates())
        return frame.to_string(index=False, float_format=lambda v: '%.4f' % v)


def derived_seed(seed, repetition, n_train, stream):
    """Integer seed of one random stream of one repetition"""
    ss = np.random.SeedSequence([int(seed), int(repetition), int(n_train), int(stream)])
    return int(ss.generate_state(1)[0])


def _fallback(data, selection, warn, method='naive'):
    # empty selection: the classifier still gets the single most relevant point
    if len(selection):
        return selection
    curve = relevance_curve(data, method)
    j = curve.argmax()
    if warn:
        warnings.warn("Empty selection, falling back to the global maximum t=%g" %
                      data.grid.points[j])
    return SelectionResult([data.grid.points[j]], [curve.values[j]], selection.method,
                           selection.r, selection.s, [j])


def _run_base(train, test, config, cv_seed):
    k = select_k_cv(train.values, train.labels, config.folds, cv_seed, config.k_max)
    pred = knn_classify(train.values, train.labels, test.values, k)
    return pred, train.n_points, [], k, None


def _mh_candidates(data, c_max, method):
    maxima = find_local_maxima(relevance_curve(data, method))[:c_max]
    return [maxima[:min(d, len(maxima))] for d in range(1, c_max + 1)]


def _run_mh(train, test, config, cv_seed):
    def featurize(tr, va):
        fold = train.subset(tr)
        return [(fold.values[:, idx], train.values[va][:, idx])
                for idx in _mh_candidates(fold, config.c_max, config.dcor_method)]

    errors = knn_cv_error_table(train.labels, featurize, config.c_max, config.folds, cv_seed,
                                config.k_max)
    d, k = best_in_table(errors)
    d += 1
    selection = maxima_hunting_select(train, d, config.dcor_method)
    X_tr, y_tr = reduce_dataset(train, selection)
    X_te, _ = reduce_dataset(test, selection)
    # fewer maxima than d: the candidate is the same as for d = len(selection)
    return knn_classify(X_tr, y_tr, X_te, k), len(selection), selection.times, k, len(selection)


def _rmh_candidates(data, config, warn=False):
    s_grid = sorted(config.s_grid)
    full = rmh_select(data, config.r, s_grid[0], config.dcor_method)
    return s_grid, [_fallback(data, full.prune(s), warn, config.dcor_method) for s in s_grid]


def _run_rmh(train, test, config, cv_seed):
    def featurize(tr, va):
        fold = train.subset(tr)
        _, selections = _rmh_candidates(fold, config)
        return [(reduce_dataset(fold, sel)[0], reduce_dataset(train.subset(va), sel)[0])
                for sel in selections]

    errors = knn_cv_error_table(train.labels, featurize, len(config.s_grid), config.folds,
                                cv_seed, config.k_max)
    best, k = best_in_table(errors)
    s_grid, selections = _rmh_candidates(train, config, warn=True)
    selection = selections[best]
    X_tr, y_tr = reduce_dataset(train, selection)
    X_te, _ = reduce_dataset(test, selection)
    return knn_classify(X_tr, y_tr, X_te, k), len(selection), selection.times, k, s_grid[best]


def _run_projection(kind, train, test, config, cv_seed):
    errors = components_cv_errors(train, kind, config.folds, config.c_max, cv_seed, config.k_max)
    c, k = best_in_table(errors)
    c += 1
    model = pca_fit(train, c) if kind == 'pca' else pls_fit(train, c)
    c = model.n_components
    pred = knn_classify(model.transform(train), train.labels, model.transform(test), k)
    return pred, c, [], k, c


def run_method(method, train, test, config, cv_seed):
    '''Fit one method on `train` (tuning by cross-validation inside `train`) and score it on `test`

    Returns
    -------
    record : `dict`
        without the `n_train` and `repetition` keys
    '''
    start = time.perf_counter()
    if method == 'base':
        out = _run_base(train, test, config, cv_seed)
    elif method == 'mh':
        out = _run_mh(train, test, config, cv_seed)
    elif method == 'rmh':
        out = _run_rmh(train, test, config, cv_seed)
    elif method in ('pca', 'pls'):
        out = _run_projection(method, train, test, config, cv_seed)
    else:
        raise ValueError("Unknown method %r" % method)
    seconds = time.perf_counter() - start if config.record_timing else 0.
    pred, n_vars, times, k, tuned = out
    return {'method': method, 'error': error_rate(pred, test.labels), 'n_vars': int(n_vars),
            'seconds': float(seconds), 'selected_times': [float(t) for t in times],
            'k': int(k), 'tuned': tuned}


def _repetition_records(config, train, test, n_train, rep, cv_seed):
    records = []
    for method in config.methods:
        rec = run_method(method, train, test, config, cv_seed)
        rec['n_train'] = n_train
        rec['repetition'] = rep
        records.append(rec)
    return records


def _synthetic_repetition(config, n_train, rep):
    problem = SyntheticProblem(config.problem, Grid.equidistant(config.grid_size))
    train = generate_problem(problem, n_train,
                             derived_seed(config.seed, rep, n_train, _TRAIN_STREAM))
    test = generate_problem(problem, config.n_test,
                            derived_seed(config.seed, rep, n_train, _TEST_STREAM))
    return _repetition_records(config, train, test, n_train, rep,
                               derived_seed(config.seed, rep, n_train, _CV_STREAM))


def _real_repetition(config, data, rep):
    split = stratified_split(data, config.train_fraction, derived_seed(config.seed, rep, 0,
                                                                       _TRAIN_STREAM))
    return _repetition_records(config, split.train, split.test, len(split.train), rep,
                               derived_seed(config.seed, rep, 0, _CV_STREAM))


def _run_tasks(config, func, tasks, desc):
    # results come back in task order whatever the number of workers
    bar = tqdm(tasks, desc=desc, disable=not config.progress)
    with Parallel(n_jobs=config.n_jobs, verbose=0, backend='loky') as parallel:
        chunks = parallel(delayed(func)(*task) for task in bar)
    return [rec for chunk in chunks for rec in chunk]


def run_synthetic(config):
    '''Benchmark the methods on a synthetic problem

    For every training size and repetition, a training and an independent test sample are drawn
    from seeds derived from `(config.seed, repetition, n_train)`. Each method is tuned by
    stratified cross-validation inside the training sample only and scored on the test sample.

    Arguments
    ---------
    config : `ExperimentConfig`
        `config.problem` must name a synthetic trend

    Returns
    -------
    result : `ExperimentResult`
        `len(methods) * len(n_train) * repetitions` records
    '''
    if not config.is_synthetic:
        raise ValueError("run_synthetic needs a named problem, got %r" % config.problem)
    if config.n_test < 2 or config.n_test % 2:
        raise ValueError("n_test must be a positive even number, got %d" % config.n_test)
    bad = [n for n in config.n_train if n % 2]
    if bad:
        raise ValueError("Synthetic training sizes must be even, got %s" % bad)
    tasks = [(config, n_train, rep) for n_train in config.n_train
             for rep in range(config.repetitions)]
    records = _run_tasks(config, _synthetic_repetition, tasks, config.problem)
    targets = TrendSpec.named(config.problem).relevant_points()
    return ExperimentResult(records, targets, tol=1. / config.grid_size)


def load_problem_data(config):
    """The dataset of `config.problem` with the preprocessing chain applied"""
    data = load_dataset(config.problem, rescale_grid=config.rescale_grid)
    data = apply_preprocessing(data, config.preprocessing)
    data.check_supervised()
    return data


def run_real(config):
    '''Benchmark the methods on a dataset file

    The dataset is loaded and preprocessed once (all transforms are fit-free). Every repetition
    then splits it at random, class by class, into `train_fraction` for training and the rest
    for testing, and runs the method pipelines as `run_synthetic` does.

    Arguments
    ---------
    config : `ExperimentConfig`
        `config.problem` is the path of the CSV file; `n_train` and `n_test` are not used

    Returns
    -------
    result : `ExperimentResult`
        `len(methods) * repetitions` records, with `n_train` the size of the training part
    '''
    data = load_problem_data(config)
    tasks = [(config, data, rep) for rep in range(config.repetitions)]
    return ExperimentResult(_run_tasks(config, _real_repetition, tasks, 'real'))


def run_peak_lda(n_train=1000, n_test=1000, repetitions=100, seed=0, grid_size=200,
                 progress=True):
    '''Fisher discriminant on three choices of variables for the peak problem

    * `'lda_optimal'` - X(1/2), X(5/8), X(3/4), the points used by the optimal rule
    * `'lda_maximum'` - X(5/8) only, the maximum of the relevance
    * `'lda_random'` - X(t1), X(5/8), X(t2) with grid points t1 < 5/8 < t2 drawn at random in every
      repetition

    Returns
    -------
    result : `ExperimentResult`
    '''
    problem = SyntheticProblem('peak', Grid.equidistant(grid_size))
    t = problem.grid.points
    j_peak = problem.grid.index_of(5 / 8)
    sets = [('lda_optimal', [problem.grid.index_of(v) for v in (1 / 2, 5 / 8, 3 / 4)]),
            ('lda_maximum', [j_peak])]
    records = []
    for rep in tqdm(range(repetitions), desc='peak lda', disable=not progress):
        train = generate_problem(problem, n_train, derived_seed(seed, rep, n_train, _TRAIN_STREAM))
        test = generate_problem(problem, n_test, derived_seed(seed, rep, n_train, _TEST_STREAM))
        rng = np.random.default_rng(derived_seed(seed, rep, n_train, _EXTRA_STREAM))
        random_set = [int(rng.integers(0, j_peak)), j_peak, int(rng.integers(j_peak + 1, t.size))]
        for name, idx in sets + [('lda_random', random_set)]:
            model = fisher_lda_fit(train.values[:, idx], train.labels)
            err = error_rate(fisher_lda_predict(model, test.values[:, idx]), test.labels)
            records.append({'method': name, 'n_train': n_train, 'repetition': rep, 'error': err,
                            'n_vars': len(idx), 'seconds': 0.,
                            'selected_times': [float(t[j]) for j in idx], 'k': 0, 'tuned': None})
    return ExperimentResult(records)


def _sensitivity_repetition(config, n_train, rep, r_values, s_values):
    problem = SyntheticProblem(config.problem, Grid.equidistant(config.grid_size))
    train = generate_problem(problem, n_train,
                             derived_seed(config.seed, rep, n_train, _TRAIN_STREAM))
    test = generate_problem(problem, config.n_test,
                            derived_seed(config.seed, rep, n_train, _TEST_STREAM))
    cv_seed = derived_seed(config.seed, rep, n_train, _CV_STREAM)
    records = []
    for r in r_values:
        full = rmh_select(train, r, min(s_values), config.dcor_method)
        for s in s_values:
            selection = _fallback(train, full.prune(s), False, config.dcor_method)
            X_tr, y_tr = reduce_dataset(train, selection)
            X_te, _ = reduce_dataset(test, selection)
            k = select_k_cv(X_tr, y_tr, config.folds, cv_seed, config.k_max)
            records.append({'method': 'rmh(r=%g,s=%g)' % (r, s), 'n_train': n_train,
                            'repetition': rep,
                            'error': error_rate(knn_classify(X_tr, y_tr, X_te, k), test.labels),
                            'n_vars': len(selection), 'seconds': 0.,
                            'selected_times': selection.times, 'k': k, 'tuned': None})
    return records


def run_sensitivity(config, r_values=(.75, .8, .85, .9, .95), s_values=(.025, .05, .075, .1)):
    '''RMH with kNN for fixed pairs of thresholds, on a synthetic problem

    For each r, RMH runs once at the smallest s and the selections for larger s are obtained by
    pruning. The number of neighbours is still chosen by cross-validation.

    Returns
    -------
    result : `ExperimentResult`
        one method label `'rmh(r=..,s=..)'` per pair
    '''
    if not config.is_synthetic:
        raise ValueError("run_sensitivity needs a named problem, got %r" % config.problem)
    if not all(0 < r < 1 for r in r_values) or not all(0 < s < 1 for s in s_values):
        raise ValueError("Thresholds must lie in (0, 1)")
    tasks = [(config, n_train, rep, list(r_values), list(s_values))
             for n_train in config.n_train for rep in range(config.repetitions)]
    records = _run_tasks(config, _sensitivity_repetition, tasks, 'sensitivity')
    return ExperimentResult(records, TrendSpec.named(config.problem).relevant_points(),
                            tol=1. / config.grid_size)


# allowed distance to the Bayes error of RMH with kNN at a large training size
NEAR_BAYES_MARGINS = {'peak': .02, 'square': .03, 'sin': .03}


def run_near_bayes(problem='peak', fast=False, repetitions=None, n_train=1000, seed=0,
                   dcor_method='naive', n_jobs=1, progress=True):
    '''Check that RMH with kNN comes close to the Bayes error on a synthetic problem

    Arguments
    ---------
    problem : {'peak', 'square', 'sin'}
    fast : `bool`
        20 repetitions instead of 200, and one more percentage point of margin
    repetitions : `int` or None
        overrides the number of repetitions of the mode
    n_train : `int`
    seed : `int`
    dcor_method : {'naive', 'mergesort', 'avl'}
    n_jobs : `int`
    progress : `bool`

    Returns
    -------
    result : `ExperimentResult`
    mean_error : `float`
        mean test error over the repetitions
    limit : `float`
        Bayes error plus the margin of `problem` (plus 0.01 in fast mode); the check passes when
        `mean_error <= limit`
    '''
    if problem not in NEAR_BAYES_MARGINS:
        raise ValueError("No near-Bayes margin for %r, must be one of %s" %
                         (problem, sorted(NEAR_BAYES_MARGINS)))
    if repetitions is None:
        repetitions = 20 if fast else 200
    config = ExperimentConfig(problem=problem, methods=['rmh'], n_train=[n_train],
                              repetitions=repetitions, seed=seed, dcor_method=dcor_method,
                              n_jobs=n_jobs, progress=progress, record_timing=False)
    result = run_synthetic(config)
    mean_error = result.aggregates()[0]['mean_error']
    limit = bayes_error(problem) + NEAR_BAYES_MARGINS[problem] + (.01 if fast else 0.)
    return result, mean_error, limit


def emit_results(result, path, format='csv'):
    '''Write benchmark records

    Arguments
    ---------
    result : `ExperimentResult`
    path : `str`
    format : {'csv', 'json'}
        `'csv'` writes one row per record with the columns of `RESULT_COLUMNS` (selected times
        joined with ';', `tuned` empty when there is nothing to tune). `'json'` writes an object
        with the `records` list and an `aggregates` object keyed `'<method>/<n_train>'` (values as
        in `ExperimentResult.aggregates`).
    '''
    if format == 'csv':
        result.to_frame().to_csv(path, index=False, float_format='%.17g')
    elif format == 'json':
        with open(path, 'w') as f:
            aggregates = {'%s/%d' % (agg['method'], agg['n_train']): agg
                          for agg in result.aggregates()}
            json.dump({'records': result.records, 'aggregates': aggregates}, f, indent=2)
            f.write('\n')
    else:
        raise ValueError("Unknown format %r, must be 'csv' or 'json'" % format)
