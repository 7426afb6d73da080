import os
import warnings
import numpy as np
import pandas as pd
from sklearn.model_selection import train_test_split, StratifiedKFold


class Grid:
    """Ordered sample times of discretized trajectories

    Parameters
    ----------
    points : `array_like`
        strictly increasing sample times, all within [0, 1]. At least two points are required.

    Attributes
    ----------
    points : `np.array`
        read-only 1d array of the sample times.
    """

    def __init__(self, points):
        points = np.array(points, dtype=float).ravel()
        if points.size < 2:
            raise ValueError("A grid needs at least 2 points, got %d" % points.size)
        if not np.all(np.isfinite(points)):
            raise ValueError("Grid points must be finite")
        if np.any(np.diff(points) <= 0):
            raise ValueError("Grid points must be strictly increasing")
        if points[0] < 0 or points[-1] > 1:
            raise ValueError("Grid points must lie within [0, 1], got [%g, %g]" %
                             (points[0], points[-1]))
        points.flags.writeable = False
        self.points = points

    @classmethod
    def equidistant(cls, size, start=None, stop=1.):
        """Equidistant grid of `size` points ending at `stop`

        If `start` is None, the grid is `stop * j / size` for `j = 1, ..., size`, i.e. it omits the
        origin (where Brownian trajectories are pinned at zero) and contains the dyadic points
        1/4, 3/8, 1/2, 5/8, 3/4 whenever `size` is a multiple of 8.
        """
        if start is None:
            return cls(stop * np.arange(1, size + 1) / size)
        return cls(np.linspace(start, stop, size))

    def __len__(self):
        return self.points.size

    def __eq__(self, other):
        return isinstance(other, Grid) and np.array_equal(self.points, other.points)

    def __repr__(self):
        return "Grid(%d points in [%g, %g])" % (len(self), self.points[0], self.points[-1])

    @property
    def is_equidistant(self):
        steps = np.diff(self.points)
        return bool(np.allclose(steps, steps[0], rtol=1e-9, atol=1e-12))

    @property
    def span(self):
        return self.points[-1] - self.points[0]

    def index_of(self, t, atol=1e-9):
        """Index of the grid point equal to `t` (within `atol`)

        Raises
        ------
        ValueError
            if `t` is not a grid point
        """
        idx = int(np.argmin(np.abs(self.points - t)))
        if abs(self.points[idx] - t) > atol:
            raise ValueError("Time %g is not a grid point" % t)
        return idx

    def subgrid(self, indices):
        return Grid(self.points[np.asarray(indices)])


class FunctionalDataset:
    """N trajectories discretized on a common grid, with binary labels

    Parameters
    ----------
    grid : `Grid` or `array_like`
        the common sample times. Array-likes are converted with `Grid(grid)`.
    values : `array_like`
        2d array of shape (N, p); row n is trajectory n evaluated on the grid.
    labels : `array_like`
        N class marks, each 0 or 1.

    Attributes
    ----------
    grid : `Grid`
    values : `np.array`
        read-only (N, p) float array
    labels : `np.array`
        read-only (N,) int array
    """

    def __init__(self, grid, values, labels):
        if not isinstance(grid, Grid):
            grid = Grid(grid)
        values = np.array(values, dtype=float)
        if values.ndim == 1:
            values = values.reshape(1, -1)
        if values.ndim != 2:
            raise ValueError("values must be a 2d array, got %d dimensions" % values.ndim)
        if values.shape[1] != len(grid):
            raise ValueError("Every trajectory must have %d values (grid length), got %d" %
                             (len(grid), values.shape[1]))
        raw_labels = np.asarray(labels).ravel()
        if raw_labels.size != values.shape[0]:
            raise ValueError("Got %d labels for %d trajectories" % (raw_labels.size, values.shape[0]))
        if raw_labels.size and not np.all(np.isin(raw_labels, (0, 1))):
            raise ValueError("non-binary label: labels must be 0 or 1, got %s" %
                             np.unique(raw_labels))
        labels = raw_labels.astype(int)
        values.flags.writeable = False
        labels.flags.writeable = False
        self.grid = grid
        self.values = values
        self.labels = labels

    def __len__(self):
        return self.values.shape[0]

    def __repr__(self):
        return "FunctionalDataset(N=%d, p=%d, class counts=%s)" % (
            len(self), self.n_points, self.class_counts)

    @property
    def n_points(self):
        return self.values.shape[1]

    @property
    def times(self):
        return self.grid.points

    @property
    def class_counts(self):
        return (int(np.sum(self.labels == 0)), int(np.sum(self.labels == 1)))

    def check_supervised(self):
        """Raise a `ValueError` unless both classes are present"""
        if min(self.class_counts) == 0:
            raise ValueError("Both classes must be present, class counts are %s" %
                             (self.class_counts,))

    def column(self, t):
        """Values of every trajectory at grid time `t`"""
        return self.values[:, self.grid.index_of(t)]

    def subset(self, rows):
        """Dataset made of the trajectories indexed by `rows`"""
        rows = np.asarray(rows, dtype=int)
        return FunctionalDataset(self.grid, self.values[rows], self.labels[rows])

    def with_values(self, values, grid=None):
        """Copy of this dataset with new values (and optionally a new grid); labels are kept"""
        return FunctionalDataset(self.grid if grid is None else grid, values, self.labels)


class SplitPair:
    """Disjoint train / test partition of a `FunctionalDataset`

    Attributes
    ----------
    train, test : `FunctionalDataset`
    train_index, test_index : `np.array`
        row indices of the source dataset that went to each side.
    """

    def __init__(self, train, test, train_index=None, test_index=None):
        self.train = train
        self.test = test
        self.train_index = train_index
        self.test_index = test_index

    def __iter__(self):
        return iter((self.train, self.test))


def _parse_time(column, time_prefix):
    if not column.startswith(time_prefix):
        raise ValueError("Column %r does not follow the '%s<time>' naming convention" %
                         (column, time_prefix))
    try:
        return float(column[len(time_prefix):])
    except ValueError:
        raise ValueError("Column %r does not carry a numeric time" % column)


def load_dataset(path, label_column='label', time_prefix='t_', drop_zero_rows=False,
                 rescale_grid=False):
    '''Load a functional dataset from a CSV file with self-describing headers

    The header row holds `label_column` followed by one column per grid point named
    `<time_prefix><time>`, e.g. `label,t_0.0,t_0.5,t_1.0`. Every other row is one trajectory.

    Arguments
    ---------
    path : `str`
        location of the CSV file
    label_column : `str`
        name of the column holding the 0/1 class marks
    time_prefix : `str`
        prefix of the grid-point columns
    drop_zero_rows : `bool`
        whether to exclude trajectories that are identically zero (as done for the Medflies
        egg-laying records)
    rescale_grid : `bool`
        if True, header times are mapped affinely onto [0, 1] (first time to 0, last to 1), so
        files on other time scales (ages, wavelengths) can be loaded.

    Returns
    -------
    data : `FunctionalDataset`
    '''
    if not os.path.isfile(path):
        raise FileNotFoundError("Dataset file %s does not exist" % path)
    try:
        frame = pd.read_csv(path, float_precision='round_trip')
    except pd.errors.ParserError as err:
        raise ValueError("Malformed row length in %s: %s" % (path, err))
    except pd.errors.EmptyDataError:
        raise ValueError("Dataset file %s is empty" % path)

    if label_column not in frame.columns:
        raise ValueError("Missing label column %r in %s" % (label_column, path))
    time_columns = [c for c in frame.columns if c != label_column]
    times = np.array([_parse_time(c, time_prefix) for c in time_columns])

    for col in frame.columns:
        if not pd.api.types.is_numeric_dtype(frame[col]):
            bad = pd.to_numeric(frame[col], errors='coerce').isna() & frame[col].notna()
            row = int(np.flatnonzero(bad.to_numpy())[0]) if bad.any() else 0
            raise ValueError("Non-numeric cell in column %r, data row %d of %s" % (col, row + 1, path))
    if frame.isna().to_numpy().any():
        row = int(np.flatnonzero(frame.isna().any(axis=1).to_numpy())[0])
        raise ValueError("Malformed row length (missing cells) in data row %d of %s" % (row + 1, path))

    labels = frame[label_column].to_numpy()
    if not np.all(np.isin(labels, (0, 1))):
        raise ValueError("non-binary label in %s: found %s" % (path, np.unique(labels)))
    values = frame[time_columns].to_numpy(dtype=float)

    if rescale_grid:
        if times.size < 2 or times[-1] == times[0]:
            raise ValueError("Cannot rescale a grid with fewer than 2 distinct times")
        times = (times - times[0]) / (times[-1] - times[0])
    data = FunctionalDataset(Grid(times), values, labels)
    if drop_zero_rows:
        data = drop_zero_curves(data)
    return data


def save_dataset(data, path, label_column='label', time_prefix='t_'):
    '''Write `data` in the CSV format read by `load_dataset`

    Floats are written with 17 significant digits so that `load_dataset(save_dataset(data))`
    reproduces the values.
    '''
    columns = ['%s%r' % (time_prefix, float(t)) for t in data.grid.points]
    frame = pd.DataFrame(data.values, columns=columns)
    frame.insert(0, label_column, data.labels)
    frame.to_csv(path, index=False, float_format='%.17g')


def drop_zero_curves(data):
    """Remove the trajectories that are identically zero"""
    keep = np.any(data.values != 0, axis=1)
    return data.subset(np.flatnonzero(keep))


def truncate(data, n_points):
    """Keep the first `n_points` grid points of every trajectory"""
    if not 2 <= n_points <= data.n_points:
        raise ValueError("n_points must be in [2, %d], got %d" % (data.n_points, n_points))
    return data.with_values(data.values[:, :n_points], grid=data.grid.subgrid(np.arange(n_points)))


def second_derivative(data):
    '''Second derivative of every trajectory by three-point divided differences

    On a grid with spacings `h1 = t[i] - t[i-1]` and `h2 = t[i+1] - t[i]` the estimate at the interior
    point `t[i]` is

        2 * (x[i-1] / (h1 (h1 + h2)) - x[i] / (h1 h2) + x[i+1] / (h2 (h1 + h2)))

    which is exact for quadratics on any grid. The returned dataset lives on the interior grid
    (both endpoints dropped).

    Arguments
    ---------
    data : `FunctionalDataset`
        dataset whose grid has at least 3 points

    Returns
    -------
    data : `FunctionalDataset`
    '''
    if data.n_points < 3:
        raise ValueError("second_derivative needs a grid of at least 3 points, got %d" %
                         data.n_points)
    t = data.grid.points
    h1 = t[1:-1] - t[:-2]
    h2 = t[2:] - t[1:-1]
    x = data.values
    res = 2 * (x[:, :-2] / (h1 * (h1 + h2)) - x[:, 1:-1] / (h1 * h2) + x[:, 2:] / (h2 * (h1 + h2)))
    return data.with_values(res, grid=Grid(t[1:-1]))


def local_linear_smoother(grid, bandwidth=0.05):
    '''Hat matrix of the Gaussian-kernel local linear smoother on `grid`

    Arguments
    ---------
    grid : `Grid`
    bandwidth : `float`
        standard deviation of the Gaussian kernel, as a fraction of the grid span

    Returns
    -------
    smoother : `np.array`
        (p, p) matrix `L` such that the smoothed trajectory is `L @ x`
    '''
    if bandwidth <= 0:
        raise ValueError("bandwidth must be positive, got %g" % bandwidth)
    t = grid.points
    sigma = bandwidth * grid.span
    # d[i, j] = t[j] - t[i]: offsets of every sample from evaluation point i
    d = t[None, :] - t[:, None]
    w = np.exp(-0.5 * (d / sigma) ** 2)
    s0 = w.sum(axis=1)
    s1 = (w * d).sum(axis=1)
    s2 = (w * d ** 2).sum(axis=1)
    det = s0 * s2 - s1 ** 2
    smoother = w * (s2[:, None] - d * s1[:, None])
    ok = det > 1e-12 * s0 * np.maximum(s2, np.finfo(float).tiny)
    smoother[ok] /= det[ok, None]
    if not ok.all():
        # a kernel too narrow to see two points: fall back to the local constant fit
        smoother[~ok] = w[~ok] / s0[~ok, None]
    return smoother


def local_linear_smooth(data, bandwidth=0.05):
    '''Smooth every trajectory with a Gaussian-kernel local linear regression

    Each trajectory is replaced by the local linear fit evaluated on the same grid. Straight
    lines are reproduced exactly; as `bandwidth` grows the fit tends to the global least-squares
    line.

    Arguments
    ---------
    data : `FunctionalDataset`
    bandwidth : `float`
        standard deviation of the Gaussian kernel as a fraction of the domain (grid span).
        Default 0.05.

    Returns
    -------
    data : `FunctionalDataset`
    '''
    smoother = local_linear_smoother(data.grid, bandwidth)
    return data.with_values(data.values @ smoother.T)


def stratified_split(data, train_fraction=2/3, seed=0):
    '''Random class-stratified partition into a training and a test set

    In each class of size n, `floor(n * train_fraction + 1/2)` members (kept within [1, n-1]) go to
    the training set; the members are drawn by `sklearn.model_selection.train_test_split`, one
    class after the other from a single `RandomState(seed)`, so the partition is a deterministic
    function of `seed`.

    Arguments
    ---------
    data : `FunctionalDataset`
    train_fraction : `float`
        fraction of each class assigned to the training set, in (0, 1). Default 2/3.
    seed : `int`

    Returns
    -------
    split : `SplitPair`
    '''
    if not 0 < train_fraction < 1:
        raise ValueError("train_fraction must be in (0, 1), got %g" % train_fraction)
    counts = data.class_counts
    if min(counts) < 2:
        raise ValueError("Each class needs at least 2 members to be split, class counts are %s"
                         % (counts,))
    state = np.random.RandomState(seed)
    train_idx, test_idx = [], []
    for label in (0, 1):
        members = np.flatnonzero(data.labels == label)
        n_train = int(np.floor(members.size * train_fraction + 0.5))
        n_train = min(max(n_train, 1), members.size - 1)
        tr, te = train_test_split(members, train_size=n_train, random_state=state)
        train_idx.append(tr)
        test_idx.append(te)
    train_idx = np.sort(np.concatenate(train_idx))
    test_idx = np.sort(np.concatenate(test_idx))
    return SplitPair(data.subset(train_idx), data.subset(test_idx), train_idx, test_idx)


def stratified_folds(labels, n_folds=10, seed=0):
    '''Seeded class-stratified K-fold partition of `range(len(labels))`

    A thin wrapper of `sklearn.model_selection.StratifiedKFold` with shuffling; the validation
    folds differ in size by at most one.

    Returns
    -------
    folds : `list`
        `n_folds` tuples `(train_index, validation_index)` of sorted index arrays
    '''
    labels = np.asarray(labels)
    if n_folds < 2:
        raise ValueError("n_folds must be at least 2, got %d" % n_folds)
    if labels.size < n_folds:
        raise ValueError("too few instances (%d) for %d folds" % (labels.size, n_folds))
    kfold = StratifiedKFold(n_splits=n_folds, shuffle=True, random_state=seed)
    with warnings.catch_warnings():
        # classes smaller than n_folds are allowed, some folds then miss them
        warnings.simplefilter('ignore', UserWarning)
        return [(tr, va) for tr, va in kfold.split(np.zeros(labels.size), labels)]


def apply_preprocessing(data, steps):
    '''Apply a chain of named, fit-free transforms

    Arguments
    ---------
    data : `FunctionalDataset`
    steps : `list` of `str`
        transforms applied in order. Accepted names:

        * `'second_derivative'` - see `second_derivative`
        * `'smooth'` or `'smooth:<bandwidth>'` - see `local_linear_smooth`
        * `'truncate:<n>'` - see `truncate`
        * `'drop_zero'` - see `drop_zero_curves`

    Returns
    -------
    data : `FunctionalDataset`
    '''
    for step in steps:
        name, _, arg = step.partition(':')
        if name == 'second_derivative':
            data = second_derivative(data)
        elif name == 'smooth':
            data = local_linear_smooth(data, float(arg) if arg else 0.05)
        elif name == 'truncate':
            if not arg:
                raise ValueError("truncate needs a point count, e.g. 'truncate:50'")
            data = truncate(data, int(arg))
        elif name == 'drop_zero':
            n_before = len(data)
            data = drop_zero_curves(data)
            if len(data) < n_before:
                warnings.warn("Dropped %d all-zero trajectories" % (n_before - len(data)))
        else:
            raise ValueError("Unknown preprocessing step %r" % step)
    return data
