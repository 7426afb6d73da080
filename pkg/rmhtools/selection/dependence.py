import numpy as np
import dcor

DCOV_METHODS = ('naive', 'mergesort', 'avl')

# relative size of the negative rounding residue tolerated in a distance covariance
_CLAMP_RTOL = 1e-12


def _check_method(method):
    if method not in DCOV_METHODS:
        raise ValueError("Unknown distance covariance method %r, must be one of %s" %
                         (method, DCOV_METHODS))


def _check_pair(x, y):
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.size != y.size:
        raise ValueError("x and y must have the same length, got %d and %d" % (x.size, y.size))
    if x.size < 2:
        raise ValueError("At least 2 observations are needed, got %d" % x.size)
    return x, y


def _centered_distances(x):
    """Double-centered matrix of pairwise absolute differences of the sample `x`"""
    a = np.abs(x[:, None] - x[None, :])
    row = a.mean(axis=1, keepdims=True)
    col = a.mean(axis=0, keepdims=True)
    return a - row - col + a.mean()


def _clamp(value, scale):
    if value < 0:
        if value < -_CLAMP_RTOL * max(scale, 1.):
            raise RuntimeError("Distance covariance estimate is negative (%g) beyond rounding error"
                               % value)
        return 0.
    return float(value)


def _dcov_from_centered(a_mat, b_mat):
    return _clamp(np.mean(a_mat * b_mat),
                  np.sqrt(np.mean(a_mat ** 2) * np.mean(b_mat ** 2)))


def _dcov_fast(x, y, method):
    value = dcor.distance_covariance_sqr(x, y, method=method)
    return _clamp(float(value), np.sqrt(dcor.distance_covariance_sqr(x, x, method=method) *
                                        dcor.distance_covariance_sqr(y, y, method=method)))


def _ratio(dcov_xy, dcov_xx, dcov_yy):
    denom = dcov_xx * dcov_yy
    if denom <= 0:
        return 0.
    return float(np.clip(dcov_xy / np.sqrt(denom), 0., 1.))


def dcov_sq(x, y, method='naive'):
    '''Squared distance covariance of two univariate samples (V-statistic)

    The pairwise absolute differences of each sample are double-centered (row and column means
    subtracted, grand mean added) and the estimate is the mean of their elementwise product,
    i.e. `(1/n^2) sum_ij A_ij B_ij`.

    Arguments
    ---------
    x, y : `array_like`
        two samples of the same length n >= 2
    method : {'naive', 'mergesort', 'avl'}
        `'naive'` builds the n x n matrices, O(n^2). The other two are the O(n log n) univariate
        algorithms of the `dcor` package and agree with `'naive'` to rounding error.

    Returns
    -------
    value : `float`
        non-negative estimate; negative rounding residue is clamped to 0.
    '''
    _check_method(method)
    x, y = _check_pair(x, y)
    if method == 'naive':
        return _dcov_from_centered(_centered_distances(x), _centered_distances(y))
    return _dcov_fast(x, y, method)


def dcor_sq(x, y, method='naive'):
    '''Squared distance correlation of two univariate samples

    `dcov_sq(x, y) / sqrt(dcov_sq(x, x) * dcov_sq(y, y))`, and 0 when either sample has zero
    distance variance (e.g. a constant sample). The value is invariant to `a*x + b` for `a != 0`
    and lies in [0, 1].

    Arguments
    ---------
    x, y : `array_like`
        two samples of the same length n >= 2
    method : {'naive', 'mergesort', 'avl'}
        see `dcov_sq`

    Returns
    -------
    value : `float`
    '''
    _check_method(method)
    x, y = _check_pair(x, y)
    if method == 'naive':
        a_mat = _centered_distances(x)
        b_mat = _centered_distances(y)
        return _ratio(_dcov_from_centered(a_mat, b_mat), _dcov_from_centered(a_mat, a_mat),
                      _dcov_from_centered(b_mat, b_mat))
    return _ratio(_dcov_fast(x, y, method), _dcov_fast(x, x, method), _dcov_fast(y, y, method))


class RelevanceCurve:
    """Squared distance correlation between the process and the label, along the grid

    Parameters
    ----------
    grid : `Grid`
    values : `array_like`
        one value in [0, 1] per grid point

    Attributes
    ----------
    grid : `Grid`
    values : `np.array`
        read-only array, `values[j]` is the estimated R^2(X(t_j), Y)
    """

    def __init__(self, grid, values):
        values = np.array(values, dtype=float).ravel()
        if values.size != len(grid):
            raise ValueError("A relevance curve needs one value per grid point (%d), got %d" %
                             (len(grid), values.size))
        if np.any(values < 0) or np.any(values > 1):
            raise ValueError("Relevance values must lie in [0, 1]")
        values.flags.writeable = False
        self.grid = grid
        self.values = values

    def __len__(self):
        return self.values.size

    def __repr__(self):
        return "RelevanceCurve(%d points, max %.4f at t=%g)" % (len(self), self.values.max(),
                                                                 self.grid.points[self.argmax()])

    def argmax(self, start=0, stop=None):
        """Index of the largest value in `values[start:stop]`; ties go to the lowest index"""
        return start + int(np.argmax(self.values[start:stop]))


def dcor_sq_columns(values, ref, columns, method='naive'):
    '''Squared distance correlation between a reference sample and several data columns

    Arguments
    ---------
    values : `np.array`
        (N, p) matrix of trajectories
    ref : `array_like`
        sample of length N, e.g. the labels or one column of `values`
    columns : `array_like`
        indices of the columns of `values` to compare with `ref`
    method : {'naive', 'mergesort', 'avl'}

    Returns
    -------
    res : `np.array`
        one squared distance correlation per entry of `columns`, in the same order
    '''
    _check_method(method)
    ref = np.asarray(ref, dtype=float).ravel()
    columns = np.asarray(columns, dtype=int).ravel()
    if ref.size != values.shape[0]:
        raise ValueError("Reference sample has %d observations, data has %d rows" %
                         (ref.size, values.shape[0]))
    if ref.size < 2:
        raise ValueError("At least 2 observations are needed, got %d" % ref.size)
    res = np.zeros(columns.size)
    if method == 'naive':
        # the reference distances are centered once and reused for every column
        b_mat = _centered_distances(ref)
        dcov_yy = _dcov_from_centered(b_mat, b_mat)
        if dcov_yy == 0:
            return res
        for i, j in enumerate(columns):
            a_mat = _centered_distances(values[:, j])
            res[i] = _ratio(_dcov_from_centered(a_mat, b_mat), _dcov_from_centered(a_mat, a_mat),
                            dcov_yy)
    else:
        dcov_yy = _dcov_fast(ref, ref, method)
        if dcov_yy == 0:
            return res
        for i, j in enumerate(columns):
            x = np.ascontiguousarray(values[:, j])
            res[i] = _ratio(_dcov_fast(x, ref, method), _dcov_fast(x, x, method), dcov_yy)
    return res


def relevance_curve(data, method='naive'):
    '''Relevance of every grid point: the squared distance correlation of X(t_j) with the label

    The label distance matrix is computed once and reused across columns. A dataset whose labels
    are all equal has an identically zero curve.

    Arguments
    ---------
    data : `FunctionalDataset`
    method : {'naive', 'mergesort', 'avl'}
        see `dcov_sq`

    Returns
    -------
    curve : `RelevanceCurve`
    '''
    values = dcor_sq_columns(data.values, data.labels, np.arange(data.n_points), method)
    return RelevanceCurve(data.grid, values)
