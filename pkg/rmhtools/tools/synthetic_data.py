import numpy as np
from scipy import integrate, stats
from .fdata import Grid, FunctionalDataset

TREND_KINDS = ('peak', 'peak2', 'square', 'sin', 'zero', 'custom')


def _check_mk(m, k):
    if int(m) != m or int(k) != k:
        raise TypeError("m and k must be integers, got %r and %r" % (m, k))
    if m < 1 or not 1 <= k <= 2 ** (m - 1):
        raise ValueError("Need m >= 1 and 1 <= k <= 2^(m-1), got m=%d, k=%d" % (m, k))


def _phi_support(m, k):
    return (2 * k - 2) / 2 ** m, (2 * k - 1) / 2 ** m, 2 * k / 2 ** m


def phi_mk(m, k, t):
    '''Tent function Phi_{m,k}

    `Phi_{m,k}(t)` is the integral from 0 to t of `sqrt(2^(m-1))` times the indicator of
    `[(2k-2)/2^m, (2k-1)/2^m)` minus the indicator of `[(2k-1)/2^m, 2k/2^m)`. It vanishes
    outside `((2k-2)/2^m, 2k/2^m)`, rises with slope `sqrt(2^(m-1))` up to the midpoint and falls
    back to zero with the opposite slope. The derivatives of these functions form an orthonormal
    family in L2[0, 1].

    Arguments
    ---------
    m : `int`
        level, m >= 1
    k : `int`
        position, 1 <= k <= 2^(m-1)
    t : `float` or `array_like`
        times in [0, 1]

    Returns
    -------
    res : `float` or `np.array`
    '''
    _check_mk(m, k)
    a, mid, b = _phi_support(m, k)
    h = np.sqrt(2 ** (m - 1))
    t = np.asarray(t, dtype=float)
    res = h * np.clip(np.minimum(t - a, b - t), 0, None)
    return float(res) if res.ndim == 0 else res


def phi_mk_derivative(m, k, t):
    """Derivative of `phi_mk`: `+sqrt(2^(m-1))` on the rising half, `-sqrt(2^(m-1))` on the
    falling half, zero elsewhere (right-continuous)"""
    _check_mk(m, k)
    a, mid, b = _phi_support(m, k)
    h = np.sqrt(2 ** (m - 1))
    t = np.asarray(t, dtype=float)
    res = np.where((t >= a) & (t < mid), h, 0.) - np.where((t >= mid) & (t < b), h, 0.)
    return float(res) if res.ndim == 0 else res


def _square(t):
    return 2 * np.asarray(t, dtype=float) ** 2


def _square_derivative(t):
    return 4 * np.asarray(t, dtype=float)


def _sin(t):
    return .5 * np.sin(2 * np.pi * np.asarray(t, dtype=float))


def _sin_derivative(t):
    return np.pi * np.cos(2 * np.pi * np.asarray(t, dtype=float))


class TrendSpec:
    """Deterministic trend m(t) separating the two classes

    The trend is a linear combination of tent functions plus an optional smooth part:
    `m(t) = sum_i c_i Phi_{m_i,k_i}(t) + g(t)`.

    Parameters
    ----------
    terms : `list` of `tuple`
        `(coefficient, m, k)` triplets
    smooth : callable or None
        smooth part `g`, vectorized over times
    smooth_derivative : callable or None
        its derivative `g'`, required when `smooth` is given
    kind : `str`
        name of the trend, `'custom'` unless built by `TrendSpec.named`

    Attributes
    ----------
    terms : `tuple`
    kind : `str`
    """

    def __init__(self, terms=(), smooth=None, smooth_derivative=None, kind='custom'):
        if kind not in TREND_KINDS:
            raise ValueError("Unknown trend kind %r, must be one of %s" % (kind, TREND_KINDS))
        terms = tuple((float(c), int(m), int(k)) for c, m, k in terms)
        for _, m, k in terms:
            _check_mk(m, k)
        if (smooth is None) != (smooth_derivative is None):
            raise ValueError("smooth and smooth_derivative must be given together")
        self.terms = terms
        self.smooth = smooth
        self.smooth_derivative = smooth_derivative
        self.kind = kind

    @classmethod
    def named(cls, kind):
        '''One of the reference trends

        * `'peak'` - `2 Phi_{3,3}`
        * `'peak2'` - `2 Phi_{3,2} + 3 Phi_{3,3} - 2 Phi_{2,2}`
        * `'square'` - `2 t^2`
        * `'sin'` - `sin(2 pi t) / 2`
        * `'zero'` - no trend, the classes are identically distributed
        '''
        if kind == 'peak':
            return cls([(2, 3, 3)], kind=kind)
        if kind == 'peak2':
            return cls([(2, 3, 2), (3, 3, 3), (-2, 2, 2)], kind=kind)
        if kind == 'square':
            return cls(smooth=_square, smooth_derivative=_square_derivative, kind=kind)
        if kind == 'sin':
            return cls(smooth=_sin, smooth_derivative=_sin_derivative, kind=kind)
        if kind == 'zero':
            return cls(kind=kind)
        raise ValueError("Unknown named trend %r, must be one of %s" % (kind, TREND_KINDS[:-1]))

    def __repr__(self):
        return "TrendSpec(%r, terms=%s%s)" % (self.kind, list(self.terms),
                                            ', smooth' if self.smooth is not None else '')

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        res = np.zeros_like(t)
        for c, m, k in self.terms:
            res = res + c * phi_mk(m, k, t)
        if self.smooth is not None:
            res = res + self.smooth(t)
        return res

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        res = np.zeros_like(t)
        for c, m, k in self.terms:
            res = res + c * phi_mk_derivative(m, k, t)
        if self.smooth_derivative is not None:
            res = res + self.smooth_derivative(t)
        return res

    def _combined_terms(self):
        coefs = {}
        for c, m, k in self.terms:
            coefs[(m, k)] = coefs.get((m, k), 0.) + c
        return coefs

    def norm_sq(self):
        '''Squared L2[0, 1] norm of the trend derivative, `||m'||^2`

        The tent-function part is exact (orthonormal derivatives), the cross terms with the smooth
        part use `int g' Phi'_{m,k} = sqrt(2^(m-1)) (2 g(mid) - g(a) - g(b))` and the smooth part is
        integrated with `scipy.integrate.quad`.
        '''
        coefs = self._combined_terms()
        res = sum(c ** 2 for c in coefs.values())
        if self.smooth is not None:
            g = self.smooth
            res += integrate.quad(lambda s: self.smooth_derivative(s) ** 2, 0, 1, limit=200)[0]
            for (m, k), c in coefs.items():
                a, mid, b = _phi_support(m, k)
                res += 2 * c * np.sqrt(2 ** (m - 1)) * (2 * g(mid) - g(a) - g(b))
        return float(res)

    def relevant_points(self):
        """Kinks of the tent-function part (positive times only), sorted

        These are the points where the optimal rule samples the trajectory; for smooth trends the
        list is empty.
        """
        points = set()
        for (m, k), c in self._combined_terms().items():
            if c != 0:
                points.update(p for p in _phi_support(m, k) if p > 0)
        return sorted(points)


class SyntheticProblem:
    """Two-class problem: Brownian motion B(t) against B(t) + m(t), equally likely

    Parameters
    ----------
    trend : `TrendSpec` or `str`
        the trend m, or the name of a reference trend
    grid : `Grid` or None
        sample times. None gives the 200 equidistant points j/200, j = 1, ..., 200.
    class_balance : `float`
        prior probability of class 1, must be 1/2
    """

    def __init__(self, trend, grid=None, class_balance=.5):
        if isinstance(trend, str):
            trend = TrendSpec.named(trend)
        if not isinstance(trend, TrendSpec):
            raise TypeError("trend must be a TrendSpec or a trend name, got %s" % type(trend))
        if class_balance != .5:
            raise ValueError("Only balanced problems are supported, got class_balance=%g" %
                             class_balance)
        if grid is None:
            grid = Grid.equidistant(200)
        elif not isinstance(grid, Grid):
            grid = Grid(grid)
        self.trend = trend
        self.grid = grid
        self.class_balance = class_balance

    def __repr__(self):
        return "SyntheticProblem(%r, %r)" % (self.trend, self.grid)

    @property
    def bayes_error(self):
        return bayes_error(self.trend)


def brownian_paths(grid, n, seed=None):
    '''Sample `n` standard Brownian motion trajectories on `grid`

    Trajectories start at X(0) = 0 whether or not the grid contains 0: the first value is a
    Gaussian with variance `grid[0]`, later increments have variance equal to the time gaps.

    Arguments
    ---------
    grid : `Grid`
    n : `int`
    seed : `int`, `np.random.Generator` or None

    Returns
    -------
    paths : `np.array`
        (n, len(grid)) array
    '''
    rng = np.random.default_rng(seed)
    gaps = np.diff(np.concatenate(([0.], grid.points)))
    return np.cumsum(rng.standard_normal((n, len(grid))) * np.sqrt(gaps), axis=1)


def brownian_sample(grid, seed=None):
    """A single Brownian trajectory on `grid`, see `brownian_paths`"""
    return brownian_paths(grid, 1, seed)[0]


def make_trend(spec, grid):
    """Trend values on the grid"""
    if isinstance(spec, str):
        spec = TrendSpec.named(spec)
    return spec(grid.points)


def generate_problem(problem, n, seed=None):
    '''Draw a labelled sample from a synthetic problem

    The first n/2 trajectories are Brownian paths labelled 0, the other n/2 are Brownian paths
    plus the trend, labelled 1; rows are then shuffled.

    Arguments
    ---------
    problem : `SyntheticProblem` or `str`
    n : `int`
        sample size, must be even
    seed : `int`, `np.random.Generator` or None

    Returns
    -------
    data : `FunctionalDataset`
    '''
    if isinstance(problem, str):
        problem = SyntheticProblem(problem)
    if n < 2 or n % 2:
        raise ValueError("n must be a positive even number, got %d" % n)
    rng = np.random.default_rng(seed)
    values = brownian_paths(problem.grid, n, rng)
    half = n // 2
    values[half:] += make_trend(problem.trend, problem.grid)
    labels = np.repeat([0, 1], half)
    order = rng.permutation(n)
    return FunctionalDataset(problem.grid, values[order], labels[order])


def _increments(grid, x):
    # prepend the pinned value X(0) = 0 when the grid starts after 0
    t = grid.points
    if t[0] > 0:
        t = np.concatenate(([0.], t))
        x = np.concatenate((np.zeros(x.shape[:-1] + (1,)), x), axis=-1)
    return np.diff(t), np.diff(x, axis=-1)


def _discrete_norm_sq(trend, grid):
    dt, dm = _increments(grid, make_trend(trend, grid))
    return float(np.sum(dm ** 2 / dt))


def bayes_rule_linear_trend(x, trend, grid):
    '''Optimal rule for B(t) against B(t) + m(t) with equal priors

    Returns 1 iff `<x, m> > ||m||^2 / 2`, where `<x, m> = int x'(s) m'(s) ds` and
    `||m||^2 = int m'(s)^2 ds` are evaluated with forward differences on the grid (with the pinned
    value X(0) = 0 prepended). For piecewise linear trends whose kinks lie on the grid this is
    the exact likelihood-ratio rule for the observed points; for `2 Phi_{3,3}` it reads
    `2 X(5/8) - X(1/2) - X(3/4) > 1/2`.

    Arguments
    ---------
    x : `array_like`
        one trajectory, or a (n, p) array of trajectories
    trend : `TrendSpec` or `str`
    grid : `Grid`

    Returns
    -------
    label : `int` or `np.array`
    '''
    if isinstance(trend, str):
        trend = TrendSpec.named(trend)
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != len(grid):
        raise ValueError("Trajectories must have %d values, got %d" % (len(grid), x.shape[-1]))
    dt, dm = _increments(grid, make_trend(trend, grid))
    norm_sq = np.sum(dm ** 2 / dt)
    if norm_sq <= 0:
        raise ValueError("Degenerate trend: no signal to classify with")
    _, dx = _increments(grid, x)
    inner = dx @ (dm / dt)
    res = (inner > norm_sq / 2).astype(int)
    return int(res) if res.ndim == 0 else res


def bayes_error(trend, grid=None):
    '''Bayes error of B(t) against B(t) + m(t) with equal priors

    `L* = 1 - normcdf(||m'|| / 2)`. With a `grid`, the norm is the discrete one used by
    `bayes_rule_linear_trend`, giving the optimal error for the discretized observations. A zero
    trend gives 1/2.

    Arguments
    ---------
    trend : `TrendSpec` or `str`
    grid : `Grid` or None

    Returns
    -------
    error : `float`
    '''
    if isinstance(trend, str):
        trend = TrendSpec.named(trend)
    norm_sq = trend.norm_sq() if grid is None else _discrete_norm_sq(trend, grid)
    return float(1 - stats.norm.cdf(np.sqrt(max(norm_sq, 0.)) / 2))
