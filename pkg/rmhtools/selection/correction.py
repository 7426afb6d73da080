import numpy as np

_TOL = 1e-12


class IntervalNode:
    """Search interval of the recursive selection, with the pins of the corrected process

    After a correction at `t0` the trajectories vanish at `t0`, so the intervals spawned next to
    it see a process pinned there. A node with only a left pin is modelled as a Brownian motion
    started at `left_anchor`; a node pinned on both sides as a Brownian bridge between
    `left_anchor` and `right_anchor`.

    Parameters
    ----------
    t_inf, t_sup : `float`
        grid times bounding the search interval, `t_inf <= t_sup`
    left_anchor : `float`
        time where the process is pinned at zero, `left_anchor <= t_inf`
    right_anchor : `float` or None
        time of the right pin, `t_sup <= right_anchor`. None for a Brownian node.

    Attributes
    ----------
    kind : {'brownian', 'bridge'}
    """

    def __init__(self, t_inf, t_sup, left_anchor=0., right_anchor=None):
        if t_inf > t_sup:
            raise ValueError("Empty interval [%g, %g]" % (t_inf, t_sup))
        if left_anchor > t_inf + _TOL:
            raise ValueError("left_anchor %g lies right of t_inf %g" % (left_anchor, t_inf))
        if right_anchor is not None:
            if right_anchor < t_sup - _TOL:
                raise ValueError("right_anchor %g lies left of t_sup %g" % (right_anchor, t_sup))
            if right_anchor <= left_anchor:
                raise ValueError("A bridge needs left_anchor < right_anchor, got %g and %g" %
                                 (left_anchor, right_anchor))
        self.t_inf = float(t_inf)
        self.t_sup = float(t_sup)
        self.left_anchor = float(left_anchor)
        self.right_anchor = None if right_anchor is None else float(right_anchor)

    @property
    def kind(self):
        return 'brownian' if self.right_anchor is None else 'bridge'

    def __repr__(self):
        if self.kind == 'brownian':
            pins = "pinned at %g" % self.left_anchor
        else:
            pins = "pinned at %g and %g" % (self.left_anchor, self.right_anchor)
        return "IntervalNode([%g, %g], %s, %s)" % (self.t_inf, self.t_sup, self.kind, pins)

    def contains(self, t):
        return self.t_inf - _TOL <= t <= self.t_sup + _TOL

    def left_child(self, t_minus, t_max):
        """Node searched left of a selection at `t_max`: a bridge pinned at the parent's left pin
        and at `t_max`"""
        return IntervalNode(self.t_inf, t_minus, self.left_anchor, t_max)

    def right_child(self, t_plus, t_max):
        """Node searched right of a selection at `t_max`: pinned at `t_max`, and at the parent's
        right pin when the parent is a bridge"""
        return IntervalNode(t_plus, self.t_sup, t_max, self.right_anchor)


def correction_factors(node, t0, t):
    '''Coefficients `c(t)` such that E[X(t) | X(t0)] = c(t) X(t0) within `node`

    For a Brownian node, with `u = t - left_anchor` and `u0 = t0 - left_anchor`,
    `c = min(u, u0) / u0`. For a bridge, times are first rescaled so that the pins sit at 0 and 1,
    and `c = (min(u, u0) - u u0) / (u0 (1 - u0))`.

    When `t0` falls on a pin the limits of these formulas are used: 1 for a Brownian node, `1 - u`
    at the left pin of a bridge and `u` at its right pin.

    Arguments
    ---------
    node : `IntervalNode`
    t0 : `float`
        conditioning time, within `[node.t_inf, node.t_sup]`
    t : `float` or `array_like`
        times within `[left_anchor, right_anchor]` (bridge) or `[left_anchor, t_sup]` (Brownian)

    Returns
    -------
    factors : `float` or `np.array`
        same shape as `t`
    '''
    scalar = np.isscalar(t)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if not node.contains(t0):
        raise ValueError("t0=%g lies outside the interval [%g, %g]" % (t0, node.t_inf, node.t_sup))
    right = node.t_sup if node.right_anchor is None else node.right_anchor
    if np.any(t < node.left_anchor - _TOL) or np.any(t > right + _TOL):
        raise ValueError("Times must lie within [%g, %g]" % (node.left_anchor, right))

    if node.kind == 'brownian':
        u = t - node.left_anchor
        u0 = t0 - node.left_anchor
        if u0 <= _TOL:
            factors = np.ones_like(u)
        else:
            factors = np.minimum(u, u0) / u0
    else:
        width = node.right_anchor - node.left_anchor
        u = (t - node.left_anchor) / width
        u0 = (t0 - node.left_anchor) / width
        if u0 <= _TOL:
            factors = 1 - u
        elif u0 >= 1 - _TOL:
            factors = u
        else:
            factors = (np.minimum(u, u0) - u * u0) / (u0 * (1 - u0))
    factors = np.where(np.abs(t - t0) <= _TOL, 1., factors)
    return float(factors[0]) if scalar else factors


def conditional_expectation(node, t0, t, x_t0):
    '''Conditional expectation E[X(t) | X(t0) = x_t0] under the node's process model

    Brownian node (pinned at `left_anchor`): `min(u, u0) / u0 * x_t0`. Bridge node (pinned at both
    anchors, times rescaled to [0, 1]): `(min(u, u0) - u u0) / (u0 (1 - u0)) * x_t0`. See
    `correction_factors` for the coordinates and the limits used when `t0` sits on a pin.

    Arguments
    ---------
    node : `IntervalNode`
    t0 : `float`
    t : `float` or `array_like`
    x_t0 : `float` or `array_like`
        value(s) of the process at `t0`. If both `t` and `x_t0` are arrays, the result has shape
        `(len(x_t0), len(t))`.

    Returns
    -------
    res : `float` or `np.array`
    '''
    factors = correction_factors(node, t0, t)
    if np.ndim(factors) and np.ndim(x_t0):
        return np.multiply.outer(np.asarray(x_t0, dtype=float), factors)
    return factors * x_t0


def apply_correction(data, node, t0):
    '''Remove from every trajectory its conditional expectation given the value at `t0`

    For every grid time `t` in `[node.t_inf, node.t_sup]`, `X(t)` is replaced by
    `X(t) - E[X(t) | X(t0)]`; values outside the interval are left untouched. The column at `t0`
    becomes identically zero.

    Arguments
    ---------
    data : `FunctionalDataset`
    node : `IntervalNode`
    t0 : `float`
        grid time within the node

    Returns
    -------
    data : `FunctionalDataset`
        a new dataset; the input is not modified
    '''
    j0 = data.grid.index_of(t0)
    t0 = data.grid.points[j0]
    times = data.grid.points
    inside = np.flatnonzero((times >= node.t_inf - _TOL) & (times <= node.t_sup + _TOL))
    values = data.values.copy()
    x_t0 = values[:, j0].copy()
    factors = correction_factors(node, t0, times[inside])
    values[:, inside] -= x_t0[:, None] * factors[None, :]
    return data.with_values(values)
