import json
import warnings
import numpy as np
from .dependence import relevance_curve, dcor_sq_columns, RelevanceCurve
from .correction import IntervalNode, apply_correction

# number of columns compared with the maximum per step of the redundancy scan
_SCAN_CHUNK = 8


class SelectionResult:
    """Time points chosen by a variable selection method

    Parameters
    ----------
    times : `list` of `float`
        selected grid times, in selection order
    relevances : `list` of `float`
        relevance of each time when it was selected
    method : {'mh', 'rmh'}
    r, s : `float` or None
        redundancy and relevance thresholds (RMH only)
    indices : `list` of `int` or None
        grid indices of `times`
    parents : `list` of `int` or None
        for RMH, position in this selection of the point whose correction spawned the interval
        where each point was found (-1 for the first point)
    kinds : `list` of `str` or None
        for RMH, the process model ('brownian' or 'bridge') of the interval each point was found in
    zones : `list` of `tuple` or None
        for RMH, the redundancy bounds `(t_minus, t_plus)` computed around each point; either bound
        is None when every point on that side was redundant
    """

    def __init__(self, times, relevances, method, r=None, s=None, indices=None, parents=None,
                 kinds=None, zones=None):
        if len(times) != len(relevances):
            raise ValueError("Got %d times and %d relevances" % (len(times), len(relevances)))
        if len(set(times)) != len(times):
            raise ValueError("Selected times must be distinct")
        self.times = [float(t) for t in times]
        self.relevances = [float(v) for v in relevances]
        self.method = method
        self.r = r
        self.s = s
        self.indices = None if indices is None else [int(i) for i in indices]
        self.parents = None if parents is None else [int(p) for p in parents]
        self.kinds = None if kinds is None else list(kinds)
        self.zones = None if zones is None else [tuple(z) for z in zones]

    def __len__(self):
        return len(self.times)

    def __repr__(self):
        return "SelectionResult(%s, times=%s)" % (self.method, ['%.4g' % t for t in self.times])

    def prune(self, s):
        '''Selection that `rmh_select` would have returned with the larger relevance threshold `s`

        A point survives when its relevance exceeds `s` and so does every point on the chain of
        intervals that led to it. The survivors keep their order.

        Arguments
        ---------
        s : `float`
            new relevance threshold, not smaller than `self.s`

        Returns
        -------
        selection : `SelectionResult`
        '''
        if self.parents is None:
            raise ValueError("Only recursive selections (with parents) can be pruned")
        if self.s is not None and s < self.s:
            raise ValueError("Cannot prune to a lower threshold (%g < %g)" % (s, self.s))
        keep = []
        new_pos = {}
        for i, (rel, parent) in enumerate(zip(self.relevances, self.parents)):
            if rel > s and (parent == -1 or parent in new_pos):
                new_pos[i] = len(keep)
                keep.append(i)

        def pick(items):
            return None if items is None else [items[i] for i in keep]

        parents = [-1 if self.parents[i] == -1 else new_pos[self.parents[i]] for i in keep]
        return SelectionResult(pick(self.times), pick(self.relevances), self.method, self.r, s,
                               pick(self.indices), parents, pick(self.kinds), pick(self.zones))

    def to_dict(self):
        res = {'method': self.method, 'r': self.r, 's': self.s, 'times': self.times,
               'relevances': self.relevances}
        for key in ('indices', 'parents', 'kinds', 'zones'):
            value = getattr(self, key)
            if value is not None:
                res[key] = [list(v) for v in value] if key == 'zones' else value
        return res

    def to_json(self, path=None):
        """JSON text of `to_dict`, also written to `path` if given"""
        text = json.dumps(self.to_dict(), indent=2)
        if path is not None:
            with open(path, 'w') as f:
                f.write(text + '\n')
        return text

    @classmethod
    def from_dict(cls, d):
        return cls(d['times'], d['relevances'], d['method'], d.get('r'), d.get('s'),
                   d.get('indices'), d.get('parents'), d.get('kinds'), d.get('zones'))


def find_local_maxima(curve):
    '''Local maxima of a relevance curve

    A run of equal consecutive values is a single candidate, reported by its first index. It is
    a local maximum when the values just before and just after the run are strictly smaller (an
    endpoint compares only against its single neighbour).

    Arguments
    ---------
    curve : `RelevanceCurve` or `array_like`

    Returns
    -------
    indices : `list` of `int`
        sorted by decreasing value, ties by increasing index
    '''
    v = curve.values if isinstance(curve, RelevanceCurve) else np.asarray(curve, dtype=float)
    if v.size == 0:
        raise ValueError("Cannot search maxima in an empty curve")
    starts = np.flatnonzero(np.concatenate(([True], v[1:] != v[:-1])))
    ends = np.concatenate((starts[1:] - 1, [v.size - 1]))
    maxima = []
    for i, j in zip(starts, ends):
        if (i == 0 or v[i - 1] < v[i]) and (j == v.size - 1 or v[j + 1] < v[i]):
            maxima.append(int(i))
    return sorted(maxima, key=lambda i: (-v[i], i))


def maxima_hunting_select(data, d, method='naive', curve=None):
    '''Maxima Hunting: the `d` most relevant local maxima of the relevance curve

    Arguments
    ---------
    data : `FunctionalDataset`
    d : `int`
        number of points. If the curve has fewer local maxima, all of them are returned.
    method : {'naive', 'mergesort', 'avl'}
        distance covariance algorithm, see `dcov_sq`
    curve : `RelevanceCurve` or None
        precomputed relevance curve of `data`

    Returns
    -------
    selection : `SelectionResult`
    '''
    if d < 1:
        raise ValueError("d must be at least 1, got %d" % d)
    if curve is None:
        curve = relevance_curve(data, method)
    idx = find_local_maxima(curve)[:d]
    return SelectionResult(data.grid.points[idx], curve.values[idx], 'mh', indices=idx)


def _node_columns(grid, node):
    t = grid.points
    return int(np.searchsorted(t, node.t_inf - 1e-12)), int(np.searchsorted(t, node.t_sup + 1e-12))


def _scan(values, j_max, candidates, r, method):
    ref = values[:, j_max]
    for start in range(0, len(candidates), _SCAN_CHUNK):
        chunk = candidates[start:start + _SCAN_CHUNK]
        below = np.flatnonzero(dcor_sq_columns(values, ref, chunk, method) <= r)
        if below.size:
            return int(chunk[below[0]])
    return None


def redundancy_bounds(data, node, t_max, r, method='naive'):
    '''Closest non-redundant grid points on each side of a selected maximum

    Points whose squared distance correlation with `X(t_max)` exceeds `r` are redundant with it.
    `t_minus` is the largest grid time in `[t_inf, t_max)` with `dcor_sq(X(t_max), X(t)) <= r`
    and `t_plus` the smallest in `(t_max, t_sup]`. The scan uses `data` as given, which must be the
    trajectories before the correction at `t_max` (after it, the column at `t_max` is zero).

    Arguments
    ---------
    data : `FunctionalDataset`
    node : `IntervalNode`
        interval in which `t_max` was selected
    t_max : `float`
    r : `float`
        redundancy threshold in (0, 1)
    method : {'naive', 'mergesort', 'avl'}

    Returns
    -------
    t_minus, t_plus : `float` or None
        None when every point on that side is redundant
    '''
    if not 0 < r < 1:
        raise ValueError("r must be in (0, 1), got %g" % r)
    if not node.contains(t_max):
        raise ValueError("t_max=%g lies outside %r" % (t_max, node))
    j_max = data.grid.index_of(t_max)
    j_inf, j_end = _node_columns(data.grid, node)
    t = data.grid.points
    j_minus = _scan(data.values, j_max, np.arange(j_max - 1, j_inf - 1, -1), r, method)
    j_plus = _scan(data.values, j_max, np.arange(j_max + 1, j_end), r, method)
    return (None if j_minus is None else float(t[j_minus]),
            None if j_plus is None else float(t[j_plus]))


def rmh_select(data, r=0.8, s=0.05, method='naive'):
    '''Recursive Maxima Hunting

    Starting from the whole grid, the most relevant point `t_max` of the current interval is
    selected if its relevance exceeds `s`. The trajectories are then corrected by subtracting
    `E[X(t) | X(t_max)]` on the interval, the points redundant with `t_max` (squared distance
    correlation above `r`, measured before the correction) are excluded, and the search recurses
    on what remains to the left and then to the right. Left intervals are modelled as Brownian
    bridges pinned at `t_max`; right intervals start a Brownian motion at `t_max` (or a bridge, when
    the parent interval was itself pinned on the right).

    Arguments
    ---------
    data : `FunctionalDataset`
    r : `float`
        redundancy threshold in (0, 1). Default 0.8.
    s : `float`
        relevance threshold in (0, 1). Default 0.05.
    method : {'naive', 'mergesort', 'avl'}
        distance covariance algorithm, see `dcov_sq`

    Returns
    -------
    selection : `SelectionResult`
        the selected times in recursion (depth-first, left before right) order
    '''
    if not 0 < r < 1:
        raise ValueError("r must be in (0, 1), got %g" % r)
    if not 0 < s < 1:
        raise ValueError("s must be in (0, 1), got %g" % s)
    grid = data.grid
    t = grid.points
    times, relevances, indices, parents, kinds, zones = [], [], [], [], [], []

    root = IntervalNode(t[0], t[-1], left_anchor=0.)
    # pending intervals, popped left before right; each paired with its spawning selection
    stack = [(root, -1)]
    work = data
    while stack:
        node, parent = stack.pop()
        j_inf, j_end = _node_columns(grid, node)
        rel = dcor_sq_columns(work.values, work.labels, np.arange(j_inf, j_end), method)
        best = int(np.argmax(rel))
        if rel[best] <= s:
            continue
        j_max = j_inf + best
        t_max = float(t[j_max])
        position = len(times)
        times.append(t_max)
        relevances.append(float(rel[best]))
        indices.append(j_max)
        parents.append(parent)
        kinds.append(node.kind)

        snapshot = work
        work = apply_correction(work, node, t_max)
        t_minus, t_plus = redundancy_bounds(snapshot, node, t_max, r, method)
        zones.append((t_minus, t_plus))

        if t_plus is not None and t_plus < node.t_sup:
            stack.append((node.right_child(t_plus, t_max), position))
        if t_minus is not None and t_minus > node.t_inf:
            stack.append((node.left_child(t_minus, t_max), position))

    return SelectionResult(times, relevances, 'rmh', r, s, indices, parents, kinds, zones)


def reduce_dataset(data, selection):
    '''Columns of the (uncorrected) trajectories at the selected times

    Arguments
    ---------
    data : `FunctionalDataset`
    selection : `SelectionResult` or `list` of `float`

    Returns
    -------
    X : `np.array`
        (N, d) matrix, columns in selection order. With an empty selection it has no columns and a
        warning is issued so that the caller can fall back to another feature.
    y : `np.array`
        the labels
    '''
    times = selection.times if isinstance(selection, SelectionResult) else list(selection)
    idx = [data.grid.index_of(t) for t in times]
    if not idx:
        warnings.warn("Empty selection: the reduced data has no columns")
    return data.values[:, idx].copy(), data.labels.copy()
