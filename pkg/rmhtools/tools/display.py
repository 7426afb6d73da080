import numpy as np
import matplotlib.pyplot as plt


def _setup_axis(ax, figsize):
    if ax is None:
        fig, ax = plt.subplots(1, 1, figsize=figsize)
    else:
        fig = ax.figure
    return fig, ax


def curveshow(curve, selection=None, targets=None, ax=None, title='', figsize=(8, 4)):
    '''show a relevance curve, with selected and reference times

    Arguments
    ---------
    curve : `RelevanceCurve`
        the squared distance correlation along the grid
    selection : `SelectionResult`, `list` or None
        selected times, drawn as dashed vertical lines and numbered in selection order
    targets : `list` or None
        reference times (e.g. `TrendSpec.relevant_points()`), drawn as grey bands
    ax : `matplotlib.pyplot.axis` or None
        axis to plot in. if None, we create a new figure.
    title : `str`
    figsize : `tuple`
        size of the created figure, ignored if `ax` is given

    Returns
    -------
    fig : `matplotlib.figure.Figure`
        figure containing the plot
    '''
    fig, ax = _setup_axis(ax, figsize)
    t = curve.grid.points
    ax.plot(t, curve.values, 'k-', lw=1.5)
    if targets is not None:
        for target in targets:
            ax.axvline(target, color='0.8', lw=4, zorder=0)
    if selection is not None:
        times = getattr(selection, 'times', selection)
        for i, time in enumerate(times):
            ax.axvline(time, color='C3', ls='--', lw=1)
            ax.text(time, ax.get_ylim()[1], str(i + 1), color='C3', ha='center', va='bottom')
    ax.set_xlim(min(0, t[0]), max(1, t[-1]))
    ax.set_ylim(bottom=0)
    ax.set_xlabel('t')
    ax.set_ylabel('relevance')
    if title:
        ax.set_title(title)
    return fig


def trajshow(data, n_per_class=10, ax=None, title='', figsize=(8, 4), seed=0):
    '''show sample trajectories of both classes, with the class means

    Arguments
    ---------
    data : `FunctionalDataset`
    n_per_class : `int`
        number of randomly chosen trajectories drawn per class (thin lines)
    ax : `matplotlib.pyplot.axis` or None
        axis to plot in. if None, we create a new figure.
    title : `str`
    figsize : `tuple`
    seed : `int`
        seed of the choice of trajectories

    Returns
    -------
    fig : `matplotlib.figure.Figure`
        figure containing the plot
    '''
    fig, ax = _setup_axis(ax, figsize)
    rng = np.random.default_rng(seed)
    t = data.grid.points
    for label, color in ((0, 'C0'), (1, 'C1')):
        members = np.flatnonzero(data.labels == label)
        if members.size == 0:
            continue
        shown = rng.choice(members, min(n_per_class, members.size), replace=False)
        ax.plot(t, data.values[shown].T, color=color, lw=.5, alpha=.5)
        ax.plot(t, data.values[members].mean(axis=0), color=color, lw=3,
                label='class %d (N=%d)' % (label, members.size))
    ax.set_xlabel('t')
    ax.legend(loc='upper left')
    if title:
        ax.set_title(title)
    return fig
