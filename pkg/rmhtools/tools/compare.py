import numpy as np


def compare_selection(times, targets, tol=0.005, verbose=False):
    '''compare selected times against reference times

    returns True if every target has exactly one selected time within `tol` of it and no selected
    time is left over, and False if not. `times` may be a `SelectionResult`.

    written for unit testing and for the recovery rates of the benchmark.
    '''
    times = np.asarray(getattr(times, 'times', times), dtype=float)
    targets = np.asarray(targets, dtype=float)
    if times.size != targets.size:
        if verbose:
            print("size difference: %d selected for %d targets, returning False" %
                  (times.size, targets.size))
        return False
    close = np.abs(times[:, None] - targets[None, :]) <= tol + 1e-12
    if not (np.all(close.sum(axis=0) == 1) and np.all(close.sum(axis=1) == 1)):
        if verbose:
            print("selected times %s do not match targets %s within %g" %
                  (times.tolist(), targets.tolist(), tol))
        return False
    return True


def recovery_rate(selections, targets, tol=0.005):
    """fraction of `selections` that pass `compare_selection`"""
    selections = list(selections)
    if not selections:
        raise ValueError("No selections to compare")
    return float(np.mean([compare_selection(s, targets, tol) for s in selections]))
