import warnings
import numpy as np
from scipy import linalg
from .fdata import FunctionalDataset, stratified_folds
from .classify import knn_cv_error_table, best_in_table, error_rate

PROJECTION_KINDS = ('pca', 'pls')


class ProjectionModel:
    """Base class for the linear projections of discretized trajectories

    You should not instantiate this base class, it is instead inherited by `PCAProjection` and
    `PLSProjection`, whose constructors fit the model.

    Attributes
    ----------
    kind : `str` or None
        `'pca'`, `'pls'`, or None for the base class
    mean : `np.array`
        training mean, subtracted before projecting
    directions : `np.array`
        (p, c) matrix, column i is the i-th projection direction
    """

    def __init__(self, train, c):
        if not hasattr(self, 'kind'):
            self.kind = None
        if isinstance(train, FunctionalDataset):
            X = train.values
        else:
            X = np.asarray(train, dtype=float)
        if X.ndim != 2:
            raise ValueError("Training data must be a 2d array")
        n, p = X.shape
        if int(c) != c:
            raise TypeError("The number of components must be an integer, got %r" % c)
        if not 1 <= c <= min(n - 1, p):
            raise ValueError("The number of components must be in [1, %d], got %d" %
                             (min(n - 1, p), c))
        self.mean = X.mean(axis=0)
        self.directions = None

    @property
    def n_components(self):
        return self.directions.shape[1]

    def transform(self, X, n_components=None):
        '''Project trajectories on the leading directions

        Arguments
        ---------
        X : `array_like` or `FunctionalDataset`
            (M, p) trajectories
        n_components : `int` or None
            number of leading directions to use, all of them if None

        Returns
        -------
        scores : `np.array`
            (M, n_components) array
        '''
        if isinstance(X, FunctionalDataset):
            X = X.values
        X = np.asarray(X, dtype=float)
        if X.shape[-1] != self.mean.size:
            raise ValueError("Expected %d values per trajectory, got %d" %
                             (self.mean.size, X.shape[-1]))
        if n_components is None:
            n_components = self.n_components
        if not 1 <= n_components <= self.n_components:
            raise ValueError("n_components must be in [1, %d], got %d" %
                             (self.n_components, n_components))
        return (X - self.mean) @ self.directions[:, :n_components]


class PCAProjection(ProjectionModel):
    """Principal components of the training trajectories

    The directions are the leading eigenvectors of the sample covariance matrix, by decreasing
    eigenvalue, each with its largest-magnitude entry made positive.

    Parameters
    ----------
    train : `FunctionalDataset` or `array_like`
    c : `int`
        number of components, in [1, min(N - 1, p)]

    Attributes
    ----------
    eigenvalues : `np.array`
        the c leading eigenvalues
    explained_variance_ratio : `np.array`
        their share of the total variance
    """

    def __init__(self, train, c):
        self.kind = 'pca'
        super().__init__(train, c)
        X = train.values if isinstance(train, FunctionalDataset) else np.asarray(train, float)
        Xc = X - self.mean
        cov = Xc.T @ Xc / (X.shape[0] - 1)
        eigvals, eigvecs = linalg.eigh(cov)
        order = np.argsort(eigvals)[::-1]
        eigvals = np.clip(eigvals[order], 0, None)
        eigvecs = eigvecs[:, order[:c]]
        flip = np.sign(eigvecs[np.argmax(np.abs(eigvecs), axis=0), np.arange(c)])
        flip[flip == 0] = 1
        self.directions = eigvecs * flip
        self.eigenvalues = eigvals[:c]
        total = eigvals.sum()
        self.explained_variance_ratio = self.eigenvalues / total if total > 0 else \
            np.zeros(c)


class PLSProjection(ProjectionModel):
    """Partial least squares (PLS1) directions for a binary response

    The labels are coded 0/1 and centered. At every step the weight vector is the normalized
    covariance of the residual trajectories with the residual response, the score is the
    projection on it, and both trajectories and response are deflated by the score. The
    directions `W (P^T W)^-1` map centered trajectories directly to the scores, so that the
    first n directions give the n-component model.

    Parameters
    ----------
    train : `FunctionalDataset`
    c : `int`
        number of components, in [1, min(N - 1, p)]. Fewer are kept, with a warning, if the
        residual response becomes orthogonal to the trajectories.

    Attributes
    ----------
    weights : `np.array`
        (p, c) weight vectors
    loadings : `np.array`
        (p, c) loadings
    y_loadings : `np.array`
        c response loadings

    References
    ----------
    .. [1] S. Wold, M. Sjostrom, L. Eriksson, "PLS-regression: a basic tool of chemometrics",
       Chemometrics and Intelligent Laboratory Systems 58 (2001) 109-130.
    """

    def __init__(self, train, c):
        self.kind = 'pls'
        super().__init__(train, c)
        if not isinstance(train, FunctionalDataset):
            raise TypeError("PLS needs a labelled FunctionalDataset")
        X = train.values - self.mean
        y = train.labels.astype(float)
        y = y - y.mean()
        if not np.any(y):
            raise ValueError("Zero-variance response: PLS needs both classes")
        scale = np.linalg.norm(X) * np.linalg.norm(y)
        W, P, q = [], [], []
        for i in range(c):
            w = X.T @ y
            norm = np.linalg.norm(w)
            if norm <= 1e-12 * scale:
                if i == 0:
                    raise ValueError("The response is orthogonal to the trajectories")
                warnings.warn("PLS stopped after %d of %d components: the residual response "
                              "is orthogonal to the trajectories" % (i, c))
                break
            w = w / norm
            t = X @ w
            tt = t @ t
            p = X.T @ t / tt
            q_i = y @ t / tt
            X = X - np.outer(t, p)
            y = y - q_i * t
            W.append(w)
            P.append(p)
            q.append(q_i)
        self.weights = np.array(W).T
        self.loadings = np.array(P).T
        self.y_loadings = np.array(q)
        self.directions = self.weights @ linalg.inv(self.loadings.T @ self.weights)


def pca_fit(train, c):
    """Principal component projection with `c` components, see `PCAProjection`"""
    return PCAProjection(train, c)


def pls_fit(train, c):
    """PLS1 projection with `c` components, see `PLSProjection`"""
    return PLSProjection(train, c)


def _fit(kind, train, c):
    if kind == 'pca':
        return PCAProjection(train, c)
    if kind == 'pls':
        return PLSProjection(train, c)
    raise ValueError("Unknown projection kind %r, must be one of %s" % (kind, PROJECTION_KINDS))


def _feasible_c_max(train, splits, c_max):
    smallest = min(len(tr) for tr, _ in splits)
    feasible = min(c_max, smallest - 1, train.n_points)
    if feasible < c_max:
        warnings.warn("c_max reduced from %d to %d to fit the training folds" % (c_max, feasible))
    if feasible < 1:
        raise ValueError("too few instances for a projection in every fold")
    return feasible


def _fold_candidates(kind, train, tr, va, c_max):
    model = _fit(kind, train.subset(tr), c_max)
    scores_tr = model.transform(train.values[tr])
    scores_va = model.transform(train.values[va])
    res = []
    for c in range(1, c_max + 1):
        n = min(c, model.n_components)
        res.append((scores_tr[:, :n], scores_va[:, :n]))
    return res


def components_cv_errors(train, kind, folds=10, c_max=30, seed=0, k_max=None):
    '''CV error table of kNN on projections with 1..c_max components

    Arguments
    ---------
    train : `FunctionalDataset`
    kind : {'pca', 'pls'}
    folds : `int`
    c_max : `int`
        reduced, with a warning, to what every training fold can support
    seed : `int`
    k_max : `int` or None
        see `knn_cv_error_table`

    Returns
    -------
    errors : `np.array`
        (c_max, k_max) mean CV error, row c-1 for c components, column k-1 for k neighbours
    '''
    if kind not in PROJECTION_KINDS:
        raise ValueError("Unknown projection kind %r, must be one of %s" % (kind, PROJECTION_KINDS))
    splits = stratified_folds(train.labels, folds, seed)
    c_max = _feasible_c_max(train, splits, c_max)
    return knn_cv_error_table(train.labels,
                              lambda tr, va: _fold_candidates(kind, train, tr, va, c_max),
                              c_max, folds, seed, k_max)


def select_components_cv(train, kind, folds=10, c_max=30, classifier=None, seed=0):
    '''Number of components chosen by stratified cross-validation

    Arguments
    ---------
    train : `FunctionalDataset`
    kind : {'pca', 'pls'}
    folds : `int`
        Default 10.
    c_max : `int`
        largest number of components tried. Default 30.
    classifier : callable or None
        `classifier(train_X, train_y, test_X)` returning predicted labels. None means kNN with the
        number of neighbours tuned jointly with the number of components over [1, floor(sqrt(N))].
    seed : `int`

    Returns
    -------
    c : `int`
        the smallest number of components reaching the lowest mean CV error
    '''
    if len(train) < folds:
        raise ValueError("too few instances (%d) for %d folds" % (len(train), folds))
    if classifier is None:
        return best_in_table(components_cv_errors(train, kind, folds, c_max, seed))[0] + 1
    splits = stratified_folds(train.labels, folds, seed)
    c_max = _feasible_c_max(train, splits, c_max)
    errors = np.zeros(c_max)
    for tr, va in splits:
        for c, (X_tr, X_va) in enumerate(_fold_candidates(kind, train, tr, va, c_max)):
            errors[c] += error_rate(classifier(X_tr, train.labels[tr], X_va), train.labels[va])
    return int(np.argmin(errors)) + 1
