import warnings
import numpy as np
from scipy import linalg
from scipy.spatial.distance import cdist
from .fdata import stratified_folds


def _check_features(train_X, train_y, test_X):
    train_X = np.asarray(train_X, dtype=float)
    test_X = np.asarray(test_X, dtype=float)
    train_y = np.asarray(train_y).ravel()
    if train_X.ndim == 1:
        train_X = train_X.reshape(-1, 1)
    if test_X.ndim == 1:
        test_X = test_X.reshape(-1, 1)
    if train_X.shape[1] < 1:
        raise ValueError("At least one feature is needed")
    if train_X.shape[1] != test_X.shape[1]:
        raise ValueError("Dimension mismatch: training data has %d features, test data %d" %
                         (train_X.shape[1], test_X.shape[1]))
    if train_y.size != train_X.shape[0]:
        raise ValueError("Got %d labels for %d training rows" % (train_y.size, train_X.shape[0]))
    return train_X, train_y.astype(int), test_X


def _neighbour_labels(train_X, train_y, test_X, k_max):
    # stable sort: equidistant training rows are taken in index order
    dist = cdist(test_X, train_X, 'sqeuclidean')
    order = np.argsort(dist, axis=1, kind='stable')[:, :k_max]
    return train_y[order]


def _vote(labels, k):
    ones = labels[:, :k].sum(axis=1)
    zeros = k - ones
    return np.where(ones > zeros, 1, np.where(zeros > ones, 0, labels[:, 0]))


def knn_classify_multi(train_X, train_y, test_X, ks):
    '''kNN predictions for several numbers of neighbours from a single neighbour ordering

    Arguments
    ---------
    train_X : `array_like`
        (N, d) training features
    train_y : `array_like`
        N labels in {0, 1}
    test_X : `array_like`
        (M, d) test features
    ks : `list` of `int`
        neighbour counts, each in [1, N]

    Returns
    -------
    predictions : `np.array`
        (len(ks), M) array, row i holds the predictions with `ks[i]` neighbours
    '''
    train_X, train_y, test_X = _check_features(train_X, train_y, test_X)
    ks = [int(k) for k in ks]
    if min(ks) < 1 or max(ks) > train_X.shape[0]:
        raise ValueError("k must be in [1, %d], got %s" % (train_X.shape[0], ks))
    labels = _neighbour_labels(train_X, train_y, test_X, max(ks))
    return np.array([_vote(labels, k) for k in ks])


def knn_classify(train_X, train_y, test_X, k):
    '''k-nearest-neighbour classification with the Euclidean distance

    Each test row gets the majority label of its `k` nearest training rows. Training rows at equal
    distance are ranked by index, and an even split of the votes is resolved by the label of the
    single nearest neighbour.

    Arguments
    ---------
    train_X : `array_like`
        (N, d) training features
    train_y : `array_like`
        N labels in {0, 1}
    test_X : `array_like`
        (M, d) test features
    k : `int`
        number of neighbours, 1 <= k <= N

    Returns
    -------
    predictions : `np.array`
        M labels
    '''
    return knn_classify_multi(train_X, train_y, test_X, [k])[0]


def default_k_max(n):
    """Largest neighbour count searched for a training set of size n: floor(sqrt(n))"""
    return max(1, int(np.floor(np.sqrt(n))))


def knn_cv_error_table(train_y, featurize, n_candidates, folds=10, seed=0, k_max=None):
    '''Stratified cross-validation error of kNN for several feature sets and neighbour counts

    Arguments
    ---------
    train_y : `array_like`
        labels of the N training instances
    featurize : callable
        `featurize(train_index, validation_index)` returns a list of `n_candidates` pairs
        `(X_train, X_validation)`, the candidate features of the two parts of a fold. Anything
        fitted to build them must only use `train_index`.
    n_candidates : `int`
    folds : `int`
        number of stratified folds. Default 10.
    seed : `int`
        seed of the fold assignment
    k_max : `int` or None
        neighbour counts 1..k_max are evaluated. None means floor(sqrt(N)). It is reduced, with a
        warning, when a fold's training part is smaller.

    Returns
    -------
    errors : `np.array`
        (n_candidates, k_max) array of mean validation error rates over the folds
    '''
    train_y = np.asarray(train_y).ravel().astype(int)
    splits = stratified_folds(train_y, folds, seed)
    if k_max is None:
        k_max = default_k_max(train_y.size)
    smallest = min(len(tr) for tr, _ in splits)
    if k_max > smallest:
        warnings.warn("k_max reduced from %d to %d, the size of the smallest training fold" %
                      (k_max, smallest))
        k_max = smallest
    ks = np.arange(1, k_max + 1)
    errors = np.zeros((n_candidates, k_max))
    for tr, va in splits:
        candidates = featurize(tr, va)
        if len(candidates) != n_candidates:
            raise ValueError("featurize returned %d candidates, expected %d" %
                             (len(candidates), n_candidates))
        for c, (X_tr, X_va) in enumerate(candidates):
            preds = knn_classify_multi(X_tr, train_y[tr], X_va, ks)
            errors[c] += np.mean(preds != train_y[va][None, :], axis=1)
    return errors / len(splits)


def best_in_table(errors):
    """Position `(candidate, k)` of the smallest error; ties go to the first candidate, then to
    the smallest k. `k` is returned as a neighbour count (1-based)."""
    c, j = np.unravel_index(int(np.argmin(errors)), errors.shape)
    return int(c), int(j) + 1


def select_k_cv(train_X, train_y, folds=10, seed=0, k_max=None):
    '''Number of neighbours chosen by stratified cross-validation

    Arguments
    ---------
    train_X : `array_like`
        (N, d) training features
    train_y : `array_like`
    folds : `int`
        Default 10.
    seed : `int`
    k_max : `int` or None
        upper end of the search range [1, k_max]. None means floor(sqrt(N)).

    Returns
    -------
    k : `int`
        the smallest k with the lowest mean CV error
    '''
    train_X = np.asarray(train_X, dtype=float)
    if train_X.ndim == 1:
        train_X = train_X.reshape(-1, 1)
    errors = knn_cv_error_table(train_y, lambda tr, va: [(train_X[tr], train_X[va])], 1, folds,
                                seed, k_max)
    return best_in_table(errors)[1]


class Classifier:
    """Base class for the binary classifiers

    You should not instantiate this base class. Subclasses implement `fit` (which returns the
    classifier) and `predict`.

    Attributes
    ----------
    kind : `str` or None
    """

    def __init__(self):
        if not hasattr(self, 'kind'):
            self.kind = None

    def fit(self, X, y):
        raise NotImplementedError

    def predict(self, X):
        raise NotImplementedError

    def error(self, X, y):
        return error_rate(self.predict(X), y)


class KNNClassifier(Classifier):
    """k-nearest-neighbour classifier, see `knn_classify`

    Parameters
    ----------
    k : `int`
    """

    def __init__(self, k):
        self.kind = 'knn'
        super().__init__()
        if k < 1:
            raise ValueError("k must be at least 1, got %d" % k)
        self.k = int(k)
        self.train_X = None
        self.train_y = None

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        self.train_X = X.reshape(-1, 1) if X.ndim == 1 else X
        self.train_y = np.asarray(y).ravel().astype(int)
        if self.k > self.train_X.shape[0]:
            raise ValueError("k=%d exceeds the %d training rows" % (self.k, self.train_X.shape[0]))
        return self

    def predict(self, X):
        if self.train_X is None:
            raise ValueError("Classifier is not fitted")
        return knn_classify(self.train_X, self.train_y, X, self.k)


class LinearDiscriminant(Classifier):
    """Fisher linear discriminant

    Predicts 1 when `X @ weights > threshold`.

    Parameters
    ----------
    ridge : `float`
        multiple of the identity added to the pooled covariance

    Attributes
    ----------
    weights : `np.array`
    threshold : `float`
    """

    def __init__(self, ridge=1e-8):
        self.kind = 'lda'
        super().__init__()
        self.ridge = ridge
        self.weights = None
        self.threshold = None

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        y = np.asarray(y).ravel()
        if X.shape[1] < 1:
            raise ValueError("At least one feature is needed")
        X0, X1 = X[y == 0], X[y == 1]
        if len(X0) == 0 or len(X1) == 0:
            raise ValueError("Both classes must be present to fit a discriminant")
        mu0, mu1 = X0.mean(axis=0), X1.mean(axis=0)
        dof = max(len(X) - 2, 1)
        pooled = ((X0 - mu0).T @ (X0 - mu0) + (X1 - mu1).T @ (X1 - mu1)) / dof
        try:
            weights = linalg.solve(pooled + self.ridge * np.eye(X.shape[1]), mu1 - mu0,
                                   assume_a='pos')
        except linalg.LinAlgError:
            raise ValueError("Pooled covariance is singular even after the ridge of %g" %
                             self.ridge)
        if not np.all(np.isfinite(weights)):
            raise ValueError("Discriminant weights are not finite")
        self.weights = weights
        self.threshold = float(weights @ (mu0 + mu1) / 2)
        return self

    def decision_function(self, X):
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        return X @ self.weights - self.threshold

    def predict(self, X):
        if self.weights is None:
            raise ValueError("Classifier is not fitted")
        return (self.decision_function(X) > 0).astype(int)


def fisher_lda_fit(train_X, train_y, ridge=1e-8):
    '''Fit a Fisher linear discriminant

    The weights are `(pooled covariance + ridge I)^-1 (mean_1 - mean_0)` and the threshold sits at
    the projection of the midpoint of the two class means.

    Returns
    -------
    model : `LinearDiscriminant`
    '''
    return LinearDiscriminant(ridge).fit(train_X, train_y)


def fisher_lda_predict(model, test_X):
    """Labels predicted by a fitted `LinearDiscriminant`"""
    return model.predict(test_X)


def error_rate(predicted, actual):
    """Fraction of positions where `predicted` and `actual` differ"""
    predicted = np.asarray(predicted).ravel()
    actual = np.asarray(actual).ravel()
    if predicted.size != actual.size:
        raise ValueError("Length mismatch: %d predictions for %d labels" %
                         (predicted.size, actual.size))
    if predicted.size == 0:
        raise ValueError("Cannot compute the error rate of an empty prediction")
    return float(np.mean(predicted != actual))
