"""
Binary classifiers that output a continuous score P(positive | x) in [0, 1].

Every classifier is a fit function registered in CLASSIFIERS; the grid
runner only ever goes through `fit` and `score`, so more can be plugged in
by adding to the registry.
"""

from collections import OrderedDict
import math

import numpy as np
from scipy.linalg import cholesky, solve_triangular
from scipy.special import expit, logsumexp

from fairfold.data import FairfoldError, InapplicableError
from fairfold.neighbors import NeighborIndex
from fairfold.tree import Tree

import logging
logger = logging.getLogger(__name__)

class DegenerateFeatures(InapplicableError):
    def __init__(self, kind):
        super().__init__(f'{kind} cannot be fitted: every feature is constant on the training rows. '
                         'Check the input columns or drop this classifier for the dataset', {'kind': kind})

class DimensionMismatch(FairfoldError):
    def __init__(self, expected, got):
        super().__init__(f'Model expects {expected} features, got {got}', {'expected': expected, 'got': got})

class UnknownClassifier(FairfoldError):
    def __init__(self, name):
        super().__init__(f'Unknown classifier {name!r}, expected one of {list(CLASSIFIERS)}', {'name': name})

class TrainedModel():
    kind = None

    def __init__(self, d):
        self.d = d

    def check_dimension(self, X):
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(1, -1)
        if X.shape[1] != self.d:
            raise DimensionMismatch(self.d, X.shape[1])
        return X

    def score(self, X):
        """Scores for every row of X"""
        X = self.check_dimension(X)
        return np.clip(self._score(X), 0.0, 1.0)

    def _score(self, X):
        raise NotImplementedError

def _require_variation(X, kind):
    if X.shape[0] == 0 or np.all(np.ptp(X, axis=0) == 0):
        raise DegenerateFeatures(kind)

class LogisticRegressionModel(TrainedModel):
    """
    L2-regularized logistic regression, full-batch gradient descent.

    The step is halved until the loss does not increase, so the recorded
    loss history is nonincreasing.
    """
    kind = 'LR'

    def __init__(self, d, l2=1e-4, max_iter=1000, tol=1e-6, step=1.0):
        super().__init__(d)
        self.l2 = l2
        self.max_iter = max_iter
        self.tol = tol
        self.step = step

    def loss(self, X, y, w, b):
        z = X @ w + b
        return float(np.mean(np.logaddexp(0, z) - y * z) + 0.5 * self.l2 * w @ w)

    def gradient(self, X, y, w, b):
        residual = expit(X @ w + b) - y
        return X.T @ residual / len(y) + self.l2 * w, float(residual.mean())

    def fit(self, X, y):
        _require_variation(X, self.kind)
        w, b = np.zeros(X.shape[1]), 0.0
        loss = self.loss(X, y, w, b)
        self.loss_history = [loss]
        step = self.step

        for _ in range(self.max_iter):
            grad_w, grad_b = self.gradient(X, y, w, b)
            if max(np.abs(grad_w).max(), abs(grad_b)) < self.tol:
                break

            for _ in range(60):
                new_w, new_b = w - step * grad_w, b - step * grad_b
                new_loss = self.loss(X, y, new_w, new_b)
                if new_loss <= loss:
                    break
                step /= 2
            else:
                break

            w, b, loss = new_w, new_b, new_loss
            self.loss_history.append(loss)
        else:
            logger.debug(f'LR stopped after {self.max_iter} iterations without converging, loss {loss:.6g}')

        self.w, self.b = w, b
        return self

    def _score(self, X):
        return expit(X @ self.w + self.b)

class KNeighborsModel(TrainedModel):
    """Fraction of positive labels among the k nearest training rows"""
    kind = 'KNN5'

    def __init__(self, d, k=5):
        super().__init__(d)
        self.k = k

    def fit(self, X, y):
        self.index = NeighborIndex(X)
        self.labels = np.asarray(y, dtype=float)
        return self

    def _score(self, X):
        k = min(self.k, len(self.index))
        neighbors, _ = self.index.query_many(X, k)
        return self.labels[neighbors].mean(axis=1)

    def leave_one_out_score(self, i):
        k = min(self.k, len(self.index) - 1)
        neighbors, _ = self.index.neighbors_of([i], k)
        return float(self.labels[neighbors[0]].mean())

class TreeModel(TrainedModel):
    kind = 'DTree'

    def __init__(self, d, tree):
        super().__init__(d)
        self.tree = tree

    def _score(self, X):
        return self.tree.predict_proba(X)

class ForestModel(TrainedModel):
    """Mean leaf positive fraction over bootstrapped trees"""
    kind = 'RForest'

    def __init__(self, d, trees):
        super().__init__(d)
        self.trees = trees

    def _score(self, X):
        return np.mean([tree.predict_proba(X) for tree in self.trees], axis=0)

class GenerativeModel(TrainedModel):
    """Posterior from per-class log densities and empirical class priors"""

    def log_joint(self, X):
        raise NotImplementedError

    def _score(self, X):
        joint = self.log_joint(X)
        return np.exp(joint[:, 1] - logsumexp(joint, axis=1))

class GaussianNBModel(GenerativeModel):
    kind = 'GaussNB'

    def __init__(self, d, var_smoothing=1e-9):
        super().__init__(d)
        self.var_smoothing = var_smoothing

    def fit(self, X, y):
        _require_variation(X, self.kind)
        epsilon = max(self.var_smoothing * X.var(axis=0).max(), 1e-300)
        self.means = np.array([X[y == c].mean(axis=0) for c in (0, 1)])
        self.variances = np.array([X[y == c].var(axis=0) for c in (0, 1)]) + epsilon
        self.log_priors = np.log(np.array([(y == c).mean() for c in (0, 1)]))
        return self

    def log_joint(self, X):
        joint = []
        for c in (0, 1):
            log_density = -0.5 * np.sum(np.log(2 * np.pi * self.variances[c])) \
                          - 0.5 * np.sum((X - self.means[c]) ** 2 / self.variances[c], axis=1)
            joint.append(self.log_priors[c] + log_density)
        return np.column_stack(joint)

class QDAModel(GenerativeModel):
    """One full-covariance Gaussian per class, ridge (1e-6 * trace / d) on the diagonal"""
    kind = 'QDA'

    def __init__(self, d, reg=1e-6):
        super().__init__(d)
        self.reg = reg

    def fit(self, X, y):
        _require_variation(X, self.kind)
        d = X.shape[1]
        self.means, self.factors, self.log_dets = [], [], []
        for c in (0, 1):
            members = X[y == c]
            if len(members) > 1:
                cov = np.atleast_2d(np.cov(members, rowvar=False))
            else:
                cov = np.zeros((d, d))
            ridge = max(self.reg * np.trace(cov) / d, 1e-9)
            factor = cholesky(cov + ridge * np.eye(d), lower=True)
            self.means.append(members.mean(axis=0))
            self.factors.append(factor)
            self.log_dets.append(2 * np.sum(np.log(np.diag(factor))))
        self.log_priors = np.log(np.array([(y == c).mean() for c in (0, 1)]))
        return self

    def log_joint(self, X):
        joint = []
        d = X.shape[1]
        for c in (0, 1):
            white = solve_triangular(self.factors[c], (X - self.means[c]).T, lower=True)
            mahalanobis = np.sum(white ** 2, axis=0)
            joint.append(self.log_priors[c] - 0.5 * (self.log_dets[c] + mahalanobis + d * np.log(2 * np.pi)))
        return np.column_stack(joint)

def features_per_split(d):
    return max(1, math.ceil(math.sqrt(d)))

def fit_lr(X, y, rng, tree_splitter='best'):
    return LogisticRegressionModel(X.shape[1]).fit(X, y)

def fit_knn5(X, y, rng, tree_splitter='best'):
    return KNeighborsModel(X.shape[1], k=5).fit(X, y)

def fit_dtree(X, y, rng, tree_splitter='best'):
    tree = Tree(max_depth=8, max_leaf_nodes=15,
                min_samples_split=math.ceil(0.1 * len(y)),
                max_features=features_per_split(X.shape[1]),
                splitter=tree_splitter)
    return TreeModel(X.shape[1], tree.fit(X, y, rng))

def fit_rforest(X, y, rng, tree_splitter='best', n_estimators=10):
    trees = []
    for t in range(n_estimators):
        tree_rng = rng.child(f'tree{t}')
        sample = tree_rng.integers(0, len(y), size=len(y))
        tree = Tree(max_depth=5, max_features=features_per_split(X.shape[1]))
        trees.append(tree.fit(X[sample], y[sample], tree_rng))
    return ForestModel(X.shape[1], trees)

def fit_gaussnb(X, y, rng, tree_splitter='best'):
    return GaussianNBModel(X.shape[1]).fit(X, y)

def fit_qda(X, y, rng, tree_splitter='best'):
    return QDAModel(X.shape[1]).fit(X, y)

CLASSIFIERS = OrderedDict([
    ('LR', fit_lr),
    ('KNN5', fit_knn5),
    ('DTree', fit_dtree),
    ('RForest', fit_rforest),
    ('GaussNB', fit_gaussnb),
    ('QDA', fit_qda)
])

ALIASES = {
    'lr': 'LR', 'logisticregression': 'LR',
    'knn': 'KNN5', 'knn5': 'KNN5',
    'dt': 'DTree', 'dtree': 'DTree', 'decisiontree': 'DTree',
    'rf': 'RForest', 'rforest': 'RForest', 'randomforest': 'RForest',
    'nb': 'GaussNB', 'gaussnb': 'GaussNB', 'naivebayes': 'GaussNB',
    'qda': 'QDA'
}

def canonical_classifier(name):
    try:
        return ALIASES[str(name).lower().replace('_', '').replace('-', '')]
    except KeyError:
        raise UnknownClassifier(name)

def fit(kind, train, rng, tree_splitter='best'):
    """Fit a classifier of the given kind on a training Dataset"""
    train.require_both_classes()
    if train.d < 1:
        raise DegenerateFeatures(kind)
    fit_function = CLASSIFIERS[canonical_classifier(kind)]
    return fit_function(train.features, train.labels, rng, tree_splitter=tree_splitter)

def score(model, x):
    """Score of a single point"""
    x = np.asarray(x, dtype=float).reshape(-1)
    if len(x) != model.d:
        raise DimensionMismatch(model.d, len(x))
    return float(model.score(x.reshape(1, -1))[0])
