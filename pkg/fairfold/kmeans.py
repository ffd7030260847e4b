"""K-means with k-means++ seeding, used by the cluster centroids undersampler."""

from collections import namedtuple

import numpy as np
from scipy.spatial.distance import cdist

import logging
logger = logging.getLogger(__name__)

KMeansModel = namedtuple('KMeansModel', ['k', 'centroids', 'assignment', 'inertia', 'inertia_history', 'iterations'])

def kmeans_plusplus(X, k, rng):
    n = X.shape[0]
    centers = [int(rng.integers(0, n))]
    closest = cdist(X, X[centers]).reshape(-1) ** 2

    for _ in range(1, k):
        total = closest.sum()
        if total > 0:
            idx = int(rng.choice(n, p=closest / total))
        else:
            # every point already coincides with a center
            idx = int(rng.integers(0, n))
        centers.append(idx)
        closest = np.minimum(closest, cdist(X, X[[idx]]).reshape(-1) ** 2)

    return X[centers].copy()

def _assign(X, centroids):
    distances = cdist(X, centroids, 'sqeuclidean')
    assignment = np.argmin(distances, axis=1)
    nearest = distances[np.arange(len(X)), assignment]
    return assignment, nearest

def _repair_empty(X, centroids, assignment, nearest):
    """Move each empty centroid onto the point farthest from its own centroid"""
    k = centroids.shape[0]
    for _ in range(k):
        counts = np.bincount(assignment, minlength=k)
        empty = np.flatnonzero(counts == 0)
        if len(empty) == 0 or nearest.max() == 0:
            break
        centroids[empty[0]] = X[int(np.argmax(nearest))]
        assignment, nearest = _assign(X, centroids)
    return centroids, assignment, nearest

def fit_kmeans(X, k, rng, max_iter=300, tol=1e-4):
    """
    Lloyd iterations from k-means++ seeds.

    Stops when the assignment no longer changes or the relative inertia
    decrease falls below `tol`. Centroids of non-empty clusters are the
    means of their rows on return.
    """
    X = np.asarray(X, dtype=float)
    if not 1 <= k <= X.shape[0]:
        raise ValueError(f'k={k} clusters for {X.shape[0]} points')

    centroids = kmeans_plusplus(X, k, rng)
    assignment, nearest = _assign(X, centroids)
    centroids, assignment, nearest = _repair_empty(X, centroids, assignment, nearest)
    inertia_history = [float(nearest.sum())]

    iterations = 0
    for iterations in range(1, max_iter + 1):
        for j in range(k):
            members = assignment == j
            if members.any():
                centroids[j] = X[members].mean(axis=0)

        new_assignment, nearest = _assign(X, centroids)
        centroids, new_assignment, nearest = _repair_empty(X, centroids, new_assignment, nearest)
        inertia = float(nearest.sum())

        previous = inertia_history[-1]
        inertia_history.append(inertia)
        stable = np.array_equal(new_assignment, assignment)
        assignment = new_assignment

        if stable or previous == 0 or (previous - inertia) / previous < tol:
            break

    for j in range(k):
        members = assignment == j
        if members.any():
            centroids[j] = X[members].mean(axis=0)

    inertia = float(((X - centroids[assignment]) ** 2).sum())
    inertia_history.append(inertia)
    logger.debug(f'k-means with k={k} stopped after {iterations} iterations, inertia {inertia}')
    return KMeansModel(k, centroids, assignment, inertia, inertia_history, iterations)
