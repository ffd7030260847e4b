"""Brute-force Euclidean nearest neighbours with deterministic tie-breaking."""

import numpy as np
from scipy.spatial.distance import cdist

from fairfold.data import FairfoldError

class KTooLarge(FairfoldError):
    def __init__(self, k, available):
        super().__init__(f'Asked for {k} neighbours, only {available} available', {'k': k, 'available': available})

class NeighborIndex():
    """
    Read-only query structure over a set of points.

    Neighbours come back nearest first, equal distances ordered by lower
    position in the index. Neighbours of an indexed position never include
    the position itself.
    """

    def __init__(self, points):
        self.points = np.asarray(points, dtype=float)
        if self.points.ndim == 1:
            self.points = self.points.reshape(-1, 1)
        self.points.setflags(write=False)

    def __len__(self):
        return self.points.shape[0]

    def _check_k(self, k, available):
        if len(self) == 0 or k > available or k < 1:
            raise KTooLarge(k, available)

    def query(self, x, k, exclude=None):
        """k nearest indexed positions to an arbitrary point, and their distances, skipping `exclude`"""
        self._check_k(k, len(self) if exclude is None else len(self) - 1)
        distances = cdist(np.asarray(x, dtype=float).reshape(1, -1), self.points).reshape(-1)
        if exclude is not None:
            distances[exclude] = np.inf
        order = np.argsort(distances, kind='stable')[:k]
        return order, distances[order]

    def query_many(self, X, k):
        """Row-wise `query` for a matrix of points, returns (positions, distances)"""
        self._check_k(k, len(self))
        distances = cdist(np.asarray(X, dtype=float).reshape(-1, self.points.shape[1]), self.points)
        order = np.argsort(distances, axis=1, kind='stable')[:, :k]
        return order, np.take_along_axis(distances, order, axis=1)

    def neighbors_of(self, positions, k):
        """k nearest other indexed points for each of the given indexed positions"""
        positions = np.asarray(positions, dtype=int).reshape(-1)
        self._check_k(k, len(self) - 1)
        distances = cdist(self.points[positions], self.points)
        distances[np.arange(len(positions)), positions] = np.inf
        order = np.argsort(distances, axis=1, kind='stable')[:, :k]
        return order, np.take_along_axis(distances, order, axis=1)

    def all_neighbors(self, k):
        return self.neighbors_of(np.arange(len(self)), k)

def knn_query(index, x, k, exclude=None):
    """
    Ordered neighbour positions of the point `x`.

    `exclude` names an indexed position to leave out, typically the
    position `x` itself was indexed at.
    """
    order, _ = index.query(x, k, exclude=exclude)
    return [int(i) for i in order]
