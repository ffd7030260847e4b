"""
CART trees on Gini impurity for binary labels.

Trees grow best-first: the open node whose split removes the most
weighted impurity is split next, which is what lets a leaf cap keep the
most useful splits. Without a leaf cap the result is the ordinary greedy
tree. Nodes live in flat arrays; a row goes left when x[feature] <= threshold.
"""

import heapq

import numpy as np

LEAF = -1

def _gini_sums(pos, n):
    """n * gini for a node with `pos` positives out of `n` rows"""
    with np.errstate(divide='ignore', invalid='ignore'):
        return np.where(n > 0, 2.0 * pos * (n - pos) / np.maximum(n, 1), 0.0)

def best_threshold(x, y):
    """Exhaustive search over midpoints between distinct sorted values"""
    order = np.argsort(x, kind='stable')
    xs, ys = x[order], y[order]
    n = len(xs)
    cuts = np.flatnonzero(xs[:-1] < xs[1:])
    if len(cuts) == 0:
        return None

    cum_pos = np.cumsum(ys)
    total_pos = cum_pos[-1]
    n_left = cuts + 1
    pos_left = cum_pos[cuts]
    impurity = _gini_sums(pos_left, n_left) + _gini_sums(total_pos - pos_left, n - n_left)

    best = int(np.argmin(impurity))
    cut = cuts[best]
    threshold = (xs[cut] + xs[cut + 1]) / 2
    if not xs[cut] <= threshold < xs[cut + 1]:
        threshold = xs[cut]
    return impurity[best], threshold

def random_threshold(x, y, rng):
    """One uniform threshold between the node's extremes"""
    low, high = x.min(), x.max()
    if low == high:
        return None
    threshold = rng.uniform(low, high)
    left = x <= threshold
    n_left = left.sum()
    if n_left == 0 or n_left == len(x):
        return None
    pos_left = y[left].sum()
    impurity = _gini_sums(pos_left, n_left) + _gini_sums(y.sum() - pos_left, len(x) - n_left)
    return float(impurity), threshold

class Tree():
    def __init__(self, max_depth, max_leaf_nodes=None, min_samples_split=2, max_features=None, splitter='best'):
        if splitter not in ('best', 'random'):
            raise ValueError(f'Unknown splitter {splitter!r}')
        self.max_depth = max_depth
        self.max_leaf_nodes = max_leaf_nodes
        self.min_samples_split = max(2, int(min_samples_split))
        self.max_features = max_features
        self.splitter = splitter

    def _find_split(self, X, y, rows, rng):
        d = X.shape[1]
        n_features = d if self.max_features is None else min(d, self.max_features)
        features = rng.choice(d, size=n_features, replace=False) if n_features < d else np.arange(d)

        best = None
        for feature in features:
            x = X[rows, feature]
            if self.splitter == 'best':
                found = best_threshold(x, y[rows])
            else:
                found = random_threshold(x, y[rows], rng)
            if found is not None and (best is None or found[0] < best[0]):
                best = (found[0], int(feature), float(found[1]))
        return best

    def fit(self, X, y, rng):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)

        self.feature, self.threshold = [], []
        self.left, self.right = [], []
        self.n_rows, self.n_positive, self.depth = [], [], []

        def new_node(rows, depth):
            self.feature.append(LEAF)
            self.threshold.append(0.0)
            self.left.append(LEAF)
            self.right.append(LEAF)
            self.n_rows.append(len(rows))
            self.n_positive.append(int(y[rows].sum()))
            self.depth.append(depth)
            return len(self.feature) - 1

        frontier = []

        def consider(node, rows):
            pos, n = self.n_positive[node], self.n_rows[node]
            if (self.depth[node] >= self.max_depth or n < self.min_samples_split
                    or pos == 0 or pos == n):
                return
            split = self._find_split(X, y, rows, rng)
            if split is None:
                return
            impurity, feature, threshold = split
            gain = float(_gini_sums(pos, n)) - impurity
            heapq.heappush(frontier, (-gain, node, feature, threshold, rows))

        root_rows = np.arange(len(y))
        consider(new_node(root_rows, 0), root_rows)
        leaves = 1

        while frontier and (self.max_leaf_nodes is None or leaves < self.max_leaf_nodes):
            _, node, feature, threshold, rows = heapq.heappop(frontier)
            goes_left = X[rows, feature] <= threshold
            left_rows, right_rows = rows[goes_left], rows[~goes_left]

            self.feature[node] = feature
            self.threshold[node] = threshold
            depth = self.depth[node] + 1
            self.left[node] = new_node(left_rows, depth)
            self.right[node] = new_node(right_rows, depth)
            leaves += 1

            consider(self.left[node], left_rows)
            consider(self.right[node], right_rows)

        self.feature = np.array(self.feature)
        self.threshold = np.array(self.threshold)
        self.left = np.array(self.left)
        self.right = np.array(self.right)
        self.value = np.array(self.n_positive) / np.array(self.n_rows)
        return self

    @property
    def n_leaves(self):
        return int((self.feature == LEAF).sum())

    @property
    def max_reached_depth(self):
        return int(max(self.depth))

    def apply(self, X):
        """Leaf index for every row"""
        X = np.asarray(X, dtype=float)
        nodes = np.zeros(len(X), dtype=int)
        while True:
            internal = self.feature[nodes] != LEAF
            if not internal.any():
                return nodes
            idx = np.flatnonzero(internal)
            current = nodes[idx]
            goes_left = X[idx, self.feature[current]] <= self.threshold[current]
            nodes[idx] = np.where(goes_left, self.left[current], self.right[current])

    def predict_proba(self, X):
        return self.value[self.apply(X)]
