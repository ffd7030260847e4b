"""
Data balancing methods.

Every method takes a training Dataset and a SeededRng and returns a
ResampleOutput whose data is exactly balanced. Oversamplers append
Synthetic rows that record their parents, undersamplers drop or summarize
majority rows. Rows that are kept are never modified.

The minority class is the rarer label of the input (ties: positive).
"""

from collections import namedtuple, OrderedDict

import numpy as np

from fairfold.data import FairfoldError, InapplicableError
from fairfold.kmeans import fit_kmeans
from fairfold.neighbors import NeighborIndex

import logging
logger = logging.getLogger(__name__)

DEFAULT_K_NEIGHBORS = 5

# separator used by SVMSMOTE to find borderline minority rows
SVM_EPOCHS = 200
SVM_REGULARIZATION = 1e-2
SVM_BATCH_SIZE = 32

class MinoritySingleton(InapplicableError):
    def __init__(self, method):
        super().__init__(f'{method} needs at least 2 minority rows to interpolate, got 1. '
                         'Use ROS for this input', {'method': method})

class NoBorderline(InapplicableError):
    def __init__(self):
        super().__init__('ADASYN is inapplicable: no minority row has a majority row among its neighbours')

class MinorityExceedsMajority(InapplicableError):
    def __init__(self, n_minority, n_majority):
        super().__init__(f'Designated minority class has {n_minority} rows, more than the {n_majority} majority rows',
                         {'n_minority': n_minority, 'n_majority': n_majority})

ResampleOutput = namedtuple('ResampleOutput', ['data', 'method', 'counts_before', 'counts_after'])

class Classes():
    """Positions of the minority and majority rows of a training set"""

    def __init__(self, train, minority=None):
        train.require_both_classes()
        self.minority_label = train.minority_label() if minority is None else int(minority)
        self.majority_label = 1 - self.minority_label
        self.minority = np.flatnonzero(train.labels == self.minority_label)
        self.majority = np.flatnonzero(train.labels == self.majority_label)

        if len(self.minority) > len(self.majority):
            raise MinorityExceedsMajority(len(self.minority), len(self.majority))

    @property
    def shortfall(self):
        return len(self.majority) - len(self.minority)

def _output(data, method, before):
    after = data.class_counts()
    assert after[0] == after[1], f'{method} left classes unbalanced: {after}'
    return ResampleOutput(data, method, before, after)

def largest_remainder(weights, total):
    """
    Split the integer `total` proportionally to `weights`.

    Every share is the floor of its exact quota or one more; the extra units
    go to the largest fractional remainders, lower index first on ties.
    """
    weights = np.asarray(weights, dtype=float)
    quotas = weights / weights.sum() * total
    shares = np.floor(quotas).astype(int)
    leftover = int(total - shares.sum())
    if leftover > 0:
        order = np.argsort(-(quotas - shares), kind='stable')
        shares[order[:leftover]] += 1
    return shares

def round_robin(n_items, total, rng):
    """How many samples each item gets when `total` are dealt over a shuffled order"""
    shares = np.full(n_items, total // n_items, dtype=int)
    order = rng.permutation(n_items)
    shares[order[:total % n_items]] += 1
    return shares, order

def _interpolate(train, seeds, neighbors, lam, extrapolated=None):
    """Rows between (or beyond) seed positions and neighbour positions"""
    a = train.features[seeds]
    b = train.features[neighbors]
    step = lam[:, None] * (b - a)
    if extrapolated is None:
        return a + step
    return np.where(extrapolated[:, None], a - step, a + step)

def no_resampling(train, rng, k_neighbors=DEFAULT_K_NEIGHBORS, minority=None):
    train.require_both_classes()
    counts = train.class_counts()
    return ResampleOutput(train, 'None', counts, counts)

def ros(train, rng, k_neighbors=DEFAULT_K_NEIGHBORS, minority=None):
    """Random oversampling: replicate minority rows drawn with replacement"""
    classes = Classes(train, minority)
    before = train.class_counts()

    sources = classes.minority[rng.integers(0, len(classes.minority), size=classes.shortfall)]
    data = train.append_synthetic(train.features[sources], classes.minority_label,
                                  parent_a=train.row_ids[sources], parent_b=-1, lam=0.0)
    return _output(data, 'ROS', before)

def rus(train, rng, k_neighbors=DEFAULT_K_NEIGHBORS, minority=None):
    """Random undersampling: keep as many majority rows as there are minority rows"""
    classes = Classes(train, minority)
    before = train.class_counts()

    kept = rng.choice(classes.majority, size=len(classes.minority), replace=False)
    data = train.subset(np.sort(np.concatenate([classes.minority, kept])))
    return _output(data, 'RUS', before)

def _minority_neighbors(train, classes, k_neighbors, method):
    if len(classes.minority) < 2:
        raise MinoritySingleton(method)
    k = min(k_neighbors, len(classes.minority) - 1)
    index = NeighborIndex(train.features[classes.minority])
    neighbors, _ = index.all_neighbors(k)
    # back to positions in the training set
    return classes.minority[neighbors], k

def _majority_fraction(train, classes, seeds, k_neighbors):
    """Share of majority rows among each seed's neighbours in the whole training set"""
    k = min(k_neighbors, train.n - 1)
    neighbors, _ = NeighborIndex(train.features).neighbors_of(seeds, k)
    return (train.labels[neighbors] == classes.majority_label).mean(axis=1)

def smote(train, rng, k_neighbors=DEFAULT_K_NEIGHBORS, minority=None):
    """
    Synthetic minority oversampling.

    The shortfall G is dealt round-robin over the minority rows in shuffled
    order. Each synthetic row lies on the segment from its seed to one of
    the seed's k nearest minority neighbours, picked uniformly.
    """
    classes = Classes(train, minority)
    before = train.class_counts()
    neighbor_table, k = _minority_neighbors(train, classes, k_neighbors, 'SMOTE')

    shares, order = round_robin(len(classes.minority), classes.shortfall, rng)
    seed_idx = np.repeat(order, shares[order])
    picks = rng.integers(0, k, size=len(seed_idx))
    lam = rng.random(len(seed_idx))

    seeds = classes.minority[seed_idx]
    partners = neighbor_table[seed_idx, picks]
    data = train.append_synthetic(_interpolate(train, seeds, partners, lam), classes.minority_label,
                                  parent_a=train.row_ids[seeds], parent_b=train.row_ids[partners], lam=lam)
    return _output(data, 'SMOTE', before)

def adasyn(train, rng, k_neighbors=DEFAULT_K_NEIGHBORS, minority=None):
    """
    Adaptive synthetic sampling.

    Minority rows surrounded by more majority rows (in the whole training
    set) receive more synthetic rows. Shares are apportioned by largest
    remainder so exactly G rows are generated. Interpolation partners are
    minority neighbours only.
    """
    classes = Classes(train, minority)
    before = train.class_counts()
    neighbor_table, k = _minority_neighbors(train, classes, k_neighbors, 'ADASYN')

    if classes.shortfall == 0:
        return _output(train, 'ADASYN', before)

    hardness = _majority_fraction(train, classes, classes.minority, k_neighbors)
    if hardness.sum() == 0:
        raise NoBorderline()

    shares = adasyn_allocation(hardness, classes.shortfall)
    seed_idx = np.repeat(np.arange(len(classes.minority)), shares)
    picks = rng.integers(0, k, size=len(seed_idx))
    lam = rng.random(len(seed_idx))

    seeds = classes.minority[seed_idx]
    partners = neighbor_table[seed_idx, picks]
    data = train.append_synthetic(_interpolate(train, seeds, partners, lam), classes.minority_label,
                                  parent_a=train.row_ids[seeds], parent_b=train.row_ids[partners], lam=lam)
    return _output(data, 'ADASYN', before)

def adasyn_allocation(hardness, total):
    """Synthetic rows per minority row, proportional to its majority-neighbour ratio"""
    hardness = np.asarray(hardness, dtype=float)
    return largest_remainder(hardness / hardness.sum(), total)

class LinearSeparator():
    """
    Max-margin hyperplane w.x + b fitted by mini-batch subgradient descent
    on the regularized hinge loss (Pegasos steps 1/(lambda t)).
    """

    def __init__(self, epochs=SVM_EPOCHS, regularization=SVM_REGULARIZATION, batch_size=SVM_BATCH_SIZE):
        self.epochs = epochs
        self.regularization = regularization
        self.batch_size = batch_size

    def fit(self, X, y, rng):
        """y in {-1, +1}"""
        n, d = X.shape
        lam = self.regularization
        w = np.zeros(d)
        b = 0.0
        radius = 1 / np.sqrt(lam)
        t = 0

        for _ in range(self.epochs):
            order = rng.permutation(n)
            for start in range(0, n, self.batch_size):
                batch = order[start:start + self.batch_size]
                t += 1
                eta = 1 / (lam * t)
                margins = y[batch] * (X[batch] @ w + b)
                violators = batch[margins < 1]

                w *= 1 - eta * lam
                if len(violators):
                    w += eta / len(batch) * (y[violators] @ X[violators])
                    b += eta / len(batch) * y[violators].sum()

                norm = np.linalg.norm(w)
                if norm > radius:
                    w *= radius / norm

        self.w, self.b = w, b
        return self

    def decision_function(self, X):
        return X @ self.w + self.b

def svmsmote(train, rng, k_neighbors=DEFAULT_K_NEIGHBORS, minority=None):
    """
    SMOTE seeded from minority rows near a linear max-margin boundary.

    Seeds are the minority rows with |w.x + b| <= 1, or every minority row
    if that band is empty. The shortfall is dealt round-robin over the
    seeds. A seed with less than half majority neighbours interpolates with
    lam in [0, 1], and when it has no majority neighbour at all each sample
    may instead extrapolate away from the partner with lam in [0, 0.5]
    (fair coin). It only does so when the seed has the larger decision
    value of the two, so the step leads away from the boundary into
    minority territory; otherwise the sample interpolates. Any other seed
    interpolates with lam in [0, 0.5].
    """
    classes = Classes(train, minority)
    before = train.class_counts()
    neighbor_table, k = _minority_neighbors(train, classes, k_neighbors, 'SVMSMOTE')

    y = np.where(train.labels == classes.minority_label, 1.0, -1.0)
    separator = LinearSeparator().fit(train.features, y, rng)
    in_band = np.abs(separator.decision_function(train.features[classes.minority])) <= 1
    seed_idx_pool = np.flatnonzero(in_band)
    if len(seed_idx_pool) == 0:
        logger.debug('SVMSMOTE margin band holds no minority rows, seeding from all of them')
        seed_idx_pool = np.arange(len(classes.minority))

    danger = _majority_fraction(train, classes, classes.minority[seed_idx_pool], k_neighbors)

    shares, order = round_robin(len(seed_idx_pool), classes.shortfall, rng)
    pool_idx = np.repeat(order, shares[order])
    count = len(pool_idx)
    picks = rng.integers(0, k, size=count)
    coin = rng.random(count) < 0.5
    lam = rng.random(count)

    seed_idx = seed_idx_pool[pool_idx]
    seeds = classes.minority[seed_idx]
    partners = neighbor_table[seed_idx, picks]

    # stepping from the seed away from the partner must go deeper into the minority side
    outward = (separator.decision_function(train.features[seeds])
               > separator.decision_function(train.features[partners]))
    fraction = danger[pool_idx]
    extrapolated = (fraction == 0) & coin & outward
    lam = np.where((fraction >= 0.5) | extrapolated, 0.5 * lam, lam)

    data = train.append_synthetic(_interpolate(train, seeds, partners, lam, extrapolated), classes.minority_label,
                                  parent_a=train.row_ids[seeds], parent_b=train.row_ids[partners],
                                  lam=lam, extrapolated=extrapolated)
    return _output(data, 'SVMSMOTE', before)

def cluster_centroids(train, rng, k_neighbors=DEFAULT_K_NEIGHBORS, minority=None):
    """
    Replace the majority class by the centroids of a k-means fit with as
    many clusters as there are minority rows. Each centroid records the
    majority row nearest to it as its parent.
    """
    classes = Classes(train, minority)
    before = train.class_counts()

    majority_points = train.features[classes.majority]
    model = fit_kmeans(majority_points, len(classes.minority), rng)
    nearest, _ = NeighborIndex(majority_points).query_many(model.centroids, 1)
    parents = train.row_ids[classes.majority[nearest[:, 0]]]

    data = train.subset(classes.minority).append_synthetic(model.centroids, classes.majority_label,
                                                            parent_a=parents, parent_b=-1, lam=0.0,
                                                            first_id=train.next_row_id())
    return _output(data, 'CC', before)

RESAMPLERS = OrderedDict([
    ('None', no_resampling),
    ('ADASYN', adasyn),
    ('SMOTE', smote),
    ('SVMSMOTE', svmsmote),
    ('ROS', ros),
    ('RUS', rus),
    ('CC', cluster_centroids)
])

# row labels of the comparison tables
DISPLAY_NAMES = {'None': 'BEF'}

ALIASES = {
    'none': 'None', 'bef': 'None', 'before': 'None',
    'adasyn': 'ADASYN', 'smote': 'SMOTE', 'svmsmote': 'SVMSMOTE',
    'ros': 'ROS', 'rus': 'RUS', 'cc': 'CC', 'clustercentroids': 'CC'
}

class UnknownResampler(FairfoldError):
    def __init__(self, name):
        super().__init__(f'Unknown resampler {name!r}, expected one of {list(RESAMPLERS)}', {'name': name})

def canonical_resampler(name):
    try:
        return ALIASES[str(name).lower().replace('_', '').replace('-', '')]
    except KeyError:
        raise UnknownResampler(name)

def display_name(resampler_id):
    return DISPLAY_NAMES.get(resampler_id, resampler_id)

def resample(method, train, rng, k_neighbors=DEFAULT_K_NEIGHBORS):
    return RESAMPLERS[canonical_resampler(method)](train, rng, k_neighbors=k_neighbors)
