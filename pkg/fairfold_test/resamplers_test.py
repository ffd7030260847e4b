import unittest

import numpy as np
from numpy.testing import assert_allclose, assert_array_equal

from fairfold.data import Dataset
from fairfold.resamplers import (LinearSeparator, MinorityExceedsMajority, MinoritySingleton, NoBorderline,
                                 RESAMPLERS, UnknownResampler, adasyn, adasyn_allocation, canonical_resampler,
                                 cluster_centroids, display_name, largest_remainder, resample, ros, rus,
                                 smote, svmsmote, _majority_fraction, Classes)
from fairfold.rng import make_rng

TRIALS = 1000
# the margin fit makes SVMSMOTE slower than the rest
SVMSMOTE_TRIALS = 250

def random_train(rng):
    n_min = int(rng.integers(2, 15))
    n_maj = int(rng.integers(n_min + 1, 40))
    d = int(rng.integers(1, 4))
    features = np.vstack([rng.normal(0.7, 1, size=(n_min, d)), rng.normal(0, 1, size=(n_maj, d))])
    labels = np.array([1] * n_min + [0] * n_maj)
    order = rng.permutation(n_min + n_maj)
    return Dataset(features[order], labels[order])

def check_originals_untouched(test, train, data):
    originals = data.subset(np.flatnonzero(~data.synthetic))
    positions = train.positions_of(originals.row_ids)
    assert_array_equal(originals.features, train.features[positions])
    assert_array_equal(originals.labels, train.labels[positions])

def check_segments(test, data):
    """Every synthetic row lies where its provenance says"""
    synthetic = np.flatnonzero(data.synthetic)
    a = data.features[data.positions_of(data.parent_a[synthetic])]
    b = data.features[data.positions_of(data.parent_b[synthetic])]
    lam = data.lam[synthetic][:, None]
    sign = np.where(data.extrapolated[synthetic], -1.0, 1.0)[:, None]
    assert_allclose(data.features[synthetic], a + sign * lam * (b - a), atol=1e-9)
    test.assertTrue(np.all(data.lam[synthetic] >= 0) and np.all(data.lam[synthetic] <= 1))
    test.assertTrue(np.all(data.lam[synthetic][data.extrapolated[synthetic]] <= 0.5))
    # partners are minority rows
    assert_array_equal(data.labels[data.positions_of(data.parent_b[synthetic])], 1)
    assert_array_equal(data.labels[synthetic], 1)

class ResamplerPropertyTest(unittest.TestCase):
    def checkBalanced(self, output):
        n_pos, n_neg = output.data.class_counts()
        self.assertEqual(n_pos, n_neg)
        self.assertEqual(output.counts_after, (n_pos, n_neg))
        self.assertEqual(len(np.unique(output.data.row_ids)), output.data.n)

    def testRos(self):
        rng = make_rng(31, 'ros')
        for _ in range(TRIALS):
            train = random_train(rng)
            output = ros(train, rng)
            self.checkBalanced(output)
            check_originals_untouched(self, train, output.data)
            data = output.data
            synthetic = np.flatnonzero(data.synthetic)
            assert_array_equal(data.features[synthetic],
                               data.features[data.positions_of(data.parent_a[synthetic])])

    def testRus(self):
        rng = make_rng(32, 'rus')
        for _ in range(TRIALS):
            train = random_train(rng)
            output = rus(train, rng)
            self.checkBalanced(output)
            self.assertTrue(output.data.is_all_original())
            self.assertEqual(output.data.class_counts()[0], train.class_counts()[0])
            check_originals_untouched(self, train, output.data)

    def testSmote(self):
        rng = make_rng(33, 'smote')
        for _ in range(TRIALS):
            train = random_train(rng)
            output = smote(train, rng)
            self.checkBalanced(output)
            check_originals_untouched(self, train, output.data)
            check_segments(self, output.data)
            self.assertFalse(output.data.extrapolated.any())

    def testAdasyn(self):
        rng = make_rng(34, 'adasyn')
        checked = 0
        for _ in range(TRIALS):
            train = random_train(rng)
            try:
                output = adasyn(train, rng)
            except NoBorderline:
                continue
            checked += 1
            self.checkBalanced(output)
            check_originals_untouched(self, train, output.data)
            check_segments(self, output.data)

            # synthetic rows per seed follow the largest remainder allocation
            classes = Classes(train)
            hardness = _majority_fraction(train, classes, classes.minority, 5)
            expected = adasyn_allocation(hardness, classes.shortfall)
            data = output.data
            parents = data.parent_a[data.synthetic]
            actual = [int(np.sum(parents == train.row_ids[p])) for p in classes.minority]
            assert_array_equal(actual, expected)
        self.assertGreater(checked, TRIALS // 2)

    def testSvmsmote(self):
        rng = make_rng(35, 'svmsmote')
        for _ in range(SVMSMOTE_TRIALS):
            train = random_train(rng)
            output = svmsmote(train, rng)
            self.checkBalanced(output)
            check_originals_untouched(self, train, output.data)
            check_segments(self, output.data)

    def testClusterCentroids(self):
        rng = make_rng(36, 'cc')
        for _ in range(TRIALS):
            train = random_train(rng)
            output = cluster_centroids(train, rng)
            self.checkBalanced(output)
            data = output.data
            n_min = train.class_counts()[0]
            # the majority class is exactly the centroids
            self.assertEqual(int(np.sum(data.labels == 0)), n_min)
            self.assertTrue(np.all(data.synthetic[data.labels == 0]))
            self.assertFalse(np.any(data.synthetic[data.labels == 1]))
            self.assertTrue(np.all(np.isin(data.parent_a[data.synthetic], train.row_ids[train.labels == 0])))
            check_originals_untouched(self, train, data)

class ResamplerEdgeCaseTest(unittest.TestCase):
    def testSingletonMinority(self):
        train = Dataset(np.arange(6, dtype=float).reshape(-1, 1), [1, 0, 0, 0, 0, 0])
        for method in (smote, adasyn, svmsmote):
            with self.assertRaises(MinoritySingleton):
                method(train, make_rng(1))
        # random oversampling copes
        self.assertEqual(ros(train, make_rng(1)).data.class_counts(), (5, 5))

    def testAdasynWithoutBorderline(self):
        features = np.vstack([np.full((6, 2), 100.0) + np.arange(6)[:, None], np.zeros((20, 2)) + np.arange(20)[:, None] * 0.01])
        train = Dataset(features, [1] * 6 + [0] * 20)
        with self.assertRaises(NoBorderline):
            adasyn(train, make_rng(1))

    def testDesignatedMinorityMustBeSmaller(self):
        train = Dataset(np.arange(8, dtype=float).reshape(-1, 1), [1, 1, 0, 0, 0, 0, 0, 0])
        with self.assertRaises(MinorityExceedsMajority):
            ros(train, make_rng(1), minority=0)

    def testAlreadyBalanced(self):
        train = Dataset(np.arange(8, dtype=float).reshape(-1, 1), [1, 0] * 4)
        for name in RESAMPLERS:
            output = resample(name, train, make_rng(2))
            self.assertEqual(output.data.class_counts(), (4, 4))

    def testSvmsmoteExtrapolatesOnlyFromSafeSeeds(self):
        rng = make_rng(37, 'safe')
        features = np.vstack([rng.normal(5, 0.3, size=(10, 2)), rng.normal(-5, 0.3, size=(40, 2))])
        train = Dataset(features, [1] * 10 + [0] * 40)
        data = svmsmote(train, rng).data
        self.assertTrue(data.extrapolated.any())
        self.assertTrue(np.all(data.lam[data.extrapolated] <= 0.5))

    def testSvmsmoteExtrapolatesAwayFromBoundary(self):
        rng = make_rng(38, 'safe')
        features = np.vstack([rng.normal(3, 0.5, size=(12, 2)), rng.normal(-3, 0.5, size=(40, 2))])
        train = Dataset(features, [1] * 12 + [0] * 40)
        data = svmsmote(train, make_rng(8)).data

        y = np.where(train.labels == 1, 1.0, -1.0)
        separator = LinearSeparator().fit(train.features, y, make_rng(8))
        rows = np.flatnonzero(data.extrapolated)
        self.assertGreater(len(rows), 0)
        seeds = separator.decision_function(data.features[data.positions_of(data.parent_a[rows])])
        partners = separator.decision_function(data.features[data.positions_of(data.parent_b[rows])])
        self.assertTrue(np.all(seeds > partners))
        self.assertTrue(np.all(separator.decision_function(data.features[rows]) >= seeds - 1e-9))

    def testNames(self):
        self.assertEqual(list(RESAMPLERS), ['None', 'ADASYN', 'SMOTE', 'SVMSMOTE', 'ROS', 'RUS', 'CC'])
        self.assertEqual(canonical_resampler('bef'), 'None')
        self.assertEqual(canonical_resampler('cluster-centroids'), 'CC')
        self.assertEqual(display_name('None'), 'BEF')
        with self.assertRaises(UnknownResampler):
            canonical_resampler('tomek')

class LargestRemainderTest(unittest.TestCase):
    def testExactTotalAndQuotaBounds(self):
        rng = make_rng(38, 'hamilton')
        for _ in range(TRIALS):
            weights = rng.random(int(rng.integers(1, 20)))
            total = int(rng.integers(0, 100))
            shares = largest_remainder(weights, total)
            quotas = weights / weights.sum() * total
            self.assertEqual(shares.sum(), total)
            self.assertTrue(np.all(shares >= np.floor(quotas)))
            self.assertTrue(np.all(shares <= np.floor(quotas) + 1))

    def testTiesGoToLowerIndex(self):
        assert_array_equal(largest_remainder([1, 1, 1], 2), [1, 1, 0])
        assert_array_equal(largest_remainder([1, 2, 1], 6), [2, 3, 1])

if __name__ == '__main__':
    unittest.main()
