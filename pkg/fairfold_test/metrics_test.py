import unittest

import matplotlib
import matplotlib.pyplot as plt
import numpy as np
from numpy.testing import assert_array_equal

from fairfold.metrics import (OneClassOnly, ScoredPredictions, auc, auc_rank, confusion_counts, f1_at_half,
                              roc_curve)
from fairfold.plots import roc_svg
from fairfold.rng import make_rng

HAND_CASE = ScoredPredictions([0.8, 0.4, 0.6, 0.2], [1, 1, 0, 0])

class RocTest(unittest.TestCase):
    def testHandEnumeratedCurve(self):
        curve = roc_curve(HAND_CASE)
        assert_array_equal(curve.fpr, [0, 0, 0.5, 0.5, 1])
        assert_array_equal(curve.tpr, [0, 0.5, 0.5, 1, 1])
        self.assertEqual(curve.thresholds[0], np.inf)
        assert_array_equal(curve.thresholds[1:], [0.8, 0.6, 0.4, 0.2])

    def testTiesFormOneStep(self):
        curve = roc_curve(ScoredPredictions([0.5] * 4, [1, 0, 1, 0]))
        assert_array_equal(curve.fpr, [0, 1])
        assert_array_equal(curve.tpr, [0, 1])

    def testPerfectSeparationPassesThroughCorner(self):
        curve = roc_curve(ScoredPredictions([0.9, 0.8, 0.3, 0.1], [1, 1, 0, 0]))
        self.assertTrue(any(f == 0 and t == 1 for f, t in zip(curve.fpr, curve.tpr)))

    def testOneClassOnly(self):
        with self.assertRaises(OneClassOnly):
            roc_curve(ScoredPredictions([0.1, 0.2], [1, 1]))
        with self.assertRaises(OneClassOnly):
            auc_rank(ScoredPredictions([0.1, 0.2], [0, 0]))

    def testFrame(self):
        frame = roc_curve(HAND_CASE).to_frame()
        self.assertEqual(list(frame.columns), ['threshold', 'fpr', 'tpr'])
        self.assertEqual(len(frame), 5)

class AucTest(unittest.TestCase):
    def testHandEnumeratedCase(self):
        self.assertEqual(auc(HAND_CASE), 0.75)
        self.assertEqual(auc_rank(HAND_CASE), 0.75)

    def testExtremes(self):
        self.assertEqual(auc(ScoredPredictions([0.9, 0.8, 0.3, 0.1], [1, 1, 0, 0])), 1.0)
        self.assertEqual(auc(ScoredPredictions([0.5] * 6, [1, 0, 1, 0, 0, 0])), 0.5)

    def testTrapezoidMatchesRankStatistic(self):
        rng = make_rng(61, 'auc')
        for _ in range(1000):
            n = int(rng.integers(2, 60))
            truth = rng.integers(0, 2, size=n)
            truth[:2] = [0, 1]
            # coarse grid: plenty of ties
            scores = rng.integers(0, 6, size=n) / 5
            p = ScoredPredictions(scores, truth)
            self.assertAlmostEqual(auc(p), auc_rank(p), delta=1e-9)

    def testTieShareOfOracleInputs(self):
        rng = make_rng(62, 'auc')
        tied = 0
        for _ in range(1000):
            scores = rng.integers(0, 6, size=30) / 5
            _, counts = np.unique(scores, return_counts=True)
            tied += np.sum(counts[counts > 1]) / len(scores)
        self.assertGreater(tied / 1000, 0.3)

    def testComplement(self):
        rng = make_rng(63, 'auc')
        for _ in range(100):
            scores = rng.random(40)
            truth = np.r_[0, 1, rng.integers(0, 2, size=38)]
            self.assertAlmostEqual(auc(ScoredPredictions(scores, truth)),
                                   1 - auc(ScoredPredictions(-scores, truth)), delta=1e-12)

    def testMonotoneInvariance(self):
        rng = make_rng(64, 'auc')
        for _ in range(100):
            scores = rng.normal(size=40)
            truth = np.r_[0, 1, rng.integers(0, 2, size=38)]
            base = auc(ScoredPredictions(scores, truth))
            self.assertAlmostEqual(base, auc(ScoredPredictions(scores ** 3, truth)), delta=1e-12)
            self.assertAlmostEqual(base, auc(ScoredPredictions(2 * scores + 1, truth)), delta=1e-12)

class ThresholdMetricTest(unittest.TestCase):
    def testF1(self):
        self.assertEqual(f1_at_half(ScoredPredictions([0.9, 0.1, 0.7], [1, 0, 1])), 1.0)
        self.assertEqual(f1_at_half(ScoredPredictions([0.1, 0.2, 0.3], [1, 0, 1])), 0.0)
        # TP=2, FP=1, FN=1
        p = ScoredPredictions([0.9, 0.8, 0.7, 0.2, 0.1], [1, 1, 0, 1, 0])
        self.assertEqual(tuple(confusion_counts(p)), (2, 1, 1, 1))
        self.assertAlmostEqual(f1_at_half(p), 2 / 3)

    def testF1WithoutAnyPositives(self):
        self.assertEqual(f1_at_half(ScoredPredictions([0.1, 0.2], [0, 0])), 0.0)

    def testThresholdIsInclusive(self):
        self.assertEqual(confusion_counts(ScoredPredictions([0.5], [1])).tp, 1)

class RocSvgTest(unittest.TestCase):
    def testStandaloneAndStable(self):
        curves = [('SMOTE KNN5', roc_curve(HAND_CASE)), ('BEF KNN5', roc_curve(HAND_CASE))]
        svg = roc_svg(curves, 'pima, EFIDL')
        self.assertIn('<svg', svg)
        self.assertTrue(svg.rstrip().endswith('</svg>'))
        self.assertIn('SMOTE KNN5', svg)
        self.assertIn('BEF KNN5', svg)
        self.assertIn('pima, EFIDL', svg)
        self.assertNotIn('<dc:date>', svg)
        self.assertEqual(svg, roc_svg(curves, 'pima, EFIDL'))

    def testLeavesGlobalStyleAlone(self):
        salt = matplotlib.rcParams['svg.hashsalt']
        roc_svg([('SMOTE KNN5', roc_curve(HAND_CASE))], 'pima, EFIDL')
        self.assertEqual(matplotlib.rcParams['svg.hashsalt'], salt)
        self.assertEqual(plt.get_fignums(), [])

    def testEscapesTitle(self):
        self.assertIn('a &amp; b', roc_svg([], 'a & b'))

if __name__ == '__main__':
    unittest.main()
