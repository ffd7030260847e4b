import os
import re
import unittest

import numpy as np
from numpy.testing import assert_array_equal

from fairfold.rng import DEFAULT_SEED, cell_key, make_rng, rng_for_cell
from fairfold.utils import hash64

PACKAGE_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'fairfold')

class SeededRngTest(unittest.TestCase):
    def testSameCellSameStream(self):
        a = rng_for_cell(DEFAULT_SEED, 'pima', 'SMOTE', 'LR', 'efidl')
        b = rng_for_cell(DEFAULT_SEED, 'pima', 'SMOTE', 'LR', 'efidl')
        assert_array_equal(a.random(10), b.random(10))

    def testCellsGetDifferentStreams(self):
        a = rng_for_cell(DEFAULT_SEED, 'pima', 'SMOTE', 'LR', 'efidl')
        b = rng_for_cell(DEFAULT_SEED, 'pima', 'SMOTE', 'LR', 'traditional')
        c = rng_for_cell(DEFAULT_SEED + 1, 'pima', 'SMOTE', 'LR', 'efidl')
        self.assertFalse(np.array_equal(a.random(10), b.random(10)))
        a = rng_for_cell(DEFAULT_SEED, 'pima', 'SMOTE', 'LR', 'efidl')
        self.assertFalse(np.array_equal(a.random(10), c.random(10)))

    def testStreamIdIsHashOfCoordinates(self):
        rng = rng_for_cell(7, 'pima', 'None', 'KNN5', 'bef', fold_index=3)
        self.assertEqual(cell_key('pima', 'None', 'KNN5', 'bef', 3), 'pima|None|KNN5|bef|3')
        self.assertEqual(rng.stream_id, hash64('pima|None|KNN5|bef|3'))
        self.assertEqual(rng.seed, 7)

    def testForFoldDoesNotDependOnConsumption(self):
        fresh = rng_for_cell(DEFAULT_SEED, 'd', 'ROS', 'QDA', 'efidl')
        used = rng_for_cell(DEFAULT_SEED, 'd', 'ROS', 'QDA', 'efidl')
        used.random(1000)
        assert_array_equal(fresh.for_fold(2).random(5), used.for_fold(2).random(5))
        self.assertFalse(np.array_equal(fresh.for_fold(1).random(5), fresh.for_fold(2).random(5)))

    def testChildStreamsAreNamed(self):
        rng = make_rng(1, 'forest')
        assert_array_equal(rng.child('tree0').random(4), make_rng(1, 'forest').child('tree0').random(4))
        self.assertFalse(np.array_equal(rng.child('tree0').random(4), rng.child('tree1').random(4)))

    def testFreeStreamsWithoutCoordinates(self):
        rng = make_rng(5)
        assert_array_equal(rng.for_fold(0).integers(0, 100, size=5),
                           make_rng(5).for_fold(0).integers(0, 100, size=5))

class NoAmbientEntropyTest(unittest.TestCase):
    def testOnlyRngModuleTouchesRandomness(self):
        pattern = re.compile(r'numpy\.random|np\.random|^\s*(import|from)\s+(random|time)\b', re.MULTILINE)
        offenders = []
        for name in sorted(os.listdir(PACKAGE_DIR)):
            if not name.endswith('.py') or name == 'rng.py':
                continue
            with open(os.path.join(PACKAGE_DIR, name), 'r', encoding='utf-8') as f:
                if pattern.search(f.read()):
                    offenders.append(name)
        self.assertEqual(offenders, [])

if __name__ == '__main__':
    unittest.main()
