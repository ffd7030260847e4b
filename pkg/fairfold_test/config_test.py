import os
import tempfile
import unittest

from fairfold.config import (DatasetSource, InvalidValue, LeakProbe, MissingDataset, UnknownFlag,
                             config_hash, config_to_dict, parse_config)

SAMPLE_EXPERIMENT = os.path.join(os.path.dirname(__file__), '..', 'sample_experiment', 'experiment.yml')

PROBE = {'leak_probe': '20,5,2'}

class ConfigTest(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()

    def write(self, name, text):
        path = os.path.join(self.tmp.name, name)
        with open(path, 'w', encoding='utf-8') as f:
            f.write(text)
        return path

    def testDefaults(self):
        config = parse_config(PROBE, environ={})
        self.assertEqual(config.k, 5)
        self.assertEqual(config.seed, 20211228)
        self.assertEqual(config.protocols, ('efidl', 'traditional'))
        self.assertEqual(config.resamplers, ('None', 'ADASYN', 'SMOTE', 'SVMSMOTE', 'ROS', 'RUS', 'CC'))
        self.assertEqual(config.classifiers, ('LR', 'KNN5', 'DTree', 'RForest', 'GaussNB', 'QDA'))
        self.assertTrue(config.standardize)
        self.assertTrue(config.roc)
        self.assertEqual(config.leak_probe, LeakProbe(20, 5, 2))

    def testSeedFromEnvironment(self):
        self.assertEqual(parse_config(PROBE, environ={'FAIRFOLD_SEED': '7'}).seed, 7)
        self.assertEqual(parse_config(dict(PROBE, seed=9), environ={'FAIRFOLD_SEED': '7'}).seed, 9)
        with self.assertRaises(InvalidValue):
            parse_config(PROBE, environ={'FAIRFOLD_SEED': 'seven'})

    def testFlagsOverrideFile(self):
        path = self.write('experiment.yml', 'k: 3\nleak-probe: 20,5,2\nprotocols: efidl\n')
        config = parse_config({'k': 10, 'seed': None}, config_file=path, environ={})
        self.assertEqual(config.k, 10)
        self.assertEqual(config.protocols, ('efidl',))

    def testKeyValueFile(self):
        path = self.write('experiment.conf', '# two files\nk=4\nno-standardize=true\ndata=a.csv\ndata=b.csv\n')
        config = parse_config(config_file=path, environ={})
        self.assertEqual(config.k, 4)
        self.assertFalse(config.standardize)
        self.assertEqual([source.path for source in config.datasets], ['a.csv', 'b.csv'])

    def testPerDatasetSettings(self):
        path = self.write('experiment.yml', 'data:\n'
                                            '  - path: pima.csv\n'
                                            '    label-col: Outcome\n'
                                            '    positive: 1\n'
                                            '  - lsm.csv\n'
                                            'missing: mean\n')
        config = parse_config(config_file=path, environ={})
        self.assertEqual(config.datasets, (DatasetSource('pima.csv', 'Outcome', '1', 'mean'),
                                           DatasetSource('lsm.csv', 'label', '1', 'mean')))

    def testUnknownFlag(self):
        with self.assertRaises(UnknownFlag):
            parse_config(dict(PROBE, folds=3), environ={})
        path = self.write('experiment.yml', 'leak-probe: 20,5,2\nbatch-size: 10\n')
        with self.assertRaises(UnknownFlag):
            parse_config(config_file=path, environ={})

    def testInvalidValues(self):
        for key, value in [('k', 'x'), ('k', 1), ('protocols', 'all'), ('resamplers', 'tomek'),
                           ('classifiers', 'svm'), ('leak_probe', '1,2'), ('tree_splitter', 'median'),
                           ('standardize', 'maybe')]:
            with self.assertRaises(InvalidValue) as raised:
                parse_config(dict(PROBE, **{key: value}), environ={})
            self.assertEqual(raised.exception.key, key)

    def testMissingDataset(self):
        with self.assertRaises(MissingDataset):
            parse_config({}, environ={})

    def testProtocolSpellings(self):
        self.assertEqual(parse_config(dict(PROBE, protocols='EFLAD'), environ={}).protocols, ('efidl',))
        self.assertEqual(parse_config(dict(PROBE, protocols='tra'), environ={}).protocols, ('traditional',))

    def testBaselineAlwaysIncluded(self):
        config = parse_config(dict(PROBE, resamplers='SMOTE, smote, ROS'), environ={})
        self.assertEqual(config.resamplers, ('None', 'SMOTE', 'ROS'))

    def testHashIgnoresWhereResultsGo(self):
        a = parse_config(dict(PROBE, out='a'), environ={})
        b = parse_config(dict(PROBE, out='b', no_roc=True), environ={})
        c = parse_config(dict(PROBE, seed=1), environ={})
        self.assertEqual(config_hash(a), config_hash(b))
        self.assertNotEqual(config_hash(a), config_hash(c))
        self.assertEqual(config_to_dict(a)['leak_probe'], [20, 5, 2])

    def testSampleExperiment(self):
        config = parse_config(config_file=SAMPLE_EXPERIMENT, environ={})
        self.assertEqual(config.leak_probe, LeakProbe(900, 100, 5))
        self.assertEqual(config.resamplers[0], 'None')
        self.assertEqual(config.classifiers, ('LR', 'KNN5', 'GaussNB'))
        self.assertEqual(config.out_dir, 'leak_probe_out')

if __name__ == '__main__':
    unittest.main()
