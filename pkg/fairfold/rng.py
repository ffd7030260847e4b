"""
Seeded random streams.

Every stochastic operation in fairfold draws from a SeededRng. A stream is
a numpy Generator driven by Philox 4x64-10, a counter-based bit generator
whose output is fully determined by its 128-bit key, here (seed, stream_id).
Stream ids are derived from experiment cell coordinates by hashing:

    stream_id = first 8 bytes, big-endian, of
                SHA-224("dataset|resampler|classifier|protocol|fold")

so a cell always gets the same stream. This module is the only place in
the package that touches numpy.random.
"""

import numpy as np

from fairfold.utils import hash64

DEFAULT_SEED = 20211228
UINT64_MASK = (1 << 64) - 1

def cell_key(dataset_id, resampler_id, classifier_id, protocol_id, fold_index=None):
    fold = '' if fold_index is None else str(int(fold_index))
    return '|'.join([str(dataset_id), str(resampler_id), str(classifier_id), str(protocol_id), fold])

class SeededRng():
    """A single-owner random stream. Do not share one between cells."""

    def __init__(self, seed, stream_id, coordinates=None):
        self.seed = int(seed) & UINT64_MASK
        self.stream_id = int(stream_id) & UINT64_MASK
        self.coordinates = coordinates
        self.generator = np.random.Generator(np.random.Philox(key=np.array([self.seed, self.stream_id], dtype=np.uint64)))

    def for_fold(self, fold_index):
        """The stream of the same cell at a given fold"""
        if self.coordinates is None:
            return self.child(f'fold{fold_index}')
        return rng_for_cell(self.seed, *self.coordinates[:4], fold_index=fold_index)

    def child(self, label):
        """A named sub-stream, e.g. one per tree of a forest"""
        return SeededRng(self.seed, hash64(f'{self.stream_id}/{label}'))

    def integers(self, low, high=None, size=None):
        return self.generator.integers(low, high, size=size)

    def random(self, size=None):
        return self.generator.random(size)

    def uniform(self, low=0.0, high=1.0, size=None):
        return self.generator.uniform(low, high, size)

    def normal(self, loc=0.0, scale=1.0, size=None):
        return self.generator.normal(loc, scale, size)

    def permutation(self, x):
        return self.generator.permutation(x)

    def choice(self, a, size=None, replace=True, p=None):
        return self.generator.choice(a, size=size, replace=replace, p=p)

    def __repr__(self):
        return f'SeededRng(seed={self.seed}, stream_id={self.stream_id})'

def rng_for_cell(seed, dataset_id, resampler_id, classifier_id, protocol_id, fold_index=None):
    coordinates = (dataset_id, resampler_id, classifier_id, protocol_id, fold_index)
    stream_id = hash64(cell_key(*coordinates))
    return SeededRng(seed, stream_id, coordinates)

def make_rng(seed=DEFAULT_SEED, label='default'):
    """A free-standing stream for library use and tests"""
    return SeededRng(seed, hash64(label))
