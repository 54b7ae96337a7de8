from tests.test_dataset import TestDataset as TestDatasetGeneric
from tests.environment import instance as environment
from maxslice import DatasetSpec
from maxslice.datasets import flat
from maxslice import sobolev

import numpy

class TestDataset(TestDatasetGeneric) :

    FAMILY = 'flat'
    SPEC = DatasetSpec('flat', n = 16, h = 0.5)
    MAXIMAL = True

    def test_minkowski(self) :
        self.assertIs(flat.MINKOWSKI_INVERSE, sobolev.MINKOWSKI_INVERSE)
        slab = flat.make_minkowski_slab(self.SPEC.grid, environment.times(self.SPEC.h))
        for level in range(slab.level_count) :
            with self.subTest(level) :
                mask = slab.mask(level)
                self.assertTrue(mask.any())
                numpy.testing.assert_array_equal(
                    slab.metric(level).values[:, mask],
                    numpy.broadcast_to(sobolev.MINKOWSKI_INVERSE[:, numpy.newaxis], (10, int(numpy.count_nonzero(mask))))
                )
        self.assertEqual(sobolev.restriction_norm(slab, 0.0).value, 0.0)
