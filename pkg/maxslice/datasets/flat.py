from maxslice.dataset import Dataset as DatasetGeneric
from maxslice.fields import Grid3, SymTensorField3, SymTensorField4, SpacetimeSlab
from maxslice.physics import InitialData
from maxslice.sobolev import MINKOWSKI_INVERSE

import typing

import numpy

IDENTITY = numpy.array([1.0, 0.0, 0.0, 1.0, 0.0, 1.0])
"""Upper triangle of the Euclidean metric."""

def make_flat(grid : Grid3) -> InitialData :
    """Makes Euclidean data: `g = e`, `k = 0`."""
    g = numpy.broadcast_to(IDENTITY.reshape(6, 1, 1, 1), (6,) + grid.shape)
    return InitialData(SymTensorField3(grid, g), SymTensorField3(grid, numpy.zeros((6,) + grid.shape)))

def make_minkowski_slab(grid : Grid3, times : typing.Sequence[float]) -> SpacetimeSlab :
    """Makes the Minkowski slab on the given time levels."""
    metric = numpy.broadcast_to(MINKOWSKI_INVERSE.reshape(10, 1, 1, 1), (10,) + grid.shape)
    return SpacetimeSlab.static(grid, SymTensorField4(grid, metric), times)

class Dataset(DatasetGeneric) :
    """Euclidean data."""

    FAMILY = 'flat'
    MAXIMAL = True

    def generate(self) -> InitialData :
        return make_flat(self.grid)

    def slab(self, times : typing.Sequence[float]) -> SpacetimeSlab :
        return make_minkowski_slab(self.grid, times)
