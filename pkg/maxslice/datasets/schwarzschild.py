from maxslice.dataset import Dataset as DatasetGeneric
from maxslice.fields import Grid3, SymTensorField3, SymTensorField4, SpacetimeSlab
from maxslice.geometry import four_metric
from maxslice.physics import InitialData

import typing

import numpy

RADIUS_FACTOR = 4.0
"""Smallest multiple of the mass the grid must contain for flux integrals."""

def _conformal_factor(grid : Grid3, m : float, valid : numpy.ndarray) -> numpy.ndarray :
    radius = numpy.where(valid, grid.radius(), 1.0)
    return 1.0 + m / (2.0 * radius)

def _valid(grid : Grid3, m : float, excision : typing.Optional[float]) -> numpy.ndarray :
    excision = m if excision is None else excision
    if excision < m / 2.0 :
        raise ValueError('Excision radius invalid: Value inside of horizon.')
    if grid.half_width < RADIUS_FACTOR * m :
        raise ValueError('Grid invalid: Too small to contain radii of four masses.')
    return grid.radius() >= excision

def make_schwarzschild(grid : Grid3, m : float, excision : typing.Optional[float] = None) -> InitialData :
    """
    Makes the time-symmetric Schwarzschild slice in isotropic coordinates:
    `g = (1 + m / 2r)^4 e`, `k = 0`, masked inside the excision radius.

    :param excision:
        Excision radius, defaults to `m`; must not be smaller than the horizon radius `m / 2`.

    :raises ValueError:
        Excision radius inside of horizon or grid too small.
    """
    valid = _valid(grid, m, excision)
    psi4 = _conformal_factor(grid, m, valid) ** 4
    g = numpy.zeros((6,) + grid.shape)
    g[0] = g[3] = g[5] = psi4
    return InitialData(SymTensorField3(grid, g, valid), SymTensorField3(grid, numpy.zeros_like(g), valid))

def make_schwarzschild_slab(
    grid : Grid3,
    m : float,
    times : typing.Sequence[float],
    excision : typing.Optional[float] = None
) -> SpacetimeSlab :
    """Makes the static Schwarzschild slab in isotropic coordinates with lapse `(1 - m/2r) / (1 + m/2r)`."""
    valid = _valid(grid, m, excision)
    psi = _conformal_factor(grid, m, valid)
    lapse = (2.0 - psi) / psi
    g = numpy.einsum('ij,...->ij...', numpy.eye(3), psi ** 4)
    upper = four_metric(lapse, numpy.zeros((3,) + grid.shape), g)[1]
    return SpacetimeSlab.static(grid, SymTensorField4.from_matrix(grid, upper, valid), times)

class Dataset(DatasetGeneric) :
    """Time-symmetric Schwarzschild data."""

    FAMILY = 'schwarzschild'
    MAXIMAL = True

    def generate(self) -> InitialData :
        return make_schwarzschild(self.grid, self.spec.mass, self.spec.excision)

    def slab(self, times : typing.Sequence[float]) -> SpacetimeSlab :
        return make_schwarzschild_slab(self.grid, self.spec.mass, times, self.spec.excision)
