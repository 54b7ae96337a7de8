from maxslice.dataset import Dataset as DatasetGeneric
from maxslice.fields import Grid3, SymTensorField3, SymTensorField4, SpacetimeSlab
from maxslice.geometry import four_metric
from maxslice.physics import InitialData

import dataclasses
import typing

import numpy

@dataclasses.dataclass(frozen = True)
class KerrFields :
    """Kerr slice quantities in quasi-isotropic Cartesian coordinates, points behind indices."""

    lapse : numpy.ndarray
    shift : numpy.ndarray
    """`beta^i = f w^i` with the rotation field `w = (-y, x, 0)`."""
    g : numpy.ndarray
    k : numpy.ndarray

def horizon_radius(m : float, a : float) -> float :
    """Gets the quasi-isotropic radius of the outer horizon, `sqrt(m^2 - a^2) / 2`."""
    return numpy.sqrt(m * m - a * a) / 2.0

def kerr_fields(points : numpy.ndarray, m : float, a : float) -> KerrFields :
    """
    Evaluates the Boyer-Lindquist `t = const` slice of Kerr at points `(3, ...)` outside of the
    horizon, with radius `r_BL = r + m + (m^2 - a^2) / 4r`.

    The metric is `(Sigma / r^2) e + a^2 (Sigma + 2 m r_BL) / (Sigma r^4) w w` and the second
    fundamental form `-(df w' + w' df) / (2 alpha)` with `w' = A / (Sigma r^2) w` the lowered
    rotation field; its trace `-df(w) / alpha` vanishes by axisymmetry of `f = 2 m a r_BL / A`.
    The shift is oriented so that the angular momentum about `+z` is `m a`.
    """
    points = numpy.asarray(points, dtype = numpy.float64)
    x, y, z = points
    r = numpy.sqrt(x * x + y * y + z * z)
    q = m * m - a * a
    r_bl = r + m + q / (4.0 * r)
    r_bl_derivative = 1.0 - q / (4.0 * r * r)
    mu = z / r
    sigma = r_bl * r_bl + a * a * mu * mu
    delta = r_bl * r_bl - 2.0 * m * r_bl + a * a
    big = (r_bl * r_bl + a * a) ** 2 - delta * a * a * (1.0 - mu * mu)
    lapse = numpy.sqrt(sigma * delta / big)
    f = 2.0 * m * a * r_bl / big
    w = numpy.array([-y, x, numpy.zeros_like(z)])
    g = (
        numpy.einsum('ij,...->ij...', numpy.eye(3), sigma / (r * r)) +
        a * a * (sigma + 2.0 * m * r_bl) / (sigma * r ** 4) * numpy.einsum('i...,j...->ij...', w, w)
    )
    w_lower = big / (sigma * r * r) * w
    big_r = 4.0 * r_bl * (r_bl * r_bl + a * a) - (2.0 * r_bl - 2.0 * m) * a * a * (1.0 - mu * mu)
    big_mu = 2.0 * delta * a * a * mu
    f_r = 2.0 * m * a / big - 2.0 * m * a * r_bl * big_r / (big * big)
    f_mu = -2.0 * m * a * r_bl * big_mu / (big * big)
    mu_gradient = -z * points / r ** 3
    mu_gradient[2] += 1.0 / r
    df = f_r * r_bl_derivative * points / r + f_mu * mu_gradient
    k = -(
        numpy.einsum('i...,j...->ij...', df, w_lower) + numpy.einsum('i...,j...->ij...', w_lower, df)
    ) / (2.0 * lapse)
    return KerrFields(lapse, f * w, g, k)

def _annulus(grid : Grid3, m : float, a : float, inner : typing.Optional[float]) -> numpy.ndarray :
    if abs(a) >= m :
        raise ValueError('Spin invalid: Magnitude not smaller than mass.')
    inner = m if inner is None else inner
    if inner <= horizon_radius(m, a) :
        raise ValueError('Inner radius invalid: Annulus touches horizon.')
    return grid.radius() >= inner

def _evaluate(grid : Grid3, m : float, a : float, valid : numpy.ndarray) -> KerrFields :
    # Excised nodes are evaluated at a regular point and masked by the fields.
    regular = numpy.array([0.0, 0.0, 2.0 * m + 1.0]).reshape(3, 1, 1, 1)
    points = numpy.where(valid, grid.coordinates(), regular)
    return kerr_fields(points, m, a)

def make_kerr_annulus(
    grid : Grid3,
    m : float,
    a : float,
    inner : typing.Optional[float] = None
) -> InitialData :
    """
    Makes the Kerr slice on the annulus `r >= inner` of the grid.

    :param inner:
        Inner radius, defaults to `m`.

    :raises ValueError:
        Spin not smaller than mass or annulus touching the horizon.
    """
    valid = _annulus(grid, m, a, inner)
    fields = _evaluate(grid, m, a, valid)
    return InitialData(
        SymTensorField3.from_matrix(grid, fields.g, valid),
        SymTensorField3.from_matrix(grid, fields.k, valid)
    )

def make_kerr_slab(
    grid : Grid3,
    m : float,
    a : float,
    times : typing.Sequence[float],
    inner : typing.Optional[float] = None
) -> SpacetimeSlab :
    """Makes the stationary Kerr slab over the annulus on the given time levels."""
    valid = _annulus(grid, m, a, inner)
    fields = _evaluate(grid, m, a, valid)
    upper = four_metric(fields.lapse, fields.shift, fields.g)[1]
    return SpacetimeSlab.static(grid, SymTensorField4.from_matrix(grid, upper, valid), times)

class Dataset(DatasetGeneric) :
    """Kerr slice on an annulus."""

    FAMILY = 'kerr-annulus'
    MAXIMAL = True

    def generate(self) -> InitialData :
        return make_kerr_annulus(self.grid, self.spec.mass, self.spec.spin, self.spec.excision)

    def slab(self, times : typing.Sequence[float]) -> SpacetimeSlab :
        return make_kerr_slab(self.grid, self.spec.mass, self.spec.spin, times, self.spec.excision)
