"""Discrete weighted Sobolev and weighted sup norms on a single Euclidean end."""

from .fields import Field, Grid3, SpacetimeSlab, gradient, hessian
from .exceptions import *

import dataclasses
import logging
import math
import typing

import numpy

logger = logging.getLogger(__name__)

DELTA_DEFAULT = -1.25
"""Default weight of the pipeline norms."""
ORDER_MAXIMUM = 2
"""Largest derivative order supported by the interior margin."""
SHELL_FRACTION = 0.1
"""Radial fraction of the box reported as boundary shell."""

@dataclasses.dataclass(frozen = True)
class WeightParams :
    """Derivative order `s` and weight `delta` of a weighted norm."""

    s : int = ORDER_MAXIMUM
    delta : float = DELTA_DEFAULT

    def __post_init__(self) -> None :
        if self.s < 0 :
            raise ValueError('Derivative order invalid: Value negative.')
        if self.s > ORDER_MAXIMUM :
            raise StencilException('Derivative order invalid: Value exceeds margin.')

@dataclasses.dataclass(frozen = True)
class Norm :
    """
    Value of a norm together with the contribution of the outermost shell of the grid.

    A large shell fraction means the norm is dominated by the truncated far field.
    """

    value : float
    shell : float

    @property
    def shell_fraction(self) -> float :
        """Gets the shell contribution relative to the value (zero for a vanishing norm)."""
        return self.shell / self.value if self.value > 0.0 else 0.0

    def __float__(self) -> float :
        return self.value

def sigma(x : numpy.ndarray) -> numpy.ndarray :
    """
    Gets the weight function `(1 + |x|^2)^(1/2)` of points `(3, ...)`.

    With a single end, the end weight coincides with it.
    """
    x = numpy.asarray(x, dtype = numpy.float64)
    return numpy.sqrt(1.0 + numpy.sum(x * x, axis = 0))

def shell(grid : Grid3) -> numpy.ndarray :
    """Gets the mask of the nodes in the outermost radial tenth of the box."""
    coordinates = grid.coordinates()
    return numpy.max(numpy.abs(coordinates), axis = 0) >= (1.0 - SHELL_FRACTION) * grid.half_width

def _derivative_norms(values : numpy.ndarray, h : float, s : int) -> typing.List[numpy.ndarray] :
    """
    Gets the pointwise Euclidean norms `|D^k u|` for `k = 0..s`, summed over components and over
    multi-indices of order `k` (each multi-index counted once).
    """
    norms = [numpy.sum(values * values, axis = 0)]
    if s >= 1 :
        first = gradient(values, h, closure = True)
        norms.append(numpy.sum(first * first, axis = (0, 1)))
    if s >= 2 :
        second = hessian(values, h, closure = True)
        total = numpy.zeros(values.shape[1 :])
        for i in range(3) :
            for j in range(i, 3) :
                total = total + numpy.sum(second[i, j] * second[i, j], axis = 0)
        norms.append(total)
    return [numpy.sqrt(norm) for norm in norms]

def _region(field : Field, norms : typing.Sequence[numpy.ndarray], mask) -> numpy.ndarray :
    region = field.valid.copy()
    for norm in norms :
        region &= numpy.isfinite(norm)
    if mask is not None :
        region &= mask
    return region

def h_norm(
    field : Field,
    w : WeightParams = WeightParams(),
    mask : typing.Optional[numpy.ndarray] = None
) -> Norm :
    """
    Gets the weighted Sobolev norm `(sum_k int sigma^(2 (delta + k)) |D^k u|^2)^(1/2)` over the
    valid region (restricted to a mask if given), by the midpoint rule of the grid.

    Derivatives are closed with one-sided stencils at the boundary of the region, so the region of
    integration does not depend on `s`.

    :raises StencilException:
        Derivative order exceeds the margin.
    """
    grid = field.grid
    norms = _derivative_norms(field.values, grid.h, w.s)
    region = _region(field, norms, mask)
    weight = sigma(grid.coordinates())
    integrand = numpy.zeros(grid.shape)
    for k, norm in enumerate(norms) :
        integrand[region] += weight[region] ** (2.0 * (w.delta + k)) * norm[region] ** 2
    volume = grid.h ** 3
    total = float(numpy.sum(integrand[region])) * volume
    outer = float(numpy.sum(integrand[region & shell(grid)])) * volume
    result = Norm(math.sqrt(total), math.sqrt(outer))
    if result.shell_fraction > 0.5 :
        logger.warning('Norm dominated by boundary shell: %.3f', result.shell_fraction)
    return result

def c_norm(
    field : Field,
    w : WeightParams = WeightParams(),
    mask : typing.Optional[numpy.ndarray] = None
) -> Norm :
    """
    Gets the weighted sup norm `sup (sum_k sigma^(delta + k) |D^k u|)` over the valid region.

    :raises StencilException:
        Derivative order exceeds the margin.
    """
    grid = field.grid
    norms = _derivative_norms(field.values, grid.h, w.s)
    region = _region(field, norms, mask)
    if not region.any() :
        return Norm(0.0, 0.0)
    weight = sigma(grid.coordinates())
    pointwise = numpy.zeros(grid.shape)
    for k, norm in enumerate(norms) :
        pointwise[region] += weight[region] ** (w.delta + k) * norm[region]
    outer = region & shell(grid)
    return Norm(
        float(numpy.max(pointwise[region])),
        float(numpy.max(pointwise[outer])) if outer.any() else 0.0
    )

def embedding_ratio(
    field : Field,
    sup : WeightParams,
    integral : WeightParams,
    mask : typing.Optional[numpy.ndarray] = None
) -> float :
    """Gets `c_norm(u; sup) / h_norm(u; integral)`, the constant of a discrete embedding."""
    denominator = h_norm(field, integral, mask).value
    if denominator == 0.0 :
        return 0.0
    return c_norm(field, sup, mask).value / denominator

class _SliceField(Field) :
    """Field of the ten perturbation components on a slice."""

    COMPONENT_COUNT = 10

def second_time_derivative(slab : SpacetimeSlab, level : int) -> numpy.ndarray :
    """Gets the second time derivative of `gamma^{mu nu}` at a level by differencing the rates."""
    last = slab.level_count - 1
    if last < 1 :
        raise StencilException('Slab invalid: Too few levels for time derivatives.')
    if level == 0 :
        return (slab.rate(1).values - slab.rate(0).values) / slab.dt
    if level == last :
        return (slab.rate(last).values - slab.rate(last - 1).values) / slab.dt
    return (slab.rate(level + 1).values - slab.rate(level - 1).values) / (2.0 * slab.dt)

MINKOWSKI_INVERSE = numpy.array([-1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 1.0])
"""Upper triangle of the inverse Minkowski metric."""

def restriction_norm(
    slab : SpacetimeSlab,
    tau : float,
    w : WeightParams = WeightParams(),
    mask : typing.Optional[numpy.ndarray] = None
) -> Norm :
    """
    Gets the norm of the metric perturbation `u = gamma^{mu nu} - eta^{mu nu}` restricted to the
    slice `t = tau sigma(x)`: the root of the sum of squares over `k = 0..s` of the norm of
    `D_t^k u` on the slice with weights `(s - k, delta + k)`.

    The plain sum of the `s + 1` terms is an equivalent norm: it lies between this value and
    `sqrt(s + 1)` times it.

    :raises OutOfConeException:
        Slice parameter outside of `(-theta, theta)`.
    :raises MaskEmptyException:
        Slice does not meet the active region.
    """
    if tau != 0.0 and not abs(tau) < slab.theta :
        raise OutOfConeException('Slice parameter invalid: Value outside of boost range.')
    grid = slab.grid
    coordinates = grid.coordinates()
    t = tau * sigma(coordinates)
    if slab.level_count < SpacetimeSlab.LEVEL_COUNT_INTERPOLATION :
        if tau != 0.0 :
            raise StencilException('Slab invalid: Too few levels for slices.')
        region = slab.mask(slab.reference_level)
        level = slab.reference_level
        terms = [
            slab.metric(level).values - MINKOWSKI_INVERSE.reshape(10, 1, 1, 1),
            slab.rate(level).values,
            second_time_derivative(slab, level) if slab.level_count > 1 else None,
        ]
    else :
        region = slab.inside_cone(coordinates, t) & slab.mask(slab.reference_level)
        terms = [
            slab.interpolate_nodes(
                lambda level : slab.metric(level).values - MINKOWSKI_INVERSE.reshape(10, 1, 1, 1),
                t,
                region
            ),
            slab.interpolate_nodes(lambda level : slab.rate(level).values, t, region),
            slab.interpolate_nodes(lambda level : second_time_derivative(slab, level), t, region),
        ]
    if mask is not None :
        region = region & mask
    if not region.any() :
        raise MaskEmptyException('Slice invalid: No active node.')
    values = 0.0
    outer = 0.0
    for k in range(w.s + 1) :
        if terms[k] is None :
            raise StencilException('Slab invalid: Too few levels for time derivatives.')
        norm = h_norm(_SliceField(grid, terms[k], region), WeightParams(w.s - k, w.delta + k))
        values += norm.value ** 2
        outer += norm.shell ** 2
    return Norm(math.sqrt(values), math.sqrt(outer))
