"""Uniform Cartesian grids, discrete fields, finite differences, sphere quadrature and interpolation."""

from .exceptions import *

import abc
import logging
import math
import threading
import typing

import numpy
import scipy.ndimage
import scipy.special

logger = logging.getLogger(__name__)

class Grid3 :
    """
    Uniform Cartesian grid on a single Euclidean end.

    Node `i` of an axis with `n` nodes sits at `(i - (n - 1) / 2) * h`, so the nodes are symmetric
    about the coordinate origin and the box of the grid is `[-n * h / 2, n * h / 2]` per axis.
    """

    MARGIN_DEFAULT = 2
    """Default interior margin in cells (half-width of the fourth-order stencil)."""

    def __init__(
        self,
        n : typing.Union[int, typing.Sequence[int]],
        h : float,
        margin : int = MARGIN_DEFAULT
    ) -> None :
        """
        Constructs a grid.

        :param n:
            Node count per axis, one integer for all axes or three integers.
        :param h:
            Spacing in coordinate units.
        :param margin:
            Interior margin in cells.

        :raises ValueError:
            Spacing not positive, margin negative or node count too small for the margin.
        """
        if isinstance(n, (int, numpy.integer)) :
            shape = (int(n),) * 3
        else :
            shape = tuple(int(value) for value in n)
        if len(shape) != 3 :
            raise ValueError('Node count invalid: Three axes required.')
        if not h > 0.0 :
            raise ValueError('Spacing invalid: Value not positive.')
        if margin < 0 :
            raise ValueError('Margin invalid: Value negative.')
        if min(shape) < 2 * margin + 4 :
            raise ValueError('Node count invalid: Value below twice the margin plus four.')
        self.__shape = shape
        self.__h = float(h)
        self.__margin = int(margin)
        self.__lock = threading.Lock()
        self.__coordinates : typing.Optional[numpy.ndarray] = None

    @property
    def shape(self) -> typing.Tuple[int, int, int] :
        """Gets the node count per axis."""
        return self.__shape

    @property
    def h(self) -> float :
        """Gets the spacing in coordinate units."""
        return self.__h

    @property
    def margin(self) -> int :
        """Gets the interior margin in cells."""
        return self.__margin

    @property
    def origin(self) -> typing.Tuple[float, float, float] :
        """Gets the coordinates of the first node."""
        return tuple(-(n - 1) / 2 * self.__h for n in self.__shape)

    @property
    def size(self) -> int :
        """Gets the node count."""
        return int(numpy.prod(self.__shape))

    @property
    def half_width(self) -> float :
        """Gets the smallest coordinate distance from the origin to an outermost node."""
        return min((n - 1) / 2 * self.__h for n in self.__shape)

    def coordinates(self) -> numpy.ndarray :
        """Gets the node coordinates as a read-only array of shape `(3, nx, ny, nz)`."""
        with self.__lock :
            if self.__coordinates is None :
                axes = [
                    (numpy.arange(n) - (n - 1) / 2) * self.__h
                    for n in self.__shape
                ]
                coordinates = numpy.array(numpy.meshgrid(*axes, indexing = 'ij'))
                coordinates.flags.writeable = False
                self.__coordinates = coordinates
            return self.__coordinates

    def radius(self) -> numpy.ndarray :
        """Gets the Euclidean distance of every node from the origin."""
        return numpy.sqrt(numpy.sum(self.coordinates() ** 2, axis = 0))

    @property
    def interior(self) -> numpy.ndarray :
        """Gets the mask of the nodes at least `margin` nodes away from the grid boundary."""
        mask = numpy.zeros(self.__shape, dtype = bool)
        m = self.__margin
        mask[m : self.__shape[0] - m, m : self.__shape[1] - m, m : self.__shape[2] - m] = True
        return mask

    def refined(self) -> 'Grid3' :
        """Gets the grid covering the same box with half the spacing."""
        return Grid3(tuple(2 * n for n in self.__shape), self.__h / 2, self.__margin)

    def fractional_index(self, points : numpy.ndarray) -> numpy.ndarray :
        """Converts points of shape `(3, N)` into fractional node indices of the same shape."""
        origin = numpy.array(self.origin).reshape(3, 1)
        return (numpy.asarray(points, dtype = numpy.float64) - origin) / self.__h

    def __eq__(self, other : object) -> bool :
        if not isinstance(other, Grid3) :
            return NotImplemented
        return (
            self.__shape == other.__shape and
            self.__h == other.__h and
            self.__margin == other.__margin
        )

    def __hash__(self) -> int :
        return hash((self.__shape, self.__h, self.__margin))

    def __repr__(self) -> str :
        return f'Grid3({self.__shape}, {self.__h!r}, margin = {self.__margin})'

def erode(mask : numpy.ndarray, width : int) -> numpy.ndarray :
    """Erodes a node mask by `width` nodes in every direction (including diagonals)."""
    mask = numpy.asarray(mask, dtype = bool)
    if width <= 0 :
        return mask.copy()
    return scipy.ndimage.binary_erosion(
        mask,
        structure = numpy.ones((3, 3, 3), dtype = bool),
        iterations = width,
        border_value = 0
    )

def triangle(dimension : int) -> typing.Tuple[typing.Tuple[int, int], ...] :
    """Gets the index pairs of the upper triangle of a symmetric matrix in storage order."""
    return tuple((i, j) for i in range(dimension) for j in range(i, dimension))

def to_matrix(components : numpy.ndarray, dimension : int) -> numpy.ndarray :
    """Expands upper-triangle components of shape `(C, ...)` into a symmetric `(d, d, ...)` array."""
    components = numpy.asarray(components)
    matrix = numpy.empty((dimension, dimension) + components.shape[1 :], dtype = components.dtype)
    for index, (i, j) in enumerate(triangle(dimension)) :
        matrix[i, j] = components[index]
        matrix[j, i] = components[index]
    return matrix

def from_matrix(matrix : numpy.ndarray) -> numpy.ndarray :
    """Packs the symmetric part of a `(d, d, ...)` array into upper-triangle components."""
    matrix = numpy.asarray(matrix)
    dimension = matrix.shape[0]
    return numpy.array([
        matrix[i, i] if i == j else 0.5 * (matrix[i, j] + matrix[j, i])
        for i, j in triangle(dimension)
    ])

class Field(abc.ABC) :
    """
    Generic discrete field.

    A field is immutable after construction. Samples outside of the valid region are stored as NaN,
    so every consumer that ignores the mask sees the excision.
    """

    COMPONENT_COUNT = 0
    """Component count of the field."""

    def __init__(
        self,
        grid : Grid3,
        values : numpy.ndarray,
        valid : typing.Optional[numpy.ndarray] = None
    ) -> None :
        """
        Constructs a field.

        :param grid:
            Grid of the field.
        :param values:
            Component values of shape `(COMPONENT_COUNT, nx, ny, nz)`; scalar fields also accept
            `(nx, ny, nz)`.
        :param valid:
            Valid region; defaults to the nodes where every component is finite.

        :raises ValueError:
            Shape does not match the grid and the component count.
        """
        values = numpy.array(values, dtype = numpy.float64)
        if values.shape == grid.shape and self.COMPONENT_COUNT == 1 :
            values = values[numpy.newaxis]
        if values.shape != (self.COMPONENT_COUNT,) + grid.shape :
            raise ValueError('Values invalid: Shape does not match grid and component count.')
        finite = numpy.all(numpy.isfinite(values), axis = 0)
        if valid is None :
            valid = finite
        else :
            valid = numpy.array(valid, dtype = bool)
            if valid.shape != grid.shape :
                raise ValueError('Valid region invalid: Shape does not match grid.')
            valid &= finite
        values[:, ~valid] = numpy.nan
        values.flags.writeable = False
        valid.flags.writeable = False
        self.__grid = grid
        self.__values = values
        self.__valid = valid

    @property
    def grid(self) -> Grid3 :
        """Gets the grid of the field."""
        return self.__grid

    @property
    def values(self) -> numpy.ndarray :
        """Gets the read-only component values of shape `(COMPONENT_COUNT, nx, ny, nz)`."""
        return self.__values

    @property
    def valid(self) -> numpy.ndarray :
        """Gets the read-only mask of the valid region."""
        return self.__valid

    def masked(self, mask : numpy.ndarray) -> 'Field' :
        """Gets a copy of the field restricted to the intersection of its valid region and a mask."""
        return type(self)(self.__grid, self.__values, self.__valid & mask)

    def sup(self, mask : typing.Optional[numpy.ndarray] = None) -> float :
        """Gets the pointwise sup of the Euclidean component norm over the valid region."""
        region = self.__valid if mask is None else self.__valid & mask
        if not region.any() :
            return 0.0
        return float(numpy.max(numpy.sqrt(numpy.sum(self.__values[:, region] ** 2, axis = 0))))

class ScalarField(Field) :
    """Scalar field."""

    COMPONENT_COUNT = 1

    @property
    def array(self) -> numpy.ndarray :
        """Gets the values of shape `(nx, ny, nz)`."""
        return self.values[0]

class VectorField3(Field) :
    """Vector field with three components."""

    COMPONENT_COUNT = 3

    def component(self, i : int) -> numpy.ndarray :
        """Gets a component. Values: [`0`, `2`]"""
        return self.values[i]

class VectorField4(Field) :
    """Vector field with four components, index 0 is time."""

    COMPONENT_COUNT = 4

    def component(self, mu : int) -> numpy.ndarray :
        """Gets a component. Values: [`0`, `3`]"""
        return self.values[mu]

class SymmetricField(Field, abc.ABC) :
    """Generic symmetric tensor field storing the upper triangle."""

    DIMENSION = 0
    """Dimension of the tensor."""

    def component(self, i : int, j : int) -> numpy.ndarray :
        """Gets the component `(i, j)`, equal to the component `(j, i)`."""
        if i > j :
            i, j = j, i
        return self.values[triangle(self.DIMENSION).index((i, j))]

    def matrix(self) -> numpy.ndarray :
        """Gets the symmetric components of shape `(d, d, nx, ny, nz)`."""
        return to_matrix(self.values, self.DIMENSION)

    @classmethod
    def from_matrix(
        cls,
        grid : Grid3,
        matrix : numpy.ndarray,
        valid : typing.Optional[numpy.ndarray] = None
    ) -> 'SymmetricField' :
        """Constructs a field from the symmetric part of a `(d, d, nx, ny, nz)` array."""
        return cls(grid, from_matrix(matrix), valid)

class SymTensorField3(SymmetricField) :
    """Symmetric tensor field of dimension three (six stored components)."""

    COMPONENT_COUNT = 6
    DIMENSION = 3

class SymTensorField4(SymmetricField) :
    """Symmetric tensor field of dimension four (ten stored components), index 0 is time."""

    COMPONENT_COUNT = 10
    DIMENSION = 4

def _shift(values : numpy.ndarray, axis : int, offset : int) -> numpy.ndarray :
    """Gets `out` with `out[..., i, ...] = values[..., i + offset, ...]`, NaN outside of the array."""
    out = numpy.full(values.shape, numpy.nan)
    n = values.shape[axis]
    if abs(offset) >= n :
        return out
    target = [slice(None)] * values.ndim
    source = [slice(None)] * values.ndim
    if offset >= 0 :
        target[axis] = slice(0, n - offset)
        source[axis] = slice(offset, n)
    else :
        target[axis] = slice(-offset, n)
        source[axis] = slice(0, n + offset)
    out[tuple(target)] = values[tuple(source)]
    return out

def difference(
    values : numpy.ndarray,
    axis : int,
    order : int,
    h : float,
    closure : bool = False
) -> numpy.ndarray :
    """
    Central finite difference along one of the last three array axes.

    Fourth order where the five-point stencil is finite, second order where only the three-point
    stencil is finite, NaN elsewhere. With `closure` set, second-order one-sided stencils fill the
    remaining nodes so that a finite region keeps finite derivatives up to its boundary.

    :param axis:
        Axis counted over the last three array axes. Values: [`0`, `2`]
    :param order:
        Derivative order. Values: `1`, `2`
    """
    values = numpy.asarray(values, dtype = numpy.float64)
    a = values.ndim - 3 + axis
    f = {offset : _shift(values, a, offset) for offset in range(-3, 4) if offset != 0}
    f[0] = values
    with numpy.errstate(invalid = 'ignore', over = 'ignore') :
        if order == 1 :
            result = (f[-2] - 8.0 * f[-1] + 8.0 * f[1] - f[2]) / (12.0 * h)
            result = numpy.where(numpy.isfinite(result), result, (f[1] - f[-1]) / (2.0 * h))
            if closure :
                forward = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h)
                backward = (3.0 * f[0] - 4.0 * f[-1] + f[-2]) / (2.0 * h)
                result = numpy.where(
                    numpy.isfinite(result),
                    result,
                    numpy.where(numpy.isfinite(forward), forward, backward)
                )
        elif order == 2 :
            h2 = h * h
            result = (
                -f[2] + 16.0 * f[1] - 30.0 * f[0] + 16.0 * f[-1] - f[-2]
            ) / (12.0 * h2)
            result = numpy.where(
                numpy.isfinite(result),
                result,
                (f[1] - 2.0 * f[0] + f[-1]) / h2
            )
            if closure :
                forward = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2
                backward = (2.0 * f[0] - 5.0 * f[-1] + 4.0 * f[-2] - f[-3]) / h2
                result = numpy.where(
                    numpy.isfinite(result),
                    result,
                    numpy.where(numpy.isfinite(forward), forward, backward)
                )
        else :
            raise ValueError('Order invalid: Value neither 1 nor 2.')
    result[~numpy.isfinite(values)] = numpy.nan
    return result

def gradient(values : numpy.ndarray, h : float, closure : bool = False) -> numpy.ndarray :
    """Gets the first derivatives along the three spatial axes, stacked in front: `(3, ...)`."""
    return numpy.array([difference(values, axis, 1, h, closure) for axis in range(3)])

def hessian(values : numpy.ndarray, h : float, closure : bool = False) -> numpy.ndarray :
    """
    Gets the second derivatives, stacked in front: `(3, 3, ...)`.

    Diagonal entries use the second-order stencil, mixed entries compose first derivatives.
    """
    first = gradient(values, h, closure)
    result = numpy.empty((3, 3) + numpy.shape(values))
    for i in range(3) :
        result[i, i] = difference(values, i, 2, h, closure)
        for j in range(i + 1, 3) :
            mixed = difference(first[j], i, 1, h, closure)
            result[i, j] = mixed
            result[j, i] = mixed
    return result

def derivative(field : ScalarField, axis : int, order : int = 1) -> ScalarField :
    """
    Gets the finite difference derivative of a scalar field.

    The valid region of the result shrinks to the nodes whose stencil lies in the valid region of
    the field.

    :param axis:
        Coordinate axis. Values: [`1`, `3`]
    :param order:
        Derivative order. Values: `1`, `2`

    :raises StencilException:
        Axis out of range or field too small for the stencil.
    """
    if axis not in (1, 2, 3) :
        raise StencilException('Axis invalid: Value out of range.')
    if order not in (1, 2) :
        raise ValueError('Order invalid: Value neither 1 nor 2.')
    grid = field.grid
    if grid.shape[axis - 1] < 5 :
        raise StencilException('Field invalid: Too small for the stencil.')
    result = difference(field.array, axis - 1, order, grid.h)
    return ScalarField(grid, result, field.valid & numpy.isfinite(result))

class SphereRule :
    """Latitude-longitude product rule: Gauss-Legendre in the polar angle, uniform in the azimuth."""

    LATITUDES_DEFAULT = 32
    """Default node count in the polar angle."""
    LONGITUDES_DEFAULT = 64
    """Default node count in the azimuth."""
    ORDER_MINIMUM = 4
    """Minimum node count per angle."""

    def __init__(
        self,
        latitudes : int = LATITUDES_DEFAULT,
        longitudes : int = LONGITUDES_DEFAULT
    ) -> None :
        """
        Constructs a rule.

        :raises QuadratureException:
            Node count below `ORDER_MINIMUM`.
        """
        if latitudes < SphereRule.ORDER_MINIMUM or longitudes < SphereRule.ORDER_MINIMUM :
            raise QuadratureException('Quadrature order invalid: Value below minimum.')
        self.__latitudes = latitudes
        self.__longitudes = longitudes
        cosines, weights = scipy.special.roots_legendre(latitudes)
        azimuths = 2.0 * math.pi * numpy.arange(longitudes) / longitudes
        cosine, azimuth = numpy.meshgrid(cosines, azimuths, indexing = 'ij')
        sine = numpy.sqrt(1.0 - cosine ** 2)
        self.__normals = numpy.array([
            (sine * numpy.cos(azimuth)).ravel(),
            (sine * numpy.sin(azimuth)).ravel(),
            cosine.ravel(),
        ])
        self.__weights = numpy.repeat(weights, longitudes) * (2.0 * math.pi / longitudes)

    @property
    def latitudes(self) -> int :
        """Gets the node count in the polar angle."""
        return self.__latitudes

    @property
    def longitudes(self) -> int :
        """Gets the node count in the azimuth."""
        return self.__longitudes

    def nodes(
        self,
        radius : float
    ) -> typing.Tuple[numpy.ndarray, numpy.ndarray, numpy.ndarray] :
        """
        Gets the nodes on the coordinate sphere of the given radius.

        Returns the points `(3, N)`, the Euclidean unit outer normals `(3, N)` and the Euclidean
        area weights `(N,)`.
        """
        return radius * self.__normals, self.__normals, radius * radius * self.__weights

def sphere_integral(
    source : typing.Union[ScalarField, typing.Callable[[numpy.ndarray], numpy.ndarray]],
    radius : float,
    rule : typing.Optional[SphereRule] = None
) -> float :
    """
    Integrates over the coordinate sphere of the given radius with the Euclidean area element.

    The source is either a scalar field, sampled by cubic interpolation, or a sampler mapping
    points `(3, N)` to values `(N,)`.

    :raises QuadratureException:
        Sphere exits the valid region of the field or radius not positive.
    """
    if not radius > 0.0 :
        raise QuadratureException('Radius invalid: Value not positive.')
    rule = rule or SphereRule()
    points, _, weights = rule.nodes(radius)
    if isinstance(source, Field) :
        try :
            values = interpolate(source, points)
        except OutOfConeException :
            raise QuadratureException('Sphere invalid: Sphere exits grid.')
    else :
        values = numpy.asarray(source(points), dtype = numpy.float64)
    return float(numpy.dot(values, weights))

def _lagrange_weights(s : numpy.ndarray) -> numpy.ndarray :
    """Gets the cubic Lagrange weights `(..., 4)` for nodes `0, 1, 2, 3` at positions `s`."""
    return numpy.stack([
        -(s - 1.0) * (s - 2.0) * (s - 3.0) / 6.0,
        s * (s - 2.0) * (s - 3.0) / 2.0,
        -s * (s - 1.0) * (s - 3.0) / 2.0,
        s * (s - 1.0) * (s - 2.0) / 6.0,
    ], axis = -1)

def _stencil(position : numpy.ndarray, count : int) -> typing.Tuple[numpy.ndarray, numpy.ndarray] :
    """Gets the first of four stencil nodes and the weights for fractional positions."""
    first = numpy.clip(numpy.floor(position).astype(numpy.int64) - 1, 0, count - 4)
    return first, _lagrange_weights(position - first)

def _interpolate_spatial(
    grid : Grid3,
    values : numpy.ndarray,
    points : numpy.ndarray
) -> numpy.ndarray :
    """Interpolates component values `(C, nx, ny, nz)` at points `(3, N)`, returning `(C, N)`."""
    index = grid.fractional_index(points)
    tolerance = 1e-9
    for axis in range(3) :
        if (
            numpy.any(index[axis] < -tolerance) or
            numpy.any(index[axis] > grid.shape[axis] - 1 + tolerance)
        ) :
            raise OutOfConeException('Point invalid: Outside of grid.')
    firsts, weights = zip(*(_stencil(index[axis], grid.shape[axis]) for axis in range(3)))
    offsets = numpy.arange(4)
    i = (firsts[0][:, None] + offsets)[:, :, None, None]
    j = (firsts[1][:, None] + offsets)[:, None, :, None]
    k = (firsts[2][:, None] + offsets)[:, None, None, :]
    samples = values[:, i, j, k]
    result = numpy.einsum('cnabd,na,nb,nd->cn', samples, weights[0], weights[1], weights[2])
    if not numpy.all(numpy.isfinite(result)) :
        raise OutOfConeException('Point invalid: Stencil outside of valid region.')
    return result

def interpolate(
    source : typing.Union[Field, 'SpacetimeSlab'],
    points : numpy.ndarray,
    t : typing.Union[float, numpy.ndarray, None] = None
) -> numpy.ndarray :
    """
    Interpolates a field or a slab with tensor-product cubic Lagrange polynomials.

    Exact for polynomials up to degree three per axis (and in time for slabs).

    For a field, returns `(C, N)` values, `(N,)` for scalar fields. For a slab, returns `(20, N)`
    values: the ten components of `gamma^{mu nu}` followed by the ten components of its time
    derivative.

    :param points:
        Points of shape `(3, N)` or a single point of shape `(3,)`.
    :param t:
        Time of the points, required for slabs.

    :raises OutOfConeException:
        Point outside of the valid region (or of the boost region for slabs).
    """
    points = numpy.asarray(points, dtype = numpy.float64)
    single = points.ndim == 1
    if single :
        points = points[:, numpy.newaxis]
    if isinstance(source, Field) :
        result = _interpolate_spatial(source.grid, source.values, points)
        if isinstance(source, ScalarField) :
            result = result[0]
    elif isinstance(source, SpacetimeSlab) :
        if t is None :
            raise ValueError('Time invalid: Value required for slabs.')
        result = source._interpolate_points(points, numpy.broadcast_to(
            numpy.asarray(t, dtype = numpy.float64), points.shape[1 :]
        ))
    else :
        raise TypeError('Source invalid: Neither field nor slab.')
    return result[..., 0] if single else result

class SpacetimeSlab :
    """
    Discrete spacetime slab: the inverse metric `gamma^{mu nu}` and its time derivative on uniform
    time levels, each level with its active (cone-masked) region.

    The level closest to `t = 0` is the reference level carrying the Cauchy data. Moving away from
    it, every mask is contained in its predecessor eroded by the erosion width.
    """

    CFL_DEFAULT = 0.25
    """Default bound of `dt / h`."""
    LEVEL_COUNT_INTERPOLATION = 4
    """Level count of the cubic time stencil."""

    def __init__(
        self,
        grid : Grid3,
        times : typing.Sequence[float],
        metrics : typing.Sequence[SymTensorField4],
        rates : typing.Sequence[SymTensorField4],
        masks : typing.Sequence[numpy.ndarray],
        cfl : float = CFL_DEFAULT,
        erosion : typing.Optional[int] = None
    ) -> None :
        """
        Constructs a slab.

        :param times:
            Strictly increasing, uniformly spaced time levels.
        :param metrics:
            `gamma^{mu nu}` per level.
        :param rates:
            `d/dt gamma^{mu nu}` per level.
        :param masks:
            Active region per level.
        :param cfl:
            Bound of `dt / h`.
        :param erosion:
            Erosion width between consecutive masks; defaults to the grid margin.

        :raises ValueError:
            Level data inconsistent or masks not nested.
        :raises CflException:
            Time step exceeds the CFL bound.
        """
        times = tuple(float(t) for t in times)
        count = len(times)
        if count == 0 or len(metrics) != count or len(rates) != count or len(masks) != count :
            raise ValueError('Levels invalid: Counts differ or zero.')
        for field in (*metrics, *rates) :
            if field.grid != grid :
                raise ValueError('Levels invalid: Grids differ.')
        dt = 0.0
        if count > 1 :
            steps = numpy.diff(times)
            dt = float(steps[0])
            if not dt > 0.0 or numpy.any(numpy.abs(steps - dt) > 1e-9 * max(1.0, abs(dt))) :
                raise ValueError('Times invalid: Not strictly increasing with uniform step.')
            if dt > cfl * grid.h * (1.0 + 1e-12) :
                raise CflException('Time step invalid: Value exceeds CFL bound.')
        erosion = grid.margin if erosion is None else erosion
        masks = [numpy.array(mask, dtype = bool) for mask in masks]
        reference = int(numpy.argmin(numpy.abs(times)))
        for level in range(count) :
            if level == reference :
                continue
            previous = level - 1 if level > reference else level + 1
            if numpy.any(masks[level] & ~erode(masks[previous], erosion)) :
                raise ValueError('Masks invalid: Level not contained in eroded predecessor.')
        for mask in masks :
            mask.flags.writeable = False
        self.__grid = grid
        self.__times = times
        self.__dt = dt
        self.__metrics = tuple(metrics)
        self.__rates = tuple(rates)
        self.__masks = tuple(masks)
        self.__cfl = cfl
        self.__erosion = erosion
        self.__reference = reference
        self.__lock = threading.Lock()
        self.__gradients : typing.Dict[int, numpy.ndarray] = {}
        extent = max(abs(t) for t in times)
        outer = self.__masks[0] if abs(times[0]) >= abs(times[-1]) else self.__masks[-1]
        if extent == 0.0 or not outer.any() :
            self.__theta = 0.0
        else :
            sigma = numpy.sqrt(1.0 + grid.radius() ** 2)
            self.__theta = extent / float(numpy.min(sigma[outer]))

    @classmethod
    def static(
        cls,
        grid : Grid3,
        metric : SymTensorField4,
        times : typing.Sequence[float],
        mask : typing.Optional[numpy.ndarray] = None,
        cfl : float = CFL_DEFAULT
    ) -> 'SpacetimeSlab' :
        """
        Constructs the slab of a time-independent metric.

        The mask of the reference level is the given mask (default: valid region of the metric);
        the other masks are eroded by the grid margin per level away from the reference.
        """
        times = tuple(times)
        mask = metric.valid if mask is None else metric.valid & mask
        reference = int(numpy.argmin(numpy.abs(times)))
        masks = [
            erode(mask, grid.margin * abs(level - reference))
            for level in range(len(times))
        ]
        rate = SymTensorField4(grid, numpy.zeros((10,) + grid.shape), metric.valid)
        return cls(
            grid,
            times,
            [metric.masked(m) for m in masks],
            [rate.masked(m) for m in masks],
            masks,
            cfl
        )

    @property
    def grid(self) -> Grid3 :
        """Gets the spatial grid."""
        return self.__grid

    @property
    def times(self) -> typing.Tuple[float, ...] :
        """Gets the time levels."""
        return self.__times

    @property
    def dt(self) -> float :
        """Gets the time step (zero for a single level)."""
        return self.__dt

    @property
    def level_count(self) -> int :
        """Gets the level count."""
        return len(self.__times)

    @property
    def reference_level(self) -> int :
        """Gets the index of the level closest to `t = 0`."""
        return self.__reference

    @property
    def cfl(self) -> float :
        """Gets the bound of `dt / h`."""
        return self.__cfl

    @property
    def erosion(self) -> int :
        """Gets the erosion width between consecutive masks."""
        return self.__erosion

    @property
    def theta(self) -> float :
        """Gets the effective boost parameter: largest `|t|` over the smallest `sigma` retained."""
        return self.__theta

    def metric(self, level : int) -> SymTensorField4 :
        """Gets `gamma^{mu nu}` at a level."""
        return self.__metrics[level]

    def rate(self, level : int) -> SymTensorField4 :
        """Gets `d/dt gamma^{mu nu}` at a level."""
        return self.__rates[level]

    def mask(self, level : int) -> numpy.ndarray :
        """Gets the active region at a level."""
        return self.__masks[level]

    def gradient(self, level : int) -> numpy.ndarray :
        """Gets the spatial derivatives of `gamma^{mu nu}` at a level as `(3, 10, nx, ny, nz)`."""
        with self.__lock :
            if level not in self.__gradients :
                values = self.__metrics[level].values
                result = gradient(values, self.__grid.h)
                result.flags.writeable = False
                self.__gradients[level] = result
            return self.__gradients[level]

    def mask_erosion_defect(self) -> int :
        """Gets the count of nodes violating the mask nesting (zero for a valid slab)."""
        defect = 0
        for level in range(self.level_count) :
            if level == self.__reference :
                continue
            previous = level - 1 if level > self.__reference else level + 1
            defect += int(numpy.count_nonzero(
                self.__masks[level] & ~erode(self.__masks[previous], self.__erosion)
            ))
        return defect

    def inside_cone(self, points : numpy.ndarray, t : numpy.ndarray) -> numpy.ndarray :
        """Gets whether points `(3, ...)` at times `(...)` lie in the boost region of the slab."""
        sigma = numpy.sqrt(1.0 + numpy.sum(numpy.asarray(points) ** 2, axis = 0))
        t = numpy.asarray(t, dtype = numpy.float64)
        return (
            (numpy.abs(t) <= self.__theta * sigma * (1.0 + 1e-12)) &
            (t >= self.__times[0] - 1e-12) &
            (t <= self.__times[-1] + 1e-12)
        )

    def __time_stencil(self, t : numpy.ndarray) -> typing.Tuple[numpy.ndarray, numpy.ndarray] :
        count = self.level_count
        if count < SpacetimeSlab.LEVEL_COUNT_INTERPOLATION :
            raise StencilException('Slab invalid: Too few levels for cubic time interpolation.')
        position = (t - self.__times[0]) / self.__dt
        return _stencil(position, count)

    def __check_cone(self, points : numpy.ndarray, t : numpy.ndarray) -> None :
        if (
            numpy.any(t < self.__times[0] - 1e-12) or
            numpy.any(t > self.__times[-1] + 1e-12)
        ) :
            raise OutOfConeException('Point invalid: Time outside of slab.')
        sigma = numpy.sqrt(1.0 + numpy.sum(points ** 2, axis = 0))
        if numpy.any(numpy.abs(t) > self.__theta * sigma * (1.0 + 1e-12)) :
            raise OutOfConeException('Point invalid: Outside of boost region.')

    def _interpolate_points(self, points : numpy.ndarray, t : numpy.ndarray) -> numpy.ndarray :
        self.__check_cone(points, t)
        first, weights = self.__time_stencil(t)
        result = numpy.zeros((20, points.shape[1]))
        for level in numpy.unique(first[:, None] + numpy.arange(4)) :
            use = (first[:, None] + numpy.arange(4)) == level
            selected = numpy.any(use, axis = 1)
            weight = numpy.sum(numpy.where(use, weights, 0.0), axis = 1)[selected]
            values = numpy.concatenate([
                self.__metrics[level].values, self.__rates[level].values
            ])
            result[:, selected] += weight * _interpolate_spatial(
                self.__grid, values, points[:, selected]
            )
        return result

    def interpolate_nodes(
        self,
        arrays : typing.Callable[[int], numpy.ndarray],
        t : numpy.ndarray,
        region : numpy.ndarray
    ) -> numpy.ndarray :
        """
        Interpolates per-level node arrays in time at the nodes of a region.

        :param arrays:
            Maps a level to node values of shape `(C, nx, ny, nz)`.
        :param t:
            Time per node `(nx, ny, nz)`.
        :param region:
            Nodes to evaluate; the others are NaN in the result.

        :raises OutOfConeException:
            A node of the region lies outside of the boost region.
        """
        coordinates = self.__grid.coordinates()
        times = numpy.asarray(t, dtype = numpy.float64)[region]
        self.__check_cone(coordinates[:, region], times)
        first, weights = self.__time_stencil(times)
        result = None
        for level in numpy.unique(first[:, None] + numpy.arange(4)) :
            use = (first[:, None] + numpy.arange(4)) == level
            weight = numpy.sum(numpy.where(use, weights, 0.0), axis = 1)
            values = arrays(level)[..., region]
            if result is None :
                result = numpy.zeros(values.shape)
            nonzero = weight != 0.0
            # Nodes whose stencil skips this level must not pick up its NaN samples.
            result[..., nonzero] += weight[nonzero] * values[..., nonzero]
        out = numpy.full(result.shape[: -1] + self.__grid.shape, numpy.nan)
        out[..., region] = result
        return out
