"""
Pointwise Lorentzian and graph geometry.

Arrays carry their tensor indices in front and the point axes behind (`(4, 4, ...)` for a
spacetime metric), so every kernel works on single points, flat point sets and grids alike.
Second fundamental forms use `k(X, Y) = <X, nabla_Y T>`: expanding slices have positive mean
curvature.
"""

from .fields import (
    Grid3,
    ScalarField,
    VectorField3,
    VectorField4,
    SymTensorField3,
    SymTensorField4,
    SpacetimeSlab,
    difference,
    from_matrix,
    gradient,
    to_matrix,
)
from .exceptions import *

import dataclasses
import logging
import typing

import numpy

logger = logging.getLogger(__name__)

KAPPA_DEFAULT = 0.2
"""Default decay exponent of the height bound `|u| <= (theta / 2) sigma^(-kappa)`."""
DENOMINATOR_MINIMUM = 0.5
"""Lower bound of `1 + <beta, Du>`."""
TILT_MAXIMUM = 0.5
"""Upper bound of the tilt `|U|_g`."""
SLOPE_STRICT = 0.01
"""Euclidean slope bound of the strict spacelike condition (reported, not enforced)."""

def invert(matrix : numpy.ndarray) -> numpy.ndarray :
    """
    Inverts square matrices `(d, d, ...)` pointwise.

    Points with non-finite entries are inverted as identities and returned as NaN.
    """
    matrix = numpy.asarray(matrix, dtype = numpy.float64)
    dimension = matrix.shape[0]
    moved = numpy.moveaxis(matrix, (0, 1), (-2, -1)).copy()
    broken = ~numpy.all(numpy.isfinite(moved), axis = (-2, -1))
    moved[broken] = numpy.eye(dimension)
    inverse = numpy.linalg.inv(moved)
    inverse[broken] = numpy.nan
    return numpy.moveaxis(inverse, (-2, -1), (0, 1))

def lower_derivatives(metric : numpy.ndarray, derivatives : numpy.ndarray) -> numpy.ndarray :
    """
    Converts derivatives of an inverse metric `(n, d, d, ...)` into derivatives of the metric:
    `d g = -g (d g^-1) g`.
    """
    return -numpy.einsum('ab...,ebc...,cd...->ead...', metric, derivatives, metric, optimize = True)

def connection(
    metric : numpy.ndarray,
    derivatives : numpy.ndarray,
    inverse : typing.Optional[numpy.ndarray] = None
) -> typing.Tuple[numpy.ndarray, numpy.ndarray] :
    """
    Gets the Christoffel symbols of the first kind `G_{d,ab}` and of the second kind `G^c_{ab}`.

    :param metric:
        Metric `g_ab` of shape `(d, d, ...)`.
    :param derivatives:
        Partial derivatives `d_e g_ab` of shape `(d, d, d, ...)`, derivative index first.
    :param inverse:
        Inverse metric, computed if not given.
    """
    if inverse is None :
        inverse = invert(metric)
    first = 0.5 * (
        numpy.einsum('adb...->dab...', derivatives) +
        numpy.einsum('bda...->dab...', derivatives) -
        derivatives
    )
    second = numpy.einsum('cd...,dab...->cab...', inverse, first)
    return first, second

def christoffel(
    metric : numpy.ndarray,
    derivatives : numpy.ndarray,
    inverse : typing.Optional[numpy.ndarray] = None
) -> typing.Tuple[numpy.ndarray, numpy.ndarray, numpy.ndarray] :
    """
    Gets the Christoffel symbols of both kinds and the contracted symbol `G^c = g^{ab} G^c_{ab}`.

    Works in any dimension; see `connection` for the array layout.
    """
    if inverse is None :
        inverse = invert(metric)
    first, second = connection(metric, derivatives, inverse)
    return first, second, numpy.einsum('ab...,cab...->c...', inverse, second)

def _connection_derivatives(
    inverse : numpy.ndarray,
    derivatives : numpy.ndarray,
    second_derivatives : numpy.ndarray,
    first : numpy.ndarray
) -> numpy.ndarray :
    """Gets `d_e G^c_{ab}` of shape `(d, d, d, d, ...)` indexed `[e, c, a, b]`."""
    first_derivatives = 0.5 * (
        numpy.einsum('eadb...->edab...', second_derivatives) +
        numpy.einsum('ebda...->edab...', second_derivatives) -
        second_derivatives
    )
    inverse_derivatives = -numpy.einsum(
        'cp...,epq...,qd...->ecd...', inverse, derivatives, inverse, optimize = True
    )
    return (
        numpy.einsum('ecd...,dab...->ecab...', inverse_derivatives, first, optimize = True) +
        numpy.einsum('cd...,edab...->ecab...', inverse, first_derivatives, optimize = True)
    )

def _ricci(second : numpy.ndarray, second_derivatives : numpy.ndarray) -> numpy.ndarray :
    return (
        numpy.einsum('ccab...->ab...', second_derivatives) -
        numpy.einsum('bcac...->ab...', second_derivatives) +
        numpy.einsum('ccd...,dab...->ab...', second, second, optimize = True) -
        numpy.einsum('cbd...,dac...->ab...', second, second, optimize = True)
    )

def ricci(
    metric : numpy.ndarray,
    derivatives : numpy.ndarray,
    second_derivatives : numpy.ndarray,
    inverse : typing.Optional[numpy.ndarray] = None
) -> numpy.ndarray :
    """
    Gets the Ricci tensor `R_ab` of a metric of any dimension from its partial derivatives.

    :param metric:
        Metric `g_ab` of shape `(d, d, ...)`.
    :param derivatives:
        `d_e g_ab` of shape `(d, d, d, ...)`.
    :param second_derivatives:
        `d_e d_f g_ab` of shape `(d, d, d, d, ...)`, indexed `[e, f, a, b]`.
    """
    if inverse is None :
        inverse = invert(metric)
    first, second = connection(metric, derivatives, inverse)
    return _ricci(
        second, _connection_derivatives(inverse, derivatives, second_derivatives, first)
    )

def scalar_curvature(
    metric : numpy.ndarray,
    derivatives : numpy.ndarray,
    second_derivatives : numpy.ndarray
) -> numpy.ndarray :
    """Gets the scalar curvature `g^{ab} R_ab`."""
    inverse = invert(metric)
    return numpy.einsum('ab...,ab...->...', inverse, ricci(metric, derivatives, second_derivatives,
        inverse))

def harmonic_ricci(
    inverse : numpy.ndarray,
    derivatives : numpy.ndarray,
    second_derivatives : typing.Optional[numpy.ndarray] = None
) -> typing.Tuple[numpy.ndarray, numpy.ndarray] :
    """
    Gets the raised Ricci tensor `R^{mu nu}` and its harmonically reduced part
    `R_h^{mu nu} = R^{mu nu} - (gamma^{mu a} d_a G^nu + gamma^{nu a} d_a G^mu) / 2`, both from the
    inverse metric `gamma^{mu nu}` and its partial derivatives.

    The principal part of the reduced tensor is `gamma^{ab} d_a d_b gamma^{mu nu} / 2`, so
    evaluating it with vanishing second derivatives yields the lower-order part of the reduced
    vacuum equations.

    :param inverse:
        `gamma^{mu nu}` of shape `(d, d, ...)`.
    :param derivatives:
        `d_e gamma^{mu nu}` of shape `(d, d, d, ...)`.
    :param second_derivatives:
        `d_e d_f gamma^{mu nu}` of shape `(d, d, d, d, ...)`; zero if not given.
    """
    metric = invert(inverse)
    lower = lower_derivatives(metric, derivatives)
    products = numpy.einsum(
        'ab...,ebc...,cd...,fdg...,gh...->efah...',
        metric, derivatives, metric, derivatives, metric,
        optimize = True
    )
    lower_second = products + numpy.einsum('efah...->feah...', products)
    if second_derivatives is not None :
        lower_second = lower_second - numpy.einsum(
            'ab...,efbc...,cd...->efad...', metric, second_derivatives, metric, optimize = True
        )
    first, second = connection(metric, lower, inverse)
    second_derivatives_connection = _connection_derivatives(inverse, lower, lower_second, first)
    raised = numpy.einsum(
        'ma...,nb...,ab...->mn...', inverse, inverse, _ricci(second, second_derivatives_connection),
        optimize = True
    )
    contracted_derivatives = (
        numpy.einsum('eab...,nab...->en...', derivatives, second) +
        numpy.einsum('ab...,enab...->en...', inverse, second_derivatives_connection)
    )
    gauge = numpy.einsum('ma...,an...->mn...', inverse, contracted_derivatives)
    return raised, raised - 0.5 * (gauge + numpy.einsum('mn...->nm...', gauge))

def light_speeds(inverse : numpy.ndarray) -> numpy.ndarray :
    """
    Gets the largest coordinate speed of characteristics along the coordinate axes, pointwise.

    Roots `v` of `gamma^{00} v^2 - 2 gamma^{0i} n_i v + gamma^{ij} n_i n_j = 0` for the unit axis
    covectors `n`.
    """
    speeds = []
    for i in range(1, 4) :
        a = inverse[0, 0]
        b = inverse[0, i]
        c = inverse[i, i]
        root = numpy.sqrt(numpy.maximum(b * b - a * c, 0.0))
        speeds.append(numpy.abs((b + root) / a))
        speeds.append(numpy.abs((b - root) / a))
    return numpy.max(numpy.array(speeds), axis = 0)

class AdmMetric :
    """3+1 split of a spacetime metric: lapse, shift and spatial metric."""

    def __init__(self, lapse : ScalarField, shift : VectorField3, g : SymTensorField3) -> None :
        """
        Constructs a 3+1 metric.

        :raises ValueError:
            Grids differ, lapse not positive or spatial metric not positive definite.
        :raises SlicingException:
            Slices not spacelike (`alpha^2 - |beta|^2 <= 0`).
        """
        grid = lapse.grid
        if shift.grid != grid or g.grid != grid :
            raise ValueError('Metric invalid: Grids differ.')
        valid = lapse.valid & shift.valid & g.valid
        if numpy.any(lapse.array[valid] <= 0.0) :
            raise ValueError('Lapse invalid: Value not positive.')
        matrix = g.matrix()
        eigenvalues = numpy.linalg.eigvalsh(numpy.moveaxis(matrix[:, :, valid], -1, 0))
        if numpy.any(eigenvalues <= 0.0) :
            raise ValueError('Spatial metric invalid: Not positive definite.')
        shift_lower = numpy.einsum('ij...,j...->i...', matrix, shift.values)
        norm = numpy.einsum('i...,i...->...', shift_lower, shift.values)
        if numpy.any(lapse.array[valid] ** 2 - norm[valid] <= 0.0) :
            raise SlicingException('Metric invalid: Slices not spacelike.')
        self.__lapse = lapse
        self.__shift = shift
        self.__g = g
        self.__valid = valid
        self.__shift_lower = shift_lower
        self.__g_inverse = invert(matrix)

    @property
    def grid(self) -> Grid3 :
        """Gets the grid."""
        return self.__lapse.grid

    @property
    def lapse(self) -> ScalarField :
        """Gets the lapse `alpha`."""
        return self.__lapse

    @property
    def shift(self) -> VectorField3 :
        """Gets the shift `beta^i`."""
        return self.__shift

    @property
    def shift_lower(self) -> numpy.ndarray :
        """Gets the lowered shift `beta_i = g_ij beta^j` of shape `(3, nx, ny, nz)`."""
        return self.__shift_lower

    @property
    def g(self) -> SymTensorField3 :
        """Gets the spatial metric `g_ij`."""
        return self.__g

    @property
    def g_inverse(self) -> numpy.ndarray :
        """Gets the inverse spatial metric `g^ij` of shape `(3, 3, nx, ny, nz)`."""
        return self.__g_inverse

    @property
    def valid(self) -> numpy.ndarray :
        """Gets the common valid region."""
        return self.__valid

def four_metric(lapse, shift, g) -> typing.Tuple[numpy.ndarray, numpy.ndarray] :
    """
    Assembles `gamma_{mu nu}` and `gamma^{mu nu}`, both `(4, 4, ...)`, from arrays of the lapse
    `(...)`, the shift `beta^i` `(3, ...)` and the spatial metric `(3, 3, ...)`.
    """
    g_inverse = invert(g)
    shift_lower = numpy.einsum('ij...,j...->i...', g, shift)
    norm = numpy.einsum('i...,i...->...', shift_lower, shift)
    shape = numpy.shape(lapse)
    lower = numpy.empty((4, 4) + shape)
    upper = numpy.empty((4, 4) + shape)
    lower[0, 0] = -(lapse * lapse - norm)
    lower[0, 1 :] = shift_lower
    lower[1 :, 0] = shift_lower
    lower[1 :, 1 :] = g
    upper[0, 0] = -1.0 / (lapse * lapse)
    upper[0, 1 :] = shift / (lapse * lapse)
    upper[1 :, 0] = shift / (lapse * lapse)
    upper[1 :, 1 :] = g_inverse - numpy.einsum('i...,j...->ij...', shift, shift) / (lapse * lapse)
    return lower, upper

def adm_to_four(adm : AdmMetric) -> typing.Tuple[SymTensorField4, SymTensorField4] :
    """
    Assembles the spacetime metric `gamma_{mu nu}` and its inverse `gamma^{mu nu}` from a 3+1
    metric.
    """
    lower, upper = four_metric(adm.lapse.array, adm.shift.values, adm.g.matrix())
    return (
        SymTensorField4.from_matrix(adm.grid, lower, adm.valid),
        SymTensorField4.from_matrix(adm.grid, upper, adm.valid),
    )

def split(upper : numpy.ndarray) -> typing.Tuple[numpy.ndarray, numpy.ndarray, numpy.ndarray] :
    """
    Splits arrays of `gamma^{mu nu}` `(4, 4, ...)` into the lapse, the shift `beta^i` and the
    spatial metric `g_ij`.

    :raises SlicingException:
        `gamma^{00} >= 0` at a finite point.
    """
    upper = numpy.asarray(upper)
    time = upper[0, 0]
    if numpy.any(time[numpy.isfinite(time)] >= 0.0) :
        raise SlicingException('Metric invalid: Time function not timelike.')
    lapse = 1.0 / numpy.sqrt(-time)
    shift = upper[0, 1 :] / (-time)
    g_inverse = upper[1 :, 1 :] + numpy.einsum('i...,j...->ij...', shift, shift) * -time
    return lapse, shift, invert(g_inverse)

def four_to_adm(upper : SymTensorField4) -> AdmMetric :
    """
    Splits an inverse spacetime metric into lapse, shift and spatial metric.

    :raises SlicingException:
        `gamma^{00} >= 0` anywhere in the valid region.
    """
    lapse, shift, g = split(upper.matrix())
    grid = upper.grid
    return AdmMetric(
        ScalarField(grid, lapse, upper.valid),
        VectorField3(grid, shift, upper.valid),
        SymTensorField3.from_matrix(grid, g, upper.valid)
    )

def slice_normal(adm : AdmMetric) -> VectorField4 :
    """Gets the future unit normal `T = (d_t - beta) / alpha` of the time slices."""
    lapse = adm.lapse.array
    values = numpy.concatenate([
        (1.0 / lapse)[numpy.newaxis],
        -adm.shift.values / lapse,
    ])
    return VectorField4(adm.grid, values, adm.valid)

def slab_derivatives(slab : SpacetimeSlab, level : int) -> typing.Tuple[numpy.ndarray, numpy.ndarray] :
    """
    Gets `gamma^{mu nu}` `(4, 4, ...)` and its partial derivatives `(4, 4, 4, ...)` at a slab
    level: the time derivative from the stored rate, spatial derivatives by finite differences.
    """
    upper = slab.metric(level).matrix()
    derivatives = numpy.empty((4,) + upper.shape)
    derivatives[0] = slab.rate(level).matrix()
    spatial = slab.gradient(level)
    for i in range(3) :
        derivatives[i + 1] = to_matrix(spatial[i], 4)
    return upper, derivatives

def spacetime_christoffel(
    slab : SpacetimeSlab,
    level : int
) -> typing.Tuple[numpy.ndarray, numpy.ndarray, numpy.ndarray] :
    """
    Gets the Christoffel symbols of both kinds and the contracted symbol `G^mu` of the slab metric
    at a level.

    :raises StencilException:
        Level has no node with a full spatial stencil.
    """
    upper, derivatives = slab_derivatives(slab, level)
    metric = invert(upper)
    result = christoffel(metric, lower_derivatives(metric, derivatives), upper)
    if not numpy.any(numpy.isfinite(result[2][0])) :
        raise StencilException('Level invalid: Derivative margin exhausted.')
    return result

def slice_second_form(slab : SpacetimeSlab, level : int) -> SymTensorField3 :
    """
    Gets the second fundamental form `k0_ij = (d_t g_ij - (L_beta g)_ij) / (2 alpha)` of the time
    slice at a slab level.

    :raises IndexError:
        Level out of range.
    """
    if not 0 <= level < slab.level_count :
        raise IndexError('Level invalid: Value out of range.')
    grid = slab.grid
    upper, derivatives = slab_derivatives(slab, level)
    lapse, shift, g = split(upper)
    metric = invert(upper)
    rate = lower_derivatives(metric, derivatives[: 1])[0][1 :, 1 :]
    g_derivatives = gradient(g, grid.h)
    shift_derivatives = gradient(shift, grid.h)
    lie = (
        numpy.einsum('k...,kij...->ij...', shift, g_derivatives) +
        numpy.einsum('kj...,ik...->ij...', g, shift_derivatives) +
        numpy.einsum('ik...,jk...->ij...', g, shift_derivatives)
    )
    form = (rate - lie) / (2.0 * lapse)
    return SymTensorField3.from_matrix(grid, form, slab.mask(level))

@dataclasses.dataclass(frozen = True, eq = False)
class GraphFrame :
    """
    Pointwise graph apparatus over arrays of points.

    Spatial tensors are `(3, ...)`/`(3, 3, ...)`, spacetime vectors `(4, ...)`.
    """

    lapse : numpy.ndarray
    shift : numpy.ndarray
    shift_lower : numpy.ndarray
    g : numpy.ndarray
    g_inverse : numpy.ndarray
    du : numpy.ndarray
    denominator : numpy.ndarray
    tilt : numpy.ndarray
    tilt_norm : numpy.ndarray
    nu : numpy.ndarray
    normal : numpy.ndarray
    slice_normal : numpy.ndarray

    def metric(self) -> numpy.ndarray :
        """Gets the induced metric `g + beta (x) du + du (x) beta - (alpha^2 - |beta|^2) du (x) du`."""
        norm = numpy.einsum('i...,i...->...', self.shift_lower, self.shift)
        return (
            self.g +
            numpy.einsum('i...,j...->ij...', self.shift_lower, self.du) +
            numpy.einsum('i...,j...->ij...', self.du, self.shift_lower) -
            (self.lapse ** 2 - norm) * numpy.einsum('i...,j...->ij...', self.du, self.du)
        )

    def inverse_metric(self) -> numpy.ndarray :
        """Gets the inverse induced metric in closed form."""
        lapse2 = self.lapse ** 2
        tilted = self.shift - self.lapse * self.tilt
        return (
            self.g_inverse -
            numpy.einsum('i...,j...->ij...', self.shift, self.shift) / lapse2 +
            (self.nu ** 2 / lapse2) * numpy.einsum('i...,j...->ij...', tilted, tilted)
        )

    def frame(self) -> numpy.ndarray :
        """Gets the tangent frame `alpha_k = d_k + u_k d_t` as `(3, 4, ...)`."""
        frame = numpy.zeros((3, 4) + self.lapse.shape)
        frame[:, 0] = self.du
        for k in range(3) :
            frame[k, k + 1] = 1.0
        return frame

    def coframe(self) -> numpy.ndarray :
        """
        Gets the coframe `alpha^i` as `(3, 4, ...)` (time component first), dual to the tangent
        frame and annihilating the normal.
        """
        tilt_lower = numpy.einsum('ij...,j...->i...', self.g, self.tilt)
        tilted = self.shift - self.lapse * self.tilt
        nu2 = self.nu ** 2
        coframe = numpy.empty((3, 4) + self.lapse.shape)
        coframe[:, 0] = nu2 / self.denominator * tilted
        coframe[:, 1 :] = (
            numpy.eye(3).reshape((3, 3) + (1,) * self.lapse.ndim) -
            nu2 * numpy.einsum('i...,k...->ik...', tilted / self.lapse, tilt_lower)
        )
        return coframe

def graph_frame(upper : numpy.ndarray, du : numpy.ndarray) -> GraphFrame :
    """
    Evaluates the graph apparatus pointwise.

    :param upper:
        `gamma^{mu nu}` at the graph points, `(4, 4, ...)`.
    :param du:
        Height gradient `u_i`, `(3, ...)`.

    :raises SlicingException:
        `gamma^{00} >= 0`.
    """
    lapse, shift, g = split(upper)
    g_inverse = invert(g)
    shift_lower = numpy.einsum('ij...,j...->i...', g, shift)
    denominator = 1.0 + numpy.einsum('i...,i...->...', shift, du)
    tilt = lapse * numpy.einsum('ij...,j...->i...', g_inverse, du) / denominator
    tilt_norm = numpy.sqrt(numpy.maximum(numpy.einsum('ij...,i...,j...->...', g, tilt, tilt), 0.0))
    with numpy.errstate(invalid = 'ignore', divide = 'ignore') :
        nu = 1.0 / numpy.sqrt(1.0 - tilt_norm ** 2)
    slice_normal = numpy.concatenate([(1.0 / lapse)[numpy.newaxis], -shift / lapse])
    normal = nu * (slice_normal + numpy.concatenate([numpy.zeros((1,) + lapse.shape), tilt]))
    return GraphFrame(
        lapse = lapse,
        shift = shift,
        shift_lower = shift_lower,
        g = g,
        g_inverse = g_inverse,
        du = du,
        denominator = denominator,
        tilt = tilt,
        tilt_norm = tilt_norm,
        nu = nu,
        normal = normal,
        slice_normal = slice_normal
    )

class GraphState :
    """
    Graph of a height function in a slab: the height, its gradient and the full pointwise apparatus
    with the slab metric evaluated at `(x, u(x))`.
    """

    def __init__(
        self,
        u : ScalarField,
        frame : GraphFrame,
        upper : numpy.ndarray,
        derivatives : numpy.ndarray,
        valid : numpy.ndarray,
        strict : bool
    ) -> None :
        self.__u = u
        self.__frame = frame
        self.__upper = upper
        self.__derivatives = derivatives
        self.__valid = valid
        self.__strict = strict
        self.__form : typing.Optional[numpy.ndarray] = None

    @property
    def grid(self) -> Grid3 :
        """Gets the grid."""
        return self.__u.grid

    @property
    def u(self) -> ScalarField :
        """Gets the height function."""
        return self.__u

    @property
    def frame(self) -> GraphFrame :
        """Gets the pointwise apparatus on the grid."""
        return self.__frame

    @property
    def valid(self) -> numpy.ndarray :
        """Gets the region where the apparatus is defined."""
        return self.__valid

    @property
    def strict(self) -> bool :
        """Gets whether the strict Euclidean slope bound holds."""
        return self.__strict

    @property
    def du(self) -> VectorField3 :
        """Gets the height gradient."""
        return VectorField3(self.grid, self.__frame.du, self.__valid)

    @property
    def tilt(self) -> VectorField3 :
        """Gets the tilt `U`."""
        return VectorField3(self.grid, self.__frame.tilt, self.__valid)

    @property
    def nu(self) -> ScalarField :
        """Gets the Lorentz factor `nu = (1 - |U|^2)^(-1/2)`."""
        return ScalarField(self.grid, self.__frame.nu, self.__valid)

    @property
    def denominator(self) -> ScalarField :
        """Gets `1 + <beta, Du>`."""
        return ScalarField(self.grid, self.__frame.denominator, self.__valid)

    @property
    def normal(self) -> VectorField4 :
        """Gets the future unit normal `N = nu (U + T)`."""
        return VectorField4(self.grid, self.__frame.normal, self.__valid)

    def lower_metric(self) -> numpy.ndarray :
        """Gets `gamma_{mu nu}` at the graph, `(4, 4, nx, ny, nz)`."""
        return invert(self.__upper)

    def second_form_raw(self) -> numpy.ndarray :
        """
        Gets `B_ij = <nabla_{alpha_i} (U + T), alpha_j>` on the grid, `(3, 3, nx, ny, nz)`.

        Derivatives along the graph are finite differences of the graph-restricted vector.
        """
        if self.__form is None :
            frame = self.__frame
            grid = self.grid
            metric = self.lower_metric()
            first, _ = connection(metric, lower_derivatives(metric, self.__derivatives), self.__upper)
            tangent = frame.frame()
            vector = frame.normal / frame.nu
            vector_derivatives = gradient(vector, grid.h)
            pairing = numpy.einsum('jl...,lm...->mj...', tangent, metric)
            self.__form = (
                numpy.einsum('im...,mj...->ij...', vector_derivatives, pairing) +
                numpy.einsum(
                    'm...,ia...,jl...,lam...->ij...', vector, tangent, tangent, first, optimize = True
                )
            )
        return self.__form

def _graph_data(slab : SpacetimeSlab, u : ScalarField, region : numpy.ndarray) -> numpy.ndarray :
    """Gets `gamma^{mu nu}`, its rate and its spatial gradient at `(x, u(x))`, `(50, nx, ny, nz)`."""
    grid = slab.grid
    if slab.level_count < SpacetimeSlab.LEVEL_COUNT_INTERPOLATION :
        level = slab.reference_level
        if numpy.any(u.array[region] != slab.times[level]) :
            raise StencilException('Slab invalid: Too few levels for a curved graph.')
        data = numpy.concatenate([
            slab.metric(level).values,
            slab.rate(level).values,
            slab.gradient(level).reshape((30,) + grid.shape),
        ])
        data = data.copy()
        data[:, ~region] = numpy.nan
        return data
    return slab.interpolate_nodes(
        lambda level : numpy.concatenate([
            slab.metric(level).values,
            slab.rate(level).values,
            slab.gradient(level).reshape((30,) + grid.shape),
        ]),
        u.array,
        region
    )

def graph_state(slab : SpacetimeSlab, u : ScalarField, kappa : float = KAPPA_DEFAULT) -> GraphState :
    """
    Evaluates the graph of a height function in a slab.

    :raises GraphExitsSlabException:
        `|u| > (theta / 2) sigma^(-kappa)` somewhere (a vanishing height always passes).
    :raises GraphNotSpacelikeException:
        `1 + <beta, Du> < 1/2` or `|U|_g > 1/2` somewhere.
    :raises OutOfConeException:
        Graph node outside of the boost region.
    """
    grid = slab.grid
    if u.grid != grid :
        raise ValueError('Height invalid: Grids differ.')
    coordinates = grid.coordinates()
    weight = numpy.sqrt(1.0 + numpy.sum(coordinates ** 2, axis = 0))
    height = numpy.abs(u.array[u.valid])
    if numpy.any(height > 0.5 * slab.theta * weight[u.valid] ** (-kappa) * (1.0 + 1e-12)) :
        raise GraphExitsSlabException('Graph invalid: Height exceeds boost region.')
    du = numpy.array([difference(u.array, axis, 1, grid.h) for axis in range(3)])
    region = u.valid & numpy.all(numpy.isfinite(du), axis = 0) & slab.mask(slab.reference_level)
    data = _graph_data(slab, u, region)
    upper = to_matrix(data[0 : 10], 4)
    derivatives = numpy.empty((4,) + upper.shape)
    derivatives[0] = to_matrix(data[10 : 20], 4)
    for i in range(3) :
        derivatives[i + 1] = to_matrix(data[20 + 10 * i : 30 + 10 * i], 4)
    valid = region & numpy.all(numpy.isfinite(data), axis = 0)
    upper[:, :, ~valid] = numpy.nan
    frame = graph_frame(upper, numpy.where(valid, du, numpy.nan))
    if numpy.any(frame.denominator[valid] < DENOMINATOR_MINIMUM) :
        raise GraphNotSpacelikeException('Graph invalid: Shift denominator below one half.')
    if numpy.any(frame.tilt_norm[valid] > TILT_MAXIMUM) :
        raise GraphNotSpacelikeException('Graph invalid: Tilt exceeds one half.')
    strict = bool(numpy.all(numpy.sqrt(numpy.sum(du[:, valid] ** 2, axis = 0)) <= SLOPE_STRICT))
    logger.debug('Graph evaluated on %d nodes', int(numpy.count_nonzero(valid)))
    return GraphState(u, frame, upper, derivatives, valid, strict)

def graph_metric(state : GraphState) -> typing.Tuple[SymTensorField3, SymTensorField3] :
    """Gets the induced metric `(g_M)_ij` of a graph and its closed-form inverse `(g_M)^ij`."""
    return (
        SymTensorField3.from_matrix(state.grid, state.frame.metric(), state.valid),
        SymTensorField3.from_matrix(state.grid, state.frame.inverse_metric(), state.valid),
    )

def graph_coframe(state : GraphState) -> numpy.ndarray :
    """Gets the coframe `alpha^i` of a graph as `(3, 4, nx, ny, nz)`."""
    coframe = state.frame.coframe()
    coframe[..., ~state.valid] = numpy.nan
    return coframe

def graph_second_form(
    slab : SpacetimeSlab,
    u : ScalarField,
    state : typing.Optional[GraphState] = None
) -> typing.Tuple[SymTensorField3, float] :
    """
    Gets the second fundamental form `k_M` of a graph, symmetrized, and the sup of its
    antisymmetric part (a discretization diagnostic).
    """
    state = state or graph_state(slab, u)
    form = state.frame.nu * state.second_form_raw()
    asymmetry = 0.5 * (form - numpy.einsum('ij...->ji...', form))
    result = SymTensorField3.from_matrix(state.grid, form, state.valid)
    finite = numpy.isfinite(asymmetry)
    return result, float(numpy.max(numpy.abs(asymmetry[finite]))) if finite.any() else 0.0

def graph_mean_curvature(
    slab : SpacetimeSlab,
    u : ScalarField,
    state : typing.Optional[GraphState] = None
) -> ScalarField :
    """
    Gets the mean curvature `H_u = (g_M)^ij <nabla_{alpha_i} N, alpha_j>` of a graph.

    Valid where the slab data at the graph and the derivatives along the graph are defined.
    """
    state = state or graph_state(slab, u)
    frame = state.frame
    curvature = frame.nu * numpy.einsum('ij...,ij...->...', frame.inverse_metric(),
        state.second_form_raw())
    return ScalarField(state.grid, curvature, state.valid)
