"""Constraint residuals, trace, ADM mass, angular momentum, axisymmetry and the mass inequality."""

from .fields import (
    Grid3,
    ScalarField,
    VectorField3,
    SymTensorField3,
    SpacetimeSlab,
    SphereRule,
    gradient,
    hessian,
    interpolate,
)
from .geometry import connection, invert, lower_derivatives, scalar_curvature, slab_derivatives, split
from .sobolev import DELTA_DEFAULT, Norm, WeightParams, h_norm
from .exceptions import *
from . import parallel

import dataclasses
import logging
import math
import typing

import numpy
import numpy.polynomial.polynomial

logger = logging.getLogger(__name__)

RADII_DEFAULT = (6.0, 8.0, 10.0, 12.0)
"""Default radii of the boundary integrals."""
QUADRATURE_TOLERANCE = 1e-6
"""Tolerance attributed to a single sphere quadrature."""
BOUND_DEFAULT = 0.05
"""Default `lambda` of the metric bound `lambda e <= g <= e / lambda`."""

Sampler = typing.Callable[[numpy.ndarray], numpy.ndarray]

def rotation(points : numpy.ndarray) -> numpy.ndarray :
    """Gets the axial field `d_phi = -x_2 d_1 + x_1 d_2` at points `(3, ...)`."""
    points = numpy.asarray(points, dtype = numpy.float64)
    return numpy.array([-points[1], points[0], numpy.zeros_like(points[2])])

class InitialData :
    """Initial data set: spatial metric and second fundamental form on a grid with flat reference."""

    def __init__(self, g : SymTensorField3, k : SymTensorField3) -> None :
        """
        Constructs an initial data set.

        :raises ValueError:
            Grids differ.
        """
        if g.grid != k.grid :
            raise ValueError('Initial data invalid: Grids differ.')
        self.__g = g
        self.__k = k
        self.__valid = g.valid & k.valid
        self.__g_inverse : typing.Optional[numpy.ndarray] = None

    @property
    def grid(self) -> Grid3 :
        """Gets the grid."""
        return self.__g.grid

    @property
    def g(self) -> SymTensorField3 :
        """Gets the spatial metric."""
        return self.__g

    @property
    def k(self) -> SymTensorField3 :
        """Gets the second fundamental form."""
        return self.__k

    @property
    def valid(self) -> numpy.ndarray :
        """Gets the common valid region."""
        return self.__valid

    @property
    def g_inverse(self) -> numpy.ndarray :
        """Gets the inverse metric `(3, 3, nx, ny, nz)`."""
        if self.__g_inverse is None :
            self.__g_inverse = invert(self.__g.matrix())
        return self.__g_inverse

    def bounded(self, bound : float = BOUND_DEFAULT) -> bool :
        """Gets whether `bound e <= g <= e / bound` holds on the valid region."""
        matrix = self.__g.matrix()[:, :, self.__valid]
        eigenvalues = numpy.linalg.eigvalsh(numpy.moveaxis(matrix, -1, 0))
        return bool(numpy.all(eigenvalues >= bound) and numpy.all(eigenvalues <= 1.0 / bound))

    def masked(self, mask : numpy.ndarray) -> 'InitialData' :
        """Gets the data restricted to a mask."""
        return InitialData(self.__g.masked(mask), self.__k.masked(mask))

def trace_field(d : InitialData) -> ScalarField :
    """Gets `tr_g k = g^ij k_ij`."""
    trace = numpy.einsum('ij...,ij...->...', d.g_inverse, d.k.matrix())
    return ScalarField(d.grid, trace, d.valid)

def trace_norm(d : InitialData, w : WeightParams = WeightParams(0, DELTA_DEFAULT + 1.5)) -> Norm :
    """Gets the weighted norm of the trace."""
    return h_norm(trace_field(d), w)

def k_squared(d : InitialData) -> numpy.ndarray :
    """Gets `|k|^2_g = g^ia g^jb k_ij k_ab`."""
    inverse = d.g_inverse
    k = d.k.matrix()
    return numpy.einsum('ia...,jb...,ij...,ab...->...', inverse, inverse, k, k, optimize = True)

def hamiltonian_residual(d : InitialData) -> ScalarField :
    """
    Gets the Hamiltonian constraint residual `R_g - |k|^2 + (tr k)^2`, with the scalar curvature by
    finite differences.
    """
    grid = d.grid
    g = d.g.matrix()
    curvature = scalar_curvature(g, gradient(g, grid.h), hessian(g, grid.h))
    trace = trace_field(d).array
    residual = curvature - k_squared(d) + trace * trace
    return ScalarField(grid, residual, d.valid)

def divergence(d : InitialData, tensor : numpy.ndarray) -> numpy.ndarray :
    """Gets the covariant divergence `g^ab nabla_a t_bj` of a symmetric 2-tensor `(3, 3, ...)`."""
    grid = d.grid
    g = d.g.matrix()
    inverse = d.g_inverse
    _, second = connection(g, gradient(g, grid.h), inverse)
    derivatives = gradient(tensor, grid.h)
    return (
        numpy.einsum('ab...,abj...->j...', inverse, derivatives) -
        numpy.einsum('ab...,cab...,cj...->j...', inverse, second, tensor, optimize = True) -
        numpy.einsum('ab...,caj...,bc...->j...', inverse, second, tensor, optimize = True)
    )

def momentum_tensor(d : InitialData) -> numpy.ndarray :
    """Gets `pi = k - (tr k) g` as `(3, 3, nx, ny, nz)`."""
    return d.k.matrix() - trace_field(d).array * d.g.matrix()

def momentum_residual(d : InitialData) -> VectorField3 :
    """Gets the momentum constraint residual `div_g (k - (tr k) g)`."""
    return VectorField3(d.grid, divergence(d, momentum_tensor(d)), d.valid)

@dataclasses.dataclass(frozen = True)
class Extrapolation :
    """Boundary integral evaluated at several radii and extrapolated to infinite radius."""

    radii : typing.Tuple[float, ...]
    values : typing.Tuple[float, ...]
    value : float
    spread : float
    exponent : float

    def to_dict(self) -> typing.Dict[str, typing.Any] :
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, mapping : typing.Mapping[str, typing.Any]) -> 'Extrapolation' :
        return cls(
            tuple(mapping['radii']),
            tuple(mapping['values']),
            mapping['value'],
            mapping['spread'],
            mapping['exponent']
        )

def extrapolate(
    radii : typing.Sequence[float],
    values : typing.Sequence[float],
    exponent : float = 1.0
) -> Extrapolation :
    """
    Extrapolates per-radius values `f(R) = f_inf + c_1 R^-p + c_2 R^-2p` by least squares.

    The degree drops to one (or zero) for fewer radii. The spread is the largest deviation of the
    leave-one-out fits from the full fit.
    """
    radii = tuple(float(radius) for radius in radii)
    values = tuple(float(value) for value in values)
    x = numpy.array(radii) ** (-exponent)
    y = numpy.array(values)

    def fit(indices) -> float :
        degree = min(2, len(indices) - 2) if len(indices) >= 3 else len(indices) - 1
        degree = max(degree, 0)
        return float(numpy.polynomial.polynomial.polyfit(x[indices], y[indices], degree)[0])

    everything = list(range(len(radii)))
    value = fit(everything)
    spread = 0.0
    if len(radii) >= 3 :
        for skipped in everything :
            others = [index for index in everything if index != skipped]
            spread = max(spread, abs(fit(others) - value))
    return Extrapolation(radii, values, value, spread, exponent)

def _flux(
    grid : Grid3,
    vector : numpy.ndarray,
    valid : numpy.ndarray,
    radius : float,
    rule : SphereRule
) -> float :
    """Gets the Euclidean flux of a vector field `(3, nx, ny, nz)` through a coordinate sphere."""
    points, normals, weights = rule.nodes(radius)
    try :
        samples = interpolate(VectorField3(grid, vector, valid), points)
    except OutOfConeException :
        raise QuadratureException('Sphere invalid: Sphere exits grid.')
    return float(numpy.dot(numpy.sum(samples * normals, axis = 0), weights))

def _check_radii(grid : Grid3, radii : typing.Sequence[float]) -> None :
    if len(radii) == 0 :
        raise ValueError('Radii invalid: None given.')
    if max(radii) > grid.half_width - grid.h :
        raise QuadratureException('Radius invalid: Sphere exits grid.')

def decay_exponent(d : InitialData, radii : typing.Sequence[float], rule : SphereRule) -> float :
    """
    Gets the decay exponent of `|g - e|` measured between the smallest and the largest radius;
    one if the perturbation vanishes.
    """
    if len(radii) < 2 :
        return 1.0
    grid = d.grid
    perturbation = d.g.values - numpy.array([1.0, 0.0, 0.0, 1.0, 0.0, 1.0]).reshape(6, 1, 1, 1)
    size = ScalarField(grid, numpy.sqrt(numpy.sum(perturbation ** 2, axis = 0)), d.valid)
    inner, outer = min(radii), max(radii)
    points, _, weights = rule.nodes(inner)
    a = float(numpy.dot(interpolate(size, points), weights)) / inner ** 2
    points, _, weights = rule.nodes(outer)
    b = float(numpy.dot(interpolate(size, points), weights)) / outer ** 2
    if a <= 0.0 or b <= 0.0 :
        return 1.0
    return -math.log(b / a) / math.log(outer / inner)

def adm_mass(
    d : InitialData,
    radii : typing.Sequence[float] = RADII_DEFAULT,
    rule : typing.Optional[SphereRule] = None
) -> Extrapolation :
    """
    Gets the ADM mass `(1 / 16 pi) int (g_ij,i - g_ii,j) n^j` over Euclidean coordinate spheres at
    several radii, extrapolated with an error model `R^(1 - 2 beta)` where `beta` is the measured
    decay of `g - e`.

    :raises QuadratureException:
        Sphere exits grid.
    """
    rule = rule or SphereRule()
    grid = d.grid
    _check_radii(grid, radii)
    derivatives = gradient(d.g.matrix(), grid.h)
    vector = (
        numpy.einsum('iij...->j...', derivatives) -
        numpy.einsum('jii...->j...', derivatives)
    )
    values = parallel.map_items(
        lambda radius : _flux(grid, vector, d.valid, radius, rule) / (16.0 * math.pi),
        list(radii)
    )
    for radius, value in zip(radii, values) :
        logger.debug('Mass at radius %g: %.12g', radius, value)
    beta = decay_exponent(d, radii, rule)
    exponent = min(max(2.0 * beta - 1.0, 0.5), 2.0)
    return extrapolate(radii, values, exponent)

def angular_momentum_pi(
    d : InitialData,
    xi : Sampler = rotation,
    radii : typing.Sequence[float] = RADII_DEFAULT,
    rule : typing.Optional[SphereRule] = None
) -> Extrapolation :
    """
    Gets the angular momentum `(1 / 8 pi) int pi(xi, nu) dA_g` with the g-unit outer normal and the
    g-area element of coordinate spheres at several radii.

    :raises QuadratureException:
        Sphere exits grid.
    """
    rule = rule or SphereRule()
    grid = d.grid
    _check_radii(grid, radii)
    field = xi(grid.coordinates())
    volume = numpy.sqrt(numpy.linalg.det(numpy.moveaxis(d.g.matrix(), (0, 1), (-2, -1))))
    vector = numpy.einsum(
        'ij...,i...,jk...->k...', momentum_tensor(d), field, d.g_inverse, optimize = True
    ) * volume
    values = parallel.map_items(
        lambda radius : _flux(grid, vector, d.valid, radius, rule) / (8.0 * math.pi),
        list(radii)
    )
    return extrapolate(radii, values, 1.0)

def angular_momentum_komar(
    slab : SpacetimeSlab,
    radius : float,
    level : typing.Optional[int] = None,
    xi : Sampler = rotation,
    rule : typing.Optional[SphereRule] = None
) -> float :
    """
    Gets the Komar angular momentum `(1 / 16 pi) int (d xi)(T, s) dA_g` of a coordinate sphere in a
    slab level, with `xi` lifted to spacetime with vanishing time component.

    :raises QuadratureException:
        Sphere exits the active region of the level.
    """
    rule = rule or SphereRule()
    level = slab.reference_level if level is None else level
    grid = slab.grid
    _check_radii(grid, [radius])
    upper, derivatives = slab_derivatives(slab, level)
    metric = invert(upper)
    metric_derivatives = lower_derivatives(metric, derivatives)
    lapse, shift, g = split(upper)
    coordinates = grid.coordinates()
    field = xi(coordinates)
    field_derivatives = numpy.zeros((4, 3) + grid.shape)
    field_derivatives[1 :] = gradient(field, grid.h)
    # xi_nu = gamma_{nu k} xi^k
    covector_derivatives = (
        numpy.einsum('mnk...,k...->mn...', metric_derivatives[:, :, 1 :], field) +
        numpy.einsum('nk...,mk...->mn...', metric[:, 1 :], field_derivatives)
    )
    exterior = covector_derivatives - numpy.einsum('mn...->nm...', covector_derivatives)
    normal = numpy.concatenate([(1.0 / lapse)[numpy.newaxis], -shift / lapse])
    paired = numpy.einsum('m...,mn...->n...', normal, exterior)[1 :]
    volume = numpy.sqrt(numpy.linalg.det(numpy.moveaxis(g, (0, 1), (-2, -1))))
    vector = numpy.einsum('n...,nk...->k...', paired, invert(g)) * volume
    return _flux(grid, vector, slab.mask(level), radius, rule) / (16.0 * math.pi)

def axisymmetry_residual(
    source : typing.Union[InitialData, ScalarField, SymTensorField3],
    xi : Sampler = rotation
) -> float :
    """
    Gets the sup of the Lie derivative along `xi` of the data (metric and second form), of a
    symmetric tensor field or of a scalar field, over the region where it is defined.
    """
    if isinstance(source, InitialData) :
        return max(axisymmetry_residual(source.g, xi), axisymmetry_residual(source.k, xi))
    grid = source.grid
    field = xi(grid.coordinates())
    if isinstance(source, ScalarField) :
        lie = numpy.einsum('k...,k...->...', field, gradient(source.array, grid.h))[numpy.newaxis]
    else :
        tensor = source.matrix()
        field_derivatives = gradient(field, grid.h)
        lie = (
            numpy.einsum('k...,kij...->ij...', field, gradient(tensor, grid.h)) +
            numpy.einsum('kj...,ik...->ij...', tensor, field_derivatives) +
            numpy.einsum('ik...,jk...->ij...', tensor, field_derivatives)
        )
    lie = lie.reshape((-1,) + grid.shape)
    region = source.valid & numpy.all(numpy.isfinite(lie), axis = 0)
    if not region.any() :
        return 0.0
    return float(numpy.max(numpy.abs(lie[:, region])))

@dataclasses.dataclass(frozen = True)
class Verdict :
    """Outcome of the inequality `m >= sqrt(|J|)` with its uncertainty band."""

    HOLDS = 'holds'
    VIOLATED = 'violated'
    INDETERMINATE = 'indeterminate'

    verdict : str
    margin : float
    uncertainty : float

    def to_dict(self) -> typing.Dict[str, typing.Any] :
        return dataclasses.asdict(self)

def inequality_verdict(
    m : float,
    j : float,
    m_uncertainty : float = 0.0,
    j_uncertainty : float = 0.0,
    quadrature_tolerance : float = QUADRATURE_TOLERANCE
) -> Verdict :
    """
    Evaluates `m >= sqrt(|J|)`.

    Indeterminate when the margin `m - sqrt(|J|)` lies within the combined uncertainty: the
    extrapolation spreads plus three quadrature tolerances.
    """
    root = math.sqrt(abs(j))
    margin = m - root
    uncertainty = (
        abs(m_uncertainty) +
        (math.sqrt(abs(j) + abs(j_uncertainty)) - root) +
        3.0 * quadrature_tolerance
    )
    if abs(margin) <= uncertainty :
        verdict = Verdict.INDETERMINATE
        logger.warning('Inequality indeterminate: margin %.3e within %.3e', margin, uncertainty)
    elif margin > 0.0 :
        verdict = Verdict.HOLDS
    else :
        verdict = Verdict.VIOLATED
    return Verdict(verdict, margin, uncertainty)

@dataclasses.dataclass(frozen = True)
class InvariantReport :
    """Invariants of one initial data set."""

    mass : Extrapolation
    angular_momentum : Extrapolation
    angular_momentum_komar : typing.Optional[typing.Tuple[float, ...]]
    trace_sup : float
    trace_norm : float
    trace_shell : float
    hamiltonian_sup : float
    momentum_sup : float
    axisymmetry : float
    verdict : Verdict

    def to_dict(self) -> typing.Dict[str, typing.Any] :
        return {
            'mass' : self.mass.to_dict(),
            'angular_momentum' : self.angular_momentum.to_dict(),
            'angular_momentum_komar' : (
                None if self.angular_momentum_komar is None else list(self.angular_momentum_komar)
            ),
            'trace_sup' : self.trace_sup,
            'trace_norm' : self.trace_norm,
            'trace_shell' : self.trace_shell,
            'hamiltonian_sup' : self.hamiltonian_sup,
            'momentum_sup' : self.momentum_sup,
            'axisymmetry' : self.axisymmetry,
            'verdict' : self.verdict.to_dict(),
        }

    @classmethod
    def from_dict(cls, mapping : typing.Mapping[str, typing.Any]) -> 'InvariantReport' :
        komar = mapping.get('angular_momentum_komar')
        return cls(
            Extrapolation.from_dict(mapping['mass']),
            Extrapolation.from_dict(mapping['angular_momentum']),
            None if komar is None else tuple(komar),
            mapping['trace_sup'],
            mapping['trace_norm'],
            mapping['trace_shell'],
            mapping['hamiltonian_sup'],
            mapping['momentum_sup'],
            mapping['axisymmetry'],
            Verdict(**mapping['verdict'])
        )

def invariants(
    d : InitialData,
    radii : typing.Sequence[float] = RADII_DEFAULT,
    rule : typing.Optional[SphereRule] = None,
    slab : typing.Optional[SpacetimeSlab] = None,
    xi : Sampler = rotation,
    region : typing.Optional[numpy.ndarray] = None
) -> InvariantReport :
    """
    Computes every invariant of an initial data set.

    The Komar angular momentum is included when a slab is given. Residual sups are taken over the
    given region (default: the interior of the grid).
    """
    rule = rule or SphereRule()
    region = d.grid.interior if region is None else region
    mass = adm_mass(d, radii, rule)
    momentum = angular_momentum_pi(d, xi, radii, rule)
    komar = None
    if slab is not None :
        komar = tuple(parallel.map_items(
            lambda radius : angular_momentum_komar(slab, radius, xi = xi, rule = rule),
            list(radii)
        ))
    trace = trace_field(d)
    norm = trace_norm(d)
    verdict = inequality_verdict(mass.value, momentum.value, mass.spread, momentum.spread)
    return InvariantReport(
        mass = mass,
        angular_momentum = momentum,
        angular_momentum_komar = komar,
        trace_sup = trace.sup(region),
        trace_norm = norm.value,
        trace_shell = norm.shell,
        hamiltonian_sup = hamiltonian_residual(d).sup(region),
        momentum_sup = momentum_residual(d).sup(region),
        axisymmetry = axisymmetry_residual(d.masked(region), xi),
        verdict = verdict
    )
