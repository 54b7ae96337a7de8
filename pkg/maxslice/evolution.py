"""
Harmonic-gauge evolution of the reduced vacuum equations.

The unknown is the inverse metric `gamma^{mu nu}` in harmonic coordinates relative to the flat
reference, advanced by the classical Runge-Kutta scheme on the pair `(gamma, d_t gamma)`. No lateral
boundary data is imposed: every step erodes the active mask by the stencil width, dropping the
nodes whose domain of dependence leaves the data.
"""

from .fields import (
    Grid3,
    VectorField4,
    SymTensorField4,
    SpacetimeSlab,
    erode,
    from_matrix,
    gradient,
    hessian,
    to_matrix,
    triangle,
)
from .geometry import christoffel, harmonic_ricci, invert, light_speeds, spacetime_christoffel
from .parallel import map_chunks
from .physics import InitialData, hamiltonian_residual, momentum_residual
from .sobolev import (
    DELTA_DEFAULT,
    MINKOWSKI_INVERSE,
    Norm,
    WeightParams,
    h_norm,
    second_time_derivative,
    sigma,
)
from .exceptions import *

import dataclasses
import logging
import math
import typing

import numpy

logger = logging.getLogger(__name__)

STEPS_DEFAULT = 2
"""Default step count per time direction."""
ORDER_DEFAULT = 2
"""Default highest order of the slice energies."""
CAUSAL_TOLERANCE = 1e-12
"""Relative tolerance of the causal checks of the momentum vector."""

@dataclasses.dataclass(frozen = True, eq = False)
class CauchyData :
    """Cauchy data of the reduced equations: `phi = gamma^{mu nu}` and `psi = d_t gamma^{mu nu}` at `t = 0`."""

    phi : SymTensorField4
    psi : SymTensorField4

    def __post_init__(self) -> None :
        if self.phi.grid != self.psi.grid :
            raise ValueError('Cauchy data invalid: Grids differ.')

    @property
    def grid(self) -> Grid3 :
        """Gets the grid."""
        return self.phi.grid

    @property
    def valid(self) -> numpy.ndarray :
        """Gets the common valid region."""
        return self.phi.valid & self.psi.valid

def constraint_residual(d : InitialData) -> float :
    """Gets the larger of the Hamiltonian and momentum residual sups over the grid interior."""
    interior = d.grid.interior
    return max(hamiltonian_residual(d).sup(interior), momentum_residual(d).sup(interior))

def build_cauchy_data(
    d : InitialData,
    gate : typing.Optional[float] = None,
    fault : bool = False
) -> CauchyData :
    """
    Builds the Cauchy data of an initial data set in Gaussian gauge on the slice:
    `phi^{00} = -1`, `phi^{0i} = 0`, `phi^{ij} = g^{ij}`, `psi^{00} = 2 tr k`, `psi^{0i} = G_g^i`
    and `psi^{ij} = -2 g^{ik} g^{jl} k_kl`, so that the harmonic gauge vector vanishes at `t = 0`.

    :param gate:
        Bound of the constraint residuals; not checked if not given.
    :param fault:
        Omits the source `G_g^i` of `psi^{0i}`, breaking the gauge on purpose.

    :raises GateException:
        Constraint residual exceeds the gate.
    """
    if gate is not None :
        residual = constraint_residual(d)
        if residual > gate :
            raise GateException('cauchy', 'constraints', residual, gate)
    grid = d.grid
    g = d.g.matrix()
    inverse = d.g_inverse
    k = d.k.matrix()
    _, _, contracted = christoffel(g, gradient(g, grid.h, closure = True), inverse)
    trace = numpy.einsum('ij...,ij...->...', inverse, k)
    upper = numpy.zeros((4, 4) + grid.shape)
    upper[0, 0] = -1.0
    upper[1 :, 1 :] = inverse
    rate = numpy.zeros((4, 4) + grid.shape)
    rate[0, 0] = 2.0 * trace
    if not fault :
        rate[0, 1 :] = contracted
        rate[1 :, 0] = contracted
    rate[1 :, 1 :] = -2.0 * numpy.einsum('ia...,jb...,ab...->ij...', inverse, inverse, k, optimize = True)
    valid = d.valid & numpy.all(numpy.isfinite(contracted), axis = 0)
    return CauchyData(
        SymTensorField4.from_matrix(grid, upper, valid),
        SymTensorField4.from_matrix(grid, rate, valid)
    )

def _acceleration(grid : Grid3, metric : numpy.ndarray, rate : numpy.ndarray, mask : numpy.ndarray) -> numpy.ndarray :
    """
    Gets `d_t^2 gamma` as components `(10, nx, ny, nz)` from components of `gamma` and `d_t gamma`,
    NaN outside of the mask.
    """
    h = grid.h
    spatial = gradient(metric, h, closure = True)
    mixed = gradient(rate, h, closure = True)
    second = hessian(metric, h, closure = True)
    region = (
        mask &
        numpy.all(numpy.isfinite(metric), axis = 0) &
        numpy.all(numpy.isfinite(rate), axis = 0) &
        numpy.all(numpy.isfinite(spatial), axis = (0, 1)) &
        numpy.all(numpy.isfinite(mixed), axis = (0, 1)) &
        numpy.all(numpy.isfinite(second), axis = (0, 1, 2))
    )
    if not region.any() :
        raise MaskEmptyException('Mask invalid: No node with a full stencil.')
    upper = to_matrix(metric[:, region], 4)
    derivatives = numpy.empty((4,) + upper.shape)
    derivatives[0] = to_matrix(rate[:, region], 4)
    for i in range(3) :
        derivatives[i + 1] = to_matrix(spatial[i][:, region], 4)
    mixed = mixed[..., region]
    second = second[..., region]

    def kernel(part : slice) -> numpy.ndarray :
        inverse = upper[..., part]
        if numpy.any(inverse[0, 0] >= 0.0) :
            raise SlicingException('Metric invalid: Time function not timelike.')
        _, reduced = harmonic_ricci(inverse, derivatives[..., part])
        principal = numpy.einsum('ij...,ijc...->c...', inverse[1 :, 1 :], second[..., part])
        cross = 2.0 * numpy.einsum('i...,ic...->c...', inverse[0, 1 :], mixed[..., part])
        return (-2.0 * from_matrix(reduced) - cross - principal) / inverse[0, 0]

    result = numpy.full(metric.shape, numpy.nan)
    result[:, region] = map_chunks(kernel, int(numpy.count_nonzero(region)))
    return result

def reduced_eve_rhs(
    metric : SymTensorField4,
    rate : SymTensorField4,
    mask : typing.Optional[numpy.ndarray] = None
) -> SymTensorField4 :
    """
    Gets the second time derivative of `gamma^{mu nu}` solving the reduced vacuum equations
    `gamma^{ab} D_a D_b gamma^{mu nu} = B^{mu nu}(gamma, D gamma)`:
    `d_t^2 gamma = (B - 2 gamma^{0i} d_i d_t gamma - gamma^{ij} d_i d_j gamma) / gamma^{00}`.

    The lower-order part is `B = -2 R_h(gamma, D gamma)` evaluated without second derivatives.

    :raises SlicingException:
        `gamma^{00} >= 0` at an active node.
    """
    grid = metric.grid
    region = metric.valid & rate.valid if mask is None else metric.valid & rate.valid & mask
    values = _acceleration(grid, metric.values, rate.values, region)
    return SymTensorField4(grid, values)

@dataclasses.dataclass(frozen = True, eq = False)
class LevelState :
    """Evolved fields at one time level."""

    t : float
    metric : SymTensorField4
    rate : SymTensorField4
    mask : numpy.ndarray

    @property
    def grid(self) -> Grid3 :
        """Gets the grid."""
        return self.metric.grid

def step(state : LevelState, dt : float, cfl : float = SpacetimeSlab.CFL_DEFAULT) -> LevelState :
    """
    Advances a level by `dt` (either sign) with the classical four-stage Runge-Kutta scheme.

    The mask of the new level is the old mask eroded by the grid margin.

    :raises CflException:
        `|dt|` exceeds `cfl h`.
    :raises MaskEmptyException:
        No active node left.
    """
    grid = state.grid
    if abs(dt) > cfl * grid.h * (1.0 + 1e-12) :
        raise CflException('Time step invalid: Value exceeds CFL bound.')
    mask = state.mask
    metric = state.metric.values
    rate = state.rate.values

    def derivative(y : numpy.ndarray, r : numpy.ndarray) -> typing.Tuple[numpy.ndarray, numpy.ndarray] :
        return r, _acceleration(grid, y, r, mask)

    k1 = derivative(metric, rate)
    k2 = derivative(metric + dt / 2 * k1[0], rate + dt / 2 * k1[1])
    k3 = derivative(metric + dt / 2 * k2[0], rate + dt / 2 * k2[1])
    k4 = derivative(metric + dt * k3[0], rate + dt * k3[1])
    metric = metric + dt / 6 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
    rate = rate + dt / 6 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
    mask = (
        erode(mask, grid.margin) &
        numpy.all(numpy.isfinite(metric), axis = 0) &
        numpy.all(numpy.isfinite(rate), axis = 0)
    )
    if not mask.any() :
        raise MaskEmptyException('Mask invalid: No active node left.')
    logger.debug('Step to t = %.6g: %d active nodes', state.t + dt, numpy.count_nonzero(mask))
    return LevelState(
        state.t + dt,
        SymTensorField4(grid, metric, mask),
        SymTensorField4(grid, rate, mask),
        mask
    )

def boost_conormal(points : numpy.ndarray, t : numpy.ndarray) -> numpy.ndarray :
    """
    Gets the unit future co-normal `(4, ...)` of the boosted foliation `t = tau sigma(x)` through
    points `(3, ...)` at times `t`.
    """
    points = numpy.asarray(points, dtype = numpy.float64)
    weight = sigma(points)
    tau = numpy.asarray(t) / weight
    factor = 1.0 / numpy.sqrt(1.0 - tau * tau * numpy.sum(points * points, axis = 0) / (weight * weight))
    return numpy.concatenate([factor[numpy.newaxis], -(factor * tau / weight) * points])

@dataclasses.dataclass(frozen = True)
class HyperbolicityReport :
    """Constants of regular hyperbolicity of a metric on a set of points and its light speed."""

    a : float
    """Lower bound of `-gamma(n, n)` for the boosted co-normal `n`."""
    b : float
    """Lower bound of `gamma(z, z) / |z|^2` over co-vectors `z` tangent to the boosted slices."""
    c : float
    """Upper bound of the Euclidean norm of `gamma`."""
    speed : float
    """Largest coordinate speed of characteristics along the axes."""

    @property
    def h(self) -> float :
        """Gets the coefficient `max(1 / a, 1 / b, c)`, infinite if not regular."""
        if not self.regular :
            return math.inf
        return max(1.0 / self.a, 1.0 / self.b, self.c)

    @property
    def regular(self) -> bool :
        """Gets whether the metric is regularly hyperbolic."""
        return self.a > 0.0 and self.b > 0.0 and math.isfinite(self.c)

    def to_dict(self) -> typing.Dict[str, float] :
        return {'a' : self.a, 'b' : self.b, 'c' : self.c, 'h' : self.h, 'speed' : self.speed}

def hyperbolicity(upper : numpy.ndarray, points : numpy.ndarray, t : numpy.ndarray) -> HyperbolicityReport :
    """
    Gets the hyperbolicity report of `gamma^{mu nu}` `(4, 4, N)` at points `(3, N)` and times `(N,)`.
    """
    count = upper.shape[-1]
    if count == 0 :
        raise MaskEmptyException('Points invalid: None given.')
    t = numpy.broadcast_to(numpy.asarray(t, dtype = numpy.float64), (count,))

    def kernel(part : slice) -> numpy.ndarray :
        inverse = upper[..., part]
        conormal = boost_conormal(points[:, part], t[part])
        raised = numpy.einsum('mn...,n...->m...', inverse, conormal)
        norm = numpy.einsum('m...,m...->...', raised, conormal)
        tangent = numpy.zeros((3, 4) + norm.shape)
        for i in range(3) :
            tangent[i, i + 1] = 1.0
        tangent = tangent - numpy.einsum('i...,m...->im...', raised[1 :] / norm, conormal)
        form = numpy.einsum('im...,mn...,jn...->...ij', tangent, inverse, tangent, optimize = True)
        gram = numpy.einsum('im...,jm...->...ij', tangent, tangent)
        factor = numpy.linalg.cholesky(gram)
        reduced = numpy.linalg.solve(factor, form)
        reduced = numpy.linalg.solve(factor, numpy.swapaxes(reduced, -1, -2))
        reduced = 0.5 * (reduced + numpy.swapaxes(reduced, -1, -2))
        return numpy.array([
            -norm,
            numpy.linalg.eigvalsh(reduced)[..., 0],
            numpy.sqrt(numpy.sum(inverse * inverse, axis = (0, 1))),
            light_speeds(inverse),
        ])

    values = map_chunks(kernel, count)
    return HyperbolicityReport(
        float(numpy.min(values[0])),
        float(numpy.min(values[1])),
        float(numpy.max(values[2])),
        float(numpy.max(values[3]))
    )

def level_hyperbolicity(slab : SpacetimeSlab, level : int) -> HyperbolicityReport :
    """Gets the hyperbolicity report of a slab level over its mask."""
    mask = slab.mask(level)
    return hyperbolicity(
        slab.metric(level).matrix()[..., mask],
        slab.grid.coordinates()[:, mask],
        slab.times[level]
    )

def _check_level(state : LevelState, cfl : float) -> HyperbolicityReport :
    grid = state.grid
    report = hyperbolicity(
        state.metric.matrix()[..., state.mask],
        grid.coordinates()[:, state.mask],
        state.t
    )
    logger.info(
        'Level t = %.6g: %d active nodes, hyperbolicity h = %.4g, light speed %.4g',
        state.t, numpy.count_nonzero(state.mask), report.h, report.speed
    )
    if not report.regular :
        raise HyperbolicityException('Metric invalid: Not regularly hyperbolic.')
    if report.speed * cfl > grid.margin :
        raise HyperbolicityException('Metric invalid: Characteristics faster than mask erosion.')
    return report

def evolve(
    cd : CauchyData,
    steps : int = STEPS_DEFAULT,
    dt : typing.Optional[float] = None,
    cfl : float = SpacetimeSlab.CFL_DEFAULT,
    two_sided : bool = True
) -> SpacetimeSlab :
    """
    Evolves Cauchy data into a slab of `steps` levels in the future and, if two-sided, as many in
    the past.

    :param dt:
        Time step, defaults to `cfl h`.

    :raises CflException:
        Time step exceeds the CFL bound.
    :raises HyperbolicityException:
        A level is not regularly hyperbolic or its characteristics outrun the mask erosion.
    :raises MaskEmptyException:
        Mask exhausted.
    """
    grid = cd.grid
    if steps < 0 :
        raise ValueError('Step count invalid: Value negative.')
    dt = cfl * grid.h if dt is None else dt
    if not dt > 0.0 :
        raise ValueError('Time step invalid: Value not positive.')
    if dt > cfl * grid.h * (1.0 + 1e-12) :
        raise CflException('Time step invalid: Value exceeds CFL bound.')
    initial = LevelState(0.0, cd.phi, cd.psi, cd.valid)
    _check_level(initial, cfl)
    levels = [initial]
    for _ in range(steps) :
        levels.append(step(levels[-1], dt, cfl))
        _check_level(levels[-1], cfl)
    if two_sided :
        state = initial
        for _ in range(steps) :
            state = step(state, -dt, cfl)
            _check_level(state, cfl)
            levels.insert(0, state)
    slab = SpacetimeSlab(
        grid,
        [level.t for level in levels],
        [level.metric for level in levels],
        [level.rate for level in levels],
        [level.mask for level in levels],
        cfl
    )
    logger.info('Evolved %d levels, boost parameter %.4g', slab.level_count, slab.theta)
    return slab

@dataclasses.dataclass(frozen = True, eq = False)
class HarmonicMonitor :
    """Harmonic gauge vector `f^mu = G^mu` of a slab level with its norms."""

    f : VectorField4
    sup : float
    norm : Norm

def harmonic_monitor(slab : SpacetimeSlab, level : int, delta : float = DELTA_DEFAULT) -> HarmonicMonitor :
    """
    Gets the gauge vector `f^mu = gamma^{ab} G^mu_{ab}` of a slab level, its sup and its
    `H_{0, delta + 2}` norm over the level's mask.

    :raises StencilException:
        Derivative margin exhausted.
    """
    _, _, contracted = spacetime_christoffel(slab, level)
    f = VectorField4(slab.grid, contracted, slab.mask(level))
    return HarmonicMonitor(f, f.sup(), h_norm(f, WeightParams(0, delta + 2.0)))

def _momentum(upper : numpy.ndarray, du : numpy.ndarray, conormal : numpy.ndarray) -> numpy.ndarray :
    """
    Gets the momentum vector `P^mu = T^{mu nu} n_nu` of the energy-momentum tensor
    `T^{mu nu} = G^{mu nu rho sigma} D_rho u . D_sigma u` with derivatives `du` `(4, C, ...)`.
    """
    raised = numpy.einsum('mr...,rc...->mc...', upper, du)
    square = numpy.einsum('rc...,rc...->...', du, raised)
    tensor = 2.0 * numpy.einsum('mc...,nc...->mn...', raised, raised) - upper * square
    return numpy.einsum('mn...,n...->m...', tensor, conormal)

@dataclasses.dataclass(frozen = True)
class EnergyDiagnostics :
    """Slice energies, momentum vector checks and hyperbolicity of a slab."""

    taus : typing.Tuple[float, ...]
    """Parameters of the boosted slices `t = tau sigma(x)`."""
    energies : typing.Tuple[typing.Tuple[float, ...], ...]
    """Energies `x_i = int |sigma^(delta + i + 1/2) D^i u|^2` for `i = 0..order`, per slice."""
    flux : typing.Tuple[float, ...]
    """Momentum vector flux through the lateral boundary of the mask, per level."""
    timelike_defect : float
    """Largest `gamma(P, P)` relative to `|P|^2`; not positive for a causal momentum vector."""
    energy_defect : float
    """Largest `-P^mu n_mu` relative to the largest energy density; not positive for a causal momentum vector."""
    gronwall_exponent : float
    """Smallest `c` with `y_1(tau)^(1/2) <= exp(c |tau|) y_1(0)^(1/2)` on every slice."""
    hyperbolicity : typing.Tuple[HyperbolicityReport, ...]
    """Hyperbolicity report per level."""

    def y(self, order : int = 1) -> typing.Tuple[float, ...] :
        """Gets `y_i = x_0 + ... + x_i` per slice."""
        if not 1 <= order < len(self.energies[0]) :
            raise ValueError('Order invalid: Value out of range.')
        return tuple(sum(energies[: order + 1]) for energies in self.energies)

    @property
    def causal(self) -> bool :
        """Gets whether the momentum vector passed both causal checks within rounding."""
        return self.timelike_defect <= CAUSAL_TOLERANCE and self.energy_defect <= CAUSAL_TOLERANCE

    def to_dict(self) -> typing.Dict[str, typing.Any] :
        return {
            'taus' : list(self.taus),
            'energies' : [list(energies) for energies in self.energies],
            'flux' : list(self.flux),
            'timelike_defect' : self.timelike_defect,
            'energy_defect' : self.energy_defect,
            'gronwall_exponent' : self.gronwall_exponent,
            'hyperbolicity' : [report.to_dict() for report in self.hyperbolicity],
        }

def _level_arrays(slab : SpacetimeSlab, level : int, order : int) -> numpy.ndarray :
    """Stacks `u`, `D u` and, for order 2, `D^2 u` of a level as node arrays."""
    h = slab.grid.h
    metric = slab.metric(level).values
    rate = slab.rate(level).values
    parts = [
        metric - MINKOWSKI_INVERSE.reshape(10, 1, 1, 1),
        rate,
        gradient(metric, h, closure = True).reshape((30,) + metric.shape[1 :]),
    ]
    if order >= 2 :
        second = hessian(metric, h, closure = True)
        parts.append(second_time_derivative(slab, level))
        parts.append(gradient(rate, h, closure = True).reshape((30,) + metric.shape[1 :]))
        parts.extend(second[i, j] for i, j in triangle(3))
    return numpy.concatenate(parts)

def _lateral_flux(slab : SpacetimeSlab, level : int) -> float :
    """
    Gets the flux of the momentum vector through the lateral boundary of a level's mask, which
    moves inward by the erosion width per step.
    """
    grid = slab.grid
    mask = slab.mask(level)
    t = slab.times[level]
    metric = slab.metric(level).values
    du = numpy.concatenate([
        slab.rate(level).values[numpy.newaxis],
        gradient(metric, grid.h, closure = True),
    ])
    speed = slab.erosion / slab.cfl
    if speed <= 1.0 :
        raise HyperbolicityException('Slab invalid: Lateral boundary not spacelike.')
    orientation = 1.0 if t >= 0.0 else -1.0
    coordinates = grid.coordinates()
    total = 0.0
    for axis in range(3) :
        for side in (-1, 1) :
            neighbor = numpy.roll(mask, -side, axis = axis)
            edge = [slice(None)] * 3
            edge[axis] = -1 if side == 1 else 0
            neighbor[tuple(edge)] = False
            faces = mask & ~neighbor
            if not faces.any() :
                continue
            conormal = numpy.zeros((4, int(numpy.count_nonzero(faces))))
            conormal[0] = orientation * speed
            conormal[axis + 1] = side
            conormal /= math.sqrt(speed * speed - 1.0)
            upper = to_matrix(metric[:, faces], 4)
            boost = boost_conormal(coordinates[:, faces], t)
            du_faces = numpy.stack([to_matrix(du[r][:, faces], 4).reshape(16, -1) for r in range(4)])
            momentum = _momentum(upper, du_faces, boost)
            total += float(numpy.nansum(numpy.einsum('m...,m...->...', momentum, conormal)))
    return total * grid.h * grid.h

def energy_diagnostics(
    slab : SpacetimeSlab,
    delta : float = DELTA_DEFAULT,
    order : int = ORDER_DEFAULT
) -> EnergyDiagnostics :
    """
    Gets the slice energies of the perturbation `u = gamma - eta` on the boosted slices through the
    levels, the causal checks of the momentum vector, its lateral flux, the Gronwall exponent and
    the hyperbolicity per level.

    The slices are restricted to the nodes active on every level.

    :raises StencilException:
        Fewer levels than the cubic time stencil or order out of range.
    :raises MaskEmptyException:
        No node active on every level.
    """
    if not 1 <= order <= 2 :
        raise StencilException('Energy order invalid: Value out of range.')
    if slab.level_count < SpacetimeSlab.LEVEL_COUNT_INTERPOLATION :
        raise StencilException('Slab invalid: Too few levels for energy diagnostics.')
    grid = slab.grid
    coordinates = grid.coordinates()
    region = slab.mask(0) & slab.mask(slab.level_count - 1)
    if not region.any() :
        raise MaskEmptyException('Slab invalid: No node active on every level.')
    weight = sigma(coordinates)
    extent = float(numpy.max(weight[region]))
    taus = tuple(t / extent for t in slab.times)
    volume = grid.h ** 3
    points = coordinates[:, region]
    energies = []
    timelike = 0.0
    energy = 0.0
    for tau in taus :
        t = tau * weight
        values = slab.interpolate_nodes(lambda level : _level_arrays(slab, level, order), t, region)
        values = values[:, region]
        w = weight[region]
        derivatives = [values[: 10], values[10 : 50]]
        if order >= 2 :
            derivatives.append(values[50 :])
        x = [
            volume * float(numpy.sum(w ** (2.0 * (delta + i + 0.5)) * numpy.sum(part * part, axis = 0)))
            for i, part in enumerate(derivatives)
        ]
        energies.append(tuple(x))
        upper = to_matrix(values[: 10] + MINKOWSKI_INVERSE[:, numpy.newaxis], 4)
        du = values[10 : 50].reshape(4, 10, -1)
        du = numpy.stack([to_matrix(du[r], 4).reshape(16, -1) for r in range(4)])
        conormal = boost_conormal(points, t[region])
        momentum = _momentum(upper, du, conormal)
        lower = invert(upper)
        square = numpy.einsum('mn...,m...,n...->...', lower, momentum, momentum)
        density = numpy.einsum('m...,m...->...', momentum, conormal)
        scale = float(numpy.max(numpy.sum(momentum * momentum, axis = 0)))
        peak = float(numpy.max(numpy.abs(density)))
        if scale > 0.0 :
            timelike = max(timelike, float(numpy.max(square)) / scale)
        if peak > 0.0 :
            energy = max(energy, float(numpy.max(-density)) / peak)
    reference = slab.reference_level
    y_reference = energies[reference][0] + energies[reference][1]
    exponent = 0.0
    if y_reference > 0.0 :
        for tau, x in zip(taus, energies) :
            if tau != 0.0 and x[0] + x[1] > 0.0 :
                exponent = max(exponent, 0.5 * math.log((x[0] + x[1]) / y_reference) / abs(tau))
    result = EnergyDiagnostics(
        taus,
        tuple(energies),
        tuple(_lateral_flux(slab, level) for level in range(slab.level_count)),
        timelike,
        energy,
        exponent,
        tuple(level_hyperbolicity(slab, level) for level in range(slab.level_count))
    )
    logger.info(
        'Energy diagnostics: y1(0) = %.4g, Gronwall exponent %.4g, causal %s',
        y_reference, exponent, result.causal
    )
    return result
