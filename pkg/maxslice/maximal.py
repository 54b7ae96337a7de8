"""
Perturbation solver for the maximal graph equation.

The mean curvature of the graph of `u` in a slab is viewed as a map `H(g, k, u)` of the height with
the data as parameters. Its derivative at `u = 0` is frozen as the operator `L0 = Laplace_g - |k|^2`
and the fixed-point map `u -> u - L0^-1 H(u)` is iterated on the complement of the constants.
"""

from .fields import Grid3, ScalarField, SpacetimeSlab, erode
from .geometry import KAPPA_DEFAULT, graph_mean_curvature, graph_metric, graph_second_form, graph_state
from .physics import InitialData, k_squared, trace_field
from .sobolev import DELTA_DEFAULT, WeightParams, c_norm, h_norm, sigma
from .evolution import constraint_residual
from .exceptions import *

import dataclasses
import logging
import math
import typing

import numpy
import scipy.ndimage
import scipy.sparse
import scipy.sparse.linalg

logger = logging.getLogger(__name__)

DIRECT_MAXIMUM = 40_000
"""Largest unknown count solved by sparse LU; larger systems use preconditioned GMRES."""
EPSILONS_DEFAULT = (1e-2, 1e-3, 1e-4)
"""Default amplitudes of the linearization check."""
NOISE_FLOOR = 1e-13
"""Increments of the linearization check below this bound are excluded from the slope fit."""
DEFECT_GATE = 0.1
"""Default gate of the relative defect of the linearization check against `L0 v`."""
SLOPE_MINIMUM = 1.5
"""Smallest log-log slope of the increments accepted as second-order convergence."""
HEIGHT_OFFSET = 1e-6
"""Offset height sampled when restricting the solve region, in time steps."""
GRAPH_WEIGHT = WeightParams(1, 0.0)
"""Weight of the graph norm `sup (|u| + sigma |Du|)` of heights and corrections."""

@dataclasses.dataclass(frozen = True)
class SolverConfig :
    """Parameters of the fixed-point iteration."""

    delta : float = DELTA_DEFAULT
    tolerance : float = 1e-8
    """Bound of the sup and of the weighted norm of the mean curvature at convergence."""
    radius : float = 0.1
    """Trust radius of the iterates in the graph norm."""
    iterations : int = 30
    contraction : float = 0.5
    """Ceiling of the ratio of consecutive steps."""
    floor : float = 1e-4
    """Steps below this fraction of the first step are logged without enforcing the ceiling."""
    linear_tolerance : float = 1e-10
    smallness : float = 0.05
    """Gate of the mean curvature of the zero graph at entry."""
    kappa : float = KAPPA_DEFAULT

    def __post_init__(self) -> None :
        for name in ('tolerance', 'radius', 'floor', 'linear_tolerance', 'smallness') :
            if not getattr(self, name) > 0.0 :
                raise ValueError(f'Solver configuration invalid: {name.capitalize()} not positive.')
        if self.iterations < 1 :
            raise ValueError('Solver configuration invalid: Iteration count below one.')
        if not 0.0 < self.contraction < 1.0 :
            raise ValueError('Solver configuration invalid: Contraction ceiling not in (0, 1).')

def evaluate_H(
    slab : SpacetimeSlab,
    d : InitialData,
    u : ScalarField,
    kappa : float = KAPPA_DEFAULT
) -> ScalarField :
    """
    Gets the mean curvature of the graph of `u` in the slab, restricted to the region of the data.

    At `u = 0` this is `tr_g k` of the slice up to the interpolation error of the slab.

    :raises GraphExitsSlabException:
        Height outside of the boost region.
    :raises GraphNotSpacelikeException:
        Graph not uniformly spacelike.
    """
    if d.grid != slab.grid :
        raise ValueError('Initial data invalid: Grid differs from slab.')
    state = graph_state(slab, u, kappa)
    return graph_mean_curvature(slab, u, state).masked(d.valid)

class _Solver :
    """Sparse LU for small systems, GMRES with incomplete LU otherwise."""

    def __init__(self, matrix : scipy.sparse.csr_matrix) -> None :
        self.__matrix = matrix
        csc = matrix.tocsc()
        if matrix.shape[0] <= DIRECT_MAXIMUM :
            self.__lu = scipy.sparse.linalg.splu(csc)
            self.__ilu = None
        else :
            self.__lu = None
            self.__ilu = scipy.sparse.linalg.spilu(csc, drop_tol = 1e-5, fill_factor = 20.0)

    def solve(
        self,
        b : numpy.ndarray,
        tolerance : float,
        transpose : bool = False
    ) -> typing.Tuple[numpy.ndarray, int] :
        """Gets the solution and the Krylov iteration count (zero for a direct solve)."""
        if self.__lu is not None :
            return self.__lu.solve(b, trans = 'T' if transpose else 'N'), 0
        trans = 'T' if transpose else 'N'
        ilu = self.__ilu
        shape = self.__matrix.shape
        preconditioner = scipy.sparse.linalg.LinearOperator(shape, lambda x : ilu.solve(x, trans))
        matrix = self.__matrix.T.tocsr() if transpose else self.__matrix
        count = [0]
        def callback(_) -> None :
            count[0] += 1
        x, info = scipy.sparse.linalg.gmres(
            matrix, b, rtol = tolerance, restart = 50, maxiter = 40, M = preconditioner,
            callback = callback, callback_type = 'pr_norm'
        )
        if info != 0 :
            raise ConvergenceException('Linear solve invalid: Iteration budget exhausted.')
        return x, count[0]

class LinearOperator :
    """
    Discrete `L0 = Laplace_g - |k|^2_g` on a node region.

    Rows of the region fall into three classes. Interior rows, whose 27-point neighbourhood lies in
    the region, carry the divergence form `(1 / sqrt g) d_i (sqrt g g^ij d_j v) - |k|^2 v`. Rows on
    the outer boundary carry the Robin closure `x . Dv + v = 0` of a `1 / r` decay with one-sided
    differences toward the origin. Rows on the boundary of an excision carry `v = 0`.
    """

    def __init__(
        self,
        grid : Grid3,
        matrix : scipy.sparse.csr_matrix,
        region : numpy.ndarray,
        interior : numpy.ndarray,
        outer : numpy.ndarray,
        weight : numpy.ndarray,
        potential : numpy.ndarray
    ) -> None :
        self.__grid = grid
        self.__matrix = matrix
        self.__region = region
        self.__interior = interior
        self.__outer = outer
        self.__weight = weight
        self.__potential = potential
        self.__solver : typing.Optional[_Solver] = None

    @property
    def grid(self) -> Grid3 :
        """Gets the grid."""
        return self.__grid

    @property
    def matrix(self) -> scipy.sparse.csr_matrix :
        """Gets the matrix over the region in C order of the nodes."""
        return self.__matrix

    @property
    def region(self) -> numpy.ndarray :
        """Gets the mask of the unknowns."""
        return self.__region

    @property
    def interior(self) -> numpy.ndarray :
        """Gets the mask of the rows carrying the operator."""
        return self.__interior

    @property
    def outer(self) -> numpy.ndarray :
        """Gets the mask of the Robin rows."""
        return self.__outer

    @property
    def inner(self) -> numpy.ndarray :
        """Gets the mask of the Dirichlet rows."""
        return self.__region & ~self.__interior & ~self.__outer

    @property
    def potential(self) -> numpy.ndarray :
        """Gets `|k|^2_g` over the region, the negated zeroth-order coefficient."""
        return self.__potential

    @property
    def size(self) -> int :
        """Gets the unknown count."""
        return self.__matrix.shape[0]

    def vector(self, field : ScalarField) -> numpy.ndarray :
        """Gets the values of a field at the unknowns."""
        if field.grid != self.__grid :
            raise ValueError('Field invalid: Grid differs from operator.')
        values = field.array[self.__region]
        if not numpy.all(numpy.isfinite(values)) :
            raise ValueError('Field invalid: Not finite on the operator region.')
        return values

    def field(self, vector : numpy.ndarray, mask : typing.Optional[numpy.ndarray] = None) -> ScalarField :
        """Gets the field with values at the unknowns, valid on the region (or a given sub-mask)."""
        values = numpy.zeros(self.__grid.shape)
        values[self.__region] = vector
        return ScalarField(self.__grid, values, self.__region if mask is None else mask)

    def apply(self, v : ScalarField) -> ScalarField :
        """Gets `L0 v`, valid on the interior rows."""
        return self.field(self.__matrix @ self.vector(v), self.__interior)

    def inner_product(self, u : numpy.ndarray, v : numpy.ndarray) -> float :
        """Gets the `g`-volume inner product of two vectors over the interior rows."""
        rows = self.__interior[self.__region]
        return float(numpy.sum(self.__weight[rows] * u[rows] * v[rows])) * self.__grid.h ** 3

    def symmetry_defect(self, seed : int = 0) -> float :
        """
        Gets `|<L0 u, v> - <u, L0 v>|` relative to the larger pairing, for random `u` and `v`
        supported on the interior rows.
        """
        random = numpy.random.default_rng(seed)
        rows = self.__interior[self.__region]
        u = numpy.where(rows, random.standard_normal(self.size), 0.0)
        v = numpy.where(rows, random.standard_normal(self.size), 0.0)
        left = self.inner_product(self.__matrix @ u, v)
        right = self.inner_product(u, self.__matrix @ v)
        scale = max(abs(left), abs(right))
        return abs(left - right) / scale if scale > 0.0 else 0.0

    def solve(self, b : numpy.ndarray, tolerance : float, transpose : bool = False) -> typing.Tuple[numpy.ndarray, int] :
        """Solves `L0 x = b` over the unknowns."""
        if self.__solver is None :
            self.__solver = _Solver(self.__matrix)
        return self.__solver.solve(b, tolerance, transpose)

    def kernel_weights(self, delta : float = DELTA_DEFAULT) -> numpy.ndarray :
        """Gets the weights `sigma^(2 delta - 1) h^3` of the `L^2_(delta - 1/2)` inner product."""
        weight = sigma(self.__grid.coordinates())[self.__region]
        return weight ** (2.0 * delta - 1.0) * self.__grid.h ** 3

    def project(self, vector : numpy.ndarray, delta : float = DELTA_DEFAULT) -> numpy.ndarray :
        """Removes the constant component of a vector in the `L^2_(delta - 1/2)` inner product."""
        weights = self.kernel_weights(delta)
        return vector - numpy.sum(weights * vector) / numpy.sum(weights)

    def kernel_component(self, field : ScalarField, delta : float = DELTA_DEFAULT) -> float :
        """Gets `|<u, 1>| / (|u| |1|)` in the `L^2_(delta - 1/2)` inner product."""
        vector = self.vector(field)
        weights = self.kernel_weights(delta)
        norm = math.sqrt(float(numpy.sum(weights * vector * vector)) * float(numpy.sum(weights)))
        return abs(float(numpy.sum(weights * vector))) / norm if norm > 0.0 else 0.0

    def smallest_singular_value(
        self,
        delta : float = DELTA_DEFAULT,
        iterations : int = 30,
        seed : int = 0
    ) -> float :
        """Estimates the smallest singular value on the complement of the constants by inverse iteration."""
        random = numpy.random.default_rng(seed)
        x = self.project(random.standard_normal(self.size), delta)
        x /= numpy.linalg.norm(x)
        estimate = math.inf
        for _ in range(iterations) :
            y, _ = self.solve(x, 1e-12)
            y, _ = self.solve(y, 1e-12, transpose = True)
            y = self.project(y, delta)
            norm = float(numpy.linalg.norm(y))
            if norm == 0.0 :
                break
            estimate = 1.0 / math.sqrt(norm)
            x = y / norm
        return estimate

def _shifted(values : numpy.ndarray, offset : typing.Sequence[int]) -> numpy.ndarray :
    """Gets the values at `p + offset` for every node `p` (periodic, callers mask the wrap)."""
    return numpy.roll(values, tuple(-o for o in offset), axis = (0, 1, 2))

def _nearest(region : numpy.ndarray) -> typing.Tuple[numpy.ndarray, ...] :
    """Gets the index arrays of the nearest region node of every node."""
    _, indices = scipy.ndimage.distance_transform_edt(~region, return_indices = True)
    return tuple(indices)

def _outer_boundary(region : numpy.ndarray, boundary : numpy.ndarray) -> numpy.ndarray :
    """Gets the boundary nodes touching the grid faces or a component of the complement that does."""
    faces = numpy.zeros(region.shape, dtype = bool)
    faces[[0, -1], :, :] = True
    faces[:, [0, -1], :] = True
    faces[:, :, [0, -1]] = True
    structure = numpy.ones((3, 3, 3), dtype = bool)
    labels, _ = scipy.ndimage.label(~region, structure = structure)
    exterior = numpy.isin(labels, numpy.unique(labels[faces & ~region])) & (labels > 0)
    touching = scipy.ndimage.binary_dilation(exterior, structure = structure)
    return boundary & (touching | faces)

def assemble_L0(d : InitialData, region : typing.Optional[numpy.ndarray] = None) -> LinearOperator :
    """
    Assembles the linearization `L0 = Laplace_g - |k|^2_g` of the mean curvature at the zero graph.

    :param region:
        Nodes of the unknowns, restricted to the valid region of the data; defaults to it.

    :raises StencilException:
        No interior rows left.
    """
    grid = d.grid
    g = d.g.matrix()
    volume = numpy.sqrt(numpy.linalg.det(numpy.moveaxis(g, (0, 1), (-2, -1))))
    m = volume * d.g_inverse
    potential = k_squared(d)
    region = d.valid.copy() if region is None else region & d.valid
    region &= numpy.isfinite(volume) & numpy.isfinite(potential) & numpy.all(numpy.isfinite(m), axis = (0, 1))
    interior = erode(region, 1)
    if not interior.any() :
        raise StencilException('Region invalid: No interior rows.')
    boundary = region & ~interior
    outer = _outer_boundary(region, boundary)
    index = numpy.full(grid.shape, -1, dtype = numpy.int64)
    index[region] = numpy.arange(numpy.count_nonzero(region))
    h2 = grid.h ** 2
    rows, columns, entries = [], [], []

    def add(mask, offset, coefficient) -> None :
        target = _shifted(index, offset)[mask]
        rows.append(index[mask])
        columns.append(target)
        entries.append(coefficient[mask])

    unit = numpy.eye(3, dtype = int)
    zero = (0, 0, 0)
    for i in range(3) :
        e = unit[i]
        plus = 0.5 * (m[i, i] + _shifted(m[i, i], e)) / h2
        minus = 0.5 * (m[i, i] + _shifted(m[i, i], -e)) / h2
        add(interior, e, plus / volume)
        add(interior, -e, minus / volume)
        add(interior, zero, -(plus + minus) / volume)
        for j in range(3) :
            if i == j :
                continue
            f = unit[j]
            forward = _shifted(m[i, j], e) / (4.0 * h2 * volume)
            backward = _shifted(m[i, j], -e) / (4.0 * h2 * volume)
            add(interior, e + f, forward)
            add(interior, e - f, -forward)
            add(interior, -e + f, -backward)
            add(interior, -e - f, backward)
    add(interior, zero, -potential)

    # Robin rows: v + sum_i |x_i| (v_p - v_(p - s_i e_i)) / h = 0 with s_i the sign of x_i.
    coordinates = grid.coordinates()
    diagonal = numpy.ones(grid.shape)
    for i in range(3) :
        x = coordinates[i]
        inward = numpy.where(x > 0.0, _shifted(index, -unit[i]), _shifted(index, unit[i]))
        used = outer & (x != 0.0) & (inward >= 0)
        coefficient = numpy.abs(x) / grid.h
        diagonal[used] += coefficient[used]
        rows.append(index[used])
        columns.append(inward[used])
        entries.append(-coefficient[used])
    add(outer, zero, diagonal)
    add(boundary & ~outer, zero, numpy.ones(grid.shape))

    size = int(numpy.count_nonzero(region))
    matrix = scipy.sparse.coo_matrix(
        (numpy.concatenate(entries), (numpy.concatenate(rows), numpy.concatenate(columns))),
        shape = (size, size)
    ).tocsr()
    logger.debug(
        'Operator assembled: %d unknowns, %d interior, %d Robin rows',
        size, numpy.count_nonzero(interior), numpy.count_nonzero(outer)
    )
    return LinearOperator(grid, matrix, region, interior, outer, volume[region], potential[region])

@dataclasses.dataclass(frozen = True)
class LinearSolution :
    """Solution of `L0 v = f` on the complement of the constants with its solve statistics."""

    v : ScalarField
    residual : float
    """Relative residual of the unprojected solve."""
    iterations : int
    inverse_bound : float
    """Empirical `|v|_(H_2,delta-1/2) / |f|_(H_0,delta+3/2)`."""

def solve_L0(
    op : LinearOperator,
    rhs : ScalarField,
    tolerance : float = 1e-10,
    delta : float = DELTA_DEFAULT
) -> LinearSolution :
    """
    Solves `L0 v = f` with `f` taken on the interior rows and homogeneous boundary rows, then
    removes the constant component of `v` in `L^2_(delta - 1/2)`.

    :raises ValueError:
        Right-hand side not finite on the interior rows.
    :raises ConvergenceException:
        Iteration budget exhausted or residual stagnating above the tolerance.
    """
    grid = op.grid
    interior = op.interior
    if not numpy.all(numpy.isfinite(rhs.array[interior])) :
        raise ValueError('Right-hand side invalid: Not finite on the operator interior.')
    b = numpy.where(interior, rhs.array, 0.0)[op.region]
    scale = float(numpy.linalg.norm(b))
    if scale == 0.0 :
        return LinearSolution(op.field(numpy.zeros(op.size)), 0.0, 0, 0.0)
    x, iterations = op.solve(b, tolerance)
    residual = float(numpy.linalg.norm(op.matrix @ x - b)) / scale
    if not residual <= max(10.0 * tolerance, 1e-12) :
        raise ConvergenceException('Linear solve invalid: Residual stagnates, operator near-singular.')
    v = op.field(op.project(x, delta))
    source = ScalarField(grid, numpy.where(interior, rhs.array, numpy.nan))
    denominator = h_norm(source, WeightParams(0, delta + 1.5)).value
    bound = h_norm(v, WeightParams(2, delta - 0.5)).value / denominator if denominator > 0.0 else 0.0
    logger.debug('Linear solve: residual %.3e, %d iterations, inverse bound %.4g', residual, iterations, bound)
    return LinearSolution(v, residual, iterations, bound)

@dataclasses.dataclass(frozen = True)
class IterationRecord :
    """One step of a fixed-point iteration."""

    iteration : int
    residual : float
    """Sup of the mean curvature before the step."""
    norm : float
    """Weighted norm of the mean curvature before the step."""
    step : float
    """Graph norm of the correction (zero for the final record)."""
    ratio : typing.Optional[float]
    enforced : bool
    """Whether the ceiling applied to the ratio."""
    radius : float
    """Graph norm of the iterate after the step."""

    def to_dict(self) -> typing.Dict[str, typing.Any] :
        return dataclasses.asdict(self)

class _Contraction :
    """Bookkeeping of step ratios and of the trust region."""

    def __init__(self, ceiling : float, radius : float, floor : float) -> None :
        self.__ceiling = ceiling
        self.__radius = radius
        self.__floor = floor
        self.__first : typing.Optional[float] = None
        self.__previous : typing.Optional[float] = None

    def update(self, step : float, radius : float) -> typing.Tuple[typing.Optional[float], bool] :
        """
        Records a step.

        :raises TrustRegionException:
            Iterate outside of the trust radius.
        :raises ContractionException:
            Ratio above the ceiling while the previous step exceeds the floor.
        """
        if radius > self.__radius :
            raise TrustRegionException(f'Iterate invalid: Radius {radius:.3e} exceeds {self.__radius:.3e}.')
        ratio = None
        enforced = False
        if self.__previous is not None and self.__previous > 0.0 :
            ratio = step / self.__previous
            enforced = self.__previous > self.__floor * self.__first
            if enforced and ratio > self.__ceiling :
                raise ContractionException(
                    f'Iteration invalid: Ratio {ratio:.3f} exceeds {self.__ceiling:.3f}.'
                )
        if self.__first is None :
            self.__first = step
        self.__previous = step
        return ratio, enforced

def solve_region(slab : SpacetimeSlab, d : InitialData, kappa : float = KAPPA_DEFAULT) -> numpy.ndarray :
    """
    Gets the nodes where the mean curvature is defined for the zero graph and for small heights of
    either sign.

    A vanishing height samples the reference level alone, any other height samples the time stencil
    around it, whose outer levels are eroded.
    """
    grid = d.grid
    region = None
    for height in (0.0, HEIGHT_OFFSET * slab.dt, -HEIGHT_OFFSET * slab.dt) :
        u = ScalarField(grid, numpy.full(grid.shape, height))
        valid = evaluate_H(slab, d, u, kappa).valid
        region = valid if region is None else region & valid
    return region

def graph_operator(slab : SpacetimeSlab, d : InitialData, kappa : float = KAPPA_DEFAULT) -> LinearOperator :
    """Assembles `L0` over the solve region of the slab."""
    return assemble_L0(d, solve_region(slab, d, kappa))

def graph_norm(u : ScalarField) -> float :
    """Gets `sup (|u| + sigma |Du|)`."""
    return c_norm(u, GRAPH_WEIGHT).value

def ift_solve(
    slab : SpacetimeSlab,
    d : InitialData,
    cfg : SolverConfig = SolverConfig(),
    log : typing.Optional[typing.List[IterationRecord]] = None
) -> typing.Tuple[ScalarField, typing.Tuple[IterationRecord, ...]] :
    """
    Solves `H(g, k, u) = 0` by the fixed-point map `u -> u - L0^-1 H(u)` with `L0` frozen at the
    zero graph, starting from `u = 0`.

    Corrections live on the solve region; outside of it they take the value of the nearest region
    node, so that constants stay constant on the whole grid.

    :param log:
        List receiving the iteration records, kept by the caller when the iteration fails.

    :raises GateException:
        Mean curvature of the zero graph above the smallness gate.
    :raises TrustRegionException:
        Iterate outside of the trust radius.
    :raises ContractionException:
        Step ratio above the ceiling.
    :raises ConvergenceException:
        Tolerance not reached within the iteration budget.
    :raises GraphException:
        Iterate not an admissible graph.
    """
    log = [] if log is None else log
    grid = d.grid
    entry = evaluate_H(slab, d, ScalarField(grid, numpy.zeros(grid.shape)), cfg.kappa)
    op = graph_operator(slab, d, cfg.kappa)
    smallness = entry.sup(op.interior)
    if smallness > cfg.smallness :
        raise GateException('slice', 'smallness', smallness, cfg.smallness)
    u = numpy.zeros(grid.shape)
    nearest = _nearest(op.region)
    monitor = _Contraction(cfg.contraction, cfg.radius, cfg.floor)
    weight = WeightParams(0, cfg.delta + 1.5)
    for iteration in range(cfg.iterations + 1) :
        height = ScalarField(grid, u)
        curvature = evaluate_H(slab, d, height, cfg.kappa)
        if not numpy.all(curvature.valid[op.interior]) :
            raise GraphExitsSlabException('Graph invalid: Mean curvature undefined on the operator interior.')
        residual = curvature.sup(op.interior)
        norm = h_norm(curvature, weight, op.interior).value
        if residual <= cfg.tolerance and norm <= cfg.tolerance :
            log.append(IterationRecord(iteration, residual, norm, 0.0, None, False, graph_norm(height)))
            logger.info('Maximal graph after %d iterations: residual %.3e', iteration, residual)
            return height, tuple(log)
        if iteration == cfg.iterations :
            break
        solution = solve_L0(op, curvature, cfg.linear_tolerance, cfg.delta)
        correction = solution.v.array[nearest]
        step = graph_norm(ScalarField(grid, correction))
        u = u - correction
        radius = graph_norm(ScalarField(grid, u))
        try :
            ratio, enforced = monitor.update(step, radius)
        except (TrustRegionException, ContractionException) :
            log.append(IterationRecord(iteration, residual, norm, step, None, True, radius))
            raise
        log.append(IterationRecord(iteration, residual, norm, step, ratio, enforced, radius))
        logger.debug(
            'Iteration %d: residual %.3e, step %.3e, ratio %s', iteration, residual, step,
            'n/a' if ratio is None else f'{ratio:.3f}'
        )
    raise ConvergenceException('Iteration invalid: Tolerance not reached within the iteration budget.')

def ift_scalar(
    function : typing.Callable[[float], float],
    derivative : float,
    y : float,
    x0 : float = 0.0,
    radius : float = 0.25,
    contraction : float = 0.5,
    tolerance : float = 1e-15,
    iterations : int = 200,
    log : typing.Optional[typing.List[IterationRecord]] = None
) -> typing.Tuple[float, typing.Tuple[IterationRecord, ...]] :
    """
    Solves `F(x) = y` near `x0` by `x -> x - (F(x0 + x) - y) / F'(x0)` with the bookkeeping of
    `ift_solve`.

    :raises TrustRegionException:
        Iterate outside of the trust radius around `x0`.
    :raises ContractionException:
        Step ratio above the ceiling.
    :raises ConvergenceException:
        Tolerance not reached within the iteration budget.
    """
    if derivative == 0.0 :
        raise ValueError('Derivative invalid: Value zero.')
    log = [] if log is None else log
    monitor = _Contraction(contraction, radius, 1e-12)
    x = 0.0
    for iteration in range(iterations) :
        residual = abs(function(x0 + x) - y)
        following = x - (function(x0 + x) - y) / derivative
        step = abs(following - x)
        ratio, enforced = monitor.update(step, abs(following))
        log.append(IterationRecord(iteration, residual, residual, step, ratio, enforced, abs(following)))
        x = following
        if step <= tolerance :
            return x0 + x, tuple(log)
    raise ConvergenceException('Iteration invalid: Tolerance not reached within the iteration budget.')

@dataclasses.dataclass(frozen = True)
class LinearizationReport :
    """
    Central differences `(H(e v) - H(-e v)) / 2e` of the mean curvature against `L0 v`.

    The increments against the smallest amplitude isolate the `O(e^2)` consistency of the
    differences. They are blind to the operator, so the defect against `L0 v` is gated separately:
    it is the `O(h^2)` gap between `L0` and the derivative of the discrete mean curvature.
    """

    epsilons : typing.Tuple[float, ...]
    errors : typing.Tuple[float, ...]
    """Sup of the difference against `L0 v` per amplitude."""
    increments : typing.Tuple[float, ...]
    """Sup of the difference against the one at the smallest amplitude, per larger amplitude."""
    slope : typing.Optional[float]
    """Log-log slope of the increments, `None` without two increments above the noise floor."""
    defect : float
    """Relative sup of the difference at the smallest amplitude against `L0 v`."""
    gate : typing.Optional[float] = None
    """Gate that raised on the defect, `None` if the check only reported."""

    @property
    def consistent(self) -> bool :
        """
        Gets whether the differences converge at second order and the defect is within the gate
        (`DEFECT_GATE` for a report without gate).
        """
        gate = DEFECT_GATE if self.gate is None else self.gate
        return (self.slope is None or self.slope >= SLOPE_MINIMUM) and self.defect <= gate

    def to_dict(self) -> typing.Dict[str, typing.Any] :
        return dataclasses.asdict(self)

def linearization_check(
    slab : SpacetimeSlab,
    d : InitialData,
    v : ScalarField,
    epsilons : typing.Sequence[float] = EPSILONS_DEFAULT,
    op : typing.Optional[LinearOperator] = None,
    kappa : float = KAPPA_DEFAULT,
    gate : typing.Optional[float] = DEFECT_GATE
) -> LinearizationReport :
    """
    Checks the linearization of the mean curvature at the zero graph along a compactly supported
    profile.

    :raises GateException:
        Relative defect of the differences against `op` applied to the profile above `gate`.
    """
    epsilons = tuple(sorted((float(e) for e in epsilons), reverse = True))
    if len(epsilons) < 2 or epsilons[-1] <= 0.0 :
        raise ValueError('Amplitudes invalid: Two positive values required.')
    grid = d.grid
    profile = numpy.where(numpy.isfinite(v.array), v.array, 0.0)
    op = op or graph_operator(slab, d, kappa)
    region = op.interior
    linear = op.apply(ScalarField(grid, numpy.where(op.region, profile, numpy.nan))).array
    differences = []
    for epsilon in epsilons :
        forward = evaluate_H(slab, d, ScalarField(grid, epsilon * profile), kappa)
        backward = evaluate_H(slab, d, ScalarField(grid, -epsilon * profile), kappa)
        region = region & forward.valid & backward.valid
        differences.append((forward.array - backward.array) / (2.0 * epsilon))
    if not region.any() :
        raise MaskEmptyException('Region invalid: No common interior rows.')

    def sup(values : numpy.ndarray) -> float :
        return float(numpy.max(numpy.abs(values[region])))

    errors = tuple(sup(difference - linear) for difference in differences)
    increments = tuple(sup(difference - differences[-1]) for difference in differences[: -1])
    usable = [(e, i) for e, i in zip(epsilons, increments) if i > NOISE_FLOOR]
    slope = None
    if len(usable) >= 2 :
        slope = float(numpy.polyfit(
            numpy.log([e for e, _ in usable]), numpy.log([i for _, i in usable]), 1
        )[0])
    scale = sup(linear)
    defect = errors[-1] / scale if scale > 0.0 else errors[-1]
    logger.info('Linearization: slope %s, operator defect %.3e', slope, defect)
    if gate is not None and defect > gate :
        raise GateException('linearization', 'defect', defect, gate)
    return LinearizationReport(epsilons, errors, increments, slope, defect, gate)

def induced_data(
    slab : SpacetimeSlab,
    u : ScalarField,
    kappa : float = KAPPA_DEFAULT,
    trace_gate : typing.Optional[float] = None,
    constraint_gate : typing.Optional[float] = None
) -> InitialData :
    """
    Gets the metric and second fundamental form induced on the graph of `u`, indexed by the base
    coordinates.

    :raises GateException:
        Trace or constraint residual of the induced data above its gate.
    """
    state = graph_state(slab, u, kappa)
    g, _ = graph_metric(state)
    k, _ = graph_second_form(slab, u, state)
    result = InitialData(g, k)
    if trace_gate is not None :
        trace = trace_field(result).sup(slab.grid.interior)
        if trace > trace_gate :
            raise GateException('induced', 'trace', trace, trace_gate)
    if constraint_gate is not None :
        residual = constraint_residual(result)
        if residual > constraint_gate :
            raise GateException('induced', 'constraints', residual, constraint_gate)
    return result
