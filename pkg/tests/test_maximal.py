from tests.environment import instance as environment
from maxslice import Grid3, ScalarField
from maxslice.datasets.flat import make_flat, make_minkowski_slab
from maxslice.maximal import (
    SolverConfig,
    assemble_L0,
    evaluate_H,
    graph_norm,
    graph_operator,
    ift_scalar,
    ift_solve,
    induced_data,
    linearization_check,
    solve_L0,
    solve_region,
)
from maxslice.physics import trace_field
from maxslice.exceptions import (
    ContractionException,
    GateException,
    TrustRegionException,
)

import math
import unittest

import numpy

class TestLinearOperator(unittest.TestCase) :

    def test_quadratic(self) :
        grid = environment.grid
        op = assemble_L0(environment.flat)
        x = grid.coordinates()[0]
        result = op.apply(ScalarField(grid, x * x))
        numpy.testing.assert_allclose(result.array[op.interior], 2.0, rtol = 0.0, atol = 1e-10)

    def test_mixed(self) :
        grid = environment.grid
        a = 0.2
        metric = numpy.eye(3)
        metric[0, 1] = metric[1, 0] = a
        op = assemble_L0(environment.constant_data(grid, metric, numpy.zeros((3, 3))))
        inverse = numpy.linalg.inv(metric)
        x, y, _ = grid.coordinates()
        numpy.testing.assert_allclose(
            op.apply(ScalarField(grid, x * y)).array[op.interior], 2.0 * inverse[0, 1], atol = 1e-10
        )
        numpy.testing.assert_allclose(
            op.apply(ScalarField(grid, x * x)).array[op.interior], 2.0 * inverse[0, 0], atol = 1e-10
        )

    def test_potential(self) :
        grid = environment.grid
        c = 0.3
        op = assemble_L0(environment.constant_data(grid, numpy.eye(3), c * numpy.eye(3)))
        numpy.testing.assert_allclose(op.potential, 3.0 * c * c)
        result = op.apply(ScalarField(grid, numpy.ones(grid.shape)))
        numpy.testing.assert_allclose(result.array[op.interior], -3.0 * c * c, atol = 1e-12)

    def test_rows(self) :
        op = assemble_L0(environment.flat)
        boundary = op.region & ~op.interior
        self.assertTrue(numpy.array_equal(op.outer, boundary))
        self.assertFalse(op.inner.any())
        op = assemble_L0(environment.schwarzschild)
        self.assertTrue(op.outer.any())
        self.assertTrue(op.inner.any())
        self.assertFalse(numpy.any(op.inner & op.outer))
        self.assertEqual(op.size, numpy.count_nonzero(op.region))

    def test_symmetry(self) :
        for name, d in (('flat', environment.flat), ('schwarzschild', environment.schwarzschild)) :
            with self.subTest(name) :
                op = assemble_L0(d)
                for seed in range(3) :
                    self.assertLess(op.symmetry_defect(seed), 1e-12)

    def test_vector(self) :
        grid = environment.grid
        op = assemble_L0(environment.flat)
        values = numpy.ones(grid.shape)
        values[grid.shape[0] // 2, grid.shape[1] // 2, grid.shape[2] // 2] = numpy.nan
        with self.assertRaises(ValueError) :
            op.vector(ScalarField(grid, values))
        with self.assertRaises(ValueError) :
            op.vector(ScalarField(Grid3(20, 0.5), numpy.zeros((20, 20, 20))))

    def test_singular_value(self) :
        op = assemble_L0(environment.flat)
        value = op.smallest_singular_value(iterations = 10)
        self.assertTrue(math.isfinite(value))
        self.assertGreater(value, 0.0)

class TestSolve(unittest.TestCase) :

    @classmethod
    def setUpClass(cls) :
        cls.__op = assemble_L0(environment.flat)

    def test_solve(self) :
        op = self.__op
        grid = op.grid
        r2 = numpy.sum(grid.coordinates() ** 2, axis = 0)
        rhs = ScalarField(grid, numpy.exp(-r2))
        solution = solve_L0(op, rhs)
        self.assertLessEqual(solution.residual, 1e-9)
        self.assertGreater(solution.inverse_bound, 0.0)
        self.assertLess(op.kernel_component(solution.v), 1e-12)
        numpy.testing.assert_allclose(
            op.apply(solution.v).array[op.interior], rhs.array[op.interior], atol = 1e-8
        )

    def test_solve_zero(self) :
        op = self.__op
        grid = op.grid
        solution = solve_L0(op, ScalarField(grid, numpy.zeros(grid.shape)))
        self.assertEqual(solution.iterations, 0)
        self.assertEqual(solution.residual, 0.0)
        self.assertTrue(numpy.all(solution.v.array[op.region] == 0.0))

    def test_solve_invalid(self) :
        op = self.__op
        grid = op.grid
        values = numpy.zeros(grid.shape)
        values[op.interior] = numpy.nan
        with self.assertRaises(ValueError) :
            solve_L0(op, ScalarField(grid, values, numpy.ones(grid.shape, dtype = bool)))

    def test_project(self) :
        op = self.__op
        vector = op.project(numpy.ones(op.size))
        numpy.testing.assert_allclose(vector, 0.0, atol = 1e-12)
        grid = op.grid
        self.assertAlmostEqual(op.kernel_component(ScalarField(grid, numpy.ones(grid.shape))), 1.0)

class TestSolverConfig(unittest.TestCase) :

    def test_construct(self) :
        config = SolverConfig()
        self.assertEqual(config.contraction, 0.5)
        with self.assertRaises(ValueError) :
            SolverConfig(contraction = 1.0)
        with self.assertRaises(ValueError) :
            SolverConfig(tolerance = 0.0)
        with self.assertRaises(ValueError) :
            SolverConfig(iterations = 0)

class TestScalar(unittest.TestCase) :

    def test_closed_form(self) :
        x, log = ift_scalar(lambda x : x + x * x, 1.0, 0.1)
        self.assertAlmostEqual(x, (-1.0 + math.sqrt(1.4)) / 2.0, places = 14)
        self.assertGreater(len(log), 5)
        for record in log[1 :] :
            if record.enforced :
                self.assertLessEqual(record.ratio, 0.5)

    def test_trust_region(self) :
        with self.assertRaises(TrustRegionException) :
            ift_scalar(lambda x : x + x * x, 1.0, 0.5)

    def test_contraction(self) :
        log = []
        with self.assertRaises(ContractionException) :
            ift_scalar(lambda x : x + 5.0 * x * x, 1.0, 0.1, log = log)
        self.assertGreaterEqual(len(log), 1)

    def test_derivative(self) :
        with self.assertRaises(ValueError) :
            ift_scalar(lambda x : x, 0.0, 0.1)

class TestGraph(unittest.TestCase) :

    def test_flat(self) :
        u, log = ift_solve(environment.minkowski, environment.flat)
        self.assertEqual(len(log), 1)
        self.assertEqual(log[0].iteration, 0)
        self.assertEqual(log[0].step, 0.0)
        self.assertTrue(numpy.all(u.array == 0.0))

    def test_solve_region(self) :
        slab = environment.minkowski
        d = environment.flat
        grid = d.grid
        region = solve_region(slab, d)
        zero = evaluate_H(slab, d, ScalarField(grid, numpy.zeros(grid.shape))).valid
        self.assertTrue(region.any())
        self.assertFalse(numpy.any(region & ~zero))
        self.assertFalse(numpy.any(region & ~slab.mask(0)))

    def test_entry(self) :
        slab = environment.tilted_slab
        d = environment.tilted
        grid = d.grid
        curvature = evaluate_H(slab, d, ScalarField(grid, numpy.zeros(grid.shape)))
        trace = trace_field(d)
        region = curvature.valid & trace.valid
        self.assertTrue(region.any())
        numpy.testing.assert_allclose(curvature.array[region], trace.array[region], atol = 1e-12)

    def test_smallness(self) :
        with self.assertRaises(GateException) as context :
            ift_solve(environment.tilted_slab, environment.tilted, SolverConfig(smallness = 1e-6))
        self.assertEqual(context.exception.stage, 'slice')
        self.assertEqual(context.exception.gate, 'smallness')

    def test_tilted(self) :
        slab = environment.tilted_slab
        d = environment.tilted
        grid = d.grid
        config = SolverConfig(tolerance = 1e-7)
        u, log = ift_solve(slab, d, config)
        self.assertLessEqual(log[-1].residual, config.tolerance)
        self.assertLessEqual(len(log), config.iterations + 1)
        self.assertLessEqual(graph_norm(u), config.radius)
        op = graph_operator(slab, d)
        self.assertTrue(numpy.all(numpy.isfinite(u.array)))
        # Every graph -u0 + c is maximal in the slab.
        shifted = (u.array + environment.profile(grid))[op.interior]
        self.assertLess(numpy.ptp(shifted), 0.05 * environment.TILTED_AMPLITUDE)
        result = induced_data(slab, u)
        self.assertLess(trace_field(result).sup(op.interior), 1e-6)

    def test_induced_gate(self) :
        slab = environment.tilted_slab
        grid = slab.grid
        with self.assertRaises(GateException) as context :
            induced_data(slab, ScalarField(grid, numpy.zeros(grid.shape)), trace_gate = 1e-9)
        self.assertEqual(context.exception.stage, 'induced')

class TestLinearization(unittest.TestCase) :

    @classmethod
    def setUpClass(cls) :
        grid = Grid3(24, environment.H)
        cls.__data = make_flat(grid)
        cls.__slab = make_minkowski_slab(grid, environment.times())
        r2 = numpy.sum(grid.coordinates() ** 2, axis = 0)
        cls.__profile = ScalarField(grid, numpy.exp(-r2 / 4.0))

    def test_slope(self) :
        report = linearization_check(self.__slab, self.__data, self.__profile)
        self.assertEqual(report.epsilons, (1e-2, 1e-3, 1e-4))
        self.assertEqual(len(report.errors), 3)
        self.assertEqual(len(report.increments), 2)
        self.assertIsNotNone(report.slope)
        self.assertAlmostEqual(report.slope, 2.0, delta = 0.3)
        self.assertLess(report.defect, 0.05)
        self.assertTrue(report.consistent)

    def test_mismatched_operator(self) :
        grid = self.__profile.grid
        # Metric 2e halves the Laplacian, the increments keep converging at second order.
        op = assemble_L0(environment.constant_data(grid, 2.0 * numpy.eye(3), numpy.zeros((3, 3))))
        report = linearization_check(self.__slab, self.__data, self.__profile, op = op, gate = None)
        self.assertAlmostEqual(report.slope, 2.0, delta = 0.3)
        self.assertGreater(report.defect, 0.5)
        self.assertFalse(report.consistent)
        with self.assertRaises(GateException) as context :
            linearization_check(self.__slab, self.__data, self.__profile, op = op)
        self.assertEqual(context.exception.gate, 'defect')

    def test_zero_profile(self) :
        zero = ScalarField(self.__profile.grid, numpy.zeros(self.__profile.grid.shape))
        report = linearization_check(self.__slab, self.__data, zero)
        self.assertEqual(report.errors, (0.0, 0.0, 0.0))
        self.assertIsNone(report.slope)
        self.assertEqual(report.defect, 0.0)

    def test_invalid(self) :
        with self.assertRaises(ValueError) :
            linearization_check(self.__slab, self.__data, self.__profile, epsilons = (1e-3,))
        with self.assertRaises(ValueError) :
            linearization_check(self.__slab, self.__data, self.__profile, epsilons = (1e-3, 0.0))
