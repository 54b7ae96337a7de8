from tests.environment import instance as environment
from maxslice import SpacetimeSlab, build_cauchy_data, evolve, energy_diagnostics
from maxslice.evolution import (
    MINKOWSKI_INVERSE,
    LevelState,
    boost_conormal,
    constraint_residual,
    harmonic_monitor,
    hyperbolicity,
    level_hyperbolicity,
    reduced_eve_rhs,
    step,
)
from maxslice.fields import erode
from maxslice.exceptions import CflException, GateException, StencilException

import math
import unittest

import numpy

class TestCauchyData(unittest.TestCase) :

    def test_flat(self) :
        cd = build_cauchy_data(environment.flat)
        numpy.testing.assert_array_equal(cd.phi.values, MINKOWSKI_INVERSE.reshape(10, 1, 1, 1) + numpy.zeros(cd.phi.values.shape))
        self.assertEqual(float(numpy.max(numpy.abs(cd.psi.values))), 0.0)
        self.assertTrue(cd.valid.all())

    def test_gate(self) :
        grid = environment.grid
        d = environment.constant_data(grid, numpy.eye(3), 0.1 * numpy.eye(3))
        self.assertGreater(constraint_residual(d), 1e-3)
        with self.assertRaises(GateException) as context :
            build_cauchy_data(d, gate = 1e-6)
        self.assertEqual(context.exception.stage, 'cauchy')
        cd = build_cauchy_data(d)
        numpy.testing.assert_allclose(cd.psi.component(0, 0)[cd.valid], 2.0 * 0.3)
        numpy.testing.assert_allclose(cd.psi.component(1, 1)[cd.valid], -0.2)

    def test_harmonic(self) :
        d = environment.schwarzschild
        grid = d.grid
        region = grid.interior & (grid.radius() >= 3.0)
        sups = []
        for fault in (False, True) :
            cd = build_cauchy_data(d, fault = fault)
            slab = SpacetimeSlab(grid, (0.0,), [cd.phi], [cd.psi], [cd.valid])
            sups.append(harmonic_monitor(slab, 0).f.sup(region))
        self.assertLess(sups[0], 1e-2)
        self.assertGreater(sups[1], 2e-2)

class TestHyperbolicity(unittest.TestCase) :

    def test_conormal(self) :
        points = numpy.array([[0.0, 1.0], [0.0, 2.0], [0.0, 0.0]])
        conormal = boost_conormal(points, numpy.zeros(2))
        numpy.testing.assert_allclose(conormal, [[1.0, 1.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]])
        conormal = boost_conormal(points, numpy.array([0.1, 0.1]))
        norm = -conormal[0] ** 2 + numpy.sum(conormal[1 :] ** 2, axis = 0)
        numpy.testing.assert_allclose(norm, -1.0)

    def test_minkowski(self) :
        upper = numpy.diag([-1.0, 1.0, 1.0, 1.0])[:, :, numpy.newaxis].repeat(3, axis = 2)
        report = hyperbolicity(upper, numpy.zeros((3, 3)), 0.0)
        self.assertAlmostEqual(report.a, 1.0)
        self.assertAlmostEqual(report.b, 1.0)
        self.assertAlmostEqual(report.c, 2.0)
        self.assertAlmostEqual(report.speed, 1.0)
        self.assertTrue(report.regular)
        self.assertAlmostEqual(report.h, 2.0)

    def test_irregular(self) :
        upper = numpy.diag([1.0, 1.0, 1.0, 1.0])[:, :, numpy.newaxis]
        report = hyperbolicity(upper, numpy.zeros((3, 1)), 0.0)
        self.assertFalse(report.regular)
        self.assertEqual(report.h, math.inf)

class TestEvolve(unittest.TestCase) :

    @classmethod
    def setUpClass(cls) :
        cls.__slab = evolve(build_cauchy_data(environment.flat), environment.STEPS)

    def test_rhs(self) :
        slab = environment.minkowski
        result = reduced_eve_rhs(slab.metric(2), slab.rate(2))
        self.assertEqual(result.sup(), 0.0)

    def test_flat(self) :
        slab = self.__slab
        self.assertEqual(slab.level_count, 2 * environment.STEPS + 1)
        numpy.testing.assert_allclose(slab.times, environment.times())
        self.assertEqual(slab.mask_erosion_defect(), 0)
        for level in range(slab.level_count) :
            with self.subTest(level) :
                mask = slab.mask(level)
                self.assertTrue(mask.any())
                numpy.testing.assert_array_equal(
                    slab.metric(level).values[:, mask], numpy.broadcast_to(MINKOWSKI_INVERSE.reshape(10, 1), (10, int(numpy.count_nonzero(mask))))
                )
                self.assertEqual(harmonic_monitor(slab, level).sup, 0.0)
                self.assertTrue(level_hyperbolicity(slab, level).regular)

    def test_step_excision(self) :
        grid = environment.grid
        cd = build_cauchy_data(environment.flat)
        active = cd.valid & (grid.radius() >= 1.0)
        state = LevelState(0.0, cd.phi.masked(active), cd.psi.masked(active), active)
        following = step(state, environment.CFL * environment.H)
        self.assertFalse(numpy.any(following.mask & ~erode(active, grid.margin)))
        self.assertTrue(numpy.all(numpy.isnan(following.metric.values[:, ~following.mask])))
        numpy.testing.assert_array_equal(
            following.metric.values[:, following.mask],
            numpy.broadcast_to(MINKOWSKI_INVERSE[:, numpy.newaxis], (10, int(numpy.count_nonzero(following.mask))))
        )
        self.assertEqual(float(numpy.max(numpy.abs(following.rate.values[:, following.mask]))), 0.0)

    def test_one_sided(self) :
        slab = evolve(build_cauchy_data(environment.flat), 1, two_sided = False)
        self.assertEqual(slab.times, (0.0, environment.CFL * environment.H))

    def test_invalid(self) :
        cd = build_cauchy_data(environment.flat)
        with self.assertRaises(CflException) :
            evolve(cd, 1, dt = 2.0 * environment.CFL * environment.H)
        with self.assertRaises(ValueError) :
            evolve(cd, -1)
        with self.assertRaises(ValueError) :
            evolve(cd, 1, dt = 0.0)

    def test_energy(self) :
        diagnostics = energy_diagnostics(self.__slab)
        self.assertEqual(len(diagnostics.taus), self.__slab.level_count)
        self.assertEqual(diagnostics.taus[self.__slab.reference_level], 0.0)
        for energies in diagnostics.energies :
            self.assertEqual(len(energies), 3)
            self.assertEqual(max(energies), 0.0)
        self.assertEqual(diagnostics.y(2), (0.0,) * self.__slab.level_count)
        self.assertTrue(diagnostics.causal)
        self.assertEqual(diagnostics.gronwall_exponent, 0.0)
        self.assertEqual(max(abs(flux) for flux in diagnostics.flux), 0.0)
        self.assertEqual(len(diagnostics.to_dict()['hyperbolicity']), self.__slab.level_count)
        with self.assertRaises(ValueError) :
            diagnostics.y(3)
        with self.assertRaises(StencilException) :
            energy_diagnostics(self.__slab, order = 3)
        with self.assertRaises(StencilException) :
            energy_diagnostics(evolve(build_cauchy_data(environment.flat), 1))

class TestEvolveSchwarzschild(unittest.TestCase) :

    def setUp(self) :
        if not environment.long :
            raise unittest.SkipTest(f'Set {environment.LONG_VARIABLE}=1 to evolve curved data.')

    def test_harmonic(self) :
        d = environment.schwarzschild
        grid = d.grid
        slab = evolve(build_cauchy_data(d), 1)
        region = grid.interior & (grid.radius() >= 3.5)
        for level in range(slab.level_count) :
            with self.subTest(level) :
                mask = region & slab.mask(level)
                self.assertTrue(mask.any())
                self.assertLess(harmonic_monitor(slab, level).f.sup(mask), 1e-2)

    def test_excision(self) :
        slab = environment.schwarzschild_evolved
        excised = ~environment.schwarzschild.valid
        self.assertTrue(excised.any())
        self.assertEqual(slab.mask_erosion_defect(), 0)
        for level in range(slab.level_count) :
            with self.subTest(level) :
                self.assertFalse(numpy.any(slab.mask(level) & excised))
                self.assertTrue(numpy.all(numpy.isnan(slab.metric(level).values[:, excised])))
                self.assertTrue(numpy.all(numpy.isnan(slab.rate(level).values[:, excised])))
                active = slab.metric(level).values[:, slab.mask(level)]
                self.assertTrue(numpy.all(numpy.isfinite(active)))

    def test_energy(self) :
        slab = environment.schwarzschild_evolved
        diagnostics = energy_diagnostics(slab)
        self.assertTrue(diagnostics.causal)
        y = diagnostics.y(2)
        self.assertTrue(all(value > 0.0 for value in y))
        self.assertTrue(math.isfinite(diagnostics.gronwall_exponent))
        self.assertGreaterEqual(diagnostics.gronwall_exponent, 0.0)
        self.assertLess(diagnostics.gronwall_exponent, 10.0)
        reference = diagnostics.y(1)[slab.reference_level]
        for tau, value in zip(diagnostics.taus, diagnostics.y(1)) :
            bound = math.exp(2.0 * diagnostics.gronwall_exponent * abs(tau)) * reference
            self.assertLessEqual(value, bound * (1.0 + 1e-12))
