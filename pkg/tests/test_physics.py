from tests.environment import instance as environment
from maxslice import Grid3, ScalarField, SphereRule
from maxslice.datasets.schwarzschild import make_schwarzschild
from maxslice.physics import (
    Verdict,
    adm_mass,
    angular_momentum_komar,
    angular_momentum_pi,
    axisymmetry_residual,
    extrapolate,
    hamiltonian_residual,
    inequality_verdict,
    invariants,
    k_squared,
    momentum_residual,
    trace_field,
)
from maxslice.exceptions import QuadratureException

import unittest

import numpy

class TestConstraints(unittest.TestCase) :

    def test_flat(self) :
        d = environment.flat
        region = d.grid.interior
        self.assertEqual(hamiltonian_residual(d).sup(region), 0.0)
        self.assertEqual(momentum_residual(d).sup(region), 0.0)
        self.assertEqual(trace_field(d).sup(), 0.0)

    def test_constant(self) :
        grid = environment.grid
        c = 2.0
        a = 0.1
        d = environment.constant_data(grid, c * numpy.eye(3), a * numpy.eye(3))
        region = grid.interior
        numpy.testing.assert_allclose(trace_field(d).array, 3.0 * a / c)
        numpy.testing.assert_allclose(k_squared(d), 3.0 * a * a / (c * c))
        numpy.testing.assert_allclose(
            hamiltonian_residual(d).array[region], 6.0 * a * a / (c * c), rtol = 1e-12
        )
        self.assertLess(momentum_residual(d).sup(region), 1e-12)

    def test_schwarzschild(self) :
        d = environment.schwarzschild
        grid = d.grid
        region = grid.interior & (grid.radius() >= 3.5)
        self.assertTrue(region.any())
        self.assertLess(hamiltonian_residual(d).sup(region), 2e-2)
        self.assertEqual(momentum_residual(d).sup(region), 0.0)
        self.assertTrue(d.bounded(0.05))
        self.assertFalse(d.valid[grid.shape[0] // 2, grid.shape[1] // 2, grid.shape[2] // 2])

    def test_axisymmetry(self) :
        d = environment.schwarzschild
        region = d.grid.interior & (d.grid.radius() >= 3.5)
        self.assertLess(axisymmetry_residual(d.masked(region)), 5e-2)
        grid = environment.grid
        x = grid.coordinates()[0]
        self.assertGreater(axisymmetry_residual(ScalarField(grid, x)), 1.0)

class TestExtrapolation(unittest.TestCase) :

    def test_exact(self) :
        radii = (5.0, 6.0, 7.0, 8.0)
        values = [1.5 + 2.0 / radius - 3.0 / radius ** 2 for radius in radii]
        result = extrapolate(radii, values)
        self.assertAlmostEqual(result.value, 1.5, places = 10)
        self.assertEqual(result.radii, radii)
        self.assertGreaterEqual(result.spread, 0.0)

    def test_degree(self) :
        self.assertAlmostEqual(extrapolate((4.0,), (2.0,)).value, 2.0)
        self.assertAlmostEqual(extrapolate((4.0, 8.0), (1.25, 1.125)).value, 1.0)
        self.assertEqual(extrapolate((4.0, 8.0), (1.25, 1.125)).spread, 0.0)

    def test_dict(self) :
        result = extrapolate((5.0, 6.0, 7.0), (1.0, 1.0, 1.0))
        self.assertEqual(type(result).from_dict(result.to_dict()), result)

class TestMass(unittest.TestCase) :

    GRID_N = 40
    RADII = (5.0, 6.0, 7.0, 8.0)

    @classmethod
    def setUpClass(cls) :
        grid = Grid3(cls.GRID_N, environment.SCHWARZSCHILD_H)
        cls.__data = make_schwarzschild(grid, environment.SCHWARZSCHILD_MASS, environment.SCHWARZSCHILD_EXCISION)

    def test_mass(self) :
        mass = adm_mass(self.__data, self.RADII)
        self.assertAlmostEqual(mass.value, environment.SCHWARZSCHILD_MASS, delta = 0.1)
        self.assertEqual(len(mass.values), len(self.RADII))
        # The finite-radius values approach the mass from above.
        self.assertTrue(all(a > b for a, b in zip(mass.values, mass.values[1 :])))

    def test_flat(self) :
        mass = adm_mass(environment.flat, (1.5, 2.0, 2.5))
        self.assertEqual(mass.value, 0.0)

    def test_angular_momentum(self) :
        momentum = angular_momentum_pi(self.__data, radii = self.RADII)
        self.assertEqual(momentum.value, 0.0)

    def test_radii(self) :
        with self.assertRaises(QuadratureException) :
            adm_mass(self.__data, (5.0, 100.0))
        with self.assertRaises(ValueError) :
            adm_mass(self.__data, ())

class TestKomar(unittest.TestCase) :

    def test_static(self) :
        slab = environment.schwarzschild_slab
        self.assertEqual(angular_momentum_komar(slab, 3.0, rule = SphereRule(8, 16)), 0.0)
        with self.assertRaises(QuadratureException) :
            angular_momentum_komar(slab, 10.0)

class TestVerdict(unittest.TestCase) :

    def test_verdict(self) :
        self.assertEqual(inequality_verdict(1.0, 0.25).verdict, Verdict.HOLDS)
        self.assertEqual(inequality_verdict(0.1, 1.0).verdict, Verdict.VIOLATED)
        verdict = inequality_verdict(0.5, 0.25)
        self.assertEqual(verdict.verdict, Verdict.INDETERMINATE)
        self.assertAlmostEqual(verdict.margin, 0.0)
        self.assertEqual(inequality_verdict(1.0, 0.81, 0.2).verdict, Verdict.INDETERMINATE)
        self.assertEqual(inequality_verdict(1.0, -0.25).verdict, Verdict.HOLDS)

class TestInvariants(unittest.TestCase) :

    def test_flat(self) :
        report = invariants(environment.flat, radii = (1.5, 2.0, 2.5), rule = SphereRule(8, 16))
        self.assertEqual(report.mass.value, 0.0)
        self.assertEqual(report.trace_sup, 0.0)
        self.assertEqual(report.hamiltonian_sup, 0.0)
        self.assertIsNone(report.angular_momentum_komar)
        self.assertEqual(report.verdict.verdict, Verdict.INDETERMINATE)
        self.assertEqual(type(report).from_dict(report.to_dict()), report)
