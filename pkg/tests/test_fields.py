from tests.environment import instance as environment
from maxslice import Grid3, ScalarField, SymTensorField4, SpacetimeSlab, SphereRule
from maxslice.fields import derivative, difference, erode, from_matrix, interpolate, sphere_integral, to_matrix
from maxslice.exceptions import CflException, OutOfConeException, QuadratureException, StencilException

import math
import unittest

import numpy

class TestGrid(unittest.TestCase) :

    def test_construct(self) :
        grid = Grid3(16, 0.5)
        self.assertEqual(grid.shape, (16, 16, 16))
        self.assertEqual(grid.size, 16 ** 3)
        self.assertAlmostEqual(grid.origin[0], -3.75)
        self.assertAlmostEqual(grid.half_width, 3.75)
        self.assertEqual(Grid3((16, 18, 20), 0.5).shape, (16, 18, 20))
        with self.assertRaises(ValueError) :
            Grid3(16, 0.0)
        with self.assertRaises(ValueError) :
            Grid3(7, 0.5)
        with self.assertRaises(ValueError) :
            Grid3((16, 16), 0.5)

    def test_coordinates(self) :
        grid = Grid3(16, 0.5)
        coordinates = grid.coordinates()
        self.assertEqual(coordinates.shape, (3, 16, 16, 16))
        numpy.testing.assert_allclose(numpy.sum(coordinates, axis = (1, 2, 3)), 0.0, atol = 1e-9)
        self.assertFalse(coordinates.flags.writeable)

    def test_interior(self) :
        grid = Grid3(16, 0.5)
        self.assertEqual(numpy.count_nonzero(grid.interior), 12 ** 3)

    def test_refined(self) :
        grid = Grid3(16, 0.5).refined()
        self.assertEqual(grid.shape, (32, 32, 32))
        self.assertEqual(grid.h, 0.25)

    def test_equal(self) :
        self.assertEqual(Grid3(16, 0.5), Grid3(16, 0.5))
        self.assertNotEqual(Grid3(16, 0.5), Grid3(16, 0.25))
        self.assertNotEqual(Grid3(16, 0.5), Grid3(16, 0.5, margin = 3))

class TestField(unittest.TestCase) :

    def test_construct(self) :
        grid = environment.grid
        with self.assertRaises(ValueError) :
            ScalarField(grid, numpy.zeros((2,) + grid.shape))
        values = numpy.ones(grid.shape)
        values[0, 0, 0] = numpy.inf
        field = ScalarField(grid, values)
        self.assertFalse(field.valid[0, 0, 0])
        self.assertTrue(math.isnan(field.array[0, 0, 0]))
        self.assertEqual(field.sup(), 1.0)

    def test_masked(self) :
        grid = environment.grid
        field = ScalarField(grid, grid.radius())
        masked = field.masked(grid.radius() < 1.0)
        self.assertLess(masked.sup(), 1.0)
        self.assertEqual(ScalarField(grid, grid.radius()).sup(numpy.zeros(grid.shape, dtype = bool)), 0.0)

    def test_matrix(self) :
        components = numpy.arange(10.0).reshape(10, 1)
        matrix = to_matrix(components, 4)
        numpy.testing.assert_array_equal(matrix, numpy.swapaxes(matrix, 0, 1))
        numpy.testing.assert_array_equal(from_matrix(matrix), components)

class TestDifference(unittest.TestCase) :

    def test_first(self) :
        grid = environment.grid
        x = grid.coordinates()[0]
        result = difference(x ** 3, 0, 1, grid.h)
        inner = numpy.s_[2 : -2]
        numpy.testing.assert_allclose(result[inner], 3.0 * x[inner] ** 2, atol = 1e-10)
        self.assertTrue(numpy.all(numpy.isnan(result[0])))
        closed = difference(x ** 2, 0, 1, grid.h, closure = True)
        numpy.testing.assert_allclose(closed, 2.0 * x, atol = 1e-10)

    def test_second(self) :
        grid = environment.grid
        x = grid.coordinates()[1]
        result = difference(x ** 3, 1, 2, grid.h, closure = True)
        numpy.testing.assert_allclose(result, 6.0 * x, atol = 1e-9)
        with self.assertRaises(ValueError) :
            difference(x, 1, 3, grid.h)

    def test_derivative(self) :
        grid = environment.grid
        z = grid.coordinates()[2]
        field = ScalarField(grid, z * z)
        result = derivative(field, 3, 2)
        numpy.testing.assert_allclose(result.array[result.valid], 2.0, atol = 1e-10)
        self.assertFalse(result.valid[:, :, 0].any())
        with self.assertRaises(StencilException) :
            derivative(field, 4)

class TestErode(unittest.TestCase) :

    def test_erode(self) :
        mask = numpy.zeros((10, 10, 10), dtype = bool)
        mask[2 : 8, 2 : 8, 2 : 8] = True
        self.assertEqual(numpy.count_nonzero(erode(mask, 1)), 4 ** 3)
        self.assertEqual(numpy.count_nonzero(erode(mask, 3)), 0)
        self.assertTrue(numpy.array_equal(erode(mask, 0), mask))

class TestSphere(unittest.TestCase) :

    def test_rule(self) :
        with self.assertRaises(QuadratureException) :
            SphereRule(2, 64)
        rule = SphereRule()
        points, normals, weights = rule.nodes(2.0)
        self.assertEqual(points.shape, (3, 32 * 64))
        numpy.testing.assert_allclose(numpy.sum(normals ** 2, axis = 0), 1.0)
        self.assertAlmostEqual(float(numpy.sum(weights)), 16.0 * math.pi, places = 10)

    def test_integral(self) :
        radius = 2.0
        self.assertAlmostEqual(
            sphere_integral(lambda points : points[0] ** 2, radius),
            4.0 * math.pi * radius ** 4 / 3.0,
            places = 10
        )
        grid = environment.grid
        z = grid.coordinates()[2]
        self.assertAlmostEqual(
            sphere_integral(ScalarField(grid, z * z), radius),
            4.0 * math.pi * radius ** 4 / 3.0,
            places = 8
        )
        with self.assertRaises(QuadratureException) :
            sphere_integral(ScalarField(grid, z), 10.0)
        with self.assertRaises(QuadratureException) :
            sphere_integral(ScalarField(grid, z), 0.0)

class TestInterpolate(unittest.TestCase) :

    def test_field(self) :
        grid = environment.grid
        x, y, z = grid.coordinates()
        field = ScalarField(grid, x ** 3 - 2.0 * y * z + z)
        random = numpy.random.default_rng(0)
        points = random.uniform(-2.0, 2.0, (3, 50))
        expected = points[0] ** 3 - 2.0 * points[1] * points[2] + points[2]
        numpy.testing.assert_allclose(interpolate(field, points), expected, atol = 1e-10)
        self.assertAlmostEqual(float(interpolate(field, numpy.array([1.0, 0.5, 0.25]))), 1.0, places = 10)
        with self.assertRaises(OutOfConeException) :
            interpolate(field, numpy.array([10.0, 0.0, 0.0]))

class TestSlab(unittest.TestCase) :

    @staticmethod
    def slab(times, h = 0.5, cfl = 0.25) -> SpacetimeSlab :
        """Gets a slab whose components are affine in time, with unchanged masks."""
        grid = Grid3(16, h)
        base = numpy.array([-1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 1.0]).reshape(10, 1, 1, 1)
        rate = numpy.full((10, 1, 1, 1), 0.1)
        mask = numpy.ones(grid.shape, dtype = bool)
        return SpacetimeSlab(
            grid,
            times,
            [SymTensorField4(grid, numpy.broadcast_to(base + t * rate, (10,) + grid.shape)) for t in times],
            [SymTensorField4(grid, numpy.broadcast_to(rate, (10,) + grid.shape)) for t in times],
            [mask] * len(times),
            cfl,
            erosion = 0
        )

    def test_construct(self) :
        slab = self.slab(environment.times())
        self.assertEqual(slab.level_count, 5)
        self.assertEqual(slab.reference_level, 2)
        self.assertAlmostEqual(slab.dt, 0.125)
        self.assertGreater(slab.theta, 0.0)
        self.assertEqual(slab.mask_erosion_defect(), 0)
        with self.assertRaises(CflException) :
            self.slab((-0.5, 0.0, 0.5))
        with self.assertRaises(ValueError) :
            self.slab((0.0, 0.1, 0.3))

    def test_nesting(self) :
        grid = environment.grid
        metric = SymTensorField4(grid, numpy.zeros((10,) + grid.shape))
        mask = numpy.ones(grid.shape, dtype = bool)
        with self.assertRaises(ValueError) :
            SpacetimeSlab(grid, (0.0, 0.1), [metric] * 2, [metric] * 2, [mask] * 2)

    def test_static(self) :
        slab = environment.minkowski
        self.assertEqual(slab.mask_erosion_defect(), 0)
        self.assertEqual(
            numpy.count_nonzero(slab.mask(0)),
            (environment.N - 4 * environment.grid.margin) ** 3
        )

    def test_interpolate(self) :
        slab = self.slab(environment.times())
        point = numpy.array([1.0, 1.0, 1.0])
        values = interpolate(slab, point, 0.1)
        self.assertEqual(values.shape, (20,))
        self.assertAlmostEqual(float(values[0]), -1.0 + 0.01, places = 12)
        numpy.testing.assert_allclose(values[10 :], 0.1, atol = 1e-12)
        with self.assertRaises(OutOfConeException) :
            interpolate(slab, point, 1.0)
        with self.assertRaises(ValueError) :
            interpolate(slab, point)

    def test_interpolate_levels(self) :
        slab = self.slab((0.0,))
        with self.assertRaises(StencilException) :
            interpolate(slab, numpy.zeros(3), 0.0)
