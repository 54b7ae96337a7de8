from tests.environment import instance as environment
from maxslice import ScalarField, SpacetimeSlab, SymTensorField4, WeightParams, h_norm, c_norm
from maxslice.sobolev import MINKOWSKI_INVERSE, Norm, embedding_ratio, restriction_norm, shell, sigma
from maxslice.exceptions import OutOfConeException, StencilException

import math
import unittest

import numpy

class TestWeight(unittest.TestCase) :

    def test_sigma(self) :
        self.assertEqual(float(sigma(numpy.zeros(3))), 1.0)
        self.assertAlmostEqual(float(sigma(numpy.array([3.0, 4.0, 0.0]))), math.sqrt(26.0))

    def test_params(self) :
        self.assertEqual(WeightParams(), WeightParams(2, -1.25))
        with self.assertRaises(ValueError) :
            WeightParams(-1)
        with self.assertRaises(StencilException) :
            WeightParams(3)

    def test_shell(self) :
        grid = environment.grid
        mask = shell(grid)
        self.assertTrue(mask[0, 0, 0])
        self.assertFalse(mask[grid.shape[0] // 2, grid.shape[1] // 2, grid.shape[2] // 2])

class TestNorm(unittest.TestCase) :

    def test_constant(self) :
        grid = environment.grid
        field = ScalarField(grid, numpy.ones(grid.shape))
        volume = grid.size * grid.h ** 3
        for s in range(3) :
            with self.subTest(s) :
                norm = h_norm(field, WeightParams(s, 0.0))
                self.assertAlmostEqual(norm.value, math.sqrt(volume), places = 10)
                self.assertGreater(norm.shell_fraction, 0.0)
                self.assertAlmostEqual(c_norm(field, WeightParams(s, 0.0)).value, 1.0, places = 10)

    def test_weight(self) :
        grid = environment.grid
        field = ScalarField(grid, numpy.ones(grid.shape))
        weight = sigma(grid.coordinates())
        expected = math.sqrt(float(numpy.sum(weight ** -2.0)) * grid.h ** 3)
        self.assertAlmostEqual(h_norm(field, WeightParams(0, -1.0)).value, expected, places = 10)
        self.assertAlmostEqual(c_norm(field, WeightParams(0, 1.0)).value, float(numpy.max(weight)))

    def test_linear(self) :
        grid = environment.grid
        x = grid.coordinates()[0]
        field = ScalarField(grid, x)
        weight = sigma(grid.coordinates())
        expected = float(numpy.max(numpy.abs(x) + weight))
        self.assertAlmostEqual(c_norm(field, WeightParams(1, 0.0)).value, expected, places = 10)

    def test_mask(self) :
        grid = environment.grid
        field = ScalarField(grid, numpy.ones(grid.shape))
        mask = grid.radius() < 1.0
        norm = h_norm(field, WeightParams(0, 0.0), mask)
        self.assertAlmostEqual(norm.value, math.sqrt(numpy.count_nonzero(mask) * grid.h ** 3))
        self.assertEqual(norm.shell, 0.0)
        self.assertEqual(norm.shell_fraction, 0.0)
        self.assertEqual(c_norm(field, mask = numpy.zeros(grid.shape, dtype = bool)), Norm(0.0, 0.0))

    def test_embedding(self) :
        grid = environment.grid
        zero = ScalarField(grid, numpy.zeros(grid.shape))
        self.assertEqual(embedding_ratio(zero, WeightParams(0), WeightParams(2)), 0.0)
        field = ScalarField(grid, numpy.exp(-grid.radius() ** 2))
        self.assertGreater(embedding_ratio(field, WeightParams(0), WeightParams(2)), 0.0)

class TestRestriction(unittest.TestCase) :

    def test_minkowski(self) :
        slab = environment.minkowski
        norm = restriction_norm(slab, 0.0)
        self.assertEqual(norm.value, 0.0)
        self.assertEqual(float(norm), 0.0)
        with self.assertRaises(OutOfConeException) :
            restriction_norm(slab, slab.theta)

    def test_terms(self) :
        grid = environment.grid
        perturbation = numpy.zeros((10,) + grid.shape)
        perturbation[0] = 0.01
        rate = numpy.zeros((10,) + grid.shape)
        rate[4] = 0.02
        metric = SymTensorField4(grid, MINKOWSKI_INVERSE.reshape(10, 1, 1, 1) + perturbation)
        mask = numpy.ones(grid.shape, dtype = bool)
        slab = SpacetimeSlab(grid, (0.0,), [metric], [SymTensorField4(grid, rate)], [mask])
        norm = restriction_norm(slab, 0.0, WeightParams(1, 0.0))
        first = h_norm(SymTensorField4(grid, perturbation), WeightParams(1, 0.0)).value
        second = h_norm(SymTensorField4(grid, rate), WeightParams(0, 1.0)).value
        self.assertGreater(first, 0.0)
        self.assertGreater(second, 0.0)
        # Root of the sum of squares of the terms: between the plain sum over sqrt(2) and the sum.
        self.assertAlmostEqual(norm.value, math.hypot(first, second), places = 12)
        self.assertLess(norm.value, first + second)
        self.assertGreaterEqual(norm.value * math.sqrt(2.0), first + second)
