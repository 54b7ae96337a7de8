from tests.environment import instance as environment
from maxslice import FieldFile, ScalarField

import os
import tempfile
import unittest

import numpy

class TestFieldFile(unittest.TestCase) :

    def setUp(self) :
        self.__directory = tempfile.TemporaryDirectory()
        self.__path = os.path.join(self.__directory.name, 'fields.bin')

    def tearDown(self) :
        self.__directory.cleanup()

    def test_data(self) :
        d = environment.schwarzschild
        with FieldFile(self.__path, writable = True) as file :
            file.write_data(d)
        with FieldFile(self.__path) as file :
            result, u = file.read_data()
        self.assertIsNone(u)
        self.assertEqual(result.grid, d.grid)
        self.assertTrue(numpy.array_equal(result.valid, d.valid))
        numpy.testing.assert_array_equal(result.g.values[:, d.valid], d.g.values[:, d.valid])
        numpy.testing.assert_array_equal(result.k.values[:, d.valid], d.k.values[:, d.valid])

    def test_data_height(self) :
        d = environment.flat
        grid = d.grid
        u = ScalarField(grid, environment.profile(grid))
        with FieldFile(self.__path, writable = True) as file :
            file.write_data(d, u)
        with FieldFile(self.__path) as file :
            _, result = file.read_data()
        self.assertIsNotNone(result)
        numpy.testing.assert_array_equal(result.array, u.array)

    def test_slab(self) :
        slab = environment.minkowski
        with FieldFile(self.__path, writable = True) as file :
            file.write_slab(slab)
        with FieldFile(self.__path) as file :
            result = file.read_slab()
        self.assertEqual(result.times, slab.times)
        self.assertEqual(result.reference_level, slab.reference_level)
        for level in range(slab.level_count) :
            with self.subTest(level) :
                self.assertTrue(numpy.array_equal(result.mask(level), slab.mask(level)))
                mask = slab.mask(level)
                numpy.testing.assert_array_equal(
                    result.metric(level).values[:, mask], slab.metric(level).values[:, mask]
                )

    def test_record_kind(self) :
        with FieldFile(self.__path, writable = True) as file :
            file.write_data(environment.flat)
        with FieldFile(self.__path) as file :
            with self.assertRaises(FieldFile.FormatException) :
                file.read_slab()

    def test_malformed(self) :
        with open(self.__path, 'wb') as file :
            file.write(b'XXXXX 16 16 16 0.5 -3.75 -3.75 -3.75 12'.ljust(63) + b'\n')
        with FieldFile(self.__path) as file :
            with self.assertRaises(FieldFile.FormatException) :
                file.read_data()
        with FieldFile(self.__path, writable = True) as file :
            file.write_data(environment.flat)
        with open(self.__path, 'r+b') as file :
            file.truncate(FieldFile.HEADER_LENGTH + 100)
        with FieldFile(self.__path) as file :
            with self.assertRaises(FieldFile.FormatException) :
                file.read_data()
        open(self.__path, 'wb').close()
        with FieldFile(self.__path) as file :
            with self.assertRaises(FieldFile.FormatException) :
                file.read_data()

    def test_unavailable(self) :
        with self.assertRaises(FieldFile.Unavailability) :
            FieldFile(os.path.join(self.__directory.name, 'missing', 'fields.bin'))
