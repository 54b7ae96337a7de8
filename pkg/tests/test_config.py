from maxslice import PipelineConfig, DatasetSpec
from maxslice.config import GateConfig, GridConfig, InvariantConfig

import dataclasses
import os
import tempfile
import unittest

SMALL = '''
seed = 7

[grid]
n = 16
h = 0.5

[dataset]
family = "schwarzschild"
mass = 0.5
center = [0.0, 0.5, 0.0]

[invariants]
radii = [1.5, 2.0, 2.5]
latitudes = 8
longitudes = 16

[gates]
contraction = 0.3

[output]
directory = "run"
'''

class TestPipelineConfig(unittest.TestCase) :

    def test_default(self) :
        config = PipelineConfig()
        self.assertEqual(config.grid, GridConfig(48, 0.75))
        self.assertEqual(config.seed, 0)
        spec = config.spec()
        self.assertIsInstance(spec, DatasetSpec)
        self.assertEqual(spec.family, 'flat')
        self.assertEqual(spec.n, 48)
        self.assertEqual(spec.steps, config.evolution.steps)
        self.assertEqual(config.solver_config().contraction, config.gates.contraction)
        self.assertEqual(config.output.path('report.json'), os.path.join('maxslice-out', 'report.json'))

    def test_mapping(self) :
        config = PipelineConfig.from_mapping({
            'grid' : {'n' : 16, 'h' : 0.5},
            'invariants' : {'radii' : [1.5, 2.0]},
            'gates' : {'contraction' : 0.25},
            'solver' : {'tolerance' : 1e-6},
        })
        self.assertEqual(config.invariants.radii, (1.5, 2.0))
        solver = config.solver_config()
        self.assertEqual(solver.contraction, 0.25)
        self.assertEqual(solver.tolerance, 1e-6)

    def test_invalid(self) :
        small = {'grid' : {'n' : 16, 'h' : 0.5}, 'invariants' : {'radii' : [1.5, 2.0]}}
        cases = [
            {'solver' : {'contraction' : 0.3}},
            {'unknown' : {}},
            {'grid' : {'size' : 16}},
            {'grid' : 16},
            {'seed' : True},
            {'seed' : 1.5},
            {'gates' : {'trace' : 0.0}},
            {'dataset' : {'family' : 'unknown'}},
            {'invariants' : {'radii' : [2.0, 1.5]}},
            {'invariants' : {'radii' : []}},
            {'invariants' : {'radii' : [1.5, 3.5]}},
        ]
        for case in cases :
            with self.subTest(case) :
                with self.assertRaises(ValueError) :
                    PipelineConfig.from_mapping({**small, **case})
        with self.assertRaises(ValueError) :
            PipelineConfig.from_mapping({'grid' : {'n' : 16, 'h' : 0.5}})

    def test_load(self) :
        with tempfile.TemporaryDirectory() as directory :
            path = os.path.join(directory, 'config.toml')
            with open(path, 'w', encoding = 'utf-8') as file :
                file.write(SMALL)
            config = PipelineConfig.load(path)
            self.assertEqual(config.seed, 7)
            self.assertEqual(config.dataset.family, 'schwarzschild')
            self.assertEqual(config.dataset.center, (0.0, 0.5, 0.0))
            self.assertEqual(config.invariants, InvariantConfig((1.5, 2.0, 2.5), 8, 16))
            self.assertEqual(config.invariants.rule().latitudes, 8)
            self.assertEqual(config.gates, dataclasses.replace(GateConfig(), contraction = 0.3))
            self.assertEqual(config.output.directory, 'run')
            self.assertEqual(config.spec().mass, 0.5)
            self.assertEqual(config.to_dict()['grid'], {'n' : 16, 'h' : 0.5})
            with open(path, 'w', encoding = 'utf-8') as file :
                file.write('[grid\n')
            with self.assertRaises(ValueError) :
                PipelineConfig.load(path)
