from maxslice import VERSION
from maxslice.report import SCHEMA, check_report, diff, dumps, make_report, read_report, render, table, write_report
from maxslice.exceptions import ReportVersionException

import json
import os
import tempfile
import unittest

class TestReport(unittest.TestCase) :

    GATES = [
        {'name' : 'hamiltonian', 'value' : 1e-4, 'limit' : 1e-2, 'passed' : True},
        {'name' : 'momentum', 'value' : 0.5, 'limit' : 1e-2, 'passed' : False},
    ]

    def report(self, **payload) :
        return make_report('check', 3, gates = self.GATES, **payload)

    def test_make(self) :
        report = self.report(passed = False)
        self.assertEqual(report['schema'], SCHEMA)
        self.assertEqual(report['kind'], 'check')
        self.assertEqual(report['version'], VERSION)
        self.assertEqual(report['seed'], 3)
        self.assertFalse(report['passed'])
        with self.assertRaises(ValueError) :
            make_report('unknown', 0)

    def test_dumps(self) :
        text = dumps(self.report())
        self.assertTrue(text.endswith('\n'))
        self.assertEqual(list(json.loads(text)), sorted(json.loads(text)))
        self.assertEqual(dumps(make_report('check', 0, b = 1, a = 2)), dumps(make_report('check', 0, a = 2, b = 1)))

    def test_file(self) :
        with tempfile.TemporaryDirectory() as directory :
            path = os.path.join(directory, 'report.json')
            write_report(path, self.report())
            self.assertEqual(read_report(path), self.report())
            with open(path, 'w', encoding = 'utf-8') as file :
                file.write('not json')
            with self.assertRaises(ReportVersionException) :
                read_report(path)
            with open(path, 'w', encoding = 'utf-8') as file :
                json.dump({'schema' : 'maxslice-report/0', 'kind' : 'check'}, file)
            with self.assertRaises(ReportVersionException) :
                read_report(path)
        with self.assertRaises(ReportVersionException) :
            check_report([])
        with self.assertRaises(ReportVersionException) :
            check_report({'schema' : SCHEMA, 'kind' : 'unknown'})

    def test_table(self) :
        lines = table(['name', 'value'], [['a', 1.0], ['bb', None]]).splitlines()
        self.assertEqual(lines[0], 'name  value')
        self.assertEqual(lines[1], '----  -----')
        self.assertEqual(lines[2], 'a         1')
        self.assertEqual(lines[3], 'bb        -')

    def test_render(self) :
        text = render(self.report(failure = {'stage' : 'check', 'message' : 'momentum failed'}))
        self.assertTrue(text.startswith(f'check report ({SCHEMA}, version {VERSION}, seed 3)'))
        self.assertIn('hamiltonian', text)
        self.assertIn('0.0001', text)
        self.assertIn('yes', text)
        self.assertIn('no', text)
        self.assertTrue(text.endswith('failed at stage check: momentum failed\n'))
        with self.assertRaises(ReportVersionException) :
            render({})

    def test_diff(self) :
        first = self.report()
        self.assertEqual(diff(first, self.report()), 'reports equal\n')
        second = make_report('check', 4, gates = self.GATES)
        lines = diff(first, second).splitlines()
        self.assertEqual(len(lines), 3)
        self.assertEqual(lines[2].split(), ['seed', '3', '4', '1'])
