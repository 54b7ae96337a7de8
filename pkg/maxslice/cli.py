"""
Command-line interface: `maxslice <command>`.

Commands generate data, check it, evolve it into a slab, solve for the maximal graph, compute
invariants, run the whole pipeline and render reports. Every package exception ends the command with
a one-line message naming the failing stage: gate failures exit with code 2, other failures with
code 1.
"""

from .config import PipelineConfig
from .dataset import Dataset, DatasetSpec
from .evolution import build_cauchy_data, energy_diagnostics, evolve, harmonic_monitor, level_hyperbolicity
from .field_file import FieldFile
from .maximal import graph_operator, ift_solve, induced_data, IterationRecord
from .physics import (
    InitialData,
    angular_momentum_pi,
    adm_mass,
    axisymmetry_residual,
    hamiltonian_residual,
    invariants,
    momentum_residual,
    trace_field,
    trace_norm,
)
from .report import diff, make_report, read_report, render, write_report
from .sobolev import WeightParams, h_norm
from .fields import ScalarField, SpacetimeSlab, SymTensorField3
from .exceptions import *
from . import exceptions

import argparse
import dataclasses
import logging
import os
import sys
import typing

import numpy

logger = logging.getLogger(__name__)

EXIT_FAILURE = 1
"""Exit code of a failed stage."""
EXIT_GATE = 2
"""Exit code of a failed gate."""

class _Progress :
    """Name of the running stage."""

    def __init__(self, stage : str) -> None :
        self.stage = stage

def _load_config(arguments : argparse.Namespace) -> PipelineConfig :
    config = PipelineConfig.load(arguments.config) if arguments.config else PipelineConfig()
    if arguments.seed is not None :
        config = dataclasses.replace(config, seed = arguments.seed)
    return config

def _read_data(path : str) -> typing.Tuple[InitialData, typing.Optional[ScalarField]] :
    with FieldFile(path) as file :
        return file.read_data()

def _read_slab(path : str, cfl : float) -> SpacetimeSlab :
    with FieldFile(path) as file :
        return file.read_slab(cfl)

def _emit(arguments : argparse.Namespace, report : typing.Dict[str, typing.Any]) -> None :
    if getattr(arguments, 'report', None) :
        write_report(arguments.report, report)
    else :
        sys.stdout.write(render(report))

def _gate(name : str, value : float, limit : float) -> typing.Dict[str, typing.Any] :
    return {'name' : name, 'value' : value, 'limit' : limit, 'passed' : bool(value <= limit)}

def check_data(
    d : InitialData,
    config : PipelineConfig,
    region : typing.Optional[numpy.ndarray] = None
) -> typing.Tuple[typing.List[typing.Dict[str, typing.Any]], typing.Dict[str, typing.Any]] :
    """
    Gets the constraint gates of a data set and its summary: trace sup and norm, axisymmetry
    residual, weighted decay of `g - e` and, where the spheres fit, mass and angular momentum.
    """
    gates = config.gates
    region = d.grid.interior if region is None else region
    results = [
        _gate('hamiltonian', hamiltonian_residual(d).sup(region), gates.constraint),
        _gate('momentum', momentum_residual(d).sup(region), gates.constraint),
    ]
    perturbation = d.g.values - numpy.array([1.0, 0.0, 0.0, 1.0, 0.0, 1.0]).reshape(6, 1, 1, 1)
    decay = h_norm(SymTensorField3(d.grid, perturbation, d.valid), WeightParams(2, config.solver.delta))
    summary : typing.Dict[str, typing.Any] = {
        'trace_sup' : trace_field(d).sup(region),
        'trace_norm' : trace_norm(d).value,
        'axisymmetry' : axisymmetry_residual(d.masked(region)),
        'decay_norm' : decay.value,
        'decay_shell_fraction' : decay.shell_fraction,
        'mass' : None,
        'angular_momentum' : None,
    }
    radii = config.invariants.radii
    rule = config.invariants.rule()
    try :
        summary['mass'] = adm_mass(d, radii, rule).value
        summary['angular_momentum'] = angular_momentum_pi(d, radii = radii, rule = rule).value
    except QuadratureException as exception :
        logger.warning('Boundary integrals skipped: %s', exception)
    return results, summary

def _raise_failed(stage : str, gates : typing.Sequence[typing.Dict[str, typing.Any]]) -> None :
    for gate in gates :
        if not gate['passed'] :
            raise GateException(stage, gate['name'], gate['value'], gate['limit'])

def _levels(slab : SpacetimeSlab, config : PipelineConfig) -> typing.List[typing.Dict[str, typing.Any]] :
    levels = []
    for level in range(slab.level_count) :
        report = level_hyperbolicity(slab, level)
        monitor = harmonic_monitor(slab, level, config.solver.delta)
        levels.append({
            't' : slab.times[level],
            'nodes' : int(numpy.count_nonzero(slab.mask(level))),
            'h' : report.h,
            'speed' : report.speed,
            'monitor_sup' : monitor.sup,
            'monitor_norm' : monitor.norm.value,
        })
    return levels

def _harmonic_gates(levels, limit : float) -> typing.List[typing.Dict[str, typing.Any]] :
    return [_gate(f'harmonic t = {level["t"]:.4g}', level['monitor_sup'], limit) for level in levels]

def command_gen(arguments : argparse.Namespace, progress : _Progress) -> int :
    config = _load_config(arguments)
    spec = config.spec()
    overrides = {
        key : getattr(arguments, key)
        for key in ('family', 'n', 'h', 'mass', 'spin', 'excision', 'amplitude', 'width')
        if getattr(arguments, key) is not None
    }
    spec = dataclasses.replace(spec, **overrides)
    d = Dataset.construct(spec).generate()
    with FieldFile(arguments.out, True) as file :
        file.write_data(d)
    logger.info('Dataset %s written to %s', spec.family, arguments.out)
    return 0

def command_check(arguments : argparse.Namespace, progress : _Progress) -> int :
    config = _load_config(arguments)
    d, _ = _read_data(arguments.input)
    gates, summary = check_data(d, config)
    passed = all(gate['passed'] for gate in gates)
    _emit(arguments, make_report('check', config.seed, gates = gates, summary = summary, passed = passed))
    _raise_failed('check', gates)
    return 0

def command_evolve(arguments : argparse.Namespace, progress : _Progress) -> int :
    config = _load_config(arguments)
    evolution = config.evolution
    d, _ = _read_data(arguments.input)
    progress.stage = 'cauchy'
    cd = build_cauchy_data(d, config.gates.constraint, arguments.fault or evolution.fault)
    progress.stage = 'evolve'
    steps = evolution.steps if arguments.steps is None else arguments.steps
    dt = evolution.dt if arguments.dt is None else arguments.dt
    slab = evolve(cd, steps, dt, evolution.cfl)
    with FieldFile(arguments.out, True) as file :
        file.write_slab(slab)
    levels = _levels(slab, config)
    gates = _harmonic_gates(levels, config.gates.harmonic)
    payload : typing.Dict[str, typing.Any] = {'levels' : levels, 'gates' : gates}
    if arguments.energy :
        progress.stage = 'energy'
        payload['energy'] = energy_diagnostics(slab, config.solver.delta, evolution.order).to_dict()
    _emit(arguments, make_report('evolve', config.seed, **payload))
    _raise_failed('evolve', gates)
    return 0

def command_slice(arguments : argparse.Namespace, progress : _Progress) -> int :
    config = _load_config(arguments)
    solver = config.solver_config()
    overrides = {}
    if arguments.delta is not None :
        overrides['delta'] = arguments.delta
    if arguments.tol is not None :
        overrides['tolerance'] = arguments.tol
    solver = dataclasses.replace(solver, **overrides)
    d, _ = _read_data(arguments.data)
    slab = _read_slab(arguments.slab, config.evolution.cfl)
    records : typing.List[IterationRecord] = []
    gates : typing.List[typing.Dict[str, typing.Any]] = []
    try :
        u, _ = ift_solve(slab, d, solver, records)
        progress.stage = 'induced'
        region = graph_operator(slab, d, solver.kappa).interior
        result = induced_data(slab, u, solver.kappa, constraint_gate = config.gates.constraint)
        gates.append(_gate('trace', trace_field(result).sup(region), config.gates.trace))
        _raise_failed('induced', gates)
        with FieldFile(arguments.out, True) as file :
            file.write_data(result, u)
    finally :
        if arguments.log :
            write_report(arguments.log, make_report(
                'slice', config.seed, iterations = [record.to_dict() for record in records], gates = gates
            ))
    return 0

def command_invariants(arguments : argparse.Namespace, progress : _Progress) -> int :
    config = _load_config(arguments)
    d, _ = _read_data(arguments.input)
    slab = _read_slab(arguments.slab, config.evolution.cfl) if arguments.slab else None
    result = invariants(d, config.invariants.radii, config.invariants.rule(), slab)
    _emit(arguments, make_report('invariants', config.seed, invariants = result.to_dict()))
    return 0

def run_pipeline(config : PipelineConfig, progress : _Progress) -> typing.Dict[str, typing.Any] :
    """
    Runs generation, checks, evolution, the maximal graph solve and the invariants of input and
    output; writes the data, slab and maximal data files and the report to the output directory.

    The report is written also when a stage fails, with the failing stage and the sections of the
    completed stages.
    """
    output = config.output
    os.makedirs(output.directory, exist_ok = True)
    sections : typing.Dict[str, typing.Any] = {'config' : config.to_dict(), 'stages' : [], 'gates' : []}

    def done(stage : str) -> None :
        sections['stages'].append(stage)

    try :
        progress.stage = 'gen'
        spec = config.spec()
        d = Dataset.construct(spec).generate()
        with FieldFile(output.path('data.mxsf'), True) as file :
            file.write_data(d)
        done('gen')

        progress.stage = 'check'
        gates, summary = check_data(d, config)
        sections['gates'].extend(gates)
        sections['summary'] = summary
        _raise_failed('check', gates)
        done('check')

        progress.stage = 'cauchy'
        cd = build_cauchy_data(d, config.gates.constraint, config.evolution.fault)
        done('cauchy')

        progress.stage = 'evolve'
        evolution = config.evolution
        slab = evolve(cd, evolution.steps, evolution.dt, evolution.cfl)
        with FieldFile(output.path('slab.mxsf'), True) as file :
            file.write_slab(slab)
        sections['levels'] = _levels(slab, config)
        harmonic = _harmonic_gates(sections['levels'], config.gates.harmonic)
        sections['gates'].extend(harmonic)
        _raise_failed('evolve', harmonic)
        done('evolve')

        progress.stage = 'energy'
        sections['energy'] = energy_diagnostics(slab, config.solver.delta, evolution.order).to_dict()
        done('energy')

        progress.stage = 'slice'
        solver = config.solver_config()
        records : typing.List[IterationRecord] = []
        sections['iterations'] = records
        u, _ = ift_solve(slab, d, solver, records)
        done('slice')

        progress.stage = 'induced'
        region = graph_operator(slab, d, solver.kappa).interior
        result = induced_data(slab, u, solver.kappa)
        trace = _gate('trace', trace_field(result).sup(region), config.gates.trace)
        output_gates, _ = check_data(result, config, region)
        sections['gates'].append(trace)
        sections['gates'].extend(dict(gate, name = 'output ' + gate['name']) for gate in output_gates)
        with FieldFile(output.path('maximal.mxsf'), True) as file :
            file.write_data(result, u)
        _raise_failed('induced', [trace] + output_gates)
        done('induced')

        progress.stage = 'invariants'
        radii = config.invariants.radii
        rule = config.invariants.rule()
        before = invariants(d, radii, rule, slab, region = region)
        after = invariants(result, radii, rule, region = region)
        sections['input'] = before.to_dict()
        sections['output'] = after.to_dict()
        mass = before.mass.value
        sections['comparison'] = {
            'delta_m' : after.mass.value - mass,
            'delta_m_relative' : (after.mass.value - mass) / abs(mass) if mass != 0.0 else None,
            'delta_j' : after.angular_momentum.value - before.angular_momentum.value,
            'trace_reduction' : (
                before.trace_sup / after.trace_sup if after.trace_sup > 0.0 else None
            ),
            'height_sup' : float(numpy.max(numpy.abs(u.array[region]))) if region.any() else 0.0,
        }
        done('invariants')
    except exceptions.Exception as exception :
        sections['failure'] = {'stage' : progress.stage, 'message' : str(exception)}
        raise
    finally :
        if 'iterations' in sections :
            sections['iterations'] = [record.to_dict() for record in sections['iterations']]
        report = make_report('pipeline', config.seed, **sections)
        write_report(output.path('report.json'), report)
    return report

def command_pipeline(arguments : argparse.Namespace, progress : _Progress) -> int :
    config = _load_config(arguments)
    if arguments.out_dir :
        config = dataclasses.replace(config, output = dataclasses.replace(config.output, directory = arguments.out_dir))
    report = run_pipeline(config, progress)
    sys.stdout.write(render(report))
    return 0

def command_report(arguments : argparse.Namespace, progress : _Progress) -> int :
    reports = [read_report(path) for path in arguments.reports]
    if len(reports) == 1 :
        sys.stdout.write(render(reports[0]))
    else :
        sys.stdout.write(diff(reports[0], reports[1]))
    return 0

def parser() -> argparse.ArgumentParser :
    """Gets the argument parser."""
    common = argparse.ArgumentParser(add_help = False)
    common.add_argument('-v', '--verbose', action = 'count', default = 0, help = 'more log output')
    common.add_argument('-q', '--quiet', action = 'store_true', help = 'errors only')
    common.add_argument('--config', help = 'TOML configuration file')
    common.add_argument('--seed', type = int, help = 'seed of randomized checks')
    result = argparse.ArgumentParser(prog = 'maxslice', description = __doc__.strip().splitlines()[0])
    commands = result.add_subparsers(dest = 'command', required = True)

    gen = commands.add_parser('gen', parents = [common], help = 'generate a dataset')
    gen.add_argument('--family', choices = DatasetSpec.FAMILIES)
    gen.add_argument('--n', type = int)
    gen.add_argument('--h', type = float)
    gen.add_argument('--mass', type = float)
    gen.add_argument('--spin', type = float)
    gen.add_argument('--excision', type = float)
    gen.add_argument('--amplitude', type = float)
    gen.add_argument('--width', type = float)
    gen.add_argument('--out', required = True)
    gen.set_defaults(function = command_gen)

    check = commands.add_parser('check', parents = [common], help = 'check constraints of a dataset')
    check.add_argument('--in', dest = 'input', required = True)
    check.add_argument('--report')
    check.set_defaults(function = command_check)

    evolve_ = commands.add_parser('evolve', parents = [common], help = 'evolve a dataset into a slab')
    evolve_.add_argument('--in', dest = 'input', required = True)
    evolve_.add_argument('--out', required = True)
    evolve_.add_argument('--steps', type = int)
    evolve_.add_argument('--dt', type = float)
    evolve_.add_argument('--fault', action = 'store_true', help = 'omit the shift source term')
    evolve_.add_argument('--energy', action = 'store_true', help = 'add slice energy diagnostics')
    evolve_.add_argument('--report')
    evolve_.set_defaults(function = command_evolve)

    slice_ = commands.add_parser('slice', parents = [common], help = 'solve for the maximal graph')
    slice_.add_argument('--slab', required = True)
    slice_.add_argument('--data', required = True)
    slice_.add_argument('--delta', type = float)
    slice_.add_argument('--tol', type = float)
    slice_.add_argument('--out', required = True)
    slice_.add_argument('--log', help = 'iteration log report')
    slice_.set_defaults(function = command_slice)

    invariants_ = commands.add_parser('invariants', parents = [common], help = 'compute invariants')
    invariants_.add_argument('--in', dest = 'input', required = True)
    invariants_.add_argument('--slab', help = 'slab for the Komar integral')
    invariants_.add_argument('--report')
    invariants_.set_defaults(function = command_invariants)

    pipeline = commands.add_parser('pipeline', parents = [common], help = 'run the whole pipeline')
    pipeline.add_argument('--out-dir')
    pipeline.set_defaults(function = command_pipeline)

    report = commands.add_parser('report', parents = [common], help = 'render one report or diff two')
    report.add_argument('reports', nargs = '+', metavar = 'REPORT')
    report.set_defaults(function = command_report)
    return result

def main(argv : typing.Optional[typing.Sequence[str]] = None) -> int :
    """Runs the command line; returns the exit code."""
    arguments = parser().parse_args(argv)
    if arguments.command == 'report' and len(arguments.reports) > 2 :
        parser().error('at most two reports')
    if arguments.quiet :
        level = logging.ERROR
    else :
        level = max(logging.DEBUG, logging.WARNING - 10 * arguments.verbose)
    logging.basicConfig(level = level, format = '%(levelname)s %(name)s: %(message)s')
    progress = _Progress(arguments.command)
    try :
        return arguments.function(arguments, progress)
    except GateException as exception :
        sys.stderr.write(f'maxslice: {exception.stage}: gate {exception.gate} failed: {exception}\n')
        return EXIT_GATE
    except (
        exceptions.Exception,
        FieldFile.Unavailability,
        FieldFile.FormatException,
        OSError,
        ValueError
    ) as exception :
        sys.stderr.write(f'maxslice: {progress.stage}: {exception}\n')
        return EXIT_FAILURE
