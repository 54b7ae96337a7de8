"""JSON reports of the command-line stages and their rendering as text tables."""

from .exceptions import *

import json
import logging
import math
import typing

logger = logging.getLogger(__name__)

SCHEMA = 'maxslice-report/1'
"""Schema identifier of every report."""
KINDS = ('check', 'evolve', 'slice', 'invariants', 'pipeline')
"""Report kinds, one per stage command."""

Report = typing.Dict[str, typing.Any]

def make_report(kind : str, seed : int, **payload : typing.Any) -> Report :
    """Makes a report of the given kind with its payload sections."""
    if kind not in KINDS :
        raise ValueError('Kind invalid: Value unknown.')
    from . import VERSION
    report = {'schema' : SCHEMA, 'kind' : kind, 'version' : VERSION, 'seed' : seed}
    report.update(payload)
    return report

def dumps(report : Report) -> str :
    """Serializes a report with sorted keys, so that equal reports are equal text."""
    return json.dumps(report, indent = 2, sort_keys = True) + '\n'

def write_report(path : str, report : Report) -> None :
    """Writes a report to a file."""
    with open(path, 'w', encoding = 'utf-8') as file :
        file.write(dumps(report))
    logger.debug('Report written: %s', path)

def check_report(report : typing.Any) -> Report :
    """
    Checks the schema of a decoded report.

    :raises ReportVersionException:
        Not a report or schema unknown.
    """
    if not isinstance(report, dict) or report.get('schema') != SCHEMA :
        raise ReportVersionException('Report invalid: Schema unknown.')
    if report.get('kind') not in KINDS :
        raise ReportVersionException('Report invalid: Kind unknown.')
    return report

def read_report(path : str) -> Report :
    """
    Reads a report from a file.

    :raises ReportVersionException:
        Not a report or schema unknown.
    """
    with open(path, 'r', encoding = 'utf-8') as file :
        try :
            report = json.load(file)
        except json.JSONDecodeError as exception :
            raise ReportVersionException('Report invalid: Not JSON.') from exception
    return check_report(report)

def _cell(value : typing.Any) -> str :
    if value is None :
        return '-'
    if isinstance(value, bool) :
        return 'yes' if value else 'no'
    if isinstance(value, float) :
        return f'{value:.6g}' if math.isfinite(value) else str(value)
    return str(value)

def table(headers : typing.Sequence[str], rows : typing.Sequence[typing.Sequence[typing.Any]]) -> str :
    """Renders rows as a table with left-aligned text and right-aligned numbers."""
    cells = [[_cell(value) for value in row] for row in rows]
    widths = [len(header) for header in headers]
    for row in cells :
        for index, cell in enumerate(row) :
            widths[index] = max(widths[index], len(cell))
    numeric = [
        all(isinstance(row[index], (int, float)) or row[index] is None for row in rows) and bool(rows)
        for index in range(len(headers))
    ]

    def line(row : typing.Sequence[str]) -> str :
        return '  '.join(
            cell.rjust(width) if right else cell.ljust(width)
            for cell, width, right in zip(row, widths, numeric)
        ).rstrip()

    rule = '  '.join('-' * width for width in widths)
    return '\n'.join([line(headers), rule] + [line(row) for row in cells])

def _verdict(verdict : typing.Mapping[str, typing.Any]) -> str :
    margin = verdict['margin']
    uncertainty = verdict['uncertainty']
    if verdict['verdict'] == 'indeterminate' :
        return (
            f'verdict: indeterminate (margin {margin:.3e} within band '
            f'[{-uncertainty:.3e}, {uncertainty:.3e}])'
        )
    return f'verdict: {verdict["verdict"]} (margin {margin:.3e} +- {uncertainty:.3e})'

def _invariants(title : str, invariants : typing.Mapping[str, typing.Any]) -> str :
    mass = invariants['mass']
    momentum = invariants['angular_momentum']
    komar = invariants.get('angular_momentum_komar')
    rows = []
    for index, radius in enumerate(mass['radii']) :
        rows.append([
            radius,
            mass['values'][index],
            momentum['values'][index],
            None if komar is None else komar[index],
        ])
    lines = [
        title,
        table(['radius', 'm', 'J_pi', 'J_komar'], rows),
        f'm = {mass["value"]:.6g} +- {mass["spread"]:.2e}',
        f'J = {momentum["value"]:.6g} +- {momentum["spread"]:.2e}',
        (
            f'trace sup {invariants["trace_sup"]:.3e}, hamiltonian sup '
            f'{invariants["hamiltonian_sup"]:.3e}, momentum sup {invariants["momentum_sup"]:.3e}, '
            f'axisymmetry {invariants["axisymmetry"]:.3e}'
        ),
        _verdict(invariants['verdict']),
    ]
    return '\n'.join(lines)

def render(report : Report) -> str :
    """Renders a report as text: header, gates, invariants, level monitors and iterations."""
    check_report(report)
    sections = [f'{report["kind"]} report ({report["schema"]}, version {report["version"]}, seed {report["seed"]})']
    if report.get('gates') :
        sections.append(table(
            ['gate', 'value', 'limit', 'passed'],
            [[gate['name'], gate['value'], gate['limit'], gate['passed']] for gate in report['gates']]
        ))
    for key, title in (('invariants', 'invariants'), ('input', 'input invariants'), ('output', 'output invariants')) :
        if report.get(key) :
            sections.append(_invariants(title, report[key]))
    if report.get('levels') :
        sections.append(table(
            ['t', 'nodes', 'h', 'speed', 'monitor sup', 'monitor norm'],
            [
                [level['t'], level['nodes'], level['h'], level['speed'], level['monitor_sup'], level['monitor_norm']]
                for level in report['levels']
            ]
        ))
    if report.get('iterations') :
        sections.append(table(
            ['iteration', 'residual', 'norm', 'step', 'ratio', 'enforced', 'radius'],
            [
                [
                    record['iteration'], record['residual'], record['norm'], record['step'],
                    record['ratio'], record['enforced'], record['radius'],
                ]
                for record in report['iterations']
            ]
        ))
    if report.get('comparison') :
        comparison = report['comparison']
        sections.append(table(['quantity', 'value'], [[key, comparison[key]] for key in sorted(comparison)]))
    failure = report.get('failure')
    if failure :
        sections.append(f'failed at stage {failure["stage"]}: {failure["message"]}')
    return '\n\n'.join(sections) + '\n'

def _leaves(value : typing.Any, prefix : str = '') -> typing.Dict[str, typing.Any] :
    if isinstance(value, dict) :
        result = {}
        for key in sorted(value) :
            result.update(_leaves(value[key], f'{prefix}.{key}' if prefix else str(key)))
        return result
    if isinstance(value, list) :
        result = {}
        for index, item in enumerate(value) :
            result.update(_leaves(item, f'{prefix}[{index}]'))
        return result
    return {prefix : value}

def diff(first : Report, second : Report) -> str :
    """Renders the fields of two reports that differ, with deltas of numeric fields."""
    check_report(first)
    check_report(second)
    a = _leaves(first)
    b = _leaves(second)
    rows = []
    for key in sorted(set(a) | set(b)) :
        left = a.get(key)
        right = b.get(key)
        if left == right :
            continue
        numeric = all(
            isinstance(value, (int, float)) and not isinstance(value, bool) for value in (left, right)
        )
        rows.append([key, left, right, right - left if numeric else None])
    if not rows :
        return 'reports equal\n'
    return table(['field', 'first', 'second', 'delta'], rows) + '\n'
