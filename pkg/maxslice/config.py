"""Pipeline configuration read from TOML files."""

from .dataset import DatasetSpec
from .evolution import ORDER_DEFAULT, STEPS_DEFAULT
from .fields import SpacetimeSlab, SphereRule
from .maximal import SolverConfig
from .physics import RADII_DEFAULT

import dataclasses
import os
import tomllib
import typing

@dataclasses.dataclass(frozen = True)
class GridConfig :
    """Grid of the pipeline."""

    n : int = 48
    h : float = 0.75

@dataclasses.dataclass(frozen = True)
class DatasetConfig :
    """Dataset family and its parameters (see `DatasetSpec`)."""

    family : str = 'flat'
    mass : float = 1.0
    spin : float = 0.0
    excision : typing.Optional[float] = None
    base : str = 'schwarzschild'
    amplitude : float = 1e-2
    width : float = 2.0
    center : typing.Tuple[float, float, float] = (0.0, 0.0, 0.0)

@dataclasses.dataclass(frozen = True)
class EvolutionConfig :
    """Evolution of the Cauchy data and its diagnostics."""

    steps : int = STEPS_DEFAULT
    """Steps per time direction."""
    dt : typing.Optional[float] = None
    """Time step, defaults to `cfl h`."""
    cfl : float = SpacetimeSlab.CFL_DEFAULT
    order : int = ORDER_DEFAULT
    """Derivative order of the slice energies."""
    fault : bool = False
    """Omits the shift source of the Cauchy data."""

@dataclasses.dataclass(frozen = True)
class InvariantConfig :
    """Radii and sphere rule of the boundary integrals."""

    radii : typing.Tuple[float, ...] = RADII_DEFAULT
    latitudes : int = SphereRule.LATITUDES_DEFAULT
    longitudes : int = SphereRule.LONGITUDES_DEFAULT

    def rule(self) -> SphereRule :
        """Gets the sphere rule."""
        return SphereRule(self.latitudes, self.longitudes)

@dataclasses.dataclass(frozen = True)
class GateConfig :
    """Bounds that every stage of the pipeline must meet."""

    constraint : float = 1e-2
    """Bound of the constraint residual sups of input and output data."""
    harmonic : float = 1e-2
    """Bound of the harmonic gauge monitor sup on every level."""
    trace : float = 1e-7
    """Bound of the trace of the output data over the solver region."""
    contraction : float = 0.5
    """Ceiling of the step ratios of the fixed-point iteration."""

@dataclasses.dataclass(frozen = True)
class OutputConfig :
    """Output locations."""

    directory : str = 'maxslice-out'

    def path(self, name : str) -> str :
        """Gets the path of an output file."""
        return os.path.join(self.directory, name)

_SECTIONS = {
    'grid' : GridConfig,
    'dataset' : DatasetConfig,
    'evolution' : EvolutionConfig,
    'solver' : SolverConfig,
    'invariants' : InvariantConfig,
    'gates' : GateConfig,
    'output' : OutputConfig,
}

def _section(cls : type, name : str, mapping : typing.Mapping[str, typing.Any]) -> typing.Any :
    if not isinstance(mapping, dict) :
        raise ValueError(f'Section invalid: [{name}] is not a table.')
    names = {field.name for field in dataclasses.fields(cls)}
    if cls is SolverConfig :
        names.discard('contraction')
    unknown = sorted(set(mapping) - names)
    if unknown :
        raise ValueError(f'Key invalid: {name}.{unknown[0]} unknown.')
    values = {
        key : tuple(value) if isinstance(value, list) else value
        for key, value in mapping.items()
    }
    try :
        return cls(**values)
    except TypeError as exception :
        raise ValueError(f'Section invalid: [{name}] {exception}.') from exception

@dataclasses.dataclass(frozen = True)
class PipelineConfig :
    """
    Configuration of a pipeline run.

    The contraction ceiling of the solver is set in the gates section.
    """

    grid : GridConfig = GridConfig()
    dataset : DatasetConfig = DatasetConfig()
    evolution : EvolutionConfig = EvolutionConfig()
    solver : SolverConfig = SolverConfig()
    invariants : InvariantConfig = InvariantConfig()
    gates : GateConfig = GateConfig()
    output : OutputConfig = OutputConfig()
    seed : int = 0
    """Seed of the randomized checks, echoed in reports."""

    def __post_init__(self) -> None :
        for name in ('constraint', 'harmonic', 'trace', 'contraction') :
            if not getattr(self.gates, name) > 0.0 :
                raise ValueError(f'Gate invalid: {name.capitalize()} not positive.')
        radii = self.invariants.radii
        if not radii :
            raise ValueError('Radii invalid: Value empty.')
        if any(b <= a for a, b in zip(radii, radii[1 :])) :
            raise ValueError('Radii invalid: Values not ascending.')
        grid = self.spec().grid
        if radii[0] <= 0.0 or radii[-1] > grid.half_width - grid.margin * grid.h :
            raise ValueError('Radii invalid: Values outside of grid.')

    def spec(self) -> DatasetSpec :
        """Gets the dataset parameters."""
        return DatasetSpec(
            **dataclasses.asdict(self.dataset),
            n = self.grid.n,
            h = self.grid.h,
            steps = self.evolution.steps,
            cfl = self.evolution.cfl
        )

    def solver_config(self) -> SolverConfig :
        """Gets the solver configuration with the contraction ceiling of the gates."""
        return dataclasses.replace(self.solver, contraction = self.gates.contraction)

    @classmethod
    def from_mapping(cls, mapping : typing.Mapping[str, typing.Any]) -> 'PipelineConfig' :
        """
        Constructs a configuration from a mapping of sections.

        :raises ValueError:
            Unknown section or key, or invalid value.
        """
        values : typing.Dict[str, typing.Any] = {}
        for key, value in mapping.items() :
            if key == 'seed' :
                if not isinstance(value, int) or isinstance(value, bool) :
                    raise ValueError('Seed invalid: Value not an integer.')
                values[key] = value
            elif key in _SECTIONS :
                values[key] = _section(_SECTIONS[key], key, value)
            else :
                raise ValueError(f'Section invalid: [{key}] unknown.')
        return cls(**values)

    @classmethod
    def load(cls, path : str) -> 'PipelineConfig' :
        """
        Loads a configuration from a TOML file.

        :raises ValueError:
            Malformed file, unknown section or key, or invalid value.
        """
        with open(path, 'rb') as file :
            try :
                mapping = tomllib.load(file)
            except tomllib.TOMLDecodeError as exception :
                raise ValueError(f'Configuration invalid: {exception}.') from exception
        return cls.from_mapping(mapping)

    def to_dict(self) -> typing.Dict[str, typing.Any] :
        """Gets the configuration as nested plain values (for reports)."""
        return dataclasses.asdict(self)
