from .fields import Grid3, SpacetimeSlab
from .physics import InitialData
from .exceptions import *

import abc
import dataclasses
import importlib
import logging
import typing

logger = logging.getLogger(__name__)

@dataclasses.dataclass(frozen = True)
class DatasetSpec :
    """Family and parameters of a generated initial data set."""

    FAMILIES = ('flat', 'schwarzschild', 'kerr-annulus', 'tilted')
    """Families with a dataset module."""

    family : str = 'flat'
    n : int = 48
    """Node count per axis."""
    h : float = 0.75
    """Grid spacing."""
    mass : float = 1.0
    spin : float = 0.0
    excision : typing.Optional[float] = None
    """Excision radius (Schwarzschild) or inner radius (Kerr annulus); defaults to the mass."""
    base : str = 'schwarzschild'
    """Base family of a tilted dataset."""
    amplitude : float = 1e-2
    """Amplitude of the tilt profile."""
    width : float = 2.0
    """Width of the tilt profile."""
    center : typing.Tuple[float, float, float] = (0.0, 0.0, 0.0)
    """Center of the tilt profile."""
    steps : int = 2
    """Evolution steps per time direction of a tilted dataset."""
    cfl : float = SpacetimeSlab.CFL_DEFAULT
    """Ratio `dt / h` of the evolution of a tilted dataset."""

    def __post_init__(self) -> None :
        if self.family not in DatasetSpec.FAMILIES :
            raise ValueError('Family invalid: Value unknown.')
        if self.mass < 0.0 :
            raise ValueError('Mass invalid: Value negative.')

    @property
    def grid(self) -> Grid3 :
        """Gets the grid of the dataset."""
        return Grid3(self.n, self.h)

class Dataset(abc.ABC) :
    """Generic dataset family."""

    FAMILY : str
    """Family of the dataset."""
    MAXIMAL : bool
    """Whether the family is maximal (vanishing trace)."""

    @classmethod
    def construct(cls, spec : DatasetSpec) -> 'Dataset' :
        """
        Constructs a dataset of the class implementing the family of the given parameters.

        Raises `NotImplementedError` if the family is not implemented.
        """
        try :
            module = importlib.import_module(
                '.' + cls.__MODULE_NAME.format(spec.family.replace('-', '_')), __package__
            )
        except ImportError :
            pass
        else :
            dataset_cls = getattr(module, cls.__CLASS_NAME, None)
            if dataset_cls and issubclass(dataset_cls, Dataset) :
                return dataset_cls(spec)
        raise NotImplementedError()

    def __init__(self, spec : DatasetSpec) -> None :
        """Constructs a dataset."""
        if spec.family != self.FAMILY :
            raise ValueError('Family invalid: Value does not match the dataset.')
        self.__spec = spec
        self.__grid = spec.grid

    @property
    def spec(self) -> DatasetSpec :
        """Gets the parameters of the dataset."""
        return self.__spec

    @property
    def grid(self) -> Grid3 :
        """Gets the grid of the dataset."""
        return self.__grid

    @abc.abstractmethod
    def generate(self) -> InitialData :
        """Generates the initial data."""
        raise NotImplementedError()

    def slab(self, times : typing.Sequence[float]) -> typing.Optional[SpacetimeSlab] :
        """Gets the exact spacetime of the data on the given time levels, if the family has one."""
        return None

    __MODULE_NAME = 'datasets.{}'
    __CLASS_NAME = 'Dataset'
