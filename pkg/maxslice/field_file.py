"""
Field files: binary records of initial data, height functions and spacetime slab levels.

Every record carries a fixed-length text header with the grid and the component count, so a reader
checks the layout before it touches the samples.
"""

from .fields import Grid3, ScalarField, SymTensorField3, SymTensorField4, SpacetimeSlab
from .exceptions import *

import logging
import typing

import numpy

if typing.TYPE_CHECKING :
    from .physics import InitialData

logger = logging.getLogger(__name__)

class FieldFile :
    """
    Field file: a sequence of records, each a 64-byte text header followed by little-endian float64
    samples in component-major, z-fastest order.
    """

    MAGIC = 'MXSF1'
    """Magic word opening every record header."""
    HEADER_LENGTH = 64
    """Length of a record header in bytes, newline included."""
    COMPONENT_COUNT_DATA = 12
    """Component count of an initial data record (g and k, upper triangles)."""
    COMPONENT_COUNT_DATA_HEIGHT = 13
    """Component count of an initial data record carrying a height function."""
    COMPONENT_COUNT_LEVEL = 22
    """Component count of a slab level record (t, mask, gamma^{mu nu}, d/dt gamma^{mu nu})."""

    class Unavailability(Exception) :
        """Exception that indicates the unavailability of a field file."""
        pass

    class FormatException(Exception) :
        """Exception that indicates a malformed field file."""
        pass

    def __init__(self, path : str, writable : bool = False) -> None :
        """
        Opens a field file.

        :param path:
            Path of the file.
        :param writable:
            Whether the file is created (truncated) for writing instead of opened for reading.

        :raises Unavailability:
            File unavailable (e.g. missing or not permitted).
        """
        try :
            self.__file = open(path, 'wb' if writable else 'rb')
        except OSError as error :
            raise FieldFile.Unavailability(str(error))
        self.__path = path

    def __enter__(self) -> 'FieldFile' :
        return self

    def __exit__(self, *arguments) -> None :
        self.close()

    @property
    def path(self) -> str :
        """Gets the path of the file."""
        return self.__path

    def close(self) -> None :
        """Closes the file."""
        self.__file.close()

    def _transmit(self, grid : Grid3, values : numpy.ndarray) -> None :
        """
        Writes a record.

        :param grid:
            Grid of the record.
        :param values:
            Samples of shape `(C, nx, ny, nz)`.
        """
        nx, ny, nz = grid.shape
        ox, oy, oz = grid.origin
        header = ' '.join([
            FieldFile.MAGIC,
            str(nx), str(ny), str(nz),
            format(grid.h, '.9g'),
            format(ox, '.9g'), format(oy, '.9g'), format(oz, '.9g'),
            str(values.shape[0]),
        ])
        if len(header) > FieldFile.HEADER_LENGTH - 1 :
            raise ValueError('Grid invalid: Header exceeds its length.')
        self.__file.write(header.ljust(FieldFile.HEADER_LENGTH - 1).encode('ascii') + b'\n')
        self.__file.write(numpy.ascontiguousarray(values, dtype = '<f8').tobytes())

    def _receive(self) -> typing.Optional[typing.Tuple[Grid3, numpy.ndarray]] :
        """
        Reads a record; returns `None` at the end of the file.

        :raises FormatException:
            Header or sample data malformed.
        """
        header = self.__file.read(FieldFile.HEADER_LENGTH)
        if len(header) == 0 :
            return None
        if len(header) != FieldFile.HEADER_LENGTH or header[-1 :] != b'\n' :
            raise FieldFile.FormatException('Header invalid: Truncated.')
        words = header.decode('ascii', errors = 'replace').split()
        if len(words) != 9 or words[0] != FieldFile.MAGIC :
            raise FieldFile.FormatException('Header invalid: Magic word or field count.')
        try :
            shape = tuple(int(word) for word in words[1 : 4])
            h = float(words[4])
            origin = tuple(float(word) for word in words[5 : 8])
            count = int(words[8])
            grid = Grid3(shape, h)
        except ValueError :
            raise FieldFile.FormatException('Header invalid: Grid malformed.')
        if any(abs(a - b) > 1e-6 * max(1.0, abs(b)) for a, b in zip(origin, grid.origin)) :
            raise FieldFile.FormatException('Header invalid: Origin not centered.')
        length = count * grid.size * 8
        data = self.__file.read(length)
        if len(data) != length :
            raise FieldFile.FormatException('Samples invalid: Truncated.')
        values = numpy.frombuffer(data, dtype = '<f8').astype(numpy.float64)
        logger.debug('Record read: %s components on %s', count, grid)
        return grid, values.reshape((count,) + grid.shape)

    def write_data(self, data : 'InitialData', u : typing.Optional[ScalarField] = None) -> None :
        """Writes an initial data record, with the height function if given."""
        parts = [data.g.values, data.k.values]
        if u is not None :
            parts.append(u.values)
        self._transmit(data.grid, numpy.concatenate(parts))

    def read_data(self) -> typing.Tuple['InitialData', typing.Optional[ScalarField]] :
        """
        Reads an initial data record and its height function, if present.

        :raises FormatException:
            No record or component count not a data record.
        """
        from .physics import InitialData
        record = self._receive()
        if record is None :
            raise FieldFile.FormatException('File invalid: No record.')
        grid, values = record
        if values.shape[0] not in (
            FieldFile.COMPONENT_COUNT_DATA,
            FieldFile.COMPONENT_COUNT_DATA_HEIGHT
        ) :
            raise FieldFile.FormatException('Record invalid: Not initial data.')
        data = InitialData(
            SymTensorField3(grid, values[0 : 6]),
            SymTensorField3(grid, values[6 : 12])
        )
        u = None
        if values.shape[0] == FieldFile.COMPONENT_COUNT_DATA_HEIGHT :
            u = ScalarField(grid, values[12])
        return data, u

    def write_slab(self, slab : SpacetimeSlab) -> None :
        """Writes one record per slab level."""
        grid = slab.grid
        for level in range(slab.level_count) :
            self._transmit(grid, numpy.concatenate([
                numpy.full((1,) + grid.shape, slab.times[level]),
                slab.mask(level)[numpy.newaxis].astype(numpy.float64),
                slab.metric(level).values,
                slab.rate(level).values,
            ]))

    def read_slab(self, cfl : float = SpacetimeSlab.CFL_DEFAULT) -> SpacetimeSlab :
        """
        Reads slab level records up to the end of the file.

        :raises FormatException:
            No record, component count not a level record or grids differ.
        """
        times = []
        masks = []
        metrics = []
        rates = []
        grid = None
        while (record := self._receive()) is not None :
            grid_level, values = record
            if values.shape[0] != FieldFile.COMPONENT_COUNT_LEVEL :
                raise FieldFile.FormatException('Record invalid: Not a slab level.')
            if grid is not None and grid_level != grid :
                raise FieldFile.FormatException('Record invalid: Grids differ.')
            grid = grid_level
            mask = values[1] > 0.5
            times.append(float(values[0].flat[0]))
            masks.append(mask)
            metrics.append(SymTensorField4(grid, values[2 : 12], mask))
            rates.append(SymTensorField4(grid, values[12 : 22], mask))
        if grid is None :
            raise FieldFile.FormatException('File invalid: No record.')
        try :
            return SpacetimeSlab(grid, times, metrics, rates, masks, cfl)
        except ValueError as error :
            raise FieldFile.FormatException(f'Slab invalid: {error}')
