from maxslice.dataset import Dataset as DatasetGeneric
from maxslice.fields import Grid3, ScalarField, SpacetimeSlab
from maxslice.geometry import KAPPA_DEFAULT, graph_metric, graph_second_form, graph_state
from maxslice.evolution import STEPS_DEFAULT, build_cauchy_data, evolve
from maxslice.physics import InitialData, trace_field
from maxslice.exceptions import GateException

import dataclasses
import logging
import typing

import numpy

logger = logging.getLogger(__name__)

TRACE_GATE_DEFAULT = 1e-8
"""Default bound of the trace of a maximal base."""

def gaussian_profile(
    grid : Grid3,
    amplitude : float,
    center : typing.Sequence[float] = (0.0, 0.0, 0.0),
    width : float = 2.0
) -> ScalarField :
    """Gets the height profile `amplitude exp(-|x - center|^2 / width^2)`."""
    if not width > 0.0 :
        raise ValueError('Width invalid: Value not positive.')
    offset = grid.coordinates() - numpy.asarray(center, dtype = numpy.float64).reshape(3, 1, 1, 1)
    return ScalarField(grid, amplitude * numpy.exp(-numpy.sum(offset * offset, axis = 0) / width ** 2))

def make_tilted(
    base : InitialData,
    u0 : ScalarField,
    steps : int = STEPS_DEFAULT,
    cfl : float = SpacetimeSlab.CFL_DEFAULT,
    kappa : float = KAPPA_DEFAULT,
    gate : float = TRACE_GATE_DEFAULT
) -> InitialData :
    """
    Makes non-maximal vacuum data: evolves maximal base data and induces metric and second
    fundamental form on the graph of `u0` in the evolved slab.

    :raises GateException:
        Trace of the base exceeds the gate.
    :raises GraphExitsSlabException:
        Slab too thin for the height profile.
    :raises GraphNotSpacelikeException:
        Height profile too steep.
    """
    trace = trace_field(base).sup(base.grid.interior)
    if trace > gate :
        raise GateException('tilted', 'base trace', trace, gate)
    slab = evolve(build_cauchy_data(base), steps, cfl = cfl)
    state = graph_state(slab, u0, kappa)
    g, _ = graph_metric(state)
    k, asymmetry = graph_second_form(slab, u0, state)
    logger.info(
        'Tilted data on %d nodes, tilt sup %.4g, second form asymmetry %.4g',
        int(numpy.count_nonzero(state.valid)), state.tilt.sup(), asymmetry
    )
    return InitialData(g, k)

class Dataset(DatasetGeneric) :
    """Non-maximal data induced on a tilted graph over a maximal base family."""

    FAMILY = 'tilted'
    MAXIMAL = False

    def generate(self) -> InitialData :
        spec = self.spec
        base = DatasetGeneric.construct(dataclasses.replace(spec, family = spec.base))
        if not base.MAXIMAL :
            raise ValueError('Base family invalid: Not maximal.')
        u0 = gaussian_profile(self.grid, spec.amplitude, spec.center, spec.width)
        return make_tilted(base.generate(), u0, spec.steps, spec.cfl)
