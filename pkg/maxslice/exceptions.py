import abc

class Exception(Exception, abc.ABC) :
    """Generic exception."""
    pass

class InternalException(Exception) :
    """
    Exception that indicates an internal error.

    This exception should never occur.
    """
    pass

class StencilException(Exception) :
    """
    Exception that indicates that a finite difference stencil does not fit.

    The reason for this exception is an axis out of range, a field too small for the stencil or a
    derivative margin that has been exhausted.
    """
    pass

class QuadratureException(Exception) :
    """Exception that indicates that a sphere quadrature cannot be evaluated."""
    pass

class OutOfConeException(Exception) :
    """Exception that indicates that a spacetime point lies outside of the valid region of a slab."""
    pass

class SlicingException(Exception) :
    """
    Exception that indicates that the time function of a spacetime metric is broken.

    The reason for this exception is a non-positive `alpha^2 - |beta|^2` or a non-negative
    `gamma^00`.
    """
    pass

class GraphException(Exception, abc.ABC) :
    """Exception that indicates that a height function does not define an admissible graph."""
    pass

class GraphExitsSlabException(GraphException) :
    """Exception that indicates that a graph leaves the boost region of its slab."""
    pass

class GraphNotSpacelikeException(GraphException) :
    """Exception that indicates that a graph is not uniformly spacelike."""
    pass

class CflException(Exception) :
    """Exception that indicates that a time step violates the CFL bound."""
    pass

class HyperbolicityException(Exception) :
    """Exception that indicates that an evolved metric lost regular hyperbolicity."""
    pass

class MaskEmptyException(Exception) :
    """Exception that indicates that the active region of an evolution became empty."""
    pass

class GateException(Exception) :
    """
    Exception that indicates that a quantity failed a configured gate.

    The stage, the name of the gate, the measured value and the limit are attached.
    """

    def __init__(self, stage : str, gate : str, value : float, limit : float) -> None :
        super().__init__(f'{stage}: {gate} {value:.3e} exceeds {limit:.3e}')
        self.stage = stage
        self.gate = gate
        self.value = value
        self.limit = limit

class ConvergenceException(Exception) :
    """
    Exception that indicates that a linear solve did not converge.

    The reason for this exception is an exhausted iteration budget or a near-singular operator.
    """
    pass

class ContractionException(Exception) :
    """Exception that indicates that a fixed-point iteration exceeded its contraction ceiling."""
    pass

class TrustRegionException(Exception) :
    """Exception that indicates that a fixed-point iterate left its trust region."""
    pass

class ReportVersionException(Exception) :
    """Exception that indicates that a report has an unknown schema version."""
    pass

# Remove from wildcard imports.
del abc
