"""Data-parallel helper for pointwise kernels."""

import concurrent.futures
import logging
import os
import typing

import numpy

logger = logging.getLogger(__name__)

THREADS_VARIABLE = 'MAXSLICE_THREADS'
"""Environment variable capping the worker count."""
CHUNK_SIZE_DEFAULT = 8_192
"""Default number of points per chunk."""

def worker_count() -> int :
    """
    Gets the worker count of data-parallel kernels.

    Values: [`1`, CPU count] unless capped higher by `MAXSLICE_THREADS`.

    :raises ValueError:
        Environment variable not a positive integer.
    """
    value = os.environ.get(THREADS_VARIABLE)
    if value is None or value == '' :
        return max(1, os.cpu_count() or 1)
    try :
        count = int(value)
    except ValueError :
        raise ValueError('Thread count invalid: Value not an integer.')
    if count < 1 :
        raise ValueError('Thread count invalid: Value not positive.')
    return count

def map_chunks(
    function : typing.Callable[[slice], numpy.ndarray],
    count : int,
    chunk_size : int = CHUNK_SIZE_DEFAULT
) -> numpy.ndarray :
    """
    Evaluates a kernel over the flat point range `[0, count)` in chunks and concatenates the results
    along the last axis.

    The kernel receives a slice of the point range and returns an array whose last axis has the
    length of that slice. Results are reassembled in order, so the outcome does not depend on the
    worker count.
    """
    if count <= 0 :
        raise ValueError('Point count invalid: Value not positive.')
    slices = [slice(start, min(start + chunk_size, count)) for start in range(0, count, chunk_size)]
    workers = min(worker_count(), len(slices))
    if workers == 1 :
        parts = [function(part) for part in slices]
    else :
        with concurrent.futures.ThreadPoolExecutor(max_workers = workers) as executor :
            parts = list(executor.map(function, slices))
    return numpy.concatenate(parts, axis = -1)

def map_items(
    function : typing.Callable[[typing.Any], typing.Any],
    items : typing.Sequence[typing.Any]
) -> typing.List[typing.Any] :
    """Evaluates a function for every item concurrently and returns the results in item order."""
    workers = min(worker_count(), max(1, len(items)))
    if workers == 1 :
        return [function(item) for item in items]
    with concurrent.futures.ThreadPoolExecutor(max_workers = workers) as executor :
        return list(executor.map(function, items))
