import os

import numpy as np

from exchange_kinetics.exceptions import IntegralityError

THREADS_ENV = "EXCHANGE_KINETICS_THREADS"


def as_integer_amount(value: float, name: str, atol: float = 1e-9) -> int:
    """
    Convert a dollar amount such as N*mu or N*mu*nu to an exact integer.
    value: float
        Amount computed in floating point.
    name: str
        Name used in the error message.
    atol: float
        Largest accepted distance to the nearest integer.
    """
    nearest = int(np.rint(value))
    if abs(value - nearest) > atol:
        raise IntegralityError(f"{name} = {value!r} must be an integer")
    return nearest


def worker_count(requested: int | None = None) -> int:
    """
    Number of worker threads for replica runs.
    requested: int or None
        Explicit request. The environment variable EXCHANGE_KINETICS_THREADS caps it,
        and it defaults to the number of CPUs.
    """
    cap = os.environ.get(THREADS_ENV)
    n_workers = requested or os.cpu_count() or 1
    if cap:
        try:
            n_workers = min(n_workers, int(cap))
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be an integer, got {cap!r}")
    return max(1, n_workers)
