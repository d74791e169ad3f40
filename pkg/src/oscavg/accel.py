"""Numba acceleration switch.

Hot kernels (CPUT basin scans, FPU benchmark integration) are compiled with
numba when available.  Setting the environment variable ``OSCAVG_FORCE_NUMPY``
to a non-empty value (other than "0") forces the pure-numpy fallback paths,
which produce identical results but run slower.  ``OSCAVG_THREADS`` caps the
number of worker threads used by parallel kernels.
"""

import os

try:
    import numba
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False


def _force_numpy() -> bool:
    return os.environ.get("OSCAVG_FORCE_NUMPY", "0").strip().lower() not in ("", "0", "false")


NUMBA_ENABLED = HAVE_NUMBA and not _force_numpy()


def thread_count() -> int:
    n = os.environ.get("OSCAVG_THREADS", "").strip()
    if n:
        return max(1, int(n))
    return os.cpu_count() or 1


if NUMBA_ENABLED:
    try:
        numba.set_num_threads(min(thread_count(), numba.config.NUMBA_NUM_THREADS))
    except ValueError:  # pragma: no cover
        pass


def maybe_jit(**kwargs):
    """Return numba.njit(**kwargs) when enabled, identity decorator otherwise."""
    if NUMBA_ENABLED:
        return numba.njit(**kwargs)

    def passthrough(fn):
        return fn

    return passthrough
