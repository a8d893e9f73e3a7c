"""Backend selection.

Numba kernels are used when numba imports and ``SEMIGROUP_FORGE_DISABLE_JIT``
is unset (or ``0``). ``SEMIGROUP_FORGE_THREADS`` caps numba and BLAS threads.
"""
import os

DISABLE_ENV = "SEMIGROUP_FORGE_DISABLE_JIT"
THREADS_ENV = "SEMIGROUP_FORGE_THREADS"

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False


def jit_disabled():
    return os.environ.get(DISABLE_ENV, "0").strip().lower() in ("1", "true", "yes", "on")


USE_NUMBA = HAVE_NUMBA and not jit_disabled()


def thread_cap():
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return None
    try:
        n = int(raw)
    except ValueError:
        return None
    return n if n > 0 else None


def apply_thread_cap():
    """Honour ``SEMIGROUP_FORGE_THREADS``; returns the cap or ``None``."""
    n = thread_cap()
    if n is None:
        return None
    if HAVE_NUMBA:
        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))
    try:
        from threadpoolctl import threadpool_limits
    except ImportError:
        pass
    else:
        threadpool_limits(limits=n)
    return n


def njit(fn):
    """``numba.njit(cache=True)`` when available, identity otherwise."""
    if HAVE_NUMBA:
        return numba.njit(cache=True)(fn)
    return fn
