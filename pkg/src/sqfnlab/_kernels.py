"""Hot numeric kernels.

Every kernel exists twice: a numba ``@njit`` version and a plain numpy
version with identical semantics. The numba path is used when numba imports
and ``SQFNLAB_DISABLE_NUMBA`` is unset (or ``0``); ``use_numba(False)``
switches at runtime, which the benchmark and the equivalence tests rely on.
"""

import os

import numpy as np

_FLAG = os.environ.get("SQFNLAB_DISABLE_NUMBA", "").strip().lower()
_DISABLED = _FLAG not in ("", "0", "false", "no")

try:
    if _DISABLED:
        raise ImportError("numba disabled by SQFNLAB_DISABLE_NUMBA")
    import numba

    HAVE_NUMBA = True
except ImportError:
    numba = None
    HAVE_NUMBA = False

# No fastmath: the martingale inequalities are checked with zero tolerance
# and must see IEEE-exact exp/compare semantics.
JIT_OPTIONS = {"nogil": True, "cache": True}

_active = HAVE_NUMBA


def use_numba(enabled=True):
    """Select the numba (True) or numpy (False) implementation."""
    global _active
    if enabled and not HAVE_NUMBA:
        raise RuntimeError("numba is not available")
    _active = bool(enabled)


def numba_active():
    return _active


# ---------------------------------------------------------------------------
# lacunary (Weierstrass-Hardy) partial sums


def _lacunary_sum_numpy(x, b, n_terms):
    out = np.zeros_like(x)
    freq = 1.0
    for _ in range(n_terms):
        freq *= b
        out += np.cos(freq * x) / freq
    return out


# ---------------------------------------------------------------------------
# per-leaf statistics of a dyadic martingale stored level by level
#
# ``flat`` holds generation k at flat[2**k - 1 : 2**(k+1) - 1].
# Returns, for each generation-n leaf:
#   s_n      value of S_n
#   qv       <S>_n^2
#   drift    sup_{k<=n} (S_k - qv_k / 2)
#   maxabs   sup_{k<=n} |S_k|


def _leaf_stats_numpy(flat, n):
    size = 1 << n
    s_prev = np.full(size, flat[0])
    qv = np.zeros(size)
    drift = s_prev.copy()
    maxabs = np.abs(s_prev)
    for k in range(1, n + 1):
        level = flat[(1 << k) - 1:(1 << (k + 1)) - 1]
        s_k = np.repeat(level, 1 << (n - k))
        inc = s_k - s_prev
        qv = qv + inc * inc
        np.maximum(drift, s_k - 0.5 * qv, out=drift)
        np.maximum(maxabs, np.abs(s_k), out=maxabs)
        s_prev = s_k
    return s_prev, qv, drift, maxabs


if HAVE_NUMBA:

    @numba.njit(**JIT_OPTIONS)
    def _lacunary_sum_numba(x, b, n_terms):
        out = np.zeros_like(x)
        for i in range(x.size):
            acc = 0.0
            freq = 1.0
            xi = x[i]
            for _ in range(n_terms):
                freq *= b
                acc += np.cos(freq * xi) / freq
            out[i] = acc
        return out

    @numba.njit(**JIT_OPTIONS)
    def _leaf_stats_numba(flat, n):
        size = 1 << n
        s_n = np.empty(size)
        qv = np.empty(size)
        drift = np.empty(size)
        maxabs = np.empty(size)
        for i in range(size):
            prev = flat[0]
            q = 0.0
            d = prev
            m = abs(prev)
            for k in range(1, n + 1):
                cur = flat[(1 << k) - 1 + (i >> (n - k))]
                inc = cur - prev
                q += inc * inc
                v = cur - 0.5 * q
                if v > d:
                    d = v
                if abs(cur) > m:
                    m = abs(cur)
                prev = cur
            s_n[i] = prev
            qv[i] = q
            drift[i] = d
            maxabs[i] = m
        return s_n, qv, drift, maxabs


def lacunary_sum(x, b, n_terms):
    """sum_{n=1}^{n_terms} b^-n cos(b^n x), elementwise."""
    x = np.asarray(x, dtype=np.float64)
    flat = np.ascontiguousarray(x.ravel())
    if _active:
        out = _lacunary_sum_numba(flat, float(b), int(n_terms))
    else:
        out = _lacunary_sum_numpy(flat, float(b), int(n_terms))
    return out.reshape(x.shape)


def leaf_stats(flat, n):
    flat = np.ascontiguousarray(flat, dtype=np.float64)
    if _active:
        return _leaf_stats_numba(flat, int(n))
    return _leaf_stats_numpy(flat, int(n))
