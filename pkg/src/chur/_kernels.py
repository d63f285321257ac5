"""Hot numeric kernels: numba-jitted loops with a pure-numpy fallback.

The jitted path is used by default whenever numba imports cleanly; setting
the environment variable ``CHUR_DISABLE_NUMBA=1`` before import forces the
vectorized numpy implementations instead.  Both paths compute identical
quantities (up to summation-order rounding) and are compared by
``benchmarks/bench_kernels.py`` and ``tests/test_kernels.py``.
"""

from __future__ import annotations

import os

import numpy as np

# complex elements per temporary block in the numpy fallbacks
_CHUNK = 1 << 21


# ---------------------------------------------------------------------------
# loop bodies (numba-compilable)


def _char_sweep_loops(samples, weights, lams):
    m = lams.shape[0]
    n = samples.shape[0]
    out = np.empty(m, np.complex128)
    for i in range(m):
        lam = lams[i]
        re = 0.0
        im = 0.0
        for j in range(n):
            t = lam * samples[j]
            w = weights[j]
            re += w * np.cos(t)
            im += w * np.sin(t)
        out[i] = complex(re, im)
    return out


def _profile_synthesis_loops(lams, gvals, ys, scale):
    m = ys.shape[0]
    n = lams.shape[0]
    out = np.empty(m, np.complex128)
    for i in range(m):
        y = ys[i]
        acc_re = 0.0
        acc_im = 0.0
        for j in range(n):
            t = lams[j] * y
            c = np.cos(t)
            s = np.sin(t)
            gr = gvals[j].real
            gi = gvals[j].imag
            acc_re += gr * c - gi * s
            acc_im += gr * s + gi * c
        out[i] = complex(acc_re * scale, acc_im * scale)
    return out


def _hermite_modes_loops(u, n_modes):
    n = u.shape[0]
    out = np.empty((n_modes, n))
    c0 = np.pi ** -0.25
    for j in range(n):
        uu = u[j]
        h_prev = c0 * np.exp(-0.5 * uu * uu)
        out[0, j] = h_prev
        if n_modes > 1:
            h = np.sqrt(2.0) * uu * h_prev
            out[1, j] = h
            for k in range(2, n_modes):
                h_next = np.sqrt(2.0 / k) * uu * h - np.sqrt((k - 1.0) / k) * h_prev
                h_prev = h
                h = h_next
                out[k, j] = h
    return out


def _comb_teeth_loops(xs, period, tooth_sigma, env_sigma, half_teeth):
    n = xs.shape[0]
    out = np.zeros(n)
    x0 = xs[0]
    dx = xs[1] - xs[0]
    halfw = 12.0 * tooth_sigma
    inv2w2 = 1.0 / (2.0 * tooth_sigma * tooth_sigma)
    inv2s2 = 1.0 / (2.0 * env_sigma * env_sigma)
    for k in range(-half_teeth, half_teeth + 1):
        c = k * period
        env = np.exp(-(c * c) * inv2s2)
        j0 = int(np.floor((c - halfw - x0) / dx))
        j1 = int(np.ceil((c + halfw - x0) / dx))
        if j0 < 0:
            j0 = 0
        if j1 > n - 1:
            j1 = n - 1
        for j in range(j0, j1 + 1):
            d = xs[j] - c
            out[j] += env * np.exp(-d * d * inv2w2)
    return out


def _clock_shift_batch_loops(states):
    n, d = states.shape
    out = np.empty(n)
    step = 2.0 * np.pi / d
    for i in range(n):
        u_re = 0.0
        u_im = 0.0
        w_re = 0.0
        w_im = 0.0
        for k in range(d):
            c = states[i, k]
            p = c.real * c.real + c.imag * c.imag
            ang = step * k
            u_re += p * np.cos(ang)
            u_im += p * np.sin(ang)
            c2 = states[i, (k + 1) % d]
            w_re += c2.real * c.real + c2.imag * c.imag
            w_im += c2.real * c.imag - c2.imag * c.real
        out[i] = u_re * u_re + u_im * u_im + w_re * w_re + w_im * w_im
    return out


# ---------------------------------------------------------------------------
# vectorized numpy fallbacks


def _char_sweep_numpy(samples, weights, lams):
    out = np.empty(lams.shape[0], dtype=np.complex128)
    blk = max(1, _CHUNK // max(1, samples.size))
    for i in range(0, lams.size, blk):
        chunk = lams[i : i + blk]
        out[i : i + blk] = np.exp(1j * np.outer(chunk, samples)) @ weights
    return out


def _profile_synthesis_numpy(lams, gvals, ys, scale):
    out = np.empty(ys.shape[0], dtype=np.complex128)
    blk = max(1, _CHUNK // max(1, lams.size))
    for i in range(0, ys.size, blk):
        chunk = ys[i : i + blk]
        out[i : i + blk] = np.exp(1j * np.outer(chunk, lams)) @ gvals
    return out * scale


def _hermite_modes_numpy(u, n_modes):
    out = np.empty((n_modes, u.size))
    out[0] = np.pi ** -0.25 * np.exp(-0.5 * u * u)
    if n_modes > 1:
        out[1] = np.sqrt(2.0) * u * out[0]
    for k in range(2, n_modes):
        out[k] = np.sqrt(2.0 / k) * u * out[k - 1] - np.sqrt((k - 1.0) / k) * out[k - 2]
    return out


def _comb_teeth_numpy(xs, period, tooth_sigma, env_sigma, half_teeth):
    out = np.zeros(xs.shape[0])
    x0 = xs[0]
    dx = xs[1] - xs[0]
    halfw = 12.0 * tooth_sigma
    for k in range(-half_teeth, half_teeth + 1):
        c = k * period
        env = np.exp(-(c * c) / (2.0 * env_sigma * env_sigma))
        j0 = max(0, int(np.floor((c - halfw - x0) / dx)))
        j1 = min(xs.shape[0] - 1, int(np.ceil((c + halfw - x0) / dx)))
        if j1 < j0:
            continue
        d = xs[j0 : j1 + 1] - c
        out[j0 : j1 + 1] += env * np.exp(-d * d / (2.0 * tooth_sigma * tooth_sigma))
    return out


def _clock_shift_batch_numpy(states):
    d = states.shape[1]
    omega = np.exp(2j * np.pi * np.arange(d) / d)
    u = (states.real**2 + states.imag**2) @ omega
    w = np.sum(np.conj(np.roll(states, -1, axis=1)) * states, axis=1)
    return np.abs(u) ** 2 + np.abs(w) ** 2


NUMPY_IMPLS = {
    "char_sweep": _char_sweep_numpy,
    "profile_synthesis": _profile_synthesis_numpy,
    "hermite_modes": _hermite_modes_numpy,
    "comb_teeth": _comb_teeth_numpy,
    "clock_shift_batch": _clock_shift_batch_numpy,
}

_LOOP_IMPLS = {
    "char_sweep": _char_sweep_loops,
    "profile_synthesis": _profile_synthesis_loops,
    "hermite_modes": _hermite_modes_loops,
    "comb_teeth": _comb_teeth_loops,
    "clock_shift_batch": _clock_shift_batch_loops,
}


def jit_impls():
    """Compile and return the numba versions of every kernel.

    Raises ImportError when numba is unavailable.
    """
    from numba import njit

    return {name: njit(cache=True, fastmath=True)(fn) for name, fn in _LOOP_IMPLS.items()}


def _env_disabled() -> bool:
    return os.environ.get("CHUR_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes"}


USING_NUMBA = False
if not _env_disabled():
    try:
        _ACTIVE = jit_impls()
        USING_NUMBA = True
    except ImportError:
        _ACTIVE = NUMPY_IMPLS
else:
    _ACTIVE = NUMPY_IMPLS

char_sweep = _ACTIVE["char_sweep"]
profile_synthesis = _ACTIVE["profile_synthesis"]
hermite_modes = _ACTIVE["hermite_modes"]
comb_teeth = _ACTIVE["comb_teeth"]
clock_shift_batch = _ACTIVE["clock_shift_batch"]
