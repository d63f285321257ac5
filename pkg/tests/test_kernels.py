"""The jitted kernels and the numpy fallbacks must compute the same thing."""

import subprocess
import sys

import numpy as np
import pytest

from chur import _kernels

RNG = np.random.default_rng(1234)


@pytest.fixture(scope="module")
def impl_pairs():
    try:
        jitted = _kernels.jit_impls()
    except ImportError:
        pytest.skip("numba unavailable")
    return {name: (jitted[name], _kernels.NUMPY_IMPLS[name]) for name in jitted}


def test_char_sweep_paths_agree(impl_pairs):
    jit, ref = impl_pairs["char_sweep"]
    samples = np.linspace(-20.0, 20.0, 2048)
    weights = RNG.random(2048)
    lams = np.linspace(0.0, 6.0, 33)
    np.testing.assert_allclose(jit(samples, weights, lams),
                               ref(samples, weights, lams), atol=1e-11)


def test_profile_synthesis_paths_agree(impl_pairs):
    jit, ref = impl_pairs["profile_synthesis"]
    lams = np.linspace(-8.0, 8.0, 257)
    gvals = RNG.standard_normal(257) + 1j * RNG.standard_normal(257)
    ys = np.linspace(-5.0, 5.0, 64)
    np.testing.assert_allclose(jit(lams, gvals, ys, 0.125),
                               ref(lams, gvals, ys, 0.125), atol=1e-11)


def test_hermite_modes_paths_agree(impl_pairs):
    jit, ref = impl_pairs["hermite_modes"]
    u = np.linspace(-10.0, 10.0, 512)
    np.testing.assert_allclose(jit(u, 48), ref(u, 48), atol=1e-12, rtol=1e-12)


def test_comb_teeth_paths_agree(impl_pairs):
    jit, ref = impl_pairs["comb_teeth"]
    xs = np.linspace(-30.0, 30.0, 4096)
    np.testing.assert_allclose(jit(xs, 1.5, 0.05, 8.0, 12),
                               ref(xs, 1.5, 0.05, 8.0, 12), atol=1e-14)


def test_clock_shift_paths_agree(impl_pairs):
    jit, ref = impl_pairs["clock_shift_batch"]
    states = RNG.standard_normal((500, 16)) + 1j * RNG.standard_normal((500, 16))
    states /= np.linalg.norm(states, axis=1, keepdims=True)
    np.testing.assert_allclose(jit(states), ref(states), atol=1e-12)


def test_env_flag_forces_numpy_path():
    code = ("import chur._kernels as k; "
            "print(k.USING_NUMBA, k.char_sweep is k.NUMPY_IMPLS['char_sweep'])")
    out = subprocess.run([sys.executable, "-c", code],
                         env={"PATH": "/usr/bin:/bin", "CHUR_DISABLE_NUMBA": "1"},
                         capture_output=True, text=True)
    assert out.returncode == 0, out.stderr
    assert out.stdout.split() == ["False", "True"]
