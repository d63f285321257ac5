"""Characteristic functions of the position and momentum densities, the
momentum-autocorrelation cross-check, and the displacement expectation.

``char_position(state, lam)`` is the quadrature of ``exp(i lam x)`` against
the position density; ``char_momentum`` the same against the momentum
density.  Negative arguments are evaluated by conjugation so the Hermitian
symmetry ``F(-lam) == conj(F(lam))`` holds exactly, not merely to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels
from .grid import (
    MOMENTUM,
    POSITION,
    MixedState,
    StateVector,
    _density_on,
    to_momentum,
    translate,
    variance,
)


@dataclass(frozen=True)
class CharFunctionSample:
    """One evaluation point of a characteristic function."""

    lam: float
    value: complex


@dataclass(frozen=True)
class DisplacementExpectation:
    """Expectation of the ordered displacement pair at one (lambda_x, lambda_p)."""

    lambda_x: float
    lambda_p: float
    omega: complex


def _char_weights(state, representation):
    samples, rho, step = _density_on(state, representation)
    return samples, rho * step


def char_sweep(state, lams, representation: str = POSITION) -> np.ndarray:
    """Characteristic function on an array of arguments."""
    lams = np.atleast_1d(np.asarray(lams, dtype=np.float64))
    samples, weights = _char_weights(state, representation)
    out = _kernels.char_sweep(samples, weights, np.abs(lams))
    neg = lams < 0
    out[neg] = np.conj(out[neg])
    return out


def char_position(state, lambda_x: float) -> complex:
    """Mean of exp(i lambda_x x) over the position density."""
    return complex(char_sweep(state, [lambda_x], POSITION)[0])


def char_momentum(state, lambda_p: float) -> complex:
    """Mean of exp(i lambda_p p) over the momentum density."""
    return complex(char_sweep(state, [lambda_p], MOMENTUM)[0])


def char_momentum_autocorr(state: StateVector, lambda_x: float) -> complex:
    """Position characteristic function evaluated as the autocorrelation of
    the momentum wave function, integral of conj(psit(p)) psit(p - hbar lam).

    Must agree with :func:`char_position` to spectral accuracy; the shifted
    copy is produced by :func:`chur.grid.translate` in the momentum
    representation.
    """
    if not isinstance(state, StateVector):
        raise TypeError("autocorrelation form is defined for pure states")
    psit = state if state.representation == MOMENTUM else to_momentum(state)
    shifted = translate(psit, -state.grid.hbar * float(lambda_x))
    return complex(np.sum(np.conj(psit.amplitudes) * shifted.amplitudes) * psit.step)


def displacement_expectation(state: StateVector, lambda_x: float, lambda_p: float) -> complex:
    """<exp(-i lambda_x x) exp(i lambda_p p)> for a pure state.

    The momentum factor acts first, translating the wave function by
    ``hbar * lambda_p``.
    """
    if not isinstance(state, StateVector):
        raise TypeError("displacement expectation is defined for pure states")
    if state.representation != POSITION:
        raise ValueError("state must be in the position representation")
    g = state.grid
    shifted = translate(state, g.hbar * float(lambda_p))
    phase = np.exp(-1j * float(lambda_x) * g.x)
    return complex(np.sum(np.conj(state.amplitudes) * phase * shifted.amplitudes) * g.dx)


class LowerBoundCheck(NamedTuple):
    re_phi: float
    bound: float
    holds: bool


def lower_bound_check(state, lam: float, representation: str = POSITION,
                      tol: float = 1e-10) -> LowerBoundCheck:
    """Variance lower bound Re F(lam) >= 1 - lam^2 sigma^2 / 2."""
    lam = float(lam)
    value = char_sweep(state, [lam], representation)[0]
    sigma2 = variance(state, representation)
    lo = 1.0 - 0.5 * lam * lam * sigma2
    return LowerBoundCheck(float(value.real), lo, bool(value.real >= lo - tol))


def write_sweep(path, lams, values) -> None:
    """Serialize a sweep as ``lambda, re, im, abs`` comma-separated rows."""
    lams = np.asarray(lams, dtype=float)
    values = np.asarray(values, dtype=complex)
    with open(path, "w") as fh:
        fh.write("lambda,re,im,abs\n")
        for lam, v in zip(lams, values):
            fh.write(f"{float(lam)!r},{float(v.real)!r},{float(v.imag)!r},{float(abs(v))!r}\n")
