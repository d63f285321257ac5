"""Constructors for the special state families used throughout the tests
and the command-line sweeps: minimum-uncertainty Gaussians, periodic
Gaussian combs, and reproducible random superpositions of Hermite-Gauss
modes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import GridTooSmall, TeethUnresolved
from .grid import GridSpec, StateVector

MAX_RANDOM_MODES = 128


@dataclass(frozen=True)
class GaussianSpec:
    """Gaussian wave packet with position std sigma_x, optionally displaced
    in position and boosted in momentum."""

    sigma_x: float
    center_x: float = 0.0
    center_p: float = 0.0

    def __post_init__(self):
        if self.sigma_x <= 0:
            raise ValueError("sigma_x must be positive")


@dataclass(frozen=True)
class CombSpec:
    """Train of narrow Gaussian teeth under a broad Gaussian envelope.

    Amplitude of tooth k is exp(-(k*period)^2 / (2*envelope_sigma^2)); the
    tooth profile is a Gaussian of width tooth_sigma.
    """

    period: float
    tooth_sigma: float
    half_teeth: int
    envelope_sigma: float

    def __post_init__(self):
        if min(self.period, self.tooth_sigma, self.envelope_sigma) <= 0:
            raise ValueError("comb lengths must be positive")
        if self.half_teeth < 0:
            raise ValueError("half_teeth must be non-negative")


@dataclass(frozen=True)
class RandomStateSpec:
    """Seeded superposition of the lowest Hermite-Gauss modes."""

    seed: int
    n_modes: int = 32
    mode_scale: float = 1.0

    def __post_init__(self):
        if not 1 <= self.n_modes <= MAX_RANDOM_MODES:
            raise ValueError(f"n_modes must lie in 1..{MAX_RANDOM_MODES}")
        if self.mode_scale <= 0:
            raise ValueError("mode_scale must be positive")


def make_gaussian(spec: GaussianSpec, grid: GridSpec) -> StateVector:
    """Normalized Gaussian packet; sigma_x * sigma_p = hbar/2 by construction."""
    if 8.0 * spec.sigma_x + abs(spec.center_x - grid.center) >= grid.length / 2.0:
        raise GridTooSmall("Gaussian does not fit the grid window")
    x = grid.x
    amps = np.exp(-((x - spec.center_x) ** 2) / (4.0 * spec.sigma_x**2))
    if spec.center_p != 0.0:
        amps = amps * np.exp(1j * spec.center_p * x / grid.hbar)
    return StateVector.from_amplitudes(grid, amps)


def make_comb(spec: CombSpec, grid: GridSpec) -> StateVector:
    """Normalized Gaussian-tooth comb centred on the grid center."""
    reach = (2 * spec.half_teeth + 1) * spec.period + 8.0 * spec.envelope_sigma
    if reach >= grid.length:
        raise GridTooSmall(
            f"comb span {reach!r} does not fit grid length {grid.length!r}"
        )
    if spec.tooth_sigma <= 2.0 * grid.dx:
        raise TeethUnresolved(
            f"tooth_sigma {spec.tooth_sigma!r} must exceed twice the step {grid.dx!r}"
        )
    amps = _kernels.comb_teeth(grid.x - grid.center, spec.period, spec.tooth_sigma,
                               spec.envelope_sigma, spec.half_teeth)
    return StateVector.from_amplitudes(grid, amps)


def hermite_modes(grid: GridSpec, n_modes: int, scale: float = 1.0) -> np.ndarray:
    """First n_modes orthonormal Hermite-Gauss functions sampled on the grid.

    Row n integrates to one under the grid quadrature (up to spectral
    accuracy) with characteristic length ``scale``.
    """
    u = (grid.x - grid.center) / scale
    return _kernels.hermite_modes(u, n_modes) / np.sqrt(scale)


def make_random(spec: RandomStateSpec, grid: GridSpec) -> StateVector:
    """Random smooth confined state, bit-reproducible for a fixed seed."""
    rng = np.random.default_rng(spec.seed)
    coeff = rng.standard_normal(spec.n_modes) + 1j * rng.standard_normal(spec.n_modes)
    modes = hermite_modes(grid, spec.n_modes, spec.mode_scale)
    return StateVector.from_amplitudes(grid, coeff @ modes)
