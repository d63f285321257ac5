"""Uniform spatial grids, pure states, and the unitary transforms between
position and momentum representations.

Conventions.  A grid of ``n_points`` samples covers ``length`` units of
position centred on ``center``; the conjugate momentum samples are spaced
``dp = 2*pi*hbar/length`` and re-centred symmetrically around zero, so that
``dx * dp * n_points == 2*pi*hbar`` to machine rounding.  The forward
transform realised by :func:`to_momentum` is the Riemann-sum approximation
of the continuum unitary transform

    psi_tilde(p) = (2*pi*hbar)**-0.5 * integral dx exp(-i p x / hbar) psi(x),

which is spectrally accurate for states confined well inside the window.
Fractional translations are carried out by a phase ramp in the conjugate
domain, i.e. they act on the band-limited periodic interpolant and are
exactly unitary.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import ShiftTooLarge

NORM_TOL = 1e-12

POSITION = "position"
MOMENTUM = "momentum"


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid shared by a family of states."""

    n_points: int
    length: float
    hbar: float = 1.0
    center: float = 0.0

    def __post_init__(self):
        if self.n_points < 2:
            raise ValueError("n_points must be at least 2")
        if self.length <= 0:
            raise ValueError("length must be positive")
        if self.hbar <= 0:
            raise ValueError("hbar must be positive")

    @property
    def dx(self) -> float:
        return self.length / self.n_points

    @property
    def dp(self) -> float:
        return 2.0 * np.pi * self.hbar / self.length

    @cached_property
    def x(self) -> np.ndarray:
        """Position samples, ascending."""
        j = np.arange(self.n_points)
        out = self.center - self.length / 2.0 + j * self.dx
        out.flags.writeable = False
        return out

    @cached_property
    def p(self) -> np.ndarray:
        """Momentum samples, ascending and symmetric around zero."""
        k = np.arange(self.n_points) - self.n_points // 2
        out = k * self.dp
        out.flags.writeable = False
        return out

    @property
    def momentum_span(self) -> float:
        return self.n_points * self.dp

    def step(self, representation: str) -> float:
        return self.dx if representation == POSITION else self.dp

    def samples(self, representation: str) -> np.ndarray:
        return self.x if representation == POSITION else self.p

    def span(self, representation: str) -> float:
        return self.length if representation == POSITION else self.momentum_span


def _as_complex(amplitudes) -> np.ndarray:
    out = np.asarray(amplitudes, dtype=np.complex128).copy()
    if out.ndim != 1:
        raise ValueError("amplitudes must be one-dimensional")
    return out


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized amplitudes sampled on a grid, in either representation."""

    grid: GridSpec
    amplitudes: np.ndarray
    representation: str = POSITION

    def __post_init__(self):
        if self.representation not in (POSITION, MOMENTUM):
            raise ValueError(f"unknown representation {self.representation!r}")
        if len(self.amplitudes) != self.grid.n_points:
            raise ValueError("amplitude count does not match grid")

    @classmethod
    def from_amplitudes(cls, grid: GridSpec, amplitudes, representation: str = POSITION,
                        normalize: bool = True) -> "StateVector":
        amps = _as_complex(amplitudes)
        if normalize:
            nrm = np.sqrt(np.sum(np.abs(amps) ** 2) * grid.step(representation))
            if nrm == 0:
                raise ValueError("cannot normalize the zero vector")
            amps = amps / nrm
        amps.flags.writeable = False
        return cls(grid, amps, representation)

    @property
    def samples(self) -> np.ndarray:
        """Coordinate values the amplitudes are sampled at."""
        return self.grid.samples(self.representation)

    @property
    def step(self) -> float:
        return self.grid.step(self.representation)

    @property
    def span(self) -> float:
        return self.grid.span(self.representation)

    def density(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm_squared(self) -> float:
        return float(np.sum(self.density()) * self.step)

    def is_confined(self, rel_tol: float = 1e-12) -> bool:
        """Amplitude on the outermost 1% of samples below rel_tol of the peak."""
        edge = max(1, self.grid.n_points // 100)
        mags = np.abs(self.amplitudes)
        border = max(mags[:edge].max(), mags[-edge:].max())
        return bool(border < rel_tol * mags.max())


@dataclass(frozen=True)
class MixedState:
    """Convex mixture of pure states on a shared grid."""

    components: tuple = field(default_factory=tuple)

    def __post_init__(self):
        comps = tuple((float(w), s) for w, s in self.components)
        object.__setattr__(self, "components", comps)
        if not comps:
            raise ValueError("mixture needs at least one component")
        total = sum(w for w, _ in comps)
        if abs(total - 1.0) > NORM_TOL:
            raise ValueError(f"weights sum to {total!r}, expected 1")
        if any(w <= 0 for w, _ in comps):
            raise ValueError("weights must lie in (0, 1]")
        g0 = comps[0][1].grid
        if any(s.grid != g0 for _, s in comps):
            raise ValueError("all components must share one grid")
        if any(s.representation != POSITION for _, s in comps):
            raise ValueError("mixture components must be position-representation states")

    @property
    def grid(self) -> GridSpec:
        return self.components[0][1].grid

    def density(self, representation: str = POSITION) -> np.ndarray:
        out = np.zeros(self.grid.n_points)
        for w, s in self.components:
            sv = s if representation == POSITION else to_momentum(s)
            out += w * sv.density()
        return out


def to_momentum(state: StateVector) -> StateVector:
    """Unitary map from position to momentum representation."""
    if state.representation != POSITION:
        raise ValueError("state is already in the momentum representation")
    g = state.grid
    x0 = g.x[0]
    f = np.fft.fftshift(np.fft.fft(state.amplitudes))
    amps = (g.dx / np.sqrt(2.0 * np.pi * g.hbar)) * np.exp(-1j * g.p * x0 / g.hbar) * f
    amps.flags.writeable = False
    return StateVector(g, amps, MOMENTUM)


def to_position(state: StateVector) -> StateVector:
    """Inverse of :func:`to_momentum`."""
    if state.representation != MOMENTUM:
        raise ValueError("state is already in the position representation")
    g = state.grid
    x0 = g.x[0]
    f = np.fft.ifftshift(state.amplitudes * np.exp(1j * g.p * x0 / g.hbar))
    amps = np.fft.ifft(f) * (np.sqrt(2.0 * np.pi * g.hbar) / g.dx)
    amps.flags.writeable = False
    return StateVector(g, amps, POSITION)


def translate(state: StateVector, shift: float) -> StateVector:
    """Band-limited interpolant of ``psi(. + shift)`` in the state's own variable.

    Implemented as a phase ramp on the conjugate-domain coefficients, hence
    exactly unitary.  Confinement of the input is the caller's
    responsibility; wrap-around beyond a quarter window is rejected.
    """
    shift = float(shift)
    if abs(shift) >= state.span / 4.0:
        raise ShiftTooLarge(
            f"|shift|={abs(shift)!r} exceeds a quarter of the window {state.span!r}"
        )
    if shift == 0.0:
        return state
    freqs = np.fft.fftfreq(state.grid.n_points, d=state.step)
    amps = np.fft.ifft(np.fft.fft(state.amplitudes) * np.exp(2j * np.pi * freqs * shift))
    amps.flags.writeable = False
    return StateVector(state.grid, amps, state.representation)


def _density_on(state, representation: str):
    """(samples, density, step) for a pure or mixed state in a representation."""
    if isinstance(state, MixedState):
        g = state.grid
        return g.samples(representation), state.density(representation), g.step(representation)
    if state.representation == representation:
        sv = state
    elif representation == MOMENTUM:
        sv = to_momentum(state)
    else:
        sv = to_position(state)
    return sv.samples, sv.density(), sv.step


def mean(state, representation: str = POSITION) -> float:
    s, rho, step = _density_on(state, representation)
    return float(np.sum(s * rho) * step)


def variance(state, representation: str = POSITION) -> float:
    """Second central moment of the position (or momentum) density."""
    s, rho, step = _density_on(state, representation)
    mass = np.sum(rho) * step
    mu = np.sum(s * rho) * step / mass
    return float(np.sum((s - mu) ** 2 * rho) * step / mass)


def overlap(a: StateVector, b: StateVector) -> complex:
    """Quadrature inner product <a|b> of two states in one representation."""
    if a.grid != b.grid or a.representation != b.representation:
        raise ValueError("states must share grid and representation")
    return complex(np.sum(np.conj(a.amplitudes) * b.amplitudes) * a.step)


def save_state(path, state: StateVector) -> None:
    """Write amplitudes as two-column text with a geometry header line."""
    g = state.grid
    with open(path, "w") as fh:
        fh.write(f"{g.n_points} {g.length!r} {g.hbar!r} {g.center!r}\n")
        for a in state.amplitudes:
            fh.write(f"{float(a.real)!r} {float(a.imag)!r}\n")


def load_state(path) -> StateVector:
    """Read a state written by :func:`save_state`; exact round-trip."""
    with open(path) as fh:
        head = fh.readline().split()
        if len(head) != 4:
            raise ValueError("malformed state header")
        n = int(head[0])
        grid = GridSpec(n, float(head[1]), float(head[2]), float(head[3]))
        rows = [line.split() for line in fh if line.strip()]
    if len(rows) != n:
        raise ValueError(f"expected {n} amplitude rows, found {len(rows)}")
    amps = np.array([complex(float(r), float(i)) for r, i in rows])
    return StateVector.from_amplitudes(grid, amps, normalize=False)
