"""Measurement-oriented applications: the ancilla-qubit readout of the
momentum characteristic function, the finite-dimensional clock-and-shift
variant of the relation, and the cosmological volume-fluctuation bound.

The qubit probabilities are derived from first principles inside the
simulator: the ancilla starts in (|0> + |1>)/sqrt(2), a controlled
translation applies exp(i lambda_p p) on the |1> branch, and the four
outcome probabilities follow from projecting the ancilla onto the x- and
y-eigenbases.  With |+i> = (|0> + i|1>)/sqrt(2) this gives
P_{+-} = (1 +- Re<D>)/2 and P_{+-i} = (1 +- Im<D>)/2, and the estimator
<D> = (P_+ - P_-) + i (P_{+i} - P_{-i}) reproduces the characteristic
function identically.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .charfunc import char_sweep
from .core import bound
from .errors import InvalidShots, NotUnitary, NotUnitVector, ZeroVariance
from .grid import MOMENTUM, POSITION, StateVector, translate, variance


@dataclass(frozen=True)
class QubitReadout:
    """Outcome probabilities of the two ancilla bases and the estimate they
    combine into."""

    lambda_p: float
    p_plus: float
    p_minus: float
    p_plus_i: float
    p_minus_i: float
    reconstructed: complex
    stderr_re: float = 0.0
    stderr_im: float = 0.0
    shots: Optional[int] = None

    @property
    def stderr(self) -> float:
        return float(np.hypot(self.stderr_re, self.stderr_im))

    RECORD_HEADER = "lambda_p,p_plus,p_minus,p_plus_i,p_minus_i,re_est,im_est,stderr"

    def record(self) -> str:
        return (f"{self.lambda_p!r},{self.p_plus!r},{self.p_minus!r},"
                f"{self.p_plus_i!r},{self.p_minus_i!r},"
                f"{self.reconstructed.real!r},{self.reconstructed.imag!r},{self.stderr!r}")


def qubit_exact(state: StateVector, lambda_p: float) -> QubitReadout:
    """Simulate the circuit exactly and reconstruct <exp(i lambda_p p)>."""
    lambda_p = float(lambda_p)
    displaced = translate(state, state.grid.hbar * lambda_p)
    # joint state (|0> psi + |1> D psi)/sqrt(2); project the ancilla on
    # |b> = c0|0> + c1|1> and take the norm of the conditional system vector
    branches = (state.amplitudes, displaced.amplitudes)

    def prob(c0, c1):
        vec = (np.conj(c0) * branches[0] + np.conj(c1) * branches[1]) / np.sqrt(2.0)
        return float(np.sum(np.abs(vec) ** 2) * state.step)

    s = 1.0 / np.sqrt(2.0)
    p_plus = prob(s, s)
    p_minus = prob(s, -s)
    p_plus_i = prob(s, 1j * s)
    p_minus_i = prob(s, -1j * s)
    rec = complex(p_plus - p_minus, p_plus_i - p_minus_i)
    return QubitReadout(lambda_p, p_plus, p_minus, p_plus_i, p_minus_i, rec)


def qubit_sampled(state: StateVector, lambda_p: float, shots: int, seed: int) -> QubitReadout:
    """Finite-statistics readout: binomial sampling of the exact outcome
    probabilities, shots split evenly between the two ancilla bases."""
    if shots < 2:
        raise InvalidShots("need at least one shot per ancilla basis")
    exact = qubit_exact(state, lambda_p)
    n_x = shots // 2
    n_y = shots - n_x
    rng = np.random.default_rng(seed)
    k_plus = int(rng.binomial(n_x, min(1.0, max(0.0, exact.p_plus))))
    k_plus_i = int(rng.binomial(n_y, min(1.0, max(0.0, exact.p_plus_i))))
    p_plus = k_plus / n_x
    p_plus_i = k_plus_i / n_y
    rec = complex(2.0 * p_plus - 1.0, 2.0 * p_plus_i - 1.0)
    se_re = 2.0 * np.sqrt(p_plus * (1.0 - p_plus) / n_x)
    se_im = 2.0 * np.sqrt(p_plus_i * (1.0 - p_plus_i) / n_y)
    return QubitReadout(float(lambda_p), p_plus, 1.0 - p_plus, p_plus_i, 1.0 - p_plus_i,
                        rec, se_re, se_im, shots)


@dataclass(frozen=True)
class WeylPair:
    """Pair of unitaries with U W = exp(i phi) W U."""

    dimension: int
    u_matrix: np.ndarray
    w_matrix: np.ndarray
    phase: float

    UNITARITY_TOL = 1e-12

    def __post_init__(self):
        d = self.dimension
        if d < 2:
            raise ValueError("dimension must be at least 2")
        for name, m in (("u_matrix", self.u_matrix), ("w_matrix", self.w_matrix)):
            m = np.asarray(m, dtype=np.complex128)
            if m.shape != (d, d):
                raise ValueError(f"{name} must be {d}x{d}")
            if np.max(np.abs(m.conj().T @ m - np.eye(d))) > self.UNITARITY_TOL:
                raise NotUnitary(f"{name} is not unitary")
            m.flags.writeable = False
            object.__setattr__(self, name, m)

    @classmethod
    def clock_and_shift(cls, dimension: int) -> "WeylPair":
        """Diagonal clock and cyclic shift with phase 2*pi/d."""
        d = int(dimension)
        omega = np.exp(2j * np.pi * np.arange(d) / d)
        u = np.diag(omega)
        w = np.zeros((d, d), dtype=np.complex128)
        w[(np.arange(d) + 1) % d, np.arange(d)] = 1.0
        return cls(d, u, w, 2.0 * np.pi / d)

    @property
    def is_clock_and_shift(self) -> bool:
        ref = WeylPair.clock_and_shift(self.dimension)
        return (np.array_equal(self.u_matrix, ref.u_matrix)
                and np.array_equal(self.w_matrix, ref.w_matrix))

    def commutation_defect(self) -> float:
        """Max-norm of U W - exp(i phi) W U."""
        uw = self.u_matrix @ self.w_matrix
        wu = self.w_matrix @ self.u_matrix
        return float(np.max(np.abs(uw - np.exp(1j * self.phase) * wu)))


@dataclass(frozen=True)
class FiniteDimResult:
    dimension: int
    phase: float
    lhs: float
    bound: float
    holds: bool


def _check_unit_vector(vec, d):
    v = np.asarray(vec, dtype=np.complex128).ravel()
    if v.size != d:
        raise ValueError(f"state must have {d} entries")
    if abs(np.sum(np.abs(v) ** 2) - 1.0) > 1e-9:
        raise NotUnitVector("state vector is not normalized")
    return v


def finite_dim_chur(pair: WeylPair, state) -> FiniteDimResult:
    """|<U>|^2 + |<W>|^2 against the bound at the pair's phase."""
    v = _check_unit_vector(state, pair.dimension)
    u_val = np.vdot(v, pair.u_matrix @ v)
    w_val = np.vdot(v, pair.w_matrix @ v)
    lhs = float(abs(u_val) ** 2 + abs(w_val) ** 2)
    b = bound(pair.phase)
    return FiniteDimResult(pair.dimension, pair.phase, lhs, b, lhs <= b + 1e-12)


def random_unit_vectors(dimension: int, n_states: int, seed: int) -> np.ndarray:
    """Haar-like ensemble: normalized complex Gaussian rows."""
    rng = np.random.default_rng(seed)
    v = rng.standard_normal((n_states, dimension)) + 1j * rng.standard_normal((n_states, dimension))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def finite_dim_sweep(pair: WeylPair, n_states: int, seed: int) -> np.ndarray:
    """lhs values of :func:`finite_dim_chur` over a seeded random ensemble."""
    states = random_unit_vectors(pair.dimension, n_states, seed)
    if pair.is_clock_and_shift:
        return _kernels.clock_shift_batch(states)
    u_val = np.einsum("ni,ij,nj->n", np.conj(states), pair.u_matrix, states)
    w_val = np.einsum("ni,ij,nj->n", np.conj(states), pair.w_matrix, states)
    return np.abs(u_val) ** 2 + np.abs(w_val) ** 2


@dataclass(frozen=True)
class LqcScenario:
    """Volume-representation toy state with conjugate holonomy parameter.

    The conjugation constant between the volume and its conjugate variable
    is hbar * q_constant; the state's grid must carry exactly that value as
    its ``hbar`` so the conjugate transform realizes the holonomy average.
    """

    q_constant: float
    lambda_b: float
    state_v: StateVector
    hbar: float = 1.0

    def __post_init__(self):
        if self.q_constant <= 0 or self.lambda_b <= 0 or self.hbar <= 0:
            raise ValueError("q_constant, lambda_b and hbar must be positive")
        expected = self.hbar * self.q_constant
        if abs(self.state_v.grid.hbar - expected) > 1e-12 * expected:
            raise ValueError(
                f"state grid must use hbar={expected!r} as its conjugation constant"
            )

    @property
    def conjugation_constant(self) -> float:
        return self.hbar * self.q_constant

    @property
    def lambda_v(self) -> float:
        """Volume-side argument that pins the bound at its minimum."""
        return np.pi / (self.conjugation_constant * self.lambda_b)


@dataclass(frozen=True)
class LqcResult:
    sigma_v: float
    rhs: float
    holds: bool
    lambda_v: float
    abs_holonomy: float
    abs_phi_v: float
    intermediate_holds: bool
    bound_at_pi: float


def lqc_bound_check(scenario: LqcScenario, tol: float = 1e-9) -> LqcResult:
    """Volume-fluctuation bound sigma_V >= (hbar Q / pi) lambda_b |<U_b>|.

    Also replays the derivation step |<U_b>|^2 <= 1 - |Phi_V(lambda_V)|^2
    at the angle where the two-term bound equals one.
    """
    st = scenario.state_v
    var_v = variance(st, POSITION)
    if var_v < 1e-24:
        raise ZeroVariance("volume state has (numerically) zero spread")
    sigma_v = float(np.sqrt(var_v))
    abs_ub = float(np.abs(char_sweep(st, [scenario.lambda_b], MOMENTUM)[0]))
    abs_phi_v = float(np.abs(char_sweep(st, [scenario.lambda_v], POSITION)[0]))
    rhs = (scenario.conjugation_constant / np.pi) * scenario.lambda_b * abs_ub
    intermediate = abs_ub**2 <= 1.0 - abs_phi_v**2 + tol
    return LqcResult(sigma_v, float(rhs), bool(sigma_v >= rhs - tol),
                     float(scenario.lambda_v), abs_ub, abs_phi_v,
                     bool(intermediate), bound(np.pi))
