import numpy as np
import pytest

from chur.charfunc import char_momentum, char_position, char_sweep
from chur.core import bound
from chur.errors import InvalidShots, NotUnitary, NotUnitVector, ZeroVariance
from chur.grid import GridSpec, StateVector
from chur.protocols import (LqcScenario, WeylPair, finite_dim_chur,
                            finite_dim_sweep, lqc_bound_check, qubit_exact,
                            qubit_sampled, random_unit_vectors)
from chur.states import GaussianSpec, RandomStateSpec, make_gaussian, make_random


# --- qubit readout -----------------------------------------------------------

def test_qubit_identity_gate(ground):
    r = qubit_exact(ground, 0.0)
    assert r.p_plus == pytest.approx(1.0, abs=1e-12)
    assert r.p_minus == pytest.approx(0.0, abs=1e-12)
    assert r.p_plus_i == pytest.approx(0.5, abs=1e-12)
    assert r.p_minus_i == pytest.approx(0.5, abs=1e-12)
    assert r.reconstructed == pytest.approx(1.0, abs=1e-12)


def test_qubit_probabilities_sum_to_one(random_states):
    for st in random_states[:3]:
        for lp in (-3.0, 0.7, 4.2):
            r = qubit_exact(st, lp)
            assert abs(r.p_plus + r.p_minus - 1.0) <= 1e-12
            assert abs(r.p_plus_i + r.p_minus_i - 1.0) <= 1e-12


def test_qubit_gaussian_modulus(ground):
    r = qubit_exact(ground, 1.0)
    assert abs(r.reconstructed) == pytest.approx(np.exp(-1.0 / 8.0), abs=1e-9)


def test_qubit_reconstructs_char_momentum(ground, random_states):
    for st in (ground, *random_states[:3]):
        for lp in np.linspace(-5.0, 5.0, 21):
            r = qubit_exact(st, lp)
            assert abs(r.reconstructed - char_momentum(st, lp)) <= 1e-10
            assert abs(r.p_plus - 0.5 * (1.0 + r.reconstructed.real)) <= 1e-12


def test_qubit_narrow_packet_phase():
    grid = GridSpec(16384, 1600.0)
    st = make_gaussian(GaussianSpec(50.0, center_p=0.9), grid)
    r = qubit_exact(st, 1.0)
    assert abs(np.angle(r.reconstructed) - 0.9) <= 1e-3


def test_qubit_sampled_consistency(ground):
    shots = 10**6
    for seed in (1, 2, 3):
        for lp in np.linspace(-5.0, 5.0, 11):
            exact = qubit_exact(ground, lp)
            sampled = qubit_sampled(ground, lp, shots, seed=seed)
            assert abs(sampled.reconstructed - exact.reconstructed) <= 5.0 / np.sqrt(shots)
            assert sampled.stderr <= 3.0 / np.sqrt(shots)


def test_qubit_sampled_deterministic(ground):
    a = qubit_sampled(ground, 1.3, 10000, seed=7)
    b = qubit_sampled(ground, 1.3, 10000, seed=7)
    assert a == b


def test_qubit_sampled_rejects_degenerate_shots(ground):
    with pytest.raises(InvalidShots):
        qubit_sampled(ground, 1.0, 0, seed=0)
    with pytest.raises(InvalidShots):
        qubit_sampled(ground, 1.0, 1, seed=0)


def test_qubit_record_layout(ground):
    r = qubit_sampled(ground, 0.5, 1000, seed=1)
    fields = r.record().split(",")
    assert len(fields) == 8
    assert float(fields[0]) == 0.5
    assert float(fields[7]) == pytest.approx(r.stderr)


# --- finite-dimensional pairs -------------------------------------------------

@pytest.mark.parametrize("d", [2, 3, 4, 8, 16, 64])
def test_clock_and_shift_commutation(d):
    pair = WeylPair.clock_and_shift(d)
    assert pair.phase == pytest.approx(2.0 * np.pi / d)
    assert pair.commutation_defect() <= 1e-12


def test_finite_dim_basis_state_saturates_qubit_case():
    pair = WeylPair.clock_and_shift(2)
    res = finite_dim_chur(pair, np.array([1.0, 0.0]))
    assert res.bound == 1.0
    assert res.lhs == pytest.approx(1.0, abs=1e-14)
    assert res.holds


def test_finite_dim_bound_for_d64():
    pair = WeylPair.clock_and_shift(64)
    assert bound(pair.phase) == pytest.approx(2.0 / (1.0 + np.sin(np.pi / 64.0)), abs=1e-14)


def test_finite_dim_sweep_never_violates():
    for d in (2, 3, 8):
        pair = WeylPair.clock_and_shift(d)
        vals = finite_dim_sweep(pair, 20000, seed=0)
        assert float(vals.max()) <= bound(pair.phase) + 1e-12


def test_finite_dim_fast_path_matches_general():
    pair = WeylPair.clock_and_shift(16)
    fast = finite_dim_sweep(pair, 200, seed=5)
    states = random_unit_vectors(16, 200, seed=5)
    u = np.einsum("ni,ij,nj->n", np.conj(states), pair.u_matrix, states)
    w = np.einsum("ni,ij,nj->n", np.conj(states), pair.w_matrix, states)
    np.testing.assert_allclose(fast, np.abs(u) ** 2 + np.abs(w) ** 2, atol=1e-12)


def test_finite_dim_rejects_bad_inputs():
    pair = WeylPair.clock_and_shift(3)
    with pytest.raises(NotUnitVector):
        finite_dim_chur(pair, np.array([1.0, 1.0, 0.0]))
    with pytest.raises(NotUnitary):
        WeylPair(2, np.array([[1.0, 0.0], [0.0, 2.0]]), np.eye(2), np.pi)


# --- cosmological volume bound -------------------------------------------------

def _volume_grid():
    return GridSpec(4096, 40.0, hbar=1.0)  # hbar * Q = 1


def test_lqc_gaussian_oracles():
    grid = _volume_grid()
    st = make_gaussian(GaussianSpec(1.0), grid)
    sc = LqcScenario(q_constant=1.0, lambda_b=1.0, state_v=st)
    res = lqc_bound_check(sc)
    # conjugate spread 1/2: |<U_b>| = exp(-lambda_b^2/8)
    assert res.abs_holonomy == pytest.approx(np.exp(-1.0 / 8.0), abs=1e-10)
    assert res.abs_phi_v == pytest.approx(abs(char_position(st, res.lambda_v)), abs=1e-12)
    assert res.sigma_v == pytest.approx(1.0, abs=1e-10)
    assert res.rhs == pytest.approx(np.exp(-1.0 / 8.0) / np.pi, abs=1e-10)
    assert res.holds and res.intermediate_holds
    assert res.bound_at_pi == 1.0


@pytest.mark.parametrize("lambda_b", [1e-6, 0.1, 1.0, 10.0])
def test_lqc_holds_for_gaussian_and_random(lambda_b):
    grid = _volume_grid()
    states = [make_gaussian(GaussianSpec(1.0), grid)]
    states += [make_random(RandomStateSpec(seed=s), grid) for s in range(5)]
    for st in states:
        res = lqc_bound_check(LqcScenario(q_constant=1.0, lambda_b=lambda_b, state_v=st))
        assert res.holds
        assert res.intermediate_holds


def test_lqc_scaled_conjugation_constant():
    # hbar * Q = 2 changes the grid constant and the prefactor
    grid = GridSpec(4096, 40.0, hbar=2.0)
    st = make_gaussian(GaussianSpec(1.0), grid)
    sc = LqcScenario(q_constant=2.0, lambda_b=0.5, state_v=st)
    assert sc.lambda_v == pytest.approx(np.pi / (2.0 * 0.5))
    res = lqc_bound_check(sc)
    assert res.holds and res.intermediate_holds


def test_lqc_grid_constant_must_match():
    grid = GridSpec(4096, 40.0, hbar=1.0)
    st = make_gaussian(GaussianSpec(1.0), grid)
    with pytest.raises(ValueError):
        LqcScenario(q_constant=3.0, lambda_b=1.0, state_v=st)


def test_lqc_zero_variance_rejected():
    grid = _volume_grid()
    amps = np.zeros(grid.n_points)
    amps[10] = 1.0
    point = StateVector.from_amplitudes(grid, amps)
    with pytest.raises(ZeroVariance):
        lqc_bound_check(LqcScenario(q_constant=1.0, lambda_b=1.0, state_v=point))
