import numpy as np
import pytest

from chur.errors import ShiftTooLarge
from chur.grid import (GridSpec, MixedState, StateVector, load_state, mean,
                       save_state, to_momentum, to_position, translate,
                       variance)
from chur.states import GaussianSpec, RandomStateSpec, make_gaussian, make_random


def test_grid_sampling_invariants(grid):
    assert grid.dx == grid.length / grid.n_points
    assert grid.dp == 2.0 * np.pi * grid.hbar / grid.length
    assert abs(grid.dx * grid.dp * grid.n_points - 2.0 * np.pi * grid.hbar) < 1e-12
    assert grid.x[0] == pytest.approx(grid.center - grid.length / 2.0)
    np.testing.assert_allclose(np.diff(grid.x), grid.dx, rtol=1e-12)
    # momentum grid symmetric around zero (half-open, even count)
    assert grid.p[grid.n_points // 2] == 0.0
    np.testing.assert_allclose(np.diff(grid.p), grid.dp, rtol=1e-12)


def test_grid_validation():
    with pytest.raises(ValueError):
        GridSpec(1, 10.0)
    with pytest.raises(ValueError):
        GridSpec(16, -1.0)
    with pytest.raises(ValueError):
        GridSpec(16, 10.0, hbar=0.0)


def test_gaussian_transform_matches_analytic(grid, ground):
    # sigma_x = 1, hbar = 1: psi_tilde(p) = (2/pi)^(1/4) exp(-p^2)
    mt = to_momentum(ground)
    expected = (2.0 / np.pi) ** 0.25 * np.exp(-mt.samples**2)
    np.testing.assert_allclose(mt.amplitudes, expected, atol=1e-13)


def test_momentum_rep_real_symmetric_for_centered_gaussian(ground):
    mt = to_momentum(ground)
    assert np.max(np.abs(mt.amplitudes.imag)) <= 1e-12
    assert np.min(mt.amplitudes.real) > -1e-12


def test_round_trip_unitary(random_states):
    for st in random_states:
        back = to_position(to_momentum(st))
        assert np.max(np.abs(back.amplitudes - st.amplitudes)) <= 1e-12


def test_parseval_for_constructed_states(grid, random_states, ground):
    for st in (*random_states, ground):
        assert abs(st.norm_squared() - 1.0) <= 1e-12
        assert abs(to_momentum(st).norm_squared() - 1.0) <= 1e-12


@pytest.mark.parametrize("sigma,expect_x,expect_p", [(1.0, 1.0, 0.25), (0.5, 0.25, 1.0)])
def test_gaussian_variances(grid, sigma, expect_x, expect_p):
    st = make_gaussian(GaussianSpec(sigma), grid)
    assert variance(st, "position") == pytest.approx(expect_x, abs=1e-10)
    assert variance(st, "momentum") == pytest.approx(expect_p, abs=1e-10)


def test_translate_zero_is_identity(ground):
    assert translate(ground, 0.0) is ground


def test_translate_one_step_is_circular_shift(ground):
    out = translate(ground, ground.grid.dx)
    np.testing.assert_allclose(out.amplitudes, np.roll(ground.amplitudes, -1), atol=1e-12)


def test_translate_moves_gaussian_mean(grid):
    st = make_gaussian(GaussianSpec(1.0), grid)
    shifted = translate(st, 1.75)
    # psi(x + s) is centred at -s
    assert mean(shifted, "position") == pytest.approx(-1.75, abs=1e-10)
    assert variance(shifted, "position") == pytest.approx(1.0, abs=1e-10)


def test_translate_composition(random_states):
    st = random_states[0]
    once = translate(translate(st, 1.2), -0.5)
    direct = translate(st, 0.7)
    assert np.max(np.abs(once.amplitudes - direct.amplitudes)) <= 1e-11


def test_translate_unitary(random_states):
    for st in random_states[:3]:
        out = translate(st, 2.4)
        assert abs(out.norm_squared() - 1.0) <= 1e-12


def test_translate_rejects_wraparound(ground):
    with pytest.raises(ShiftTooLarge):
        translate(ground, ground.grid.length / 4.0)
    with pytest.raises(ShiftTooLarge):
        translate(ground, -ground.grid.length / 2.0)


def test_variance_translation_invariant(random_states):
    st = random_states[1]
    assert variance(translate(st, 2.0), "position") == pytest.approx(
        variance(st, "position"), abs=1e-10)


def test_confinement_flag(grid, ground):
    assert ground.is_confined()
    flat = StateVector.from_amplitudes(grid, np.ones(grid.n_points))
    assert not flat.is_confined()


def test_state_io_round_trip_exact(tmp_path, random_states):
    st = random_states[2]
    path = tmp_path / "state.txt"
    save_state(path, st)
    back = load_state(path)
    assert back.grid == st.grid
    assert np.array_equal(back.amplitudes, st.amplitudes)


def test_load_state_rejects_truncated(tmp_path, ground):
    path = tmp_path / "state.txt"
    save_state(path, ground)
    lines = path.read_text().splitlines()
    path.write_text("\n".join(lines[:-10]) + "\n")
    with pytest.raises(ValueError):
        load_state(path)


def test_mixed_state_validation(grid, ground):
    other = make_random(RandomStateSpec(seed=11), grid)
    mix = MixedState(((0.25, ground), (0.75, other)))
    assert np.sum(mix.density() * grid.dx) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        MixedState(((0.4, ground), (0.4, other)))
    with pytest.raises(ValueError):
        MixedState(((1.5, ground), (-0.5, other)))
    small = make_gaussian(GaussianSpec(1.0), GridSpec(2048, 40.0))
    with pytest.raises(ValueError):
        MixedState(((0.5, ground), (0.5, small)))
