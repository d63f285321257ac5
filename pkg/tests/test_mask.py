import numpy as np
import pytest
from scipy.stats import norm

from chur.errors import DomainOverflow, NonIntegrableMask
from chur.grid import GridSpec
from chur.mask import (MaskSpec, default_y_grid, detect_momentum,
                       detect_position, detection_profile, mask_from_file,
                       mask_transform_identity, mask_uncertainty_relation,
                       random_smooth_mask)
from chur.states import GaussianSpec, RandomStateSpec, make_gaussian, make_random

YS = np.linspace(-6.0, 7.0, 101)


def test_top_hat_matches_cdf_oracle(ground):
    # aperture [0, delta] shifted by y sees the interval [-y, delta - y]
    q = detect_position(MaskSpec.top_hat(1.0), ground, YS)
    oracle = norm.cdf(1.0 - YS) - norm.cdf(-YS)
    assert np.max(np.abs(q - oracle)) <= 1e-9
    assert np.all(q >= -1e-12) and np.all(q <= 1.0 + 1e-12)


def test_top_hat_momentum_matches_cdf_oracle(ground):
    # sigma_p = 1/2 and kappa = 1: the scaled density is N(0, 1/4)
    p = detect_momentum(MaskSpec.top_hat(1.0), ground, YS)
    oracle = norm.cdf((1.0 - YS) / 0.5) - norm.cdf(-YS / 0.5)
    assert np.max(np.abs(p - oracle)) <= 1e-9


def test_zero_mask_gives_zero_profiles(ground):
    zero = MaskSpec.tabulated(-2.0, 0.5, np.zeros(9), kappa=1.0)
    assert np.max(np.abs(detect_position(zero, ground, YS))) == 0.0
    assert np.max(np.abs(detect_momentum(zero, ground, YS))) == 0.0
    res = mask_uncertainty_relation(zero, ground)
    assert res.lhs == 0.0 and res.rhs == 0.0 and res.holds


def test_gaussian_mask_closed_form_convolution(ground):
    # M = exp(-x^2/2), rho = N(0,1): Q(y) = exp(-y^2/4)/sqrt(2)
    q = detect_position(MaskSpec.gaussian(1.0), ground, YS)
    assert np.max(np.abs(q - np.exp(-YS**2 / 4.0) / np.sqrt(2.0))) <= 1e-9


def test_direct_and_spectral_paths_agree_for_smooth_masks(ground, random_states):
    for st in (ground, random_states[0]):
        a = detect_position(MaskSpec.gaussian(1.0), st, YS, method="spectral")
        b = detect_position(MaskSpec.gaussian(1.0), st, YS, method="direct")
        assert np.max(np.abs(a - b)) <= 1e-9
        ap = detect_momentum(MaskSpec.gaussian(1.0), st, YS, method="spectral")
        bp = detect_momentum(MaskSpec.gaussian(1.0), st, YS, method="direct")
        assert np.max(np.abs(ap - bp)) <= 1e-9


def test_tabulated_paths_agree_to_interpolation_accuracy(ground):
    # the direct path reads the table through linear interpolation, so the
    # two routes match only to O(sample spacing squared) off the nodes
    mk = random_smooth_mask(2)
    a = detect_position(mk, ground, YS, method="spectral")
    b = detect_position(mk, ground, YS, method="direct")
    assert np.max(np.abs(a - b)) <= 5e-4


def test_periodic_mask_readout_is_periodic(ground):
    mk = MaskSpec.periodic(2.0, 0.4)
    ys = np.linspace(0.0, 2.0, 41)
    q1 = detect_position(mk, ground, ys)
    q2 = detect_position(mk, ground, ys + 2.0)
    assert np.max(np.abs(q1 - q2)) <= 1e-9
    with pytest.raises(NonIntegrableMask):
        mask_uncertainty_relation(mk, ground)
    with pytest.raises(NonIntegrableMask):
        mk.fourier(np.array([1.0]))


def test_top_hat_transform_oracle():
    # |M_hat(lam)|^2 = (2 - 2 cos(lam delta)) / (2 pi lam^2) in the
    # unit-normalized transform convention
    mk = MaskSpec.top_hat(1.3)
    lams = np.linspace(0.1, 30.0, 200)
    values = np.abs(mk.fourier(lams)) ** 2
    oracle = (2.0 - 2.0 * np.cos(lams * 1.3)) / (2.0 * np.pi * lams**2)
    assert np.max(np.abs(values - oracle)) <= 1e-12
    assert abs(mk.fourier(np.array([0.0]))[0] - 1.3 / np.sqrt(2.0 * np.pi)) <= 1e-14


def test_transform_identity_reports(ground, random_states):
    for mk in (MaskSpec.top_hat(1.0), MaskSpec.gaussian(1.0), random_smooth_mask(5)):
        rep = mask_transform_identity(mk, ground)
        assert rep.passed, (mk.kind, rep)
    rep = mask_transform_identity(MaskSpec.gaussian(0.7), random_states[1])
    assert rep.passed


def test_parseval_consistency(ground):
    # integral |Q|^2 dy equals integral |M_hat Phi|^2 dlam
    from chur.charfunc import char_sweep

    mk = MaskSpec.gaussian(1.0)
    ys = default_y_grid(mk, ground)
    q = detect_position(mk, ground, ys)
    lhs = np.sum(np.abs(q) ** 2) * (ys[1] - ys[0])
    lams = np.linspace(-40.0, 40.0, 20001)
    prod = np.abs(mk.fourier(lams) * char_sweep(ground, lams, "position")) ** 2
    rhs = np.trapezoid(prod, lams)
    assert lhs == pytest.approx(rhs, abs=1e-8)


def test_uncertainty_relation_reference_masks(ground):
    top = mask_uncertainty_relation(MaskSpec.top_hat(1.0), ground)
    assert top.holds and top.cap_holds
    assert top.rhs <= 2.0 * 1.0 * (1.0 + 1e-6)
    gauss = mask_uncertainty_relation(MaskSpec.gaussian(1.0), ground)
    assert gauss.holds and gauss.cap_holds
    assert gauss.l2_mass == pytest.approx(np.sqrt(np.pi), abs=1e-12)


def test_uncertainty_relation_complex_masks(ground, random_states):
    for seed in range(5):
        mk = random_smooth_mask(seed)
        for st in (ground, random_states[seed % len(random_states)]):
            res = mask_uncertainty_relation(mk, st)
            assert res.holds and res.cap_holds


def test_scaling_moves_both_sides_quadratically(ground):
    mk = MaskSpec.gaussian(1.0)
    full = mask_uncertainty_relation(mk, ground)
    half = mask_uncertainty_relation(mk.scaled(0.5), ground)
    assert half.lhs == pytest.approx(0.25 * full.lhs, rel=1e-12)
    assert half.rhs == pytest.approx(0.25 * full.rhs, rel=1e-12)
    assert half.holds == full.holds


def test_mask_weight_and_support():
    mk = MaskSpec.top_hat(2.0)
    np.testing.assert_array_equal(mk.weight(np.array([-0.1, 0.0, 1.0, 2.0, 2.1])),
                                  [0.0, 1.0, 1.0, 1.0, 0.0])
    assert mk.support() == (0.0, 2.0)
    assert mk.l2_mass() == 2.0
    per = MaskSpec.periodic(1.0, 0.25)
    np.testing.assert_array_equal(per.weight(np.array([0.1, 0.3, 1.1])), [1.0, 0.0, 1.0])


def test_mask_validation():
    with pytest.raises(ValueError):
        MaskSpec.top_hat(-1.0)
    with pytest.raises(ValueError):
        MaskSpec.periodic(1.0, 1.5)
    with pytest.raises(ValueError):
        MaskSpec.tabulated(0.0, 0.1, np.array([0.5, 1.5]))
    with pytest.raises(ValueError):
        MaskSpec("nonsense")


def test_tabulated_file_round_trip(tmp_path, ground):
    xs = np.linspace(-2.0, 2.0, 41)
    vals = np.exp(-xs**2)
    path = tmp_path / "mask.txt"
    path.write_text("\n".join(f"{float(x)!r} {float(v)!r}" for x, v in zip(xs, vals)) + "\n")
    mk = mask_from_file(path)
    assert mk.kind == "tabulated"
    np.testing.assert_allclose(mk.weight(xs), vals, atol=1e-12)
    # complex three-column variant
    path3 = tmp_path / "mask3.txt"
    path3.write_text("\n".join(f"{float(x)!r} {float(0.6 * v)!r} {float(0.5 * v)!r}"
                               for x, v in zip(xs, vals)) + "\n")
    mk3 = mask_from_file(path3)
    assert mk3.is_complex


def test_tabulated_file_requires_uniform_spacing(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("0.0 1.0\n0.1 1.0\n0.3 1.0\n")
    with pytest.raises(ValueError):
        mask_from_file(path)


def test_domain_overflow_on_absurd_window(ground):
    with pytest.raises(DomainOverflow):
        detect_position(MaskSpec.gaussian(1.0), ground,
                        np.linspace(-2e6, 2e6, 101))
