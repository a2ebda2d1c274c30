import math

import numpy as np
import pytest

from beurling.errors import NotInvertibleOnCircle, NotInvertibleOnLine, PreconditionError
from beurling.seq_algebra import MatSeq
from beurling.weights_r import WeightR
from beurling.weights_z import WeightZ, check_submultiplicative
from beurling.wiener_engine import (
    decay_fit,
    invert_on_circle,
    invert_real_line,
    line_convolve,
    trend_verdict,
    verify_inverse_membership,
)

J = np.array([[0.0, 1.0], [0.0, 0.0]])


def test_trend_verdict_labels():
    assert trend_verdict(np.cumsum(np.full(50, 0.5))) == "divergent trend"
    assert trend_verdict(np.cumsum(0.9 ** np.arange(60))) == "convergent"
    assert trend_verdict(np.ones(10)) == "convergent"
    assert trend_verdict(np.cumsum(1.0 / np.arange(1, 200))) == "inconclusive"
    assert trend_verdict(np.cumsum(np.arange(1, 200) ** -2.0)) == "inconclusive"
    assert trend_verdict(np.cumsum(np.exp(-np.sqrt(np.arange(200))))) == "convergent"


def test_invert_two_plus_z():
    rep = invert_on_circle(MatSeq.scalar({0: 2.0, 1: 1.0}), WeightZ.exponential(2.0), 1.0, 256)
    for n in range(0, 33):
        assert abs(rep.g[n][0, 0] - (-1) ** n * 2.0 ** -(n + 1)) <= 1e-10
    assert rep.decay["pos"]["rate"] == pytest.approx(0.5, rel=1e-4)
    assert rep.decay["neg"] is None
    assert rep.residual_circle <= 1e-12 and rep.residual_conv <= 1e-12


def test_invert_identity():
    rep = invert_on_circle(MatSeq.identity(2), WeightZ.polynomial(1.0), 0.5, 64)
    assert rep.g.support == [0] and np.allclose(rep.g[0], np.eye(2))
    assert rep.residual_circle <= 1e-13 and rep.residual_conv <= 1e-13
    assert rep.verdict == "convergent"


def test_invert_nilpotent():
    rep = invert_on_circle(MatSeq.from_mapping({0: 2 * np.eye(2), 1: J}), WeightZ.polynomial(1.0), 1.0, 64)
    assert rep.g.support == [0, 1]
    assert np.allclose(rep.g[0], np.eye(2) / 2, atol=1e-12)
    assert np.allclose(rep.g[1], -J / 4, atol=1e-12)


def test_invert_circle_failure():
    with pytest.raises(NotInvertibleOnCircle):
        invert_on_circle(MatSeq.scalar({0: -1.0, 1: 1.0}), WeightZ.exponential(2.0), 1.0, 64)


def test_invert_p_gt_1_uses_amaw_nu():
    rep = invert_on_circle(MatSeq.scalar({0: 2.0, 1: 1.0}), WeightZ.exponential(2.0), 2.0, 256)
    assert rep.nu.case_tag == "interior" and rep.nu.amaw is not None
    assert rep.validation_margin >= rep.annulus.epsilon
    # nu grows like sqrt(r2)^n e^{sqrt(n)/2}, so the weighted sums converge
    assert rep.verdict == "convergent"


def test_invert_p_gt_1_needs_summable_weight():
    with pytest.raises(PreconditionError):
        invert_on_circle(MatSeq.scalar({0: 2.0, 1: 1.0}), WeightZ.constant(), 2.0, 64)


def test_invert_nu_sandwich():
    f = MatSeq.scalar({-1: 0.4, 0: 2.0, 1: 0.7})
    rep = invert_on_circle(f, WeightZ.exponential(3.0), 1.0, 256, epsilon=0.1)
    assert rep.nu.certified
    assert check_submultiplicative(rep.nu.weight).max_excess <= 1e-12


def test_exact_inverse_identity_bounds_aliasing():
    f = MatSeq.from_mapping({-1: np.array([[0.3, 0.1], [0.0, 0.2]]), 0: 2 * np.eye(2), 1: np.array([[0.0, 0.5], [0.4, 0.1]])})
    rep = invert_on_circle(f, WeightZ.exponential(2.0), 1.0, 128)
    assert rep.residual_circle <= 1e-8


def test_doubling_grid_reduces_aliasing():
    f = MatSeq.scalar({-1: 0.9, 0: 2.0, 1: 0.9})  # slow decay, ratio ~0.63
    w = WeightZ.exponential(2.0)
    small = invert_on_circle(f, w, 1.0, 32)
    big = invert_on_circle(f, w, 1.0, 64)
    rate = max(v["rate"] for v in big.decay.values() if v)
    assert big.residual_conv <= small.residual_conv * rate ** (32 / 4)
    assert small.residual_conv <= 10 * small.aliasing_bound


def test_membership_examples():
    g = MatSeq.scalar({n: 2.0 ** -(n + 1) for n in range(0, 200)})
    nu = WeightZ.exponential(1.0, 1.9)
    rep = verify_inverse_membership(g, nu, 1.0)
    # partial sums of (1/2)(0.95)^n approach 10; canonical cleanup keeps n <= H
    H = g.halfwidth
    assert rep.verdict == "convergent"
    assert rep.total == pytest.approx(10.0 * (1 - 0.95 ** (H + 1)), rel=1e-12)
    assert verify_inverse_membership(g, nu, 1.0, window=H).total < 10.0
    rep = verify_inverse_membership(g, WeightZ.exponential(2.0), 1.0)
    assert rep.verdict == "divergent trend"
    assert np.allclose(np.diff(rep.curve), 0.5)
    rep = verify_inverse_membership(MatSeq.identity(2), WeightZ.exponential(2.0), 1.0)
    assert rep.total == 1.0


def test_membership_clips_table_nu():
    g = MatSeq.scalar({n: 2.0 ** -n for n in range(0, 20)})
    rep = verify_inverse_membership(g, WeightZ.table(np.ones(11)), 1.0)
    assert rep.clipped and rep.window == 5


def test_decay_fit_two_sided():
    g = MatSeq.scalar({**{n: 0.5 ** n for n in range(0, 30)}, **{-n: 3 * 0.25 ** n for n in range(1, 20)}})
    fit = decay_fit(g)
    assert fit["pos"]["rate"] == pytest.approx(0.5) and fit["neg"]["rate"] == pytest.approx(0.25)
    assert fit["neg"]["C"] == pytest.approx(3.0)


# -- real line


def gaussian_case(L=16.0, h=1 / 64):
    x = np.arange(-int(L / h), int(L / h) + 1) * h
    return x, -0.5 * (2 * np.pi) ** -0.5 * np.exp(-x ** 2 / 2)


def test_real_line_zero():
    x, f = gaussian_case(4.0)
    rep = invert_real_line(0 * f, WeightR.exponential(1.0), 1.0)
    assert np.all(rep.g == 0) and rep.residual == 0.0
    assert rep.strip == (-1.0, 1.0)


def test_real_line_gaussian_residual():
    x, f = gaussian_case()
    rep = invert_real_line(f, WeightR.exponential(1.0), 1.0)
    assert rep.residual <= 1e-6
    assert rep.margin == pytest.approx(0.5, abs=1e-3)
    assert rep.nu.case_tag == "interior"


def test_real_line_p_gt_1_strip_halved():
    x, f = gaussian_case()
    rep = invert_real_line(f, WeightR.exponential(1.0), 2.0)
    assert rep.nu_strip == pytest.approx((rep.strip[0] / 2, rep.strip[1] / 2))


def test_real_line_not_invertible():
    h = 1 / 16
    x = np.arange(-64, 65) * h
    f = -(2 * np.pi) ** -0.5 * np.exp(-x ** 2 / 2)  # f^(0) = -1
    with pytest.raises(NotInvertibleOnLine) as exc:
        invert_real_line(f, WeightR.polynomial(1.0, half_length=4.0), 1.0, h, epsilon=1e-3)
    assert abs(exc.value.frequency) < 1e-9


def test_real_line_matrix_valued():
    h = 1 / 32
    x = np.arange(-256, 257) * h
    g0 = np.exp(-x ** 2)
    f = np.zeros((x.size, 2, 2))
    f[:, 0, 0] = 0.2 * g0
    f[:, 0, 1] = 0.1 * g0 * np.cos(x)
    f[:, 1, 1] = -0.15 * g0
    rep = invert_real_line(f, WeightR.exponential(0.5), 1.0, h)
    assert rep.residual <= 1e-9
    res = f + rep.g + line_convolve(f, rep.g, h)
    assert np.max(np.abs(res)) <= 1e-9
