"""Acceptance criteria, each at its stated tolerance.

The terminal summary prints one PASS/FAIL line per criterion.
"""

import filecmp
import math
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from beurling.operator_decay import inverse_decay_check, symbol_to_operator
from beurling.seq_algebra import MatSeq, convolve, p_norm
from beurling.weights_r import WeightR
from beurling.weights_z import (
    WeightZ,
    check_amaw,
    construct_nu_p_gt_1,
    construct_nu_p_le_1,
    geometric_qsum,
    rho_bounds,
    subexp_domination_constant,
)
from beurling.wiener_engine import invert_on_circle, invert_real_line, line_convolve

FIX = Path(__file__).parent / "fixtures"
J = np.array([[0.0, 1.0], [0.0, 0.0]])


@pytest.mark.criterion(1, "classical Wiener oracle 1/(2+z), tol 1e-10, runtime < 1 s")
def test_c01_classical_wiener():
    t0 = time.perf_counter()
    rep = invert_on_circle(MatSeq.scalar({0: 2.0, 1: 1.0}), WeightZ.exponential(2.0), 1.0, 256)
    elapsed = time.perf_counter() - t0
    err_pos = max(abs(rep.g[n][0, 0] - (-1) ** n * 2.0 ** -(n + 1)) for n in range(0, 33))
    err_neg = max(abs(rep.g[n][0, 0]) for n in range(-127, 0))
    assert err_pos <= 1e-10 and err_neg <= 1e-10
    assert elapsed < 1.0


@pytest.mark.criterion(2, "nilpotent block oracle (2I + zJ)^-1, tol 1e-12")
def test_c02_nilpotent_block():
    rep = invert_on_circle(MatSeq.from_mapping({0: 2 * np.eye(2), 1: J}), WeightZ.polynomial(1.0), 1.0, 256)
    assert rep.g.support == [0, 1]
    assert np.max(np.abs(rep.g[0] - np.eye(2) / 2)) <= 1e-12
    assert np.max(np.abs(rep.g[1] + J / 4)) <= 1e-12
    assert rep.residual_circle <= 1e-12


def _random_weights(rng, count):
    out = []
    for i in range(count):
        kind = i % 5
        if kind == 0:
            b1, b2 = rng.uniform(1.0, 3.0, size=2)
            out.append(WeightZ.exponential(b1, b2, window=32))
        elif kind == 1:
            out.append(WeightZ.polynomial(rng.uniform(0.5, 3.0), window=32))
        elif kind == 2:
            src = WeightZ.product(WeightZ.exponential(*rng.uniform(1.0, 2.5, size=2)), WeightZ.polynomial(rng.uniform(0, 2)))
            out.append(WeightZ.table(src(np.arange(-16, 17))))
        elif kind == 3:
            out.append(WeightZ.constant(rng.uniform(1.0, 4.0), window=32))
        else:
            out.append(WeightZ.table(np.full(21, rng.uniform(1.0, 4.0))))
    return out


@pytest.mark.criterion(3, "nu sandwich 1 <= nu <= w and constancy on 20 random weights, excess 1e-12")
def test_c03_nu_sandwich_constancy():
    rng = np.random.default_rng(20240601)
    for w in _random_weights(rng, 20):
        rho = rho_bounds(w)
        r1 = rho.rho1 if rho.rho1 >= 1 - 1e-12 else rng.uniform(rho.rho1, 1.0)
        r2 = rho.rho2 if rho.rho2 <= 1 + 1e-12 else rng.uniform(1.0, rho.rho2)
        r1, r2 = min(r1, 1.0), max(r2, 1.0)
        nu = construct_nu_p_le_1(w, r1, r2, force=True)
        N = min(w.effective_window(), nu.weight.effective_window())
        ns = np.arange(-N, N + 1)
        v, base = nu(ns), w(ns)
        assert np.all(v >= 1 - 1e-12)
        assert np.max(v / base) <= 1 + 1e-12
        assert nu.weight.is_constant(N) == w.is_constant()


@pytest.mark.criterion(4, "nu for w = 2^|n|, p = 2 passes AMAW after scaling; K matches to 1e-9")
def test_c04_nu_amaw_reentry():
    w = WeightZ.exponential(2.0)
    nu = construct_nu_p_gt_1(w, 0.5, 2.0, gamma=0.5, q=2.0)
    rescaled = check_amaw(nu.weight.scaled(nu.amaw.scaling_C), 2.0)
    assert rescaled.passes_strict
    assert abs(nu.K - subexp_domination_constant(w, 0.5, "both")) <= 1e-9
    assert nu.certified


@pytest.mark.criterion(5, "q-sum of coth(1)^(1/2) e^|n| at x in {rho1, 1, rho2} <= 1 + 1e-6, N = 64")
@pytest.mark.parametrize("which", ["rho1", "one", "rho2"])
def test_c05_geometric_qsum(which):
    w = WeightZ.exponential(math.e, window=64).scaled((1 / math.tanh(1)) ** 0.5)
    rho = rho_bounds(w)
    x = {"rho1": rho.rho1, "one": 1.0, "rho2": rho.rho2}[which]
    rep = geometric_qsum(w, x, 2.0)
    assert rep.value <= 1 + 1e-6, f"q-sum at x={x:.6g} is {rep.value:.6g}"


def _rand_pair(rng):
    d = int(rng.integers(1, 4))
    out = []
    for _ in range(2):
        k = int(rng.integers(1, 10))
        idx = rng.choice(np.arange(-8, 9), size=k, replace=False)
        out.append(MatSeq(d, idx, rng.normal(size=(k, d, d)) + 1j * rng.normal(size=(k, d, d))))
    return out


@pytest.mark.criterion(6, "500 random pairs: submultiplicative norms (p = 0.5, 1, and 2 on a strict AMAW weight), associativity 1e-12")
def test_c06_algebra_suite():
    rng = np.random.default_rng(6)
    weights = [
        WeightZ.exponential(2.0, 1.5),
        WeightZ.polynomial(1.5),
        WeightZ.product(WeightZ.subexponential(0.7, 0.5), WeightZ.exponential(1.2)),
    ]
    base = WeightZ.polynomial(2.0, window=256)
    C = (check_amaw(base, 2.0).conv_ratio_max * 1.001) ** 0.5
    strict = base.scaled(C)
    assert check_amaw(strict, 2.0).passes_strict
    for i in range(500):
        f, g = _rand_pair(rng)
        fg = convolve(f, g)
        for p in (0.5, 1.0):
            w = weights[i % len(weights)]
            assert p_norm(fg, w, p).value <= p_norm(f, w, p).value * p_norm(g, w, p).value * (1 + 1e-12)
        assert p_norm(fg, strict, 2.0).value <= p_norm(f, strict, 2.0).value * p_norm(g, strict, 2.0).value * (1 + 1e-12)
        h = _rand_pair(rng)[0]
        if h.dim != f.dim:
            h = MatSeq(f.dim, [0], rng.normal(size=(1, f.dim, f.dim)))
        lhs, rhs = convolve(fg, h), convolve(f, convolve(g, h))
        assert lhs.max_abs_diff(rhs) <= 1e-12 * max(1.0, lhs.norms().max())


def _bidiagonal(N):
    # a_ii = 2, a_{i,i+1} = 1: coefficient k sits on i - j = k, so f(0) = 2, f(-1) = 1
    return symbol_to_operator(MatSeq.scalar({0: 2.0, -1: 1.0}), N)


@pytest.mark.criterion(7, "bidiagonal N = 64: divergent under w, convergent under nu within 5% of the geometric limit, interior agreement 1e-8")
def test_c07_decay_demonstration():
    rep = inverse_decay_check(_bidiagonal(64), WeightZ.exponential(2.0), 1.0, epsilon=0.05)
    assert rep.verdict_omega == "divergent trend"
    assert rep.verdict_nu == "convergent"
    # the inverse lives on i - j = -m, where nu(-m) = r1^-m; the annulus edge is r1 = 1 / r with r ~ 1.95
    r = 1.0 / rep.inversion.annulus.r1
    assert r == pytest.approx(1.95, abs=1e-3)
    limit = 1.0 / (2.0 - r)  # sum_{m >= 0} 2^-(m+1) r^m
    assert abs(rep.profile_nu.norm_value.value - limit) <= 0.05 * limit
    assert rep.interior_agreement <= 1e-8


@pytest.mark.criterion(8, "finite-section interior agreement drops >= 10x from N = 16 to N = 64")
def test_c08_finite_section_convergence():
    a16 = inverse_decay_check(_bidiagonal(16), WeightZ.exponential(2.0), 1.0, epsilon=0.05).interior_agreement
    a64 = inverse_decay_check(_bidiagonal(64), WeightZ.exponential(2.0), 1.0, epsilon=0.05).interior_agreement
    assert a64 <= a16 / 10, f"agreement {a16:.3e} at N=16 vs {a64:.3e} at N=64"


def _neumann(f, h, terms=20):
    n = f.size
    m = (n - 1) // 2
    power, total = f.copy(), np.zeros_like(f)
    for k in range(1, terms + 1):
        total += (-1) ** k * power
        power = h * np.convolve(power, f)[m:m + n]
    return total


@pytest.mark.criterion(9, "real line: Gaussian residual <= 1e-6 (h = 1/64, L = 16); Neumann oracle agreement <= 1e-6")
def test_c09_real_line():
    h, L = 1 / 64, 16.0
    x = np.arange(-int(L / h), int(L / h) + 1) * h
    f = -0.5 * (2 * np.pi) ** -0.5 * np.exp(-x ** 2 / 2)
    rep = invert_real_line(f, WeightR.exponential(1.0, half_length=L), 1.0, h)
    assert rep.residual <= 1e-6
    res = f + rep.g[:, 0, 0] + line_convolve(f[:, None, None], rep.g, h)[:, 0, 0]
    assert np.max(np.abs(res)) <= 1e-6
    small = 0.3 * np.exp(-x ** 2) * np.cos(2 * x)  # L1 norm below 0.55
    assert h * np.sum(np.abs(small)) < 0.6
    rep = invert_real_line(small, WeightR.exponential(1.0, half_length=L), 1.0, h)
    assert np.max(np.abs(rep.g[:, 0, 0] - _neumann(small, h))) <= 1e-6


CLI_CASES = [
    ["weight-check", "--weight", FIX / "weight_exp2.json"],
    ["weight-check", "--weight", FIX / "weight_e.json"],
    ["weight-check", "--weight", FIX / "weight_r_exp.json"],
    ["construct-nu", "--weight", FIX / "weight_exp2.json", "--p", "2", "--r1", "0.5", "--r2", "2"],
    ["construct-nu", "--weight", FIX / "weight_poly2.json", "--p", "0.5"],
    ["invert", "--weight", FIX / "weight_exp2.json", "--sequence", FIX / "seq_2pz.json"],
    ["invert", "--weight", FIX / "weight_exp2.json", "--sequence", FIX / "seq_identity.json"],
    ["invert-real", "--weight", FIX / "weight_r_exp.json", "--samples", FIX / "samples_gauss.json"],
    ["matrix-decay", "--weight", FIX / "weight_exp2.json", "--operator", FIX / "op_bidiagonal.json", "--epsilon", "0.05"],
    ["matrix-decay", "--weight", FIX / "weight_exp2.json", "--operator", FIX / "op_identity.json"],
]


@pytest.mark.criterion(10, "byte-identical CLI outputs across two runs of every fixture")
def test_c10_determinism(tmp_path):
    for i, case in enumerate(CLI_CASES):
        outs = []
        for run in range(2):
            out = tmp_path / f"case{i}_run{run}"
            proc = subprocess.run([sys.executable, "-m", "beurling", *map(str, case), "--out", str(out)],
                                  capture_output=True)
            assert proc.returncode in (0, 2), proc.stderr.decode()
            outs.append((out, proc.stdout))
        (a, sa), (b, sb) = outs
        assert sa == sb
        names = sorted(p.name for p in a.iterdir())
        assert names == sorted(p.name for p in b.iterdir()) and names
        match, mismatch, errors = filecmp.cmpfiles(a, b, names, shallow=False)
        assert not mismatch and not errors, (case, mismatch, errors)
