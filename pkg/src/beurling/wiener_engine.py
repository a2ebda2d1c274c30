"""Inverse symbols, constructed weights and membership checks.

``invert_on_circle`` inverts the symbol pointwise on the unit circle and
recovers the coefficients of the inverse by FFT; the weight ``nu`` is then
built from the invertibility annulus, and the weighted partial sums of the
inverse coefficients are labelled with a trend verdict.  ``invert_real_line``
is the analogue for ``e + f`` with ``f`` sampled on a grid of the line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import annulus_fourier as af
from .errors import InvalidInputError, NotInvertibleOnLine
from .seq_algebra import MatSeq, block_norms, convolve
from .weights_r import (
    DEFAULT_STEP,
    construct_nu_real_L1,
    construct_nu_real_Lp,
    rho_bounds_r,
)
from .weights_z import DEFAULT_GAMMA, construct_nu_p_gt_1, construct_nu_p_le_1, rho_bounds

DESIGN_RTOL = 1e-9
DIVERGENT_FRACTION = 0.5
GEOMETRIC_SLACK = 1e-3
STEADY_FRACTION = 0.75


def _log_slope(inc):
    pos = inc > 0
    if np.count_nonzero(pos) < 3:
        return None
    k = np.arange(inc.size)[pos]
    return float(np.polyfit(k, np.log(inc[pos]), 1)[0])


def trend_verdict(curve):
    """Label a non-decreasing partial-sum curve.

    * ``divergent trend``: over the last half, every increment is at least
      half the largest increment seen.
    * ``convergent``: last-quarter increments below ``1e-9`` of the sum, or
      geometric decay over the last half: log-linear fits on its two halves
      both give ratios ``<= 1 - 1e-3`` and the later one is not markedly
      flatter (slope at least ``0.75`` of the earlier), which rules out
      polynomial tails such as ``1/n``.
    * otherwise ``inconclusive``.
    """
    c = np.asarray(curve, dtype=float)
    if c.size < 4:
        return "inconclusive"
    inc = np.diff(c)
    top = float(np.max(inc))
    half = inc[inc.size // 2:]
    if top <= 0.0:
        return "convergent"
    if np.all(half >= DIVERGENT_FRACTION * top):
        return "divergent trend"
    quarter = inc[(3 * inc.size) // 4:]
    if np.all(quarter < DESIGN_RTOL * c[-1]):
        return "convergent"
    if not np.any(half > 0):
        return "convergent"
    mid = half.size // 2
    s3, s4 = _log_slope(half[:mid]), _log_slope(half[mid:])
    cut = math.log1p(-GEOMETRIC_SLACK)
    if s3 is not None and s4 is not None and s3 <= cut and s4 <= cut and s4 <= STEADY_FRACTION * s3:
        return "convergent"
    return "inconclusive"


@dataclass(frozen=True)
class MembershipReport:
    curve: np.ndarray = field(repr=False)
    verdict: str
    total: float
    window: int
    clipped: bool

    def to_dict(self):
        return {
            "curve": self.curve.tolist(),
            "verdict": self.verdict,
            "total": self.total,
            "window": self.window,
            "clipped": self.clipped,
        }


def verify_inverse_membership(g, nu, p, window=None):
    """Partial sums ``S(N') = sum_{|n| <= N'} ||g(n)||^p nu(n)^p`` and their trend verdict.

    ``nu`` may be a :class:`NuWeight` or a plain weight.  The curve runs to
    the support half-width of ``g`` (at least 3, or ``window``), cut at the
    domain of a tabulated ``nu`` with ``clipped`` set.
    """
    if not p > 0:
        raise InvalidInputError("p must be > 0")
    wt = getattr(nu, "weight", nu)
    N = max(g.halfwidth, 3) if window is None else int(window)
    lim = wt.domain_limit()
    clipped = lim is not None and lim < N
    if clipped:
        N = lim
    sel = np.abs(g.indices) <= N
    idx = g.indices[sel]
    with np.errstate(divide="ignore"):
        terms = np.exp(p * (np.log(g.norms()[sel]) + wt.log(idx)))
    per = np.zeros(N + 1)
    np.add.at(per, np.abs(idx), terms)
    curve = np.cumsum(per)
    return MembershipReport(curve, trend_verdict(curve), float(curve[-1]), int(N), bool(clipped))


def decay_fit(g, floor_rtol=1e-13):
    """Least-squares geometric fit ``||g(n)|| ~ C rate^|n|`` per side; ``None`` when under-determined."""
    nrm = g.norms()
    top = nrm.max() if nrm.size else 0.0
    out = {}
    for side, sel in (("neg", g.indices < 0), ("pos", g.indices > 0)):
        keep = sel & (nrm > floor_rtol * top)
        if np.count_nonzero(keep) < 2:
            out[side] = None
            continue
        k = np.abs(g.indices[keep]).astype(float)
        slope, icpt = np.polyfit(k, np.log(nrm[keep]), 1)
        out[side] = {"rate": math.exp(slope), "C": math.exp(icpt)}
    return out


@dataclass(frozen=True)
class InversionReport:
    g: MatSeq = field(repr=False)
    nu: object
    p: float
    M: int
    annulus: af.AnnulusReport = field(repr=False)
    residual_circle: float
    residual_conv: float
    membership: MembershipReport = field(repr=False)
    decay: dict
    aliasing_bound: float
    validation_margin: Optional[float] = None

    @property
    def partial_norm_curve(self):
        return self.membership.curve

    @property
    def verdict(self):
        return self.membership.verdict

    def to_dict(self):
        return {
            "p": self.p,
            "M": self.M,
            "annulus": self.annulus.to_dict(),
            "nu": self.nu.to_dict(),
            "residual_circle": self.residual_circle,
            "residual_conv": self.residual_conv,
            "membership": self.membership.to_dict(),
            "decay_fit": self.decay,
            "aliasing_bound": self.aliasing_bound,
            "validation_margin": self.validation_margin,
            "g": self.g.to_dict(),
        }


def _aliasing_bound(fit, M):
    b = 0.0
    for v in fit.values():
        if v is None:
            continue
        if v["rate"] >= 1.0:
            return math.inf
        b = max(b, v["C"] * v["rate"] ** (M // 2))
    return b


def invert_on_circle(f, w, p=1.0, M=af.DEFAULT_M, epsilon=af.DEFAULT_EPSILON,
                     gamma=DEFAULT_GAMMA, force=False):
    """Coefficients of ``F^{-1}`` on the unit circle, with ``nu`` and residual diagnostics.

    For ``p <= 1`` the weight comes from :func:`construct_nu_p_le_1`, for
    ``p > 1`` from :func:`construct_nu_p_gt_1` with ``q = p / (p - 1)``; both
    use the radii of :func:`find_annulus`.
    """
    if not p > 0:
        raise InvalidInputError("p must be > 0")
    M = af._check_M(M)
    rho = rho_bounds(w)
    ann = af.find_annulus(f, rho, epsilon, M)
    g = af.fourier_coefficients(np.linalg.inv(af.symbol_on_grid(f, 1.0, M)))

    validation = None
    if p <= 1:
        nu = construct_nu_p_le_1(w, ann.r1, ann.r2, force=force)
    else:
        q = p / (p - 1.0)
        nu = construct_nu_p_gt_1(w, ann.r1, ann.r2, gamma=gamma, q=q, force=force)
        radii = np.linspace(math.sqrt(ann.r1), math.sqrt(ann.r2), 17)
        validation = min(af.invertibility_margin(f, r, M) for r in radii)

    # truncation shows up between the nodes used for the transform
    eye = np.eye(f.dim)
    prod = af.symbol_on_grid(f, 1.0, M, 0.5) @ af.symbol_on_grid(g, 1.0, M, 0.5)
    res_circle = float(np.max(block_norms(prod - eye)))
    res_conv = float(np.sum((convolve(g, f) - MatSeq.identity(f.dim)).norms()))

    fit = decay_fit(g)
    return InversionReport(
        g=g, nu=nu, p=float(p), M=M, annulus=ann,
        residual_circle=res_circle, residual_conv=res_conv,
        membership=verify_inverse_membership(g, nu, p),
        decay=fit, aliasing_bound=_aliasing_bound(fit, M),
        validation_margin=validation,
    )


# -- real line ---------------------------------------------------------


def _as_blocks(f_samples):
    f = np.asarray(f_samples, dtype=complex)
    if f.ndim == 1:
        f = f[:, None, None]
    if f.ndim != 3 or f.shape[1] != f.shape[2]:
        raise InvalidInputError("samples must have shape (n,) or (n, d, d)")
    if f.shape[0] % 2 != 1:
        raise InvalidInputError("samples must sit on a symmetric grid (odd count)")
    return f


def fourier_on_line(f, h, t, a=0.0):
    """Trapezoid ``int f(x) e^{(a + i t) x} dx`` for a single frequency ``t``."""
    m = (f.shape[0] - 1) // 2
    x = np.arange(-m, m + 1) * h
    wts = np.full(x.size, h)
    wts[[0, -1]] *= 0.5
    return np.tensordot(wts * np.exp((a + 1j * t) * x), f, axes=(0, 0))


def _line_transform(f, h, P, a=0.0):
    """DFT of ``h f(x) e^{a x}`` on the padded circular grid of length ``P``.

    Row ``k`` is the transform at ``t_k = 2 pi k / (P h)`` (``k`` read mod ``P``).
    """
    m = (f.shape[0] - 1) // 2
    j = np.arange(-m, m + 1)
    circ = np.zeros((P,) + f.shape[1:], dtype=complex)
    circ[np.mod(j, P)] = f * (h * np.exp(a * j * h))[:, None, None]
    return P * np.fft.ifft(circ, axis=0)


def _line_margins(f, h, P, a=0.0):
    F = _line_transform(f, h, P, a)
    return af._sigma_min(np.eye(f.shape[1]) + F)


def _line_lipschitz(f, h):
    m = (f.shape[0] - 1) // 2
    x = np.arange(-m, m + 1) * h
    nrm = block_norms(f)

    def lip(a, b):
        return float(h * np.sum(np.abs(x) * nrm * np.maximum(np.exp(a * x), np.exp(b * x))))

    return lip


@dataclass(frozen=True)
class RealInversionReport:
    x: np.ndarray = field(repr=False)
    g: np.ndarray = field(repr=False)
    nu: object
    residual: float
    margin: float
    worst_frequency: float
    frequency_cap: float
    strip: tuple
    nu_strip: tuple
    padded_length: int
    margin_fn: list = field(repr=False)

    def to_dict(self):
        return {
            "residual": self.residual,
            "margin": self.margin,
            "worst_frequency": self.worst_frequency,
            "frequency_cap": self.frequency_cap,
            "strip": list(self.strip),
            "nu_strip": list(self.nu_strip),
            "padded_length": self.padded_length,
            "nu": self.nu.to_dict(),
            "margin_fn": [[r, m] for r, m in self.margin_fn],
        }


def line_convolve(f, g, h):
    """``h * sum_i f_i g_{j-i}`` on the symmetric window of ``f`` (blocks multiplied in order)."""
    n, d = f.shape[0], f.shape[1]
    out = np.zeros((2 * n - 1, d, d), dtype=complex)
    for a in range(d):
        for b in range(d):
            for c in range(d):
                out[:, a, b] += np.convolve(f[:, a, c], g[:, c, b])
    m = (n - 1) // 2
    return h * out[m:m + n]


def invert_real_line(f_samples, w, p=1.0, h=DEFAULT_STEP, epsilon=af.DEFAULT_EPSILON,
                     gamma=DEFAULT_GAMMA, force=False):
    """Solve ``(e + f)(e + g) = e`` for ``g`` sampled on the grid of ``f``.

    ``f`` lives on ``x_j = j h``, ``|j| <= m``.  The transform uses a zero
    padded DFT of length ``P >= 2 (2m + 1)``, so on the grid
    ``g = F^{-1}[(I + f^)^{-1} - I]`` solves the discrete equation
    ``f + g + h f*g = 0``; the reported residual re-checks it with linear
    convolution on the window.
    """
    if not p >= 1:
        raise InvalidInputError("p must be >= 1 on the real line")
    f = _as_blocks(f_samples)
    n, d = f.shape[0], f.shape[1]
    m = (n - 1) // 2
    P = 1 << int(math.ceil(math.log2(2 * n)))
    x = np.arange(-m, m + 1) * h

    F = _line_transform(f, h, P)
    sig = af._sigma_min(np.eye(d) + F)
    k = int(np.argmin(sig))
    freqs = 2 * np.pi * np.where(np.arange(P) < P // 2, np.arange(P), np.arange(P) - P) / (P * h)
    if sig[k] < epsilon:
        raise NotInvertibleOnLine(float(freqs[k]), float(sig[k]), float(epsilon))

    # frequency beyond which the Neumann series converges
    nyquist = np.pi / h
    T = 1.0
    while T < nyquist and max(np.linalg.norm(fourier_on_line(f, h, s * T), 2) for s in (1, -1)) >= 0.5:
        T *= 2.0
    T = min(T, nyquist)

    Ghat = np.linalg.inv(np.eye(d) + F) - np.eye(d)
    gc = np.fft.fft(Ghat, axis=0) / (P * h)
    g = gc[np.mod(np.arange(-m, m + 1), P)]
    resid = float(np.max(block_norms(f + g + line_convolve(f, g, h))))

    rho = rho_bounds_r(w, h)
    span = rho.rho2 - rho.rho1
    tol = 1e-4 * (span if span > 0 else 1.0)

    def margin_at(a):
        return float(np.min(_line_margins(f, h, P, a)))

    lip = _line_lipschitz(f, h)
    r2, out = af.radial_march(margin_at, lip, 0.0, float(rho.rho2), epsilon, tol, float(sig[k]))
    r1, inn = af.radial_march(margin_at, lip, 0.0, float(rho.rho1), epsilon, tol, float(sig[k]))

    if p == 1:
        nu = construct_nu_real_L1(w, r1, r2, force=force)
    else:
        nu = construct_nu_real_Lp(w, r1, r2, gamma=gamma, q=p / (p - 1.0), force=force, h=h)
    ns = rho_bounds_r(nu.weight, h)
    return RealInversionReport(
        x=x, g=g, nu=nu, residual=resid,
        margin=float(sig[k]), worst_frequency=float(freqs[k]), frequency_cap=float(T),
        strip=(float(r1), float(r2)), nu_strip=(ns.rho1, ns.rho2), padded_length=P,
        margin_fn=sorted(set(out) | set(inn)),
    )
