"""Matrix symbols on circles: evaluation, DFT coefficients, invertibility annulus.

The symbol of ``f`` is the Laurent polynomial ``F(z) = sum_n f(n) z^n``.
Grid evaluation on ``M`` equispaced nodes of a circle folds each index into
its FFT bin ``n mod M``; this is exact for any finite support, since
``exp(2 pi i j n / M)`` only depends on ``n mod M``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, NotInvertibleOnCircle, PoleError
from .seq_algebra import MatSeq

DEFAULT_M = 4096
DEFAULT_EPSILON = 1e-6
MAX_MARCH = 200_000


def _check_M(M):
    M = int(M)
    if M < 2 or M & (M - 1):
        raise InvalidInputError(f"node count must be a power of two, got {M}")
    return M


@dataclass(frozen=True)
class CircleGrid:
    radius: float
    M: int
    offset: float = 0.0  # in units of the node spacing

    def __post_init__(self):
        _check_M(self.M)
        if not self.radius > 0:
            raise InvalidInputError("radius must be positive")

    @property
    def nodes(self):
        return self.radius * np.exp(2j * np.pi * (np.arange(self.M) + self.offset) / self.M)

    def alias_free_for(self, f):
        return self.M >= 2 * f.halfwidth + 2


def eval_symbol(f, z):
    """``F(z)`` by two Horner passes (non-negative and negative powers); tail bound is 0."""
    z = complex(z)
    neg = f.indices < 0
    if z == 0:
        if np.any(neg):
            raise PoleError("symbol has negative powers and z = 0")
        return f[0], 0.0
    out = np.zeros((f.dim, f.dim), dtype=complex)
    if f.is_zero:
        return out, 0.0
    hi = int(max(f.indices[-1], 0))
    for n in range(hi, -1, -1):
        out = out * z + f[n]
    if np.any(neg):
        lo = int(f.indices[0])
        zi = 1.0 / z
        acc = np.zeros_like(out)
        for n in range(lo, 0):
            acc = acc * zi + f[n]
        out = out + acc * zi
    return out, 0.0


def symbol_on_grid(f, r, M, offset=0.0):
    """``F(r e^{2 pi i (j + offset)/M})`` for ``j = 0..M-1``, shape ``(M, d, d)``."""
    M = _check_M(M)
    if not r > 0:
        raise InvalidInputError("radius must be positive")
    bins = np.zeros((M, f.dim, f.dim), dtype=complex)
    if f.is_zero:
        return bins
    n = f.indices
    scale = np.exp(n * math.log(r))
    if offset:
        scale = scale * np.exp(2j * np.pi * n * offset / M)
    np.add.at(bins, np.mod(n, M), f.mats * scale[:, None, None])
    return M * np.fft.ifft(bins, axis=0)


def fourier_coefficients(samples, radius=1.0, halfwidth=None):
    """Coefficients ``|n| <= M/2 - 1`` from ``M`` samples on the circle of given radius.

    Uniform quadrature of the coefficient integral, i.e. an FFT; exact up to
    roundoff for Laurent polynomials of half-width below ``M/2``.
    """
    samples = np.asarray(samples, dtype=complex)
    if samples.ndim == 1:
        samples = samples[:, None, None]
    M = _check_M(samples.shape[0])
    c = np.fft.fft(samples, axis=0) / M
    K = M // 2 - 1 if halfwidth is None else min(int(halfwidth), M // 2 - 1)
    n = np.arange(-K, K + 1)
    mats = c[np.mod(n, M)]
    if radius != 1.0:
        mats = mats * np.exp(-n * math.log(radius))[:, None, None]
    return MatSeq(samples.shape[1], n, mats)


def _sigma_min(mats):
    if mats.shape[-1] == 1:
        return np.abs(mats[:, 0, 0])
    return np.linalg.svd(mats, compute_uv=False)[:, -1]


def margins_on_circle(f, r, M):
    return _sigma_min(symbol_on_grid(f, r, M))


def invertibility_margin(f, r, M=DEFAULT_M):
    """Smallest singular value of ``F`` over ``M`` nodes of the circle ``|z| = r``."""
    return float(np.min(margins_on_circle(f, r, M)))


def symbol_lipschitz(f, a, b):
    """Bound on ``|d/dr F(r e^{it})|`` for ``r`` in ``[a, b]``."""
    if f.is_zero:
        return 0.0
    n = f.indices.astype(float)
    nrm = f.norms()
    growth = np.maximum(np.exp((n - 1) * math.log(a)), np.exp((n - 1) * math.log(b)))
    return float(np.sum(np.abs(n) * nrm * growth))


def radial_march(margin_at, lipschitz_on, start, stop, epsilon, tol, m0=None):
    """Walk from ``start`` towards ``stop`` while the margin stays ``>= epsilon``.

    Steps are Lipschitz-certified: with margin ``m`` at ``r`` the next probe
    sits at distance ``0.9 (m - eps) / L`` where ``L`` bounds the derivative
    over the step (two passes so the bound covers the step it sizes), never
    smaller than ``tol``.  Returns ``(last good r, [(r, margin), ...])``.
    """
    direction = 1.0 if stop >= start else -1.0
    r = start
    m = margin_at(r) if m0 is None else m0
    samples = [(r, m)]
    for _ in range(MAX_MARCH):
        room = abs(stop - r)
        if room <= 0:
            break
        slack = m - epsilon
        lip = lipschitz_on(r, r)
        s = room if lip == 0 else min(room, slack / lip)
        if lip > 0 and s > 0:
            lo, hi = sorted((r, r + direction * s))
            lip = lipschitz_on(lo, hi)
            s = min(room, 0.9 * slack / lip) if lip > 0 else room
        s = min(room, max(tol, s))
        nxt = stop if s >= room else r + direction * s
        mn = margin_at(nxt)
        samples.append((nxt, mn))
        if mn < epsilon:
            break
        r, m = nxt, mn
    return r, samples


@dataclass(frozen=True)
class AnnulusReport:
    r1: float
    r2: float
    epsilon: float
    M: int
    radial_tol: float
    margin_fn: list = field(repr=False)
    tail_bound: float = 0.0
    margin_at_one: float = math.nan

    @property
    def min_sampled_margin(self):
        return min(m for r, m in self.margin_fn if self.r1 <= r <= self.r2)

    def to_dict(self):
        return {
            "r1": self.r1,
            "r2": self.r2,
            "epsilon": self.epsilon,
            "M": self.M,
            "radial_tol": self.radial_tol,
            "tail_bound": self.tail_bound,
            "margin_at_one": self.margin_at_one,
            "margin_fn": [[r, m] for r, m in self.margin_fn],
        }


def find_annulus(f, rho, epsilon=DEFAULT_EPSILON, M=DEFAULT_M):
    """Largest ``[r1, r2]`` inside ``[rho1, rho2]`` around 1 on which ``sigma_min(F) >= epsilon``.

    Raises :class:`NotInvertibleOnCircle` when the unit circle itself fails.
    """
    M = _check_M(M)
    if not epsilon > 0:
        raise InvalidInputError("epsilon must be positive")
    m1 = margins_on_circle(f, 1.0, M)
    j = int(np.argmin(m1))
    if m1[j] < epsilon:
        node = complex(np.exp(2j * np.pi * j / M))
        raise NotInvertibleOnCircle(node, float(m1[j]), float(epsilon))
    span = rho.rho2 - rho.rho1
    tol = 1e-4 * (span if span > 0 else 1.0)

    def margin_at(r):
        return invertibility_margin(f, r, M)

    def lip(a, b):
        return symbol_lipschitz(f, a, b)

    m0 = float(m1[j])
    r2, out = radial_march(margin_at, lip, 1.0, float(rho.rho2), epsilon, tol, m0)
    r1, inn = radial_march(margin_at, lip, 1.0, float(rho.rho1), epsilon, tol, m0)
    fn = sorted(set(out) | set(inn))
    return AnnulusReport(float(r1), float(r2), float(epsilon), M, tol, fn, 0.0, m0)
