"""Block operators on a finite window and the decay of their inverses.

Blocks are indexed by ``i, j in [-N, N]``; block ``(i, j)`` of a Toeplitz
operator built from a symbol ``f`` is ``f(i - j)``.  The resolution of the
identity is the orthogonal family of coordinate-block projections, so the
norm of the ``k``-th diagonal part equals ``d_A(k)``, the largest block norm
on that diagonal.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InvalidInputError, SingularOperatorError, WindowError
from .seq_algebra import MatSeq, PNormValue, block_norms
from .weights_z import DEFAULT_GAMMA, construct_nu_p_gt_1, construct_nu_p_le_1
from .wiener_engine import invert_on_circle, trend_verdict
from . import annulus_fourier as af

SINGULAR_COND = 1e14


class BlockOperator:
    """Dense ``(2N+1) d`` square matrix viewed as ``(2N+1)^2`` blocks of size ``d``."""

    __slots__ = ("dim", "N", "matrix", "kind", "source", "flags")

    def __init__(self, dim, N, matrix, kind="general", source=None, flags=None):
        dim, N = int(dim), int(N)
        if dim < 1 or N < 0:
            raise InvalidInputError("need dim >= 1 and N >= 0")
        n = (2 * N + 1) * dim
        matrix = np.asarray(matrix, dtype=complex)
        if matrix.shape != (n, n):
            raise InvalidInputError(f"expected a {n}x{n} matrix, got {matrix.shape}")
        if kind not in ("toeplitz", "general"):
            raise InvalidInputError(f"unknown operator kind {kind!r}")
        self.dim, self.N, self.matrix, self.kind = dim, N, matrix, kind
        self.source = source
        self.flags = dict(flags or {})

    @property
    def size(self):
        return 2 * self.N + 1

    @property
    def blocks(self):
        """Array ``(2N+1, 2N+1, d, d)``; ``blocks[i+N, j+N]`` is block ``(i, j)``."""
        s, d = self.size, self.dim
        return self.matrix.reshape(s, d, s, d).transpose(0, 2, 1, 3)

    def block(self, i, j):
        return self.blocks[i + self.N, j + self.N].copy()

    @classmethod
    def from_blocks(cls, dim, N, mapping, kind="general"):
        s = 2 * N + 1
        arr = np.zeros((s, s, dim, dim), dtype=complex)
        for (i, j), m in mapping.items():
            if abs(i) > N or abs(j) > N:
                raise InvalidInputError(f"block ({i}, {j}) outside window [-{N}, {N}]")
            arr[i + N, j + N] = np.atleast_2d(np.asarray(m, dtype=complex))
        return cls(dim, N, arr.transpose(0, 2, 1, 3).reshape(s * dim, s * dim), kind)

    @classmethod
    def identity(cls, dim, N):
        return symbol_to_operator(MatSeq.identity(dim), N)

    def __add__(self, other):
        kind = "toeplitz" if self.kind == other.kind == "toeplitz" else "general"
        src = self.source + other.source if kind == "toeplitz" else None
        return BlockOperator(self.dim, self.N, self.matrix + other.matrix, kind, src)

    def __matmul__(self, other):
        return BlockOperator(self.dim, self.N, self.matrix @ other.matrix)

    def operator_norm(self):
        return float(np.linalg.norm(self.matrix, 2))

    def to_dict(self):
        d = {"dim": self.dim, "N": self.N, "kind": self.kind}
        if self.kind == "toeplitz" and self.source is not None:
            d["symbol"] = self.source.to_dict()
            return d
        B = self.blocks
        ii, jj = np.nonzero(np.any(B != 0, axis=(2, 3)))
        d["blocks"] = [
            {"i": int(i) - self.N, "j": int(j) - self.N, "re": B[i, j].real.tolist(), "im": B[i, j].imag.tolist()}
            for i, j in zip(ii, jj)
        ]
        return d

    @classmethod
    def from_dict(cls, d):
        try:
            N = int(d["N"])
            if "symbol" in d:
                return symbol_to_operator(MatSeq.from_dict(d["symbol"]), N)
            dim = int(d["dim"])
            mapping = {}
            for b in d["blocks"]:
                re = np.asarray(b["re"], dtype=float)
                im = np.asarray(b.get("im", np.zeros_like(re)), dtype=float)
                mapping[(int(b["i"]), int(b["j"]))] = re + 1j * im
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f"malformed operator document: {exc}") from None
        op = cls.from_blocks(dim, N, mapping)
        if d.get("kind") == "toeplitz":
            return symbol_to_operator(symbol_of(BlockOperator(dim, N, op.matrix, "toeplitz")), N)
        return op

    def __repr__(self):
        return f"BlockOperator(dim={self.dim}, N={self.N}, kind={self.kind!r})"


def symbol_to_operator(f, N):
    """Toeplitz operator on ``[-N, N]`` with block ``(i, j) = f(i - j)``."""
    N = int(N)
    s, d = 2 * N + 1, f.dim
    diffs = np.arange(s)[:, None] - np.arange(s)[None, :]
    arr = f.dense(-2 * N, 2 * N)[diffs + 2 * N]
    mat = arr.transpose(0, 2, 1, 3).reshape(s * d, s * d)
    kept = MatSeq(d, [n for n in f.support if abs(n) <= 2 * N],
                  np.array([f[n] for n in f.support if abs(n) <= 2 * N]).reshape(-1, d, d))
    flags = {"truncated_symbol": True} if len(kept) != len(f) else {}
    return BlockOperator(d, N, mat, "toeplitz", kept, flags)


def symbol_of(op):
    """Diagonal coefficients ``k in [-2N, 2N]`` of a Toeplitz operator."""
    if op.kind != "toeplitz":
        raise InvalidInputError("symbol_of needs a toeplitz operator")
    B, N, s = op.blocks, op.N, op.size
    ks = np.arange(-2 * N, 2 * N + 1)
    mats = np.array([B[max(k, 0), max(k, 0) - k] for k in ks])
    for k in ks:
        diag = np.diagonal(B, offset=-k, axis1=0, axis2=1)
        if not np.allclose(diag, mats[k + 2 * N][:, :, None], rtol=0, atol=1e-12 * (1 + np.abs(mats).max())):
            raise InvalidInputError(f"operator is not block Toeplitz along diagonal {k}")
    return MatSeq(op.dim, ks, mats)


def resolution_constants(op):
    """``(C_R, M_R)`` of the coordinate-block resolution: both are 1 for orthogonal projections."""
    return 1.0, 1.0


def diagonal_extract(op, n):
    """Operator keeping only blocks with ``i - j = n``."""
    n = int(n)
    s, d = op.size, op.dim
    if abs(n) > 2 * op.N:
        return BlockOperator(d, op.N, np.zeros_like(op.matrix), op.kind,
                             MatSeq(d) if op.kind == "toeplitz" else None, {"out_of_range": True})
    mask = (np.arange(s)[:, None] - np.arange(s)[None, :]) == n
    B = op.blocks * mask[:, :, None, None]
    mat = B.transpose(0, 2, 1, 3).reshape(s * d, s * d)
    src = None
    if op.kind == "toeplitz" and op.source is not None:
        src = MatSeq.delta(n, op.source[n]) if n in op.source.support else MatSeq(d)
    return BlockOperator(d, op.N, mat, op.kind, src)


def diagonal_norms(op):
    """``d_A(k)`` for ``k = -2N..2N`` as an array (index ``k + 2N``)."""
    s = op.size
    nrm = block_norms(op.blocks.reshape(s * s, op.dim, op.dim)).reshape(s, s)
    return np.array([np.max(np.diagonal(nrm, offset=-k)) for k in range(-2 * op.N, 2 * op.N + 1)])


@dataclass(frozen=True)
class DecayProfile:
    d_table: dict
    p: float
    weight: object = field(repr=False)
    norm_value: PNormValue
    curve: np.ndarray = field(repr=False)
    verdict: str
    clipped: bool = False

    def rows(self):
        """CSV rows ``(k, d_A(k), w(k), term)``."""
        ks = np.array(sorted(self.d_table))
        wk = np.exp(self.weight.log(ks))
        dk = np.array([self.d_table[k] for k in ks])
        return [(int(k), float(a), float(b), float(a ** self.p * b ** self.p)) for k, a, b in zip(ks, dk, wk)]

    def to_dict(self):
        return {
            "p": self.p,
            "d_table": {str(k): v for k, v in sorted(self.d_table.items())},
            "norm_value": self.norm_value.to_dict(),
            "curve": self.curve.tolist(),
            "verdict": self.verdict,
            "clipped": self.clipped,
            "weight": self.weight.to_dict(),
        }


def decay_profile(op, w, p, clip=False):
    """``d_A`` table and ``sum_k d_A(k)^p w(k)^p`` (``p``-th root for ``p > 1``).

    The curve holds partial sums over ``|k| <= K`` for ``K = 0..2N``.
    """
    if not p > 0:
        raise InvalidInputError("p must be > 0")
    K = 2 * op.N
    lim = w.domain_limit()
    clipped = False
    if lim is not None and lim < K:
        if not clip:
            raise WindowError(f"weight window {lim} does not cover diagonals up to {K}")
        K, clipped = lim, True
    dA = diagonal_norms(op)
    ks = np.arange(-K, K + 1)
    dk = dA[ks + 2 * op.N]
    with np.errstate(divide="ignore"):
        terms = np.exp(p * (np.log(dk) + w.log(ks)))
    per = np.zeros(K + 1)
    np.add.at(per, np.abs(ks), terms)
    curve = np.cumsum(per)
    total = float(curve[-1])
    nv = PNormValue(float(p), total, "p_le_1") if p <= 1 else PNormValue(float(p), total ** (1.0 / p), "p_gt_1")
    table = {int(k): float(v) for k, v in zip(ks, dk)}
    return DecayProfile(table, float(p), w, nv, curve, trend_verdict(curve), clipped)


@dataclass(frozen=True)
class DecayCheckReport:
    nu: object
    condition: float
    inverse: BlockOperator = field(repr=False)
    profile_omega: DecayProfile
    profile_nu: DecayProfile
    interior_agreement: Optional[float]
    inversion: object = field(repr=False, default=None)

    @property
    def verdict_omega(self):
        return self.profile_omega.verdict

    @property
    def verdict_nu(self):
        return self.profile_nu.verdict

    def to_dict(self):
        return {
            "condition": self.condition,
            "interior_agreement": self.interior_agreement,
            "verdict_omega": self.verdict_omega,
            "verdict_nu": self.verdict_nu,
            "nu": self.nu.to_dict(),
            "profile_omega": self.profile_omega.to_dict(),
            "profile_nu": self.profile_nu.to_dict(),
            "annulus": None if self.inversion is None else self.inversion.annulus.to_dict(),
        }


def inverse_decay_check(op, w, p=1.0, epsilon=af.DEFAULT_EPSILON, r1=None, r2=None,
                        M=af.DEFAULT_M, gamma=DEFAULT_GAMMA, force=False):
    """Invert the finite section and profile the inverse under ``w`` and under ``nu``.

    Toeplitz operators take ``nu`` from the annulus of their symbol and are
    compared, over the central third of the window, with the coefficients of
    the inverse symbol.  General operators need explicit radii ``r1, r2``.
    """
    cond = float(np.linalg.cond(op.matrix))
    if not np.isfinite(cond) or cond > SINGULAR_COND:
        raise SingularOperatorError(cond)
    inv = BlockOperator(op.dim, op.N, np.linalg.inv(op.matrix))
    inversion, agreement = None, None
    if op.kind == "toeplitz":
        f = op.source if op.source is not None else symbol_of(op)
        inversion = invert_on_circle(f, w, p, M, epsilon, gamma, force)
        nu = inversion.nu
        s = op.size
        lo, hi = s // 3, s - s // 3
        idx = np.arange(lo, hi) - op.N
        diffs = idx[:, None] - idx[None, :]
        ref = inversion.g.dense(-2 * op.N, 2 * op.N)[diffs + 2 * op.N]
        got = inv.blocks[lo:hi, lo:hi]
        err = block_norms((got - ref).reshape(-1, op.dim, op.dim))
        agreement = float(err.max()) if err.size else 0.0
    else:
        if r1 is None or r2 is None:
            raise InvalidInputError("general operators need radii r1 and r2")
        if p <= 1:
            nu = construct_nu_p_le_1(w, r1, r2, force=force)
        else:
            nu = construct_nu_p_gt_1(w, r1, r2, gamma=gamma, q=p / (p - 1.0), force=force)
    return DecayCheckReport(
        nu=nu,
        condition=cond,
        inverse=inv,
        profile_omega=decay_profile(inv, w, p, clip=True),
        profile_nu=decay_profile(inv, nu.weight, p, clip=True),
        interior_agreement=agreement,
        inversion=inversion,
    )


def load_operator(text):
    return BlockOperator.from_dict(json.loads(text))
