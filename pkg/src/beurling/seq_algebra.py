"""Finitely supported matrix-valued sequences and the weighted convolution algebra."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DimensionMismatchError, InvalidInputError, WindowError

CLEANUP_RTOL = 1e-14


def block_norms(mats, kind="spectral"):
    """Norms of a stack of square blocks, shape ``(k, d, d)`` -> ``(k,)``."""
    mats = np.asarray(mats)
    if mats.shape[0] == 0:
        return np.zeros(0)
    if kind == "spectral":
        if mats.shape[-1] == 1:
            return np.abs(mats[:, 0, 0])
        return np.linalg.svd(mats, compute_uv=False)[:, 0]
    if kind == "frobenius":
        return np.sqrt(np.sum(np.abs(mats) ** 2, axis=(-2, -1)))
    raise InvalidInputError(f"unknown block norm {kind!r}")


class MatSeq:
    """Map ``Z -> C^{d x d}`` with finite support, kept in canonical form.

    Indices are stored sorted in ``indices`` with the blocks in ``mats``
    (shape ``(k, d, d)``); blocks whose spectral norm falls below
    ``1e-14`` times the largest are dropped on construction.
    """

    __slots__ = ("dim", "indices", "mats")

    def __init__(self, dim, indices=(), mats=None, cleanup=True):
        dim = int(dim)
        if dim < 1:
            raise InvalidInputError("dim must be >= 1")
        idx = np.asarray(indices, dtype=np.int64).reshape(-1)
        if mats is None:
            mats = np.zeros((0, dim, dim), dtype=complex)
        mats = np.asarray(mats, dtype=complex)
        if mats.ndim != 3 or mats.shape[1:] != (dim, dim) or mats.shape[0] != idx.size:
            raise DimensionMismatchError(f"expected {idx.size} blocks of shape {dim}x{dim}, got {mats.shape}")
        if np.any(~np.isfinite(mats)):
            raise InvalidInputError("non-finite entries")
        if idx.size:
            # merge duplicates in a fixed order
            uniq, inv = np.unique(idx, return_inverse=True)
            if uniq.size != idx.size:
                acc = np.zeros((uniq.size, dim, dim), dtype=complex)
                np.add.at(acc, inv, mats)
                idx, mats = uniq, acc
            else:
                order = np.argsort(idx, kind="stable")
                idx, mats = idx[order], mats[order]
            if cleanup:
                nrm = block_norms(mats)
                top = nrm.max() if nrm.size else 0.0
                keep = nrm > CLEANUP_RTOL * top if top > 0 else np.zeros(idx.size, bool)
                idx, mats = idx[keep], mats[keep]
        self.dim = dim
        self.indices = idx
        self.mats = mats

    # -- constructors
    @classmethod
    def zero(cls, dim=1):
        return cls(dim)

    @classmethod
    def delta(cls, n, mat):
        mat = np.atleast_2d(np.asarray(mat, dtype=complex))
        return cls(mat.shape[0], [n], mat[None])

    @classmethod
    def identity(cls, dim=1):
        return cls.delta(0, np.eye(dim))

    @classmethod
    def from_mapping(cls, mapping, dim=None):
        items = sorted(mapping.items())
        if not items:
            return cls(dim or 1)
        mats = np.array([np.atleast_2d(np.asarray(m, dtype=complex)) for _, m in items])
        return cls(mats.shape[1] if dim is None else dim, [k for k, _ in items], mats)

    @classmethod
    def scalar(cls, coeffs):
        """1x1 sequence from ``{n: c}``."""
        return cls.from_mapping({n: [[c]] for n, c in coeffs.items()}, dim=1)

    # -- access
    def __getitem__(self, n):
        pos = np.searchsorted(self.indices, n)
        if pos < self.indices.size and self.indices[pos] == n:
            return self.mats[pos].copy()
        return np.zeros((self.dim, self.dim), dtype=complex)

    def __len__(self):
        return int(self.indices.size)

    def __iter__(self):
        for n, m in zip(self.indices, self.mats):
            yield int(n), m

    @property
    def support(self):
        return [int(n) for n in self.indices]

    @property
    def halfwidth(self):
        return int(np.max(np.abs(self.indices))) if self.indices.size else 0

    @property
    def is_zero(self):
        return self.indices.size == 0

    def norms(self, kind="spectral"):
        return block_norms(self.mats, kind)

    def dense(self, lo, hi):
        """Blocks for ``n = lo..hi`` as an array ``(hi-lo+1, d, d)``."""
        out = np.zeros((hi - lo + 1, self.dim, self.dim), dtype=complex)
        sel = (self.indices >= lo) & (self.indices <= hi)
        out[self.indices[sel] - lo] = self.mats[sel]
        return out

    # -- linear structure
    def _check(self, other):
        if not isinstance(other, MatSeq):
            return NotImplemented
        if other.dim != self.dim:
            raise DimensionMismatchError(f"dimension mismatch: {self.dim} vs {other.dim}")
        return None

    def __add__(self, other):
        if (r := self._check(other)) is not None:
            return r
        return MatSeq(self.dim, np.concatenate([self.indices, other.indices]),
                      np.concatenate([self.mats, other.mats]))

    def __neg__(self):
        return MatSeq(self.dim, self.indices, -self.mats, cleanup=False)

    def __sub__(self, other):
        if (r := self._check(other)) is not None:
            return r
        return self + (-other)

    def __mul__(self, lam):
        if isinstance(lam, MatSeq):
            return NotImplemented
        return MatSeq(self.dim, self.indices, complex(lam) * self.mats)

    __rmul__ = __mul__

    def __matmul__(self, other):
        return convolve(self, other)

    def max_abs_diff(self, other):
        """Largest block spectral-norm difference over the union of supports."""
        d = self - other
        return float(d.norms().max()) if len(d) else 0.0

    def allclose(self, other, atol=1e-12):
        return self.dim == other.dim and self.max_abs_diff(other) <= atol

    def __eq__(self, other):
        if not isinstance(other, MatSeq):
            return NotImplemented
        return (self.dim == other.dim and np.array_equal(self.indices, other.indices)
                and np.array_equal(self.mats, other.mats))

    __hash__ = None

    # -- serialization
    def to_dict(self):
        return {
            "dim": self.dim,
            "entries": [
                {"n": int(n), "re": m.real.tolist(), "im": m.imag.tolist()} for n, m in self
            ],
        }

    @classmethod
    def from_dict(cls, d):
        try:
            dim = int(d["dim"])
            idx, mats = [], []
            for e in d["entries"]:
                re = np.asarray(e["re"], dtype=float)
                im = np.asarray(e.get("im", np.zeros_like(re)), dtype=float)
                idx.append(int(e["n"]))
                mats.append(np.atleast_2d(re + 1j * im))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f"malformed sequence document: {exc}") from None
        if not mats:
            return cls(dim)
        return cls(dim, idx, np.array(mats))

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def __repr__(self):
        return f"MatSeq(dim={self.dim}, support={self.support})"


def convolve(f, g):
    """``(f * g)(n) = sum_m f(m) g(n - m)``, products taken in that order."""
    if f.dim != g.dim:
        raise DimensionMismatchError(f"dimension mismatch: {f.dim} vs {g.dim}")
    if f.is_zero or g.is_zero:
        return MatSeq(f.dim)
    lo = int(f.indices[0] + g.indices[0])
    hi = int(f.indices[-1] + g.indices[-1])
    out = np.zeros((hi - lo + 1, f.dim, f.dim), dtype=complex)
    # loop over the shorter support, batch the longer one
    if len(f) <= len(g):
        for a, A in f:
            out[a + g.indices - lo] += A @ g.mats
    else:
        for b, B in g:
            out[f.indices + b - lo] += f.mats @ B
    return MatSeq(f.dim, np.arange(lo, hi + 1), out)


@dataclass(frozen=True)
class PNormValue:
    p: float
    value: float
    regime: str

    def to_dict(self):
        return asdict(self)


def weighted_terms(f, w, p, block_norm="spectral"):
    """Per-index terms ``||f(n)||^p w(n)^p`` (log-space for the weight)."""
    if not p > 0:
        raise InvalidInputError("p must be > 0")
    lim = w.domain_limit()
    nrm = f.norms(block_norm)
    if lim is not None and f.indices.size and np.max(np.abs(f.indices)) > lim:
        inside = np.abs(f.indices) <= lim
        clipped = float(np.sum(nrm[inside] ** p * np.exp(p * w.log(f.indices[inside]))))
        raise WindowError(f"support exceeds the weight window [-{lim}, {lim}]", clipped_value=clipped)
    with np.errstate(divide="ignore"):
        return np.exp(p * (np.log(nrm) + w.log(f.indices)))


def p_norm(f, w, p, block_norm="spectral"):
    """``sum ||f(n)||^p w(n)^p`` for ``p <= 1``, its ``p``-th root for ``p > 1``."""
    total = float(np.sum(weighted_terms(f, w, p, block_norm)))
    if p <= 1:
        return PNormValue(float(p), total, "p_le_1")
    return PNormValue(float(p), total ** (1.0 / p), "p_gt_1")


@dataclass(frozen=True, eq=False)
class Unitized:
    """Element ``(f, alpha)`` of the unitization, product ``(fg + alpha g + beta f, alpha beta)``."""

    seq: MatSeq
    scalar: complex = 0.0

    def __mul__(self, other):
        if not isinstance(other, Unitized):
            return NotImplemented
        a, b = self.scalar, other.scalar
        return Unitized(convolve(self.seq, other.seq) + a * other.seq + b * self.seq, a * b)

    def __add__(self, other):
        return Unitized(self.seq + other.seq, self.scalar + other.scalar)

    def norm(self, w, p):
        """``|f| + |alpha|^p`` for ``p <= 1`` and ``|f| + |alpha|`` otherwise."""
        v = p_norm(self.seq, w, p).value
        return v + (abs(self.scalar) ** p if p <= 1 else abs(self.scalar))

    def allclose(self, other, atol=1e-12):
        return self.seq.allclose(other.seq, atol) and abs(self.scalar - other.scalar) <= atol


def unitize(f, scalar=0.0):
    return Unitized(f, complex(scalar))
