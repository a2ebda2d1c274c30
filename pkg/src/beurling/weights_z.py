"""Submultiplicative weights on the integers.

A weight is a map ``w: Z -> [1, inf)`` with ``w(m + n) <= w(m) w(n)``.  This
module provides the standard symbolic families, tabulated weights, the
growth indices ``rho1 <= 1 <= rho2``, the almost-monotone-algebra checks
used for ``1 < p < inf`` and the two constructions of a smaller weight
``nu`` attached to an invertibility annulus.

All finite checks run on the window ``[-N, N]``.  Symbolic families have
closed-form growth indices; tabulated ones only produce window estimates
(``exact=False``) and the ``nu`` constructions refuse them unless
``force=True``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .errors import EstimateError, InvalidInputError, PreconditionError, WindowError

TOL = 1e-9
DEFAULT_WINDOW = 64
DEFAULT_GAMMA = 0.5

KINDS = ("constant", "exponential", "polynomial", "subexponential", "product", "table", "split")

CASE_TAGS = ("admissible_identity", "left_flat", "right_flat", "interior")


class WeightZ:
    """A weight on Z.

    Build instances with the classmethods (:meth:`constant`,
    :meth:`exponential`, ...) rather than calling the constructor.  ``scale``
    multiplies the whole weight by a constant ``C >= 1``, which keeps the
    weight axioms.  ``split`` is the piecewise weight ``neg(n)`` for ``n < 0``
    and ``pos(n)`` for ``n >= 0``; it is how the constructed ``nu`` weights
    with an envelope on one side are represented.
    """

    __slots__ = ("kind", "window", "scale", "params")

    def __init__(self, kind, window=DEFAULT_WINDOW, scale=1.0, **params):
        if kind not in KINDS:
            raise InvalidInputError(f"unknown weight kind {kind!r}")
        window = int(window)
        if window < 0:
            raise InvalidInputError("window must be non-negative")
        if not scale >= 1.0:
            raise InvalidInputError("scale must be >= 1")
        self.kind = kind
        self.window = window
        self.scale = float(scale)
        self.params = params
        self._validate()

    def _validate(self):
        p = self.params
        if self.kind == "constant":
            if not p["c"] >= 1.0:
                raise InvalidInputError("constant weight needs c >= 1")
        elif self.kind == "exponential":
            if not (p["b_neg"] >= 1.0 and p["b_pos"] >= 1.0):
                raise InvalidInputError("exponential weight needs bases >= 1")
        elif self.kind == "polynomial":
            if not p["a"] >= 0.0:
                raise InvalidInputError("polynomial weight needs a >= 0")
        elif self.kind == "subexponential":
            if not (p["c"] > 0.0 and 0.0 < p["gamma"] < 1.0):
                raise InvalidInputError("subexponential weight needs c > 0 and gamma in (0, 1)")
        elif self.kind == "product":
            if not p["factors"]:
                raise InvalidInputError("product weight needs at least one factor")
        elif self.kind == "table":
            v = p["values"]
            if v.ndim != 1 or v.size != 2 * self.window + 1:
                raise InvalidInputError("table needs 2*window+1 values ordered n=-N..N")
            if np.any(~np.isfinite(v)) or np.any(v < 1.0 - 1e-12):
                raise InvalidInputError("table values must be finite and >= 1")

    # -- constructors -------------------------------------------------
    @classmethod
    def constant(cls, c=1.0, window=DEFAULT_WINDOW):
        return cls("constant", window, c=float(c))

    @classmethod
    def exponential(cls, b_neg, b_pos=None, window=DEFAULT_WINDOW):
        b_pos = b_neg if b_pos is None else b_pos
        return cls("exponential", window, b_neg=float(b_neg), b_pos=float(b_pos))

    @classmethod
    def polynomial(cls, a, window=DEFAULT_WINDOW):
        return cls("polynomial", window, a=float(a))

    @classmethod
    def subexponential(cls, c, gamma=DEFAULT_GAMMA, window=DEFAULT_WINDOW):
        return cls("subexponential", window, c=float(c), gamma=float(gamma))

    @classmethod
    def product(cls, *factors, window=None):
        if window is None:
            window = min(f.window for f in factors) if factors else DEFAULT_WINDOW
        return cls("product", window, factors=tuple(factors))

    @classmethod
    def table(cls, values):
        v = np.asarray(values, dtype=float).copy()
        v.setflags(write=False)
        if v.size % 2 != 1:
            raise InvalidInputError("table needs an odd number of values (n=-N..N)")
        return cls("table", (v.size - 1) // 2, values=v)

    @classmethod
    def split(cls, neg, pos, window=None):
        if window is None:
            window = min(neg.window, pos.window)
        return cls("split", window, neg=neg, pos=pos)

    def scaled(self, C):
        """Return ``C * self`` (``C >= 1``)."""
        return WeightZ(self.kind, self.window, self.scale * float(C), **self.params)

    def with_window(self, window):
        if self.kind == "table":
            raise InvalidInputError("a table weight's window is fixed by its values")
        return WeightZ(self.kind, window, self.scale, **self.params)

    # -- evaluation ---------------------------------------------------
    def domain_limit(self):
        """Largest |n| at which the weight is defined, or None when unbounded."""
        if self.kind == "table":
            return self.window
        if self.kind == "product":
            lims = [f.domain_limit() for f in self.params["factors"]]
            lims = [x for x in lims if x is not None]
            return min(lims) if lims else None
        if self.kind == "split":
            lims = [x for x in (self.params["neg"].domain_limit(), self.params["pos"].domain_limit())
                    if x is not None]
            return min(lims) if lims else None
        return None

    @property
    def is_symbolic(self):
        return self.domain_limit() is None

    def log(self, n):
        """Natural log of the weight at integer(s) ``n``."""
        n = np.asarray(n)
        out = self._log(n)
        if self.scale != 1.0:
            out = out + math.log(self.scale)
        return out

    def _log(self, n):
        p = self.params
        k = self.kind
        if k == "constant":
            return np.full(n.shape, math.log(p["c"]))
        if k == "exponential":
            nf = n.astype(float)
            return np.where(nf < 0, -nf * math.log(p["b_neg"]), nf * math.log(p["b_pos"]))
        if k == "polynomial":
            return p["a"] * np.log1p(np.abs(n.astype(float)))
        if k == "subexponential":
            return p["c"] * np.abs(n.astype(float)) ** p["gamma"]
        if k == "product":
            return sum(f.log(n) for f in p["factors"])
        if k == "table":
            if n.size and np.max(np.abs(n)) > self.window:
                raise WindowError(f"table weight evaluated outside its window [-{self.window}, {self.window}]")
            return np.log(p["values"][n.astype(int) + self.window])
        # split
        out = np.empty(n.shape, dtype=float)
        neg = n < 0
        if np.any(neg):
            out[neg] = p["neg"].log(n[neg])
        if np.any(~neg):
            out[~neg] = p["pos"].log(n[~neg])
        return out

    def __call__(self, n):
        return np.exp(self.log(n))

    def values_on(self, window=None):
        N = self.effective_window(window)
        ns = np.arange(-N, N + 1)
        return ns, self(ns)

    def effective_window(self, window=None):
        N = self.window if window is None else int(window)
        lim = self.domain_limit()
        if lim is not None and N > lim:
            N = lim
        return N

    def is_constant(self, window=None):
        _, v = self.values_on(window)
        return bool(np.all(np.abs(v - v[0]) <= 1e-12 * v[0]))

    # -- serialization ------------------------------------------------
    def to_dict(self):
        p = self.params
        d = {"kind": self.kind}
        if self.kind == "product":
            d["factors"] = [f.to_dict() for f in p["factors"]]
        elif self.kind == "split":
            d["neg"] = p["neg"].to_dict()
            d["pos"] = p["pos"].to_dict()
        elif self.kind == "table":
            d["values"] = [float(x) for x in p["values"]]
        else:
            d.update({key: float(val) for key, val in p.items()})
        if self.scale != 1.0:
            d["scale"] = self.scale
        d["window"] = self.window
        return d

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict) or "kind" not in d:
            raise InvalidInputError("weight spec must be an object with a 'kind' field")
        kind = d["kind"]
        window = int(d.get("window", DEFAULT_WINDOW))
        try:
            if kind == "constant":
                w = cls.constant(d.get("c", 1.0), window)
            elif kind == "exponential":
                if "b" in d:
                    w = cls.exponential(d["b"], d["b"], window)
                else:
                    w = cls.exponential(d["b_neg"], d["b_pos"], window)
            elif kind == "polynomial":
                w = cls.polynomial(d["a"], window)
            elif kind == "subexponential":
                w = cls.subexponential(d["c"], d.get("gamma", DEFAULT_GAMMA), window)
            elif kind == "product":
                w = cls.product(*[cls.from_dict(f) for f in d["factors"]], window=window)
            elif kind == "table":
                w = cls.table(d["values"])
                if "window" in d and int(d["window"]) != w.window:
                    raise InvalidInputError("table 'window' disagrees with the number of values")
            elif kind == "split":
                w = cls.split(cls.from_dict(d["neg"]), cls.from_dict(d["pos"]), window=window)
            else:
                raise InvalidInputError(f"unknown weight kind {kind!r}")
        except KeyError as exc:
            raise InvalidInputError(f"weight spec of kind {kind!r} is missing field {exc}") from None
        if "scale" in d:
            w = w.scaled(d["scale"])
        return w

    def __repr__(self):
        return f"WeightZ({self.to_dict()!r})"


# -- reports ----------------------------------------------------------


@dataclass(frozen=True)
class RhoPair:
    rho1: float
    rho2: float
    exact: bool

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class SubmultReport:
    max_excess: float
    argmax: tuple
    passes: bool
    window: int

    def to_dict(self):
        d = asdict(self)
        d["argmax"] = list(self.argmax)
        return d


@dataclass(frozen=True)
class AmawReport:
    q: float
    conv_ratio_max: float
    conv_ratio_zero: float
    argmax_n: float
    scaling_C: float
    tail_sum: float
    summability: str
    K_neg: Optional[float]
    K_pos: Optional[float]
    passes_strict: bool
    window: float

    @property
    def is_amaw(self):
        """Strict window pass plus summability not known to fail."""
        return self.passes_strict and self.summability != "divergent"

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class QSumReport:
    x: float
    q: float
    value: float
    passes: bool
    in_range: bool

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True, eq=False)
class NuWeight:
    """A constructed weight ``nu`` together with its certificate data.

    ``weight`` is the evaluable ``nu``; ``base`` is the weight it was built
    from.  ``sandwich_max`` is ``max nu/w`` over the window and ``nu_min`` the
    smallest value of ``nu`` there, so the certificate ``1 <= nu <= K w``
    reads ``nu_min >= 1`` and ``sandwich_max <= K``.
    """

    weight: object
    base: object
    case_tag: str
    r1: float
    r2: float
    gamma: Optional[float]
    K: float
    sandwich_max: float
    nu_min: float
    estimated: bool = False
    amaw: Optional[AmawReport] = None
    envelope_side: Optional[str] = None

    def __call__(self, x):
        return self.weight(x)

    def log(self, x):
        return self.weight.log(x)

    @property
    def certified(self):
        return self.nu_min >= 1.0 - 1e-12 and self.sandwich_max <= self.K * (1.0 + 1e-12)

    def to_dict(self):
        return {
            "case_tag": self.case_tag,
            "r1": self.r1,
            "r2": self.r2,
            "gamma": self.gamma,
            "K": self.K,
            "sandwich_max": self.sandwich_max,
            "nu_min": self.nu_min,
            "estimated": self.estimated,
            "envelope_side": self.envelope_side,
            "base": self.base.to_dict(),
            "nu": self.weight.to_dict(),
            "amaw": None if self.amaw is None else self.amaw.to_dict(),
        }


# -- growth indices ---------------------------------------------------


def _exact_side(w, side):
    """Closed-form rho on one side, or None when a table is involved."""
    k, p = w.kind, w.params
    if k in ("constant", "polynomial", "subexponential"):
        return 1.0
    if k == "exponential":
        return 1.0 / p["b_neg"] if side == "neg" else p["b_pos"]
    if k == "product":
        vals = [_exact_side(f, side) for f in p["factors"]]
        if any(v is None for v in vals):
            return None
        return float(np.prod(vals))
    if k == "split":
        return _exact_side(p[side], side)
    return None


def _estimate_side(w, side):
    N = w.effective_window()
    if N < 1:
        raise InvalidInputError("cannot estimate growth indices on an empty window")
    n = np.arange(1, N + 1)
    if w.is_constant(N):
        # constant on the window: extend as a constant, whose indices are 1
        return 1.0
    if side == "neg":
        return float(np.max(np.exp(-w.log(-n) / n)))
    return float(np.min(np.exp(w.log(n) / n)))


def rho_bounds(w):
    """Growth indices ``(rho1, rho2)`` of ``w``.

    ``rho1 = sup w(-n)^(-1/n)`` and ``rho2 = inf w(n)^(1/n)`` over n >= 1.
    Symbolic kinds use the limits (which equal the sup/inf for weights);
    anything involving a table is estimated on the window.
    """
    exact = True
    out = []
    for side in ("neg", "pos"):
        v = _exact_side(w, side)
        if v is None:
            v = _estimate_side(w, side)
            exact = False
        out.append(v)
    if w.kind == "table" and w.window < 1:
        raise InvalidInputError("empty table window")
    return RhoPair(out[0], out[1], exact)


def check_submultiplicative(w, window=None):
    """Scan all pairs ``m, n`` with ``m, n, m+n`` in the window."""
    N = w.effective_window(window)
    ns = np.arange(-N, N + 1)
    lw = w.log(ns)
    i = np.arange(ns.size)
    s = i[:, None] + i[None, :] - N
    valid = (s >= 0) & (s <= 2 * N)
    logratio = lw[np.clip(s, 0, 2 * N)] - lw[:, None] - lw[None, :]
    logratio[~valid] = -np.inf
    best = float(np.max(logratio))
    # ties resolve to the last (largest m, then n) pair
    flat = np.flatnonzero(logratio == best)[-1]
    a, b = np.unravel_index(flat, s.shape)
    excess = math.expm1(best)
    return SubmultReport(excess, (int(ns[a]), int(ns[b])), excess <= TOL, N)


def check_admissible(w):
    rho = rho_bounds(w)
    ok = abs(rho.rho1 - 1.0) <= TOL and abs(rho.rho2 - 1.0) <= TOL
    return ok, rho


def _growth(w, side):
    """Asymptotic growth on one side as (log-rate, poly exponent, has subexp), None if tabulated."""
    k, p = w.kind, w.params
    if k == "constant":
        return (0.0, 0.0, False)
    if k == "exponential":
        return (math.log(p["b_neg"] if side == "neg" else p["b_pos"]), 0.0, False)
    if k == "polynomial":
        return (0.0, p["a"], False)
    if k == "subexponential":
        return (0.0, 0.0, True)
    if k == "product":
        parts = [_growth(f, side) for f in p["factors"]]
        if any(g is None for g in parts):
            return None
        return (sum(g[0] for g in parts), sum(g[1] for g in parts), any(g[2] for g in parts))
    if k == "split":
        return _growth(p[side], side)
    return None


def tail_class(w, q):
    """Classify summability of ``w^-q`` from the symbolic growth on each side."""
    verdicts = []
    for side in ("neg", "pos"):
        g = _growth(w, side)
        if g is None:
            return "unknown"
        rate, poly, sub = g
        verdicts.append(rate > 0 or sub or poly * q > 1.0)
    return "convergent" if all(verdicts) else "divergent"


def _conv_ratio(lw, q):
    """Window convolution ratio ``(u*u)(n)/u(n)`` for ``u = exp(-q lw)``, n in the window."""
    N = (lw.size - 1) // 2
    u = np.exp(-q * lw)
    if u.min() > 1e-280:
        conv = np.convolve(u, u)[N:3 * N + 1]
        return conv / u
    # log-space fallback for very fast growth
    i = np.arange(lw.size)
    ratio = np.empty(lw.size)
    for j, n in enumerate(range(-N, N + 1)):
        k = i - N
        m = n - k
        ok = np.abs(m) <= N
        e = lw[i[ok]] + lw[m[ok] + N] - lw[j]
        ratio[j] = np.sum(np.exp(-q * e))
    return ratio


def _monotone_K(vals):
    """max over 0 <= i <= j of vals[i]/vals[j] (vals ordered outward from 0)."""
    run = np.maximum.accumulate(vals)
    return float(np.max(run / vals))


def check_amaw(w, q, window=None):
    """Check the almost-monotone-algebra-weight conditions on the window.

    The convolution ratio is computed by the exact finite double sum over the
    window.  ``scaling_C`` is the smallest ``C >= 1`` for which ``C w``
    passes the convolution inequality on the same window.
    """
    if not q > 1.0:
        raise InvalidInputError("q must be > 1")
    N = w.effective_window(window)
    ns = np.arange(-N, N + 1)
    lw = w.log(ns)
    ratio = _conv_ratio(lw, q)
    j = int(np.argmax(ratio))
    rmax = float(ratio[j])
    rho = rho_bounds(w)
    vals = np.exp(lw)
    K_pos = _monotone_K(vals[N:]) if abs(rho.rho2 - 1.0) <= TOL else None
    K_neg = _monotone_K(vals[:N + 1][::-1][1:]) if abs(rho.rho1 - 1.0) <= TOL and N >= 1 else None
    return AmawReport(
        q=float(q),
        conv_ratio_max=rmax,
        conv_ratio_zero=float(ratio[N]),
        argmax_n=int(ns[j]),
        scaling_C=max(1.0, rmax ** (1.0 / q)),
        tail_sum=float(np.sum(np.exp(-q * lw))),
        summability=tail_class(w, q),
        K_neg=K_neg,
        K_pos=K_pos,
        passes_strict=rmax <= 1.0 + TOL,
        window=N,
    )


def geometric_qsum(w, x, q, window=None):
    """Window partial sum of ``x^(q n) w(n)^(-q)``."""
    if not x > 0:
        raise InvalidInputError("x must be positive")
    N = w.effective_window(window)
    ns = np.arange(-N, N + 1)
    val = float(np.sum(np.exp(q * (ns * math.log(x) - w.log(ns)))))
    rho = rho_bounds(w)
    in_range = rho.rho1 * (1 - TOL) <= x <= rho.rho2 * (1 + TOL)
    return QSumReport(float(x), float(q), val, val <= 1.0 + TOL, in_range)


def monotone_envelope(w, side, window=None):
    """Running-max envelope on one side; returns ``(table weight, K)``.

    ``pos``: ``max{w(k): 0 <= k <= n}`` for n >= 0.  ``neg``:
    ``max{w(k): n <= k <= -1}`` for n < 0.  The other side is left as is.
    ``K = max envelope/w`` certifies ``w <= envelope <= K w`` on the window.
    """
    if side not in ("pos", "neg"):
        raise InvalidInputError("side must be 'pos' or 'neg'")
    N = w.effective_window(window)
    ns, vals = w.values_on(N)
    env = vals.copy()
    if side == "pos":
        env[N:] = np.maximum.accumulate(vals[N:])
    elif N >= 1:
        env[:N] = np.maximum.accumulate(vals[:N][::-1])[::-1]
    K = float(np.max(env / vals))
    return WeightZ.table(env), K


def _require_side(rho, side):
    if side in ("pos", "both") and not rho.rho2 > 1.0 + TOL:
        raise PreconditionError("positive side needs rho2 > 1")
    if side in ("neg", "both") and not rho.rho1 < 1.0 - TOL:
        raise PreconditionError("negative side needs rho1 < 1")


def subexp_domination_constant(w, gamma=DEFAULT_GAMMA, side="both", window=None):
    """Smallest ``K >= 1`` with ``exp(|n|^gamma) <= K w(n)`` on the requested side.

    For symbolic weights the scan is extended until the ratio is provably
    decreasing (``gamma n^(gamma-1) < log-rate``), so the value is global.
    """
    if side not in ("pos", "neg", "both"):
        raise InvalidInputError("side must be 'pos', 'neg' or 'both'")
    if not 0.0 < gamma < 1.0:
        raise InvalidInputError("gamma must lie in (0, 1)")
    rho = rho_bounds(w)
    _require_side(rho, side)
    sides = ("neg", "pos") if side == "both" else (side,)
    N = w.effective_window(window)
    best = 0.0
    for s in sides:
        reach = N
        g = _growth(w, s)
        if g is not None and w.is_symbolic:
            turn = (gamma / g[0]) ** (1.0 / (1.0 - gamma))
            reach = max(N, int(math.ceil(turn)) + 1)
        n = np.arange(0, reach + 1)
        signed = -n if s == "neg" else n
        logratio = n.astype(float) ** gamma - w.log(signed)
        best = max(best, float(np.max(logratio)))
    return max(1.0, math.exp(best))


# -- nu constructions -------------------------------------------------


def _case_tag(rho):
    left_one = abs(rho.rho1 - 1.0) <= TOL
    right_one = abs(rho.rho2 - 1.0) <= TOL
    if left_one and right_one:
        return "admissible_identity"
    if left_one:
        return "left_flat"
    if right_one:
        return "right_flat"
    return "interior"


def _check_radii(rho, r1, r2):
    if not (rho.rho1 * (1 - TOL) <= r1 <= 1.0 + TOL and 1.0 - TOL <= r2 <= rho.rho2 * (1 + TOL)):
        raise PreconditionError(
            f"radii must satisfy rho1 <= r1 <= 1 <= r2 <= rho2; got rho=({rho.rho1}, {rho.rho2}), "
            f"r=({r1}, {r2})"
        )


def _require_exact(rho, force):
    if not rho.exact and not force:
        raise EstimateError("growth indices are window estimates; pass force=True to proceed")


def _certificate(nu_w, w, window=None):
    N = min(nu_w.effective_window(window), w.effective_window(window))
    ns = np.arange(-N, N + 1)
    lnu = nu_w.log(ns)
    return float(np.max(np.exp(lnu - w.log(ns)))), float(np.min(np.exp(lnu)))


def construct_nu_p_le_1(w, r1, r2, force=False):
    """Weight for ``0 < p <= 1``: ``nu = w`` if admissible, else ``r1^n`` (n<=0), ``r2^n`` (n>=0).

    ``r1, r2`` are the radii of an annulus on which the symbol stays
    invertible.  The result satisfies ``1 <= nu <= w`` and is constant
    exactly when ``w`` is.
    """
    rho = rho_bounds(w)
    _require_exact(rho, force)
    _check_radii(rho, r1, r2)
    case = _case_tag(rho)
    if case == "admissible_identity":
        nu_w = w
    else:
        nu_w = WeightZ.exponential(1.0 / r1, r2, window=w.window)
    smax, nmin = _certificate(nu_w, w)
    return NuWeight(nu_w, w, case, float(r1), float(r2), None, 1.0, smax, nmin, not rho.exact)


def construct_nu_p_gt_1(w, r1, r2, gamma=DEFAULT_GAMMA, q=2.0, force=False):
    """Weight for ``1 < p < inf`` (``q`` the conjugate index).

    Four cases on the growth indices: admissible gives ``nu = w``; a flat
    side takes the monotone envelope of ``w`` there; a non-flat side takes
    ``r^(n/2) exp(|n|^gamma / 2)``.  ``K`` is the larger of the envelope and
    subexponential domination constants, so ``1 <= nu <= K w``.
    """
    if not q > 1.0:
        raise InvalidInputError("q must be > 1")
    if not 0.0 < gamma < 1.0:
        raise InvalidInputError("gamma must lie in (0, 1)")
    rho = rho_bounds(w)
    _require_exact(rho, force)
    _check_radii(rho, r1, r2)
    base_amaw = check_amaw(w, q)
    if base_amaw.summability == "divergent":
        raise PreconditionError("w^-q is not summable, so w is not an almost monotone algebra weight")
    case = _case_tag(rho)
    N = w.window
    half = WeightZ.subexponential(0.5, gamma, window=N)
    env_side = None
    if case == "admissible_identity":
        nu_w, K = w, 1.0
    elif case == "left_flat":
        env, K1 = monotone_envelope(w, "neg")
        K2 = subexp_domination_constant(w, gamma, "pos")
        pos = WeightZ.product(WeightZ.exponential(1.0, math.sqrt(r2), window=N), half)
        nu_w, K, env_side = WeightZ.split(env, pos), max(K1, K2), "neg"
    elif case == "right_flat":
        env, K1 = monotone_envelope(w, "pos")
        K2 = subexp_domination_constant(w, gamma, "neg")
        neg = WeightZ.product(WeightZ.exponential(1.0 / math.sqrt(r1), 1.0, window=N), half)
        nu_w, K, env_side = WeightZ.split(neg, env), max(K1, K2), "pos"
    else:
        K = subexp_domination_constant(w, gamma, "both")
        nu_w = WeightZ.product(WeightZ.exponential(1.0 / math.sqrt(r1), math.sqrt(r2), window=N), half)
    smax, nmin = _certificate(nu_w, w)
    return NuWeight(nu_w, w, case, float(r1), float(r2), float(gamma), float(K), smax, nmin,
                    not rho.exact, check_amaw(nu_w, q), env_side)


def weight_from_dict(d):
    """Load a weight spec; ``"domain": "R"`` selects the real-line weights."""
    if isinstance(d, dict) and d.get("domain", "Z") == "R":
        from .weights_r import WeightR

        return WeightR.from_dict(d)
    return WeightZ.from_dict(d)
