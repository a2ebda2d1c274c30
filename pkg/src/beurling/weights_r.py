"""Weights on the real line.

Same calculus as :mod:`beurling.weights_z` with sums replaced by trapezoid
quadrature on the uniform grid ``x_j = j h``, ``|x_j| <= L``.  The strip
indices ``rho1 <= 0 <= rho2`` are the exponential rates
``sup_{x<0} log w(x)/x`` and ``inf_{x>0} log w(x)/x``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
from scipy import integrate, optimize

from .errors import EstimateError, InvalidInputError, PreconditionError, WindowError
from .weights_z import DEFAULT_GAMMA, AmawReport, NuWeight

TOL = 1e-9
DEFAULT_STEP = 1.0 / 64
DEFAULT_HALF_LENGTH = 32.0

KINDS = ("constant", "exponential", "polynomial", "subexponential", "product", "sampled", "split")


def grid(h=DEFAULT_STEP, L=DEFAULT_HALF_LENGTH):
    m = int(round(L / h))
    return np.arange(-m, m + 1) * h


class WeightR:
    """A weight on R; mirrors :class:`beurling.weights_z.WeightZ`.

    ``exponential`` takes rates: ``exp(a_neg |x|)`` for x < 0 and
    ``exp(a_pos x)`` for x >= 0.  ``sampled`` holds node values on
    ``[-L, L]`` with step ``h`` and interpolates linearly between nodes.
    """

    __slots__ = ("kind", "half_length", "scale", "params")

    def __init__(self, kind, half_length=DEFAULT_HALF_LENGTH, scale=1.0, **params):
        if kind not in KINDS:
            raise InvalidInputError(f"unknown weight kind {kind!r}")
        if not half_length > 0:
            raise InvalidInputError("half_length must be positive")
        if not scale >= 1.0:
            raise InvalidInputError("scale must be >= 1")
        self.kind = kind
        self.half_length = float(half_length)
        self.scale = float(scale)
        self.params = params
        p = params
        if kind == "constant" and not p["c"] >= 1.0:
            raise InvalidInputError("constant weight needs c >= 1")
        if kind == "exponential" and not (p["a_neg"] >= 0.0 and p["a_pos"] >= 0.0):
            raise InvalidInputError("exponential rates must be >= 0")
        if kind == "polynomial" and not p["a"] >= 0.0:
            raise InvalidInputError("polynomial weight needs a >= 0")
        if kind == "subexponential" and not (p["c"] > 0 and 0 < p["gamma"] < 1):
            raise InvalidInputError("subexponential weight needs c > 0 and gamma in (0, 1)")
        if kind == "sampled":
            v, h = p["values"], p["step"]
            m = int(round(self.half_length / h))
            if not h > 0 or abs(m * h - self.half_length) > 1e-9 * self.half_length:
                raise InvalidInputError("half_length must be a multiple of step")
            if v.ndim != 1 or v.size != 2 * m + 1:
                raise InvalidInputError("sampled weight needs 2*L/h+1 values")
            if np.any(~np.isfinite(v)) or np.any(v < 1.0 - 1e-12):
                raise InvalidInputError("sampled values must be finite and >= 1")

    @classmethod
    def constant(cls, c=1.0, half_length=DEFAULT_HALF_LENGTH):
        return cls("constant", half_length, c=float(c))

    @classmethod
    def exponential(cls, a_neg, a_pos=None, half_length=DEFAULT_HALF_LENGTH):
        a_pos = a_neg if a_pos is None else a_pos
        return cls("exponential", half_length, a_neg=float(a_neg), a_pos=float(a_pos))

    @classmethod
    def polynomial(cls, a, half_length=DEFAULT_HALF_LENGTH):
        return cls("polynomial", half_length, a=float(a))

    @classmethod
    def subexponential(cls, c, gamma=DEFAULT_GAMMA, half_length=DEFAULT_HALF_LENGTH):
        return cls("subexponential", half_length, c=float(c), gamma=float(gamma))

    @classmethod
    def product(cls, *factors, half_length=None):
        if half_length is None:
            half_length = min(f.half_length for f in factors)
        return cls("product", half_length, factors=tuple(factors))

    @classmethod
    def sampled(cls, values, step):
        v = np.asarray(values, dtype=float).copy()
        v.setflags(write=False)
        if v.size % 2 != 1:
            raise InvalidInputError("sampled weight needs an odd number of nodes")
        return cls("sampled", (v.size - 1) // 2 * step, values=v, step=float(step))

    @classmethod
    def split(cls, neg, pos, half_length=None):
        if half_length is None:
            half_length = min(neg.half_length, pos.half_length)
        return cls("split", half_length, neg=neg, pos=pos)

    def scaled(self, C):
        return WeightR(self.kind, self.half_length, self.scale * float(C), **self.params)

    def domain_limit(self):
        if self.kind == "sampled":
            return self.half_length
        if self.kind == "product":
            lims = [f.domain_limit() for f in self.params["factors"]]
        elif self.kind == "split":
            lims = [self.params["neg"].domain_limit(), self.params["pos"].domain_limit()]
        else:
            return None
        lims = [x for x in lims if x is not None]
        return min(lims) if lims else None

    @property
    def is_symbolic(self):
        return self.domain_limit() is None

    def log(self, x):
        x = np.asarray(x, dtype=float)
        out = self._log(x)
        if self.scale != 1.0:
            out = out + math.log(self.scale)
        return out

    def _log(self, x):
        p, k = self.params, self.kind
        if k == "constant":
            return np.full(x.shape, math.log(p["c"]))
        if k == "exponential":
            return np.where(x < 0, -x * p["a_neg"], x * p["a_pos"])
        if k == "polynomial":
            return p["a"] * np.log1p(np.abs(x))
        if k == "subexponential":
            return p["c"] * np.abs(x) ** p["gamma"]
        if k == "product":
            return sum(f.log(x) for f in p["factors"])
        if k == "sampled":
            L = self.half_length
            if x.size and np.max(np.abs(x)) > L * (1 + 1e-12):
                raise WindowError(f"sampled weight evaluated outside [-{L}, {L}]")
            nodes = (np.arange(p["values"].size) - (p["values"].size - 1) // 2) * p["step"]
            return np.log(np.interp(x, nodes, p["values"]))
        out = np.empty(x.shape)
        neg = x < 0
        if np.any(neg):
            out[neg] = p["neg"].log(x[neg])
        if np.any(~neg):
            out[~neg] = p["pos"].log(x[~neg])
        return out

    def __call__(self, x):
        return np.exp(self.log(x))

    def effective_half_length(self, L=None):
        L = self.half_length if L is None else float(L)
        lim = self.domain_limit()
        return min(L, lim) if lim is not None else L

    def is_constant(self, h=DEFAULT_STEP, L=None):
        v = self(grid(h, self.effective_half_length(L)))
        return bool(np.all(np.abs(v - v[0]) <= 1e-12 * v[0]))

    def to_dict(self):
        p = self.params
        d = {"domain": "R", "kind": self.kind}
        if self.kind == "product":
            d["factors"] = [f.to_dict() for f in p["factors"]]
        elif self.kind == "split":
            d["neg"], d["pos"] = p["neg"].to_dict(), p["pos"].to_dict()
        elif self.kind == "sampled":
            d["values"] = [float(v) for v in p["values"]]
            d["step"] = p["step"]
        else:
            d.update({key: float(val) for key, val in p.items()})
        if self.scale != 1.0:
            d["scale"] = self.scale
        d["half_length"] = self.half_length
        return d

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict) or "kind" not in d:
            raise InvalidInputError("weight spec must be an object with a 'kind' field")
        kind = d["kind"]
        L = float(d.get("half_length", DEFAULT_HALF_LENGTH))
        try:
            if kind == "constant":
                w = cls.constant(d.get("c", 1.0), L)
            elif kind == "exponential":
                if "a" in d:
                    w = cls.exponential(d["a"], d["a"], L)
                else:
                    w = cls.exponential(d["a_neg"], d["a_pos"], L)
            elif kind == "polynomial":
                w = cls.polynomial(d["a"], L)
            elif kind == "subexponential":
                w = cls.subexponential(d["c"], d.get("gamma", DEFAULT_GAMMA), L)
            elif kind == "product":
                w = cls.product(*[cls.from_dict(f) for f in d["factors"]], half_length=L)
            elif kind == "sampled":
                w = cls.sampled(d["values"], d["step"])
            elif kind == "split":
                w = cls.split(cls.from_dict(d["neg"]), cls.from_dict(d["pos"]), half_length=L)
            else:
                raise InvalidInputError(f"unknown weight kind {kind!r}")
        except KeyError as exc:
            raise InvalidInputError(f"weight spec of kind {kind!r} is missing field {exc}") from None
        if "scale" in d:
            w = w.scaled(d["scale"])
        return w

    def __repr__(self):
        return f"WeightR({self.to_dict()!r})"


@dataclass(frozen=True)
class StripPair:
    rho1: float
    rho2: float
    exact: bool

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class StripIntegralReport:
    a: float
    q: float
    value: float
    tail: Optional[float]
    total: float
    passes: Optional[bool]
    in_range: bool

    def to_dict(self):
        return asdict(self)


def _exact_rate(w, side):
    k, p = w.kind, w.params
    if k in ("constant", "polynomial", "subexponential"):
        return 0.0
    if k == "exponential":
        return -p["a_neg"] if side == "neg" else p["a_pos"]
    if k == "product":
        vals = [_exact_rate(f, side) for f in p["factors"]]
        return None if any(v is None for v in vals) else float(sum(vals))
    if k == "split":
        return _exact_rate(p[side], side)
    return None


def _growth(w, side):
    """(exponential rate, poly exponent, has subexp) on one side, None if sampled."""
    k, p = w.kind, w.params
    if k == "constant":
        return (0.0, 0.0, False)
    if k == "exponential":
        return (p["a_neg"] if side == "neg" else p["a_pos"], 0.0, False)
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


def rho_bounds_r(w, h=DEFAULT_STEP):
    exact = True
    out = []
    L = w.effective_half_length()
    for side in ("neg", "pos"):
        v = _exact_rate(w, side)
        if v is None:
            exact = False
            x = np.arange(1, int(round(L / h)) + 1) * h
            if x.size == 0:
                raise InvalidInputError("cannot estimate strip indices on an empty window")
            if w.is_constant(h, L):
                v = 0.0
            elif side == "neg":
                v = float(np.max(w.log(-x) / -x))
            else:
                v = float(np.min(w.log(x) / x))
        out.append(v)
    return StripPair(out[0], out[1], exact)


def check_submultiplicative_r(w, step=1.0 / 16, L=None):
    """Node-only check of ``w(x+y) <= w(x) w(y)``; returns the max excess and its pair."""
    xs = grid(step, w.effective_half_length(L))
    m = (xs.size - 1) // 2
    lw = w.log(xs)
    i = np.arange(xs.size)
    s = i[:, None] + i[None, :] - m
    valid = (s >= 0) & (s < xs.size)
    lr = lw[np.clip(s, 0, xs.size - 1)] - lw[:, None] - lw[None, :]
    lr[~valid] = -np.inf
    flat = int(np.argmax(lr))
    a, b = np.unravel_index(flat, lr.shape)
    return math.expm1(float(lr[a, b])), (float(xs[a]), float(xs[b]))


def tail_class_r(w, q, a=0.0):
    """Integrability of ``exp(a q x) w(x)^-q`` from symbolic growth."""
    verdicts = []
    for side, sign in (("neg", -1.0), ("pos", 1.0)):
        g = _growth(w, side)
        if g is None:
            return "unknown"
        rate, poly, sub = g
        eff = rate - sign * a
        verdicts.append(eff > 0 or (eff == 0 and (sub or poly * q > 1.0)))
    return "convergent" if all(verdicts) else "divergent"


def _trap_conv_ratio(u, h):
    """Trapezoid ``(u*u)(x)/u(x)`` at every grid node of ``u``'s window."""
    n = u.size
    m = (n - 1) // 2
    full = np.convolve(u, u)
    s = np.arange(m, 3 * m + 1)
    lo = np.maximum(0, s - (n - 1))
    hi = np.minimum(s, n - 1)
    corr = 0.5 * (u[lo] * u[s - lo] + u[hi] * u[s - hi])
    return h * (full[s] - corr) / u


def _monotone_K(vals):
    run = np.maximum.accumulate(vals)
    return float(np.max(run / vals))


def check_amaw_r(w, q, h=DEFAULT_STEP, L=None):
    """Quadrature analogue of :func:`beurling.weights_z.check_amaw`."""
    if not q > 1.0:
        raise InvalidInputError("q must be > 1")
    L = w.effective_half_length(L)
    xs = grid(h, L)
    m = (xs.size - 1) // 2
    lw = w.log(xs)
    u = np.exp(-q * lw)
    ratio = _trap_conv_ratio(u, h)
    j = int(np.argmax(ratio))
    rmax = float(ratio[j])
    rho = rho_bounds_r(w, h)
    vals = np.exp(lw)
    K_pos = _monotone_K(vals[m:]) if abs(rho.rho2) <= TOL else None
    K_neg = _monotone_K(vals[:m + 1][::-1]) if abs(rho.rho1) <= TOL else None
    return AmawReport(
        q=float(q),
        conv_ratio_max=rmax,
        conv_ratio_zero=float(ratio[m]),
        argmax_n=float(xs[j]),
        scaling_C=max(1.0, rmax ** (1.0 / q)),
        tail_sum=float(integrate.trapezoid(u, dx=h)),
        summability=tail_class_r(w, q),
        K_neg=K_neg,
        K_pos=K_pos,
        passes_strict=rmax <= 1.0 + TOL,
        window=float(L),
    )


def envelope_r(w, side, h=DEFAULT_STEP, L=None):
    """Running-sup envelope on one side, sampled on the grid; returns ``(weight, K)``."""
    if side not in ("pos", "neg"):
        raise InvalidInputError("side must be 'pos' or 'neg'")
    L = w.effective_half_length(L)
    xs = grid(h, L)
    m = (xs.size - 1) // 2
    vals = w(xs)
    env = vals.copy()
    if side == "pos":
        env[m:] = np.maximum.accumulate(vals[m:])
    else:
        env[:m + 1] = np.maximum.accumulate(vals[:m + 1][::-1])[::-1]
    return WeightR.sampled(env, h), float(np.max(env / vals))


def subexp_constant_r(w, gamma=DEFAULT_GAMMA, side="both", h=DEFAULT_STEP, L=None):
    """Smallest ``K >= 1`` with ``exp(|x|^gamma) <= K w(x)`` on the side(s).

    Grid scan, extended past the point where the log-ratio must decrease,
    then refined by bounded scalar maximization for symbolic weights.
    """
    if side not in ("pos", "neg", "both"):
        raise InvalidInputError("side must be 'pos', 'neg' or 'both'")
    if not 0.0 < gamma < 1.0:
        raise InvalidInputError("gamma must lie in (0, 1)")
    rho = rho_bounds_r(w, h)
    if side in ("pos", "both") and not rho.rho2 > TOL:
        raise PreconditionError("positive side needs rho2 > 0")
    if side in ("neg", "both") and not rho.rho1 < -TOL:
        raise PreconditionError("negative side needs rho1 < 0")
    L = w.effective_half_length(L)
    best = 0.0
    for s in (("neg", "pos") if side == "both" else (side,)):
        sign = -1.0 if s == "neg" else 1.0
        reach = L
        g = _growth(w, s)
        if g is not None and w.is_symbolic:
            reach = max(L, (gamma / g[0]) ** (1.0 / (1.0 - gamma)) + h)

        def phi(t):
            return np.abs(t) ** gamma - w.log(sign * np.abs(t))

        t = np.arange(0, int(math.ceil(reach / h)) + 1) * h
        vals = phi(t)
        j = int(np.argmax(vals))
        top = float(vals[j])
        if w.is_symbolic:
            lo, hi = max(0.0, t[j] - h), t[j] + h
            res = optimize.minimize_scalar(lambda x: -float(phi(np.array(x))), bounds=(lo, hi),
                                           method="bounded", options={"xatol": 1e-12})
            top = max(top, -float(res.fun))
        best = max(best, top)
    return max(1.0, math.exp(best))


def _case_tag_r(rho):
    left0, right0 = abs(rho.rho1) <= TOL, abs(rho.rho2) <= TOL
    if left0 and right0:
        return "admissible_identity"
    if left0:
        return "left_flat"
    if right0:
        return "right_flat"
    return "interior"


def _check_strip(rho, r1, r2):
    if not (rho.rho1 - TOL <= r1 <= TOL and -TOL <= r2 <= rho.rho2 + TOL):
        raise PreconditionError(
            f"need rho1 <= r1 <= 0 <= r2 <= rho2; got rho=({rho.rho1}, {rho.rho2}), r=({r1}, {r2})"
        )


def _certificate_r(nu_w, w, h=DEFAULT_STEP):
    L = min(nu_w.effective_half_length(), w.effective_half_length())
    xs = grid(h, L)
    lnu = nu_w.log(xs)
    return float(np.max(np.exp(lnu - w.log(xs)))), float(np.min(np.exp(lnu)))


def construct_nu_real_L1(w, r1, r2, force=False):
    """``p = 1`` weight on R from a strip ``[r1, r2]`` of invertibility.

    Flat sides keep ``w``; non-flat sides use ``exp(r x)``.  Certificate:
    ``1 <= nu <= w``.
    """
    rho = rho_bounds_r(w)
    if not rho.exact and not force:
        raise EstimateError("strip indices are window estimates; pass force=True to proceed")
    _check_strip(rho, r1, r2)
    case = _case_tag_r(rho)
    L = w.half_length
    if case == "admissible_identity":
        nu_w = w
    elif case == "left_flat":
        nu_w = WeightR.split(w, WeightR.exponential(0.0, r2, L))
    elif case == "right_flat":
        nu_w = WeightR.split(WeightR.exponential(-r1, 0.0, L), w)
    else:
        nu_w = WeightR.exponential(-r1, r2, L)
    smax, nmin = _certificate_r(nu_w, w)
    return NuWeight(nu_w, w, case, float(r1), float(r2), None, 1.0, smax, nmin, not rho.exact)


def construct_nu_real_Lp(w, r1, r2, gamma=DEFAULT_GAMMA, q=2.0, force=False, h=DEFAULT_STEP):
    """``1 < p < inf`` weight on R: envelope on flat sides, ``exp((r x + |x|^gamma)/2)`` otherwise."""
    if not q > 1.0:
        raise InvalidInputError("q must be > 1")
    if not 0.0 < gamma < 1.0:
        raise InvalidInputError("gamma must lie in (0, 1)")
    rho = rho_bounds_r(w, h)
    if not rho.exact and not force:
        raise EstimateError("strip indices are window estimates; pass force=True to proceed")
    _check_strip(rho, r1, r2)
    if tail_class_r(w, q) == "divergent":
        raise PreconditionError("w^-q is not integrable, so w is not an almost monotone algebra weight")
    case = _case_tag_r(rho)
    L = w.half_length
    half = WeightR.subexponential(0.5, gamma, L)
    env_side = None
    if case == "admissible_identity":
        nu_w, K = w, 1.0
    elif case == "left_flat":
        env, K1 = envelope_r(w, "neg", h)
        K2 = subexp_constant_r(w, gamma, "pos", h)
        pos = WeightR.product(WeightR.exponential(0.0, r2 / 2, L), half)
        nu_w, K, env_side = WeightR.split(env, pos), max(K1, K2), "neg"
    elif case == "right_flat":
        env, K1 = envelope_r(w, "pos", h)
        K2 = subexp_constant_r(w, gamma, "neg", h)
        neg = WeightR.product(WeightR.exponential(-r1 / 2, 0.0, L), half)
        nu_w, K, env_side = WeightR.split(neg, env), max(K1, K2), "pos"
    else:
        K = subexp_constant_r(w, gamma, "both", h)
        nu_w = WeightR.product(WeightR.exponential(-r1 / 2, r2 / 2, L), half)
    smax, nmin = _certificate_r(nu_w, w, h)
    return NuWeight(nu_w, w, case, float(r1), float(r2), float(gamma), float(K), smax, nmin,
                    not rho.exact, check_amaw_r(nu_w, q, h), env_side)


def strip_qintegral(w, a, q, h=DEFAULT_STEP, L=None):
    """Trapezoid value of ``int exp(a q x) w(x)^-q dx`` on the window plus a tail estimate.

    The pass flag is only set when ``a`` lies in the strip; its tolerance is
    the trapezoid error scale ``h**2``.
    """
    if not q > 1.0:
        raise InvalidInputError("q must be > 1")
    L = w.effective_half_length(L)
    xs = grid(h, L)
    value = float(integrate.trapezoid(np.exp(q * (a * xs - w.log(xs))), dx=h))
    tail = None
    if w.is_symbolic:
        if tail_class_r(w, q, a) == "divergent":
            tail = math.inf
        else:
            def f(x):
                return math.exp(q * (a * x - float(w.log(np.array(x)))))

            tail = integrate.quad(f, L, np.inf, limit=200)[0] + integrate.quad(f, -np.inf, -L, limit=200)[0]
    total = value + (tail or 0.0)
    rho = rho_bounds_r(w, h)
    in_range = rho.rho1 - TOL <= a <= rho.rho2 + TOL
    passes = (total <= 1.0 + h * h) if in_range else None
    return StripIntegralReport(float(a), float(q), value, tail, total, passes, in_range)
