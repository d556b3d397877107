"""Norm evaluators: r.i. function spaces and their Kothe sequence spaces.

Function-space variants (Lp, Lorentz quasinorm, Orlicz/Luxemburg, and the
space-from-sequence construction) evaluate exactly on step functions -- every
integral is a finite sum over pieces, every Luxemburg norm a monotone
bisection on the modular.  Sequence-space variants are modelled on a Window
and expose dense-array fast paths used heavily by the adversarial searches.

The dyadic sequence space of a function space X is E_X with
||x||_{E_X} = ||sum x(n) chi_[2^n,2^(n+1))||_X; for X = L_p this is the
weighted ell_p space with weights 2^(n/p), for X = L_infty it is ell_infty,
and for X = L_F it is the modular space with block weights 2^n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .measure import (HALFLINE, UNIT, SeqVec, StepFunction, Window,
                      dyadic_envelope, rearrange)
from .orlicz import LOG2, OrliczFn

_OVERFLOW_RATIO = 1e12


# ---------------------------------------------------------------------------
# weight functions for Lorentz spaces
# ---------------------------------------------------------------------------


class WeightFn:
    """Monotone increasing weight with bounded doubling ratio."""

    def doubling_sup(self) -> float:
        raise NotImplementedError

    def doubling_inf(self) -> float:
        raise NotImplementedError

    def __call__(self, t):
        raise NotImplementedError


@dataclass(frozen=True)
class PowerWeight(WeightFn):
    """w(t) = t^exponent; exponent = 1/q gives the standard Lorentz L(q,p)."""

    exponent: float

    def __post_init__(self):
        if self.exponent <= 0:
            raise ValueError("power weight needs a positive exponent")

    def __call__(self, t):
        return np.power(np.asarray(t, dtype=float), self.exponent)

    def doubling_sup(self) -> float:
        return 2.0 ** self.exponent

    def doubling_inf(self) -> float:
        return 2.0 ** self.exponent


class TableLogLinear(WeightFn):
    """Piecewise log-log-linear weight from a (log t, log w) table."""

    def __init__(self, log_t, log_w, assume_finite_q: bool = False):
        self.log_t = np.asarray(log_t, dtype=float)
        self.log_w = np.asarray(log_w, dtype=float)
        if self.log_t.ndim != 1 or self.log_t.size < 2 or np.any(np.diff(self.log_t) <= 0):
            raise ValueError("log_t grid must be strictly increasing")
        slopes = np.diff(self.log_w) / np.diff(self.log_t)
        if np.any(slopes < 0):
            raise ValueError("weight must be monotone increasing")
        self.slopes = slopes
        sup = float(np.exp(np.max(slopes)) ** LOG2) if slopes.size else 1.0
        # doubling ratio w(2t)/w(t) = exp(slope * log 2) per segment
        self._sup = float(np.exp(np.max(slopes) * LOG2))
        self._inf = float(np.exp(np.min(slopes) * LOG2))
        if assume_finite_q and self._inf <= 1.0:
            raise ValueError("finite-q regime requires inf w(2t)/w(t) > 1")
        self.assume_finite_q = assume_finite_q
        del sup

    def __call__(self, t):
        lt = np.log(np.asarray(t, dtype=float))
        return np.exp(np.interp(lt, self.log_t, self.log_w))

    def segment_at(self, lt: float):
        """(anchor log_t, anchor log_w, slope) of the segment containing lt."""
        i = int(np.clip(np.searchsorted(self.log_t, lt, side="right") - 1,
                        0, self.slopes.size - 1))
        return self.log_t[i], self.log_w[i], float(self.slopes[i])

    def doubling_sup(self) -> float:
        return self._sup

    def doubling_inf(self) -> float:
        return self._inf


# ---------------------------------------------------------------------------
# function spaces
# ---------------------------------------------------------------------------


class SpaceSpec:
    """Base for concrete r.i. function spaces on [0,1] or [0,inf)."""

    domain: str = UNIT
    triangle_constant: float = 1.0

    def fn_norm(self, f: StepFunction) -> float:
        raise NotImplementedError

    def spec_string(self) -> str:
        raise NotImplementedError

    def __repr__(self):
        return f"<{type(self).__name__} {self.spec_string()} on {self.domain}>"


class LpSpace(SpaceSpec):
    def __init__(self, p: float, domain: str = UNIT):
        if p < 1:
            raise ValueError("Lp needs p >= 1")
        self.p = float(p)
        self.domain = domain

    def fn_norm(self, f: StepFunction) -> float:
        v = np.abs(f.vals)
        if math.isinf(self.p):
            return float(np.max(v)) if v.size else 0.0
        return float(np.dot(v ** self.p, f.lengths) ** (1.0 / self.p))

    def spec_string(self) -> str:
        return "linf" if math.isinf(self.p) else f"lp:p={self.p:g}"


def linf_space(domain: str = UNIT) -> LpSpace:
    return LpSpace(math.inf, domain)


class LorentzSpace(SpaceSpec):
    """Quasinorm ||f|| = (int f*(t)^p w(t)^p dt/t)^(1/p), evaluated exactly.

    Kept as the quasinorm exactly as written (no renorming); the triangle
    constant sup w(2t)/w(t) is carried in metadata.
    """

    def __init__(self, p: float, weight: WeightFn, domain: str = UNIT):
        if not (1 <= p < math.inf):
            raise ValueError("Lorentz order must satisfy 1 <= p < inf")
        self.p = float(p)
        self.weight = weight
        self.domain = domain
        self.triangle_constant = weight.doubling_sup()

    def _piece_integral(self, a: float, b: float) -> float:
        """int_a^b w(t)^p dt/t, exact per log-linear weight segment."""
        p = self.p
        w = self.weight
        if isinstance(w, PowerWeight):
            s = w.exponent * p
            return (b ** s - a ** s) / s
        assert isinstance(w, TableLogLinear)
        la = -math.inf if a == 0.0 else math.log(a)
        lb = math.log(b)
        cuts = [la] + [float(t) for t in w.log_t if la < t < lb] + [lb]
        total = 0.0
        for l0, l1 in zip(cuts[:-1], cuts[1:]):
            lt0, lw0, s = w.segment_at(l1 if math.isinf(l0) else l0)
            # w(t)^p = exp(p lw0) (t / exp(lt0))^(p s)
            c = math.exp(p * lw0 - p * s * lt0)
            if s > 0:
                hi = math.exp(p * s * l1)
                lo = 0.0 if math.isinf(l0) else math.exp(p * s * l0)
                total += c * (hi - lo) / (p * s)
            else:
                if math.isinf(l0):
                    return math.inf
                total += c * (l1 - l0)
        return total

    def fn_norm(self, f: StepFunction) -> float:
        fs = rearrange(f)
        if not fs.values:
            return 0.0
        bp = np.asarray(fs.breakpoints)
        acc = 0.0
        for v, a, b in zip(fs.vals, bp[:-1], bp[1:]):
            if v == 0.0:
                continue
            piece = self._piece_integral(float(a), float(b))
            if math.isinf(piece):
                return math.inf
            acc += (v ** self.p) * piece
        return acc ** (1.0 / self.p)

    def spec_string(self) -> str:
        if isinstance(self.weight, PowerWeight):
            return f"lorentz:p={self.p:g},w=pow:{self.weight.exponent:g}"
        return f"lorentz:p={self.p:g},w=table"


def luxemburg_bisect(modular, hint_hi: float, hint_lo: float | None = None,
                     rel_tol: float = 1e-10, max_iter: int = 200) -> float:
    """inf{alpha > 0 : modular(alpha) <= 1} for a decreasing modular.

    ``hint_hi`` must satisfy modular(hint_hi) <= 1; the bracket is grown/
    shrunk geometrically and then bisected in log space.
    """
    hi = float(hint_hi)
    if hi <= 0:
        return 0.0
    for _ in range(max_iter):
        if modular(hi) <= 1.0:
            break
        hi *= 2.0
    lo = hint_lo if hint_lo is not None else hi / 2.0
    for _ in range(max_iter):
        if lo <= 0 or modular(lo) > 1.0:
            break
        hi = lo
        lo /= 2.0
    if lo <= 0:
        return hi
    for _ in range(max_iter):
        if hi - lo <= rel_tol * hi:
            break
        mid = math.sqrt(lo * hi)
        if modular(mid) <= 1.0:
            hi = mid
        else:
            lo = mid
    return hi


class OrliczSpace(SpaceSpec):
    """Luxemburg norm inf{alpha : int F(|f|/alpha) <= 1}, bisected to 1e-10."""

    def __init__(self, F: OrliczFn, domain: str = UNIT):
        self.F = F
        self.domain = domain

    def _modular(self, vals: np.ndarray, lens: np.ndarray, alpha: float) -> float:
        with np.errstate(over="ignore"):
            expo = self.F.log_eval(np.log(vals) - math.log(alpha))
            terms = np.exp(np.minimum(expo, 700.0)) * lens
        return float(np.sum(terms))

    def fn_norm(self, f: StepFunction) -> float:
        v = np.abs(f.vals)
        keep = v > 0
        v, lens = v[keep], f.lengths[keep]
        if v.size == 0:
            return 0.0
        m = float(np.sum(lens))
        # alpha_0 = max|f| / F^{-1}(1/m) already has modular <= 1
        hint = float(np.max(v) / math.exp(self.F.log_inv(-math.log(m))))
        return luxemburg_bisect(lambda a: self._modular(v, lens, a), hint)

    def spec_string(self) -> str:
        return f"orlicz:gen=<{self.F.spec_string()}>"


# ---------------------------------------------------------------------------
# sequence spaces
# ---------------------------------------------------------------------------


class SeqSpaceSpec:
    """Kothe sequence space on a window with a dense-array fast path."""

    window: Window

    def norm_values(self, vals: np.ndarray) -> float:
        raise NotImplementedError

    def norm(self, x: SeqVec) -> float:
        if x.window != self.window:
            raise ValueError("vector window does not match space window")
        return self.norm_values(x.values)

    def unit_norm(self, n: int) -> float:
        vals = np.zeros(self.window.size)
        vals[n - self.window.lo] = 1.0
        return self.norm_values(vals)

    def unit_norms(self) -> np.ndarray:
        return np.array([self.unit_norm(int(n)) for n in self.window.indices()])

    def reversed_space(self) -> "SeqSpaceSpec":
        return OrderReversed(self)

    def spec_string(self) -> str:
        raise NotImplementedError

    def __repr__(self):
        w = self.window
        return f"<{type(self).__name__} {self.spec_string()} on {w.kind}[{w.lo},{w.hi}]>"


class WeightedLp(SeqSpaceSpec):
    """||x|| = (sum (|x_n| w_n)^p)^(1/p), w_n > 0; p = inf gives max |x_n| w_n."""

    def __init__(self, p: float, window: Window, weights=None):
        if p < 1:
            raise ValueError("weighted lp needs p >= 1")
        self.p = float(p)
        self.window = window
        if weights is None:
            w = np.ones(window.size)
        elif callable(weights):
            w = np.asarray(weights(window.indices()), dtype=float)
        else:
            w = np.asarray(weights, dtype=float)
        if w.shape != (window.size,) or np.any(w <= 0):
            raise ValueError("need one strictly positive weight per index")
        self.weights = w

    def norm_values(self, vals: np.ndarray) -> float:
        a = np.abs(vals) * self.weights
        if math.isinf(self.p):
            return float(np.max(a)) if a.size else 0.0
        return float(np.sum(a ** self.p) ** (1.0 / self.p))

    def unit_norm(self, n: int) -> float:
        return float(self.weights[n - self.window.lo])

    def spec_string(self) -> str:
        return f"seq:lpw:p={self.p:g}"


def dyadic_lp(p: float, window: Window) -> SeqSpaceSpec:
    """E_X for X = L_p: weighted ell_p with w_n = 2^(n/p); ell_infty for p = inf."""
    if math.isinf(p):
        return LinftySeq(window)
    return WeightedLp(p, window, weights=lambda ns: 2.0 ** (ns / p))


class LinftySeq(SeqSpaceSpec):
    def __init__(self, window: Window):
        self.window = window

    def norm_values(self, vals: np.ndarray) -> float:
        return float(np.max(np.abs(vals))) if vals.size else 0.0

    def unit_norm(self, n: int) -> float:
        return 1.0

    def spec_string(self) -> str:
        return "seq:linf"


class OrliczModular(SeqSpaceSpec):
    """Luxemburg norm of the modular sum_n 2^n F(|x_n| / alpha).

    This is E_X for X = L_F[0,1] (window on Z_-); the 2^n block weights are
    what lets the space probe F at large arguments: a unit vector may carry
    entries up to lambda_n = F^{-1}(2^{-n}).
    """

    def __init__(self, F: OrliczFn, window: Window):
        self.F = F
        self.window = window
        ns = window.indices().astype(float)
        self._log_w = ns * LOG2
        # lambda(n) = F^{-1}(2^{-n}): single-block unit norms are 1/lambda(n)
        self._log_lambda = np.atleast_1d(F.log_inv(-self._log_w))

    def norm_values(self, vals: np.ndarray) -> float:
        a = np.abs(np.asarray(vals, dtype=float))
        nz = a > 0
        if not np.any(nz):
            return 0.0
        piece = np.exp(np.log(a[nz]) - self._log_lambda[nz])
        lo0 = float(np.max(piece))
        hi0 = float(np.sum(piece))
        if hi0 <= lo0 * (1 + 1e-14):
            return lo0
        log_a, log_w = np.log(a[nz]), self._log_w[nz]
        F = self.F
        # log-modular at alpha = e^beta, bracketed by the single-piece norms;
        # Newton steps (slope from h') stay inside the shrinking bisection
        # bracket, so the value matches plain bisection at tolerance 1e-12
        b_lo, b_hi = math.log(lo0), math.log(hi0)
        beta = 0.5 * (b_lo + b_hi)
        for _ in range(80):
            u = log_a - beta
            expo = log_w + F.log_eval(u)
            m = float(np.max(expo))
            if m > 700.0:
                G = m
                gp = -1.0
            else:
                wts = np.exp(expo - m)
                S = float(np.sum(wts))
                G = m + math.log(S)
                gp = -float(np.dot(wts, F.slope(u))) / S
            if G <= 0.0:
                b_hi = min(b_hi, beta)
            else:
                b_lo = max(b_lo, beta)
            if b_hi - b_lo <= 1e-12:
                break
            step = beta - G / gp if gp < 0 else None
            if step is None or not (b_lo + 1e-15 < step < b_hi - 1e-15):
                step = 0.5 * (b_lo + b_hi)
            beta = step
        return math.exp(b_hi)

    def unit_norm(self, n: int) -> float:
        return float(np.exp(-self._log_lambda[n - self.window.lo]))

    def modular(self, x: SeqVec, alpha: float = 1.0) -> float:
        a = np.abs(x.values)
        nz = a > 0
        expo = self._log_w[nz] + self.F.log_eval(np.log(a[nz]) - math.log(alpha))
        return float(np.sum(np.exp(np.minimum(expo, 700.0))))

    def spec_string(self) -> str:
        return f"seq:orlicz-modular:gen=<{self.F.spec_string()}>"


class GeometricWeighted(SeqSpaceSpec):
    """E(w^n): ||x|| = ||(x_n w^n)_n|| in the inner space."""

    def __init__(self, inner: SeqSpaceSpec, base: float):
        if base <= 0:
            raise ValueError("weight base must be positive")
        self.inner = inner
        self.base = float(base)
        self.window = inner.window
        self._w = self.base ** self.window.indices().astype(float)

    def norm_values(self, vals: np.ndarray) -> float:
        return self.inner.norm_values(vals * self._w)

    def unit_norm(self, n: int) -> float:
        return float(self._w[n - self.window.lo]) * self.inner.unit_norm(n)

    def spec_string(self) -> str:
        return f"seq:from:<{self.inner.spec_string()}>,weightbase={self.base!r}"


class OrderReversed(SeqSpaceSpec):
    """||x|| = ||x~||_inner with x~(n) = x(-(n+1)); swaps RSP and LSP."""

    def __init__(self, inner: SeqSpaceSpec):
        self.inner = inner
        self.window = inner.window.reversed()

    def norm_values(self, vals: np.ndarray) -> float:
        return self.inner.norm_values(vals[::-1])

    def unit_norm(self, n: int) -> float:
        return self.inner.unit_norm(-(n + 1))

    def reversed_space(self) -> SeqSpaceSpec:
        return self.inner

    def spec_string(self) -> str:
        return f"rev:<{self.inner.spec_string()}>"


class InducedSeq(SeqSpaceSpec):
    """E_X by direct reconstruction: norm of sum x(n) chi_[2^n, 2^(n+1)) in X.

    Fallback for spaces without a closed-form E_X (Lorentz with general
    weights); the reconstruction rearranges internally, so the space is
    automatically symmetric in the r.i. sense.
    """

    def __init__(self, space: SpaceSpec, window: Window):
        self.space = space
        self.window = window

    def norm_values(self, vals: np.ndarray) -> float:
        return self.space.fn_norm(SeqVec(self.window, vals).to_step(self.space.domain))

    def spec_string(self) -> str:
        return f"seq:induced:<{self.space.spec_string()}>"


def e_space(space: SpaceSpec, window: Window) -> SeqSpaceSpec:
    """The dyadic sequence space E_X of a function space, fast form if known."""
    if isinstance(space, LpSpace):
        return dyadic_lp(space.p, window)
    if isinstance(space, OrliczSpace):
        return OrliczModular(space.F, window)
    return InducedSeq(space, window)


def seq_norm(space, x: SeqVec) -> float:
    """Norm of a sequence vector; function spaces are routed through E_X."""
    if isinstance(space, SeqSpaceSpec):
        return space.norm(x)
    if isinstance(space, SpaceSpec):
        return e_space(space, x.window).norm(x)
    raise TypeError(f"cannot take a sequence norm in {space!r}")


def fn_norm(space: SpaceSpec, f: StepFunction) -> float:
    return space.fn_norm(f)


class FromSequenceSpace(SpaceSpec):
    """r.i. space built from a sequence space: ||f|| = ||(f*(2^n))_n||_E.

    Requires the fitted shift growth kappa_+(E) < 2 (checked at construction
    via ``kappa_estimate``; the estimate's extrapolated value is used and
    recorded).  The domain follows the window kind: Z_- models [0,1], Z and
    Z_+ model [0, inf).
    """

    def __init__(self, E: SeqSpaceSpec, kappa_budget: int = 400, seed: int = 0,
                 enforce: bool = True):
        self.E = E
        self.window = E.window
        self.domain = UNIT if self.window.kind == "Z-" else HALFLINE
        self.triangle_constant = 2.0
        self.kappa = kappa_estimate(E, E.window, budget=kappa_budget, seed=seed)
        if enforce and not (self.kappa.plus_est < 2.0):
            raise ValueError(
                f"space-from-sequence needs kappa_+(E) < 2; fitted "
                f"{self.kappa.plus_est:.4f}")

    def fn_norm(self, f: StepFunction) -> float:
        return self.E.norm(dyadic_envelope(f, self.window))

    def spec_string(self) -> str:
        return f"fromseq:<{self.E.spec_string()}>"


# ---------------------------------------------------------------------------
# rho profile and exponential separation
# ---------------------------------------------------------------------------


def rho_profile(E: SeqSpaceSpec, F: SeqSpaceSpec, window: Window) -> dict[int, float]:
    """rho(n) = ||e_n||_E / ||e_n||_F for n in the window."""
    out = {}
    for n in window.indices():
        out[int(n)] = E.unit_norm(int(n)) / F.unit_norm(int(n))
    return out


@dataclass
class SeparationFit:
    beta: float
    C0: float
    separated: bool
    residuals: dict[int, float] = field(default_factory=dict)
    rho: dict[int, float] = field(default_factory=dict)

    def to_json_dict(self):
        return {"beta": self.beta, "C0": self.C0, "separated": self.separated,
                "residuals": {str(k): v for k, v in sorted(self.residuals.items())},
                "rho": {str(k): v for k, v in sorted(self.rho.items())}}


def fit_separation(rho: dict[int, float]) -> SeparationFit:
    """Exhaustive fit of rho(m+n) >= C0^{-1} 2^{n beta} rho(m) over the window.

    beta is the worst pairwise slope of log2 rho; C0 the smallest constant
    making the inequality hold for every pair at that beta.  separated
    means beta > 0.
    """
    ns = sorted(rho)
    if any(rho[n] <= 0 for n in ns):
        raise ValueError("rho must be strictly positive")
    lr = {n: math.log2(rho[n]) for n in ns}
    beta = math.inf
    per_gap: dict[int, float] = {}
    for i, m in enumerate(ns):
        for mp in ns[i + 1:]:
            gap = mp - m
            slope = (lr[mp] - lr[m]) / gap
            beta = min(beta, slope)
            per_gap[gap] = min(per_gap.get(gap, math.inf), slope)
    if not per_gap:
        return SeparationFit(0.0, 1.0, False, {}, dict(rho))
    worst = -math.inf
    for i, m in enumerate(ns):
        for mp in ns[i + 1:]:
            worst = max(worst, (mp - m) * beta - (lr[mp] - lr[m]))
    C0 = max(1.0, 2.0 ** worst)
    return SeparationFit(float(beta), float(C0), beta > 0.0, per_gap, dict(rho))


# ---------------------------------------------------------------------------
# shift-norm (kappa) estimation
# ---------------------------------------------------------------------------


def shift_values(vals: np.ndarray, n: int) -> np.ndarray:
    """(tau_n x) on the same window: entries shifted up by n, zero-filled."""
    out = np.zeros_like(vals)
    if n >= 0:
        if n < vals.size:
            out[n:] = vals[:vals.size - n]
    else:
        out[:n] = vals[-n:]
    return out


@dataclass
class KappaEstimate:
    """Shift growth rates with lower-bound semantics.

    ``plus_lb``/``minus_lb`` are certified lower bounds (max of witnessed
    ratios); ``plus_est``/``minus_est`` extrapolate the geometric-mean slope
    of log ||tau_n|| over the largest tested shifts.  The true kappa can
    exceed the estimate; verdict logic must treat these as estimates.
    """

    plus_lb: float
    plus_est: float
    minus_lb: float
    minus_est: float
    table: dict[int, float] = field(default_factory=dict)

    def to_json_dict(self):
        return {"plus_lb": self.plus_lb, "plus_est": self.plus_est,
                "minus_lb": self.minus_lb, "minus_est": self.minus_est,
                "table": {str(k): v for k, v in sorted(self.table.items())}}


def _shift_ratio(space: SeqSpaceSpec, vals: np.ndarray, n: int) -> float:
    denom = space.norm_values(vals)
    if denom == 0.0:
        return 0.0
    num = space.norm_values(shift_values(vals, n))
    if num > _OVERFLOW_RATIO * denom:
        return math.inf
    return num / denom


def _best_shift_ratio(space: SeqSpaceSpec, n: int, budget: int,
                      rng: np.random.Generator) -> float:
    win = space.window
    size = win.size
    best = 0.0
    # unit vectors first: exact on every Kothe space, tight for weighted lp
    units = space.unit_norms()
    if n > 0:
        ratios = units[n:] / units[:size - n]
    else:
        ratios = units[:size + n] / units[-n:]
    if ratios.size:
        best = float(np.max(ratios))
    trials = max(1, budget)
    for _ in range(trials):
        vals = np.zeros(size)
        k = rng.integers(1, max(2, size // 4))
        lo_ok = 0 if n < 0 else 0
        hi_ok = size if n < 0 else size - n
        if n < 0:
            lo_ok = -n
            hi_ok = size
        idx = rng.choice(np.arange(lo_ok, hi_ok), size=min(k, hi_ok - lo_ok),
                         replace=False)
        vals[idx] = rng.random(idx.size) + 0.1
        r = _shift_ratio(space, vals, n)
        for _ in range(8):  # multiplicative coordinate ascent
            j = int(rng.choice(idx))
            old = vals[j]
            vals[j] = old * (2.0 if rng.random() < 0.5 else 0.5)
            r2 = _shift_ratio(space, vals, n)
            if r2 > r:
                r = r2
            else:
                vals[j] = old
        best = max(best, r)
        if math.isinf(best):
            break
    return best


def kappa_estimate(E: SeqSpaceSpec, window: Window | None = None,
                   budget: int = 800, seed: int = 0) -> KappaEstimate:
    """Adversarial lower-bound estimate of kappa_±(E) = lim ||tau_{±n}||^{1/n}."""
    if window is None:
        window = E.window
    if window != E.window:
        raise ValueError("kappa window must match the space window")
    rng = np.random.default_rng(seed)
    n_max = max(1, window.size // 2)
    shifts = sorted(set([1, 2] + [n_max // 2, n_max] +
                        list(np.unique(np.geomspace(1, n_max, 6).astype(int)))))
    shifts = [n for n in shifts if 1 <= n <= n_max]
    per = max(4, budget // max(1, 2 * len(shifts)))
    table: dict[int, float] = {}
    for n in shifts:
        table[n] = _best_shift_ratio(E, n, per, rng)
        table[-n] = _best_shift_ratio(E, -n, per, rng)

    def summarize(sign: int):
        pairs = [(n, table[sign * n]) for n in shifts if table[sign * n] > 0]
        if not pairs:
            return 0.0, 0.0
        if any(math.isinf(r) for _, r in pairs):
            return math.inf, math.inf
        lb = max(r ** (1.0 / n) for n, r in pairs)
        top = pairs[-max(1, len(pairs) // 3):]
        est = math.exp(float(np.mean([math.log(r) / n for n, r in top])))
        return lb, est

    plus_lb, plus_est = summarize(+1)
    minus_lb, minus_est = summarize(-1)
    return KappaEstimate(plus_lb, plus_est, minus_lb, minus_est, table)


# ---------------------------------------------------------------------------
# norming functionals  (Kothe-dual elements with <x, g> = ||x||, ||g||* = 1)
# ---------------------------------------------------------------------------


def norming_functional(E: SeqSpaceSpec, x: SeqVec) -> SeqVec:
    """g >= 0-signed with supp g in supp x, ||g||_{E*} = 1, <x, g> = ||x||_E.

    Closed forms for weighted ell_p (1 <= p <= inf); for Orlicz modular
    spaces the gradient of the modular at x/||x|| is the exact maximizer of
    <h, g> over the unit ball (first-order condition of the concave
    problem), which pins ||g||* = <x/||x||, g>.  The attained duality gap is
    recorded in ``meta["norming_gap"]``.
    """
    vals = _norming_values(E, x.values)
    g = SeqVec(x.window, vals)
    g.meta["norming_gap"] = abs(float(np.dot(x.values, vals)) - E.norm(x))
    return g


def _norming_values(E: SeqSpaceSpec, xv: np.ndarray) -> np.ndarray:
    if not np.any(xv):
        raise ValueError("cannot norm the zero vector")
    if isinstance(E, OrderReversed):
        return _norming_values(E.inner, xv[::-1])[::-1]
    if isinstance(E, GeometricWeighted):
        return _norming_values(E.inner, xv * E._w) * E._w
    if isinstance(E, LinftySeq):
        k = int(np.argmax(np.abs(xv)))
        g = np.zeros_like(xv)
        g[k] = math.copysign(1.0, xv[k])
        return g
    if isinstance(E, WeightedLp):
        w, p = E.weights, E.p
        a = np.abs(xv) * w
        if math.isinf(p):
            k = int(np.argmax(a))
            g = np.zeros_like(xv)
            g[k] = math.copysign(w[k], xv[k])
            return g
        nrm = E.norm_values(xv)
        if p == 1.0:
            return np.where(xv != 0, np.copysign(w, xv), 0.0)
        return np.sign(xv) * (w ** p) * np.abs(xv) ** (p - 1.0) / nrm ** (p - 1.0)
    if isinstance(E, OrliczModular):
        nrm = E.norm_values(xv)
        xhat = np.abs(xv) / nrm
        g = np.zeros_like(xv)
        nz = xhat > 0
        w = np.exp(E._log_w[nz])
        g[nz] = w * E.F.deriv(xhat[nz])
        denom = float(np.dot(xhat[nz], g[nz]))
        g[nz] = np.sign(xv[nz]) * g[nz] / denom
        return g
    if isinstance(E, InducedSeq) and isinstance(E.space, LpSpace):
        return _norming_values(dyadic_lp(E.space.p, E.window), xv)
    raise NotImplementedError(
        f"no norming functional for {type(E).__name__}; supported: weighted "
        f"lp, ell_infty, Orlicz modular, and weighted/reversed wrappers")
