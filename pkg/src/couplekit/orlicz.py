"""Orlicz functions: generators, indices, oscillation counters, elasticity.

Every Orlicz function here is handled through its log-log profile

    h(u) = log F(e^u),

which is strictly increasing with h(u) - u nondecreasing (F(x)/x increasing).
Working with h avoids overflow entirely: the constructions below routinely
evaluate F at heights like exp(180000), which only ever exist as h-values.

The oscillation quantities all reduce to the window function

    omega(v) = h(v) - h(v - kappa),      kappa = log(1/x),

since F_t(x) = F(tx)/F(t) = exp(-omega(log t)).  Counters count disjoint
oscillations of omega by log C, regular-variation defect is the tail
oscillation of omega, and the bounded-witness w(t) is a maximum-profit
schedule of disjoint oscillation intervals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

LOG2 = math.log(2.0)


# ---------------------------------------------------------------------------
# core representation
# ---------------------------------------------------------------------------


class OrliczFn:
    """Base class; subclasses provide the log-log profile h and its slope."""

    name = "orlicz"
    params: dict = {}

    def log_eval(self, u):
        raise NotImplementedError

    def slope(self, u):
        """d/du h(u); for piecewise-affine profiles the right-hand slope."""
        raise NotImplementedError

    def breaks(self):
        """Kink locations when h is piecewise affine, else None."""
        return None

    # -- derived evaluations -------------------------------------------------

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        pos = x > 0
        if np.any(pos):
            out[pos] = np.exp(self.log_eval(np.log(x[pos])))
        return out if out.shape else float(out)

    def deriv(self, x):
        """F'(x) = F(x) h'(log x) / x."""
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        pos = x > 0
        if np.any(pos):
            u = np.log(x[pos])
            out[pos] = np.exp(self.log_eval(u) - u) * self.slope(u)
        return out if out.shape else float(out)

    def log_inv(self, v):
        """Solve h(u) = v for u (vectorized bisection; h strictly increasing)."""
        v = np.atleast_1d(np.asarray(v, dtype=float))
        lo = np.full(v.shape, -1.0)
        hi = np.full(v.shape, 1.0)
        for _ in range(120):
            need = self.log_eval(hi) < v
            if not np.any(need):
                break
            hi[need] = hi[need] * 2.0 + 1.0
        for _ in range(120):
            need = self.log_eval(lo) > v
            if not np.any(need):
                break
            lo[need] = lo[need] * 2.0 - 1.0
        for _ in range(100):
            mid = 0.5 * (lo + hi)
            below = self.log_eval(mid) < v
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        out = 0.5 * (lo + hi)
        return out if out.shape != (1,) else float(out[0])

    def inv(self, y):
        """F^{-1}(y) for y > 0."""
        return np.exp(self.log_inv(np.log(y)))

    def log_ft(self, log_t, log_x):
        """log F_t(x) with the quotient convention F_t(x) = F(tx)/F(t)."""
        return self.log_eval(log_t + log_x) - self.log_eval(log_t)

    def spec_string(self) -> str:
        if not self.params:
            return self.name
        args = ",".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.name}:{args}"

    def __repr__(self):
        return f"<OrliczFn {self.spec_string()}>"


class PiecewiseAffineFn(OrliczFn):
    """h given by anchors (u_i, h_i) with slope s_i on [u_i, u_{i+1}).

    Below u_0 the profile continues with ``slope_below``; past the last
    anchor with s_{-1}.  All generators with exactly representable profiles
    (powers, the oscillating examples, the counterexample pair) reduce to
    this class, as do grid-sampled profiles (uniform step <= 1/8).
    """

    def __init__(self, name, params, anchors_u, anchors_h, slopes, slope_below):
        self.name = name
        self.params = dict(params)
        self._u = np.asarray(anchors_u, dtype=float)
        self._h = np.asarray(anchors_h, dtype=float)
        self._s = np.asarray(slopes, dtype=float)
        self._s_below = float(slope_below)
        if self._u.ndim != 1 or self._u.size == 0 or np.any(np.diff(self._u) <= 0):
            raise ValueError("anchors must be strictly increasing")
        if self._s.shape != self._u.shape:
            raise ValueError("one slope per anchor (last one extends to +inf)")
        if self._s_below < 1.0 - 1e-12 or np.any(self._s < 1.0 - 1e-12):
            raise ValueError("profile slope must stay >= 1 (F(x)/x increasing)")

    def log_eval(self, u):
        u = np.asarray(u, dtype=float)
        idx = np.searchsorted(self._u, u, side="right") - 1
        below = idx < 0
        idx_c = np.clip(idx, 0, self._u.size - 1)
        out = self._h[idx_c] + (u - self._u[idx_c]) * self._s[idx_c]
        if np.any(below):
            out = np.where(below, self._h[0] + (u - self._u[0]) * self._s_below, out)
        return out

    def slope(self, u):
        u = np.asarray(u, dtype=float)
        idx = np.searchsorted(self._u, u, side="right") - 1
        idx_c = np.clip(idx, 0, self._u.size - 1)
        return np.where(idx < 0, self._s_below, self._s[idx_c])

    def breaks(self):
        return self._u.copy()

    @staticmethod
    def from_samples(name, params, u_grid, h_vals, slope_below=None):
        u = np.asarray(u_grid, dtype=float)
        h = np.asarray(h_vals, dtype=float)
        slopes = np.diff(h) / np.diff(u)
        slopes = np.append(slopes, slopes[-1])
        if slope_below is None:
            slope_below = slopes[0]
        return PiecewiseAffineFn(name, params, u, h, slopes, slope_below)


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------


def power(p: float) -> OrliczFn:
    """F(x) = x^p."""
    if p < 1:
        raise ValueError("power generator needs p >= 1")
    return PiecewiseAffineFn("power", {"p": p}, [0.0], [0.0], [p], p)


def pwpower(p0: float, p1: float) -> OrliczFn:
    """F(x) = x^p0 for x <= 1, x^p1 for x >= 1 (needs 1 <= p0 <= p1 for convexity)."""
    if not (1 <= p0 <= p1):
        raise ValueError("pwpower needs 1 <= p0 <= p1")
    return PiecewiseAffineFn("pwpower", {"p0": p0, "p1": p1}, [0.0], [0.0], [p1], p0)


class LogFactorFn(OrliczFn):
    """F(x) = x^p log(e + x); h(u) = p u + log(logaddexp(1, u))."""

    def __init__(self, p: float):
        if p < 1:
            raise ValueError("logfactor generator needs p >= 1")
        self.name = "logfactor"
        self.params = {"p": p}
        self.p = float(p)

    def log_eval(self, u):
        u = np.asarray(u, dtype=float)
        return self.p * u + np.log(np.logaddexp(1.0, u))

    def slope(self, u):
        u = np.asarray(u, dtype=float)
        inner = np.logaddexp(1.0, u)
        sig = np.exp(u - inner)  # e^u / (e + e^u)
        return self.p + sig / inner


def default_xi(n):
    """xi_n = 1 / log log(n + 16): monotone to 0, slow enough to defeat elasticity."""
    n = np.asarray(n, dtype=float)
    return 1.0 / np.log(np.log(n + 16.0))


def example1(xi=None, n_blocks: int = 40) -> OrliczFn:
    """Regularly varying, inelastic: slope 2 + (-1)^n xi_n on u in (2^(n-1), 2^n].

    h(u) = 2u for u <= 1; raw profile (F(x)/x increasing but F has concave
    kinks), convexified on demand via ``convexify``.
    """
    xi_fn = xi if xi is not None else default_xi
    ns = np.arange(1, n_blocks + 1)
    xis = np.asarray(xi_fn(ns), dtype=float)
    if np.any(xis <= 0) or np.any(xis > 1):
        raise ValueError("xi schedule must take values in (0, 1]")
    if np.any(np.diff(xis) > 1e-15):
        raise ValueError("xi schedule must be nonincreasing")
    anchors = [1.0]
    hvals = [2.0]
    slopes = []
    h = 2.0
    for n, xi_n in zip(ns, xis):
        s = 2.0 + (-1.0) ** n * xi_n
        slopes.append(s)
        length = 2.0 ** n - 2.0 ** (n - 1)
        h += s * length
        anchors.append(2.0 ** n)
        hvals.append(h)
    slopes.append(2.0)  # beyond the last block
    return PiecewiseAffineFn("example1", {}, anchors, hvals, slopes, 2.0)


def default_psi(t):
    """psi(t) = 1/log log log(t + e^(e^e)): decays below every O(1/log log u)."""
    t = np.asarray(t, dtype=float)
    t0 = math.exp(math.exp(math.e))
    return 1.0 / np.log(np.log(np.log(t + t0)))


def elastic_non_lorentz(psi=None, u_max: float = 4096.0, step: float = 0.125) -> OrliczFn:
    """Elastic but non-Lorentz: slope 2 + psi(u) with psi decreasing to 0.

    The profile is concave (phi decreasing), which makes F elastic; psi
    decays too slowly for the Lorentz criterion.  Sampled on a uniform
    u-grid (trapezoid-exact per cell since the stored profile is the
    piecewise-linear interpolant).
    """
    psi_fn = psi if psi is not None else default_psi
    grid = np.arange(0.0, u_max + step, step)
    phi = 2.0 + np.asarray(psi_fn(grid), dtype=float)
    if np.any(np.diff(phi) > 1e-15):
        raise ValueError("psi must be nonincreasing")
    if np.any(phi - 2.0 > 1.0 + 1e-12):
        raise ValueError("psi must be bounded by one")
    h = np.concatenate([[0.0], np.cumsum(0.5 * (phi[1:] + phi[:-1]) * np.diff(grid))])
    return PiecewiseAffineFn.from_samples("elastic-nl", {}, grid, h, slope_below=2.0)


def brudnyi_schedule(u_cap: float = 2.0 ** 23):
    """Breakpoint schedule a_n, b_n = 2^n a_n, c_n = 4 b_n, d_n = c_n + 2n."""
    rows = []
    a = 1.0
    n = 1
    while a <= u_cap:
        b = 2.0 ** n * a
        c = 4.0 * b
        d = c + 2.0 * n
        rows.append((n, a, b, c, d))
        a = 4.0 * d
        n += 1
    return rows


def brudnyi_pair(p: float, q: float, u_cap: float = 2.0 ** 23):
    """Counterexample pair (F, G) with matching indices p and q.

    r = (p+q)/2, alpha = p-1, beta = q-r.  F(x) = x^r exp(psi(log x)) where
    psi climbs with slope beta on [c_n, c_n+n] and falls back on [c_n+n, d_n];
    G multiplies in exp(phi(log x)) with triangular bumps of slope alpha on
    [a_n, b_n].  The phi and psi supports are disjoint by the schedule.
    """
    if not (q > p > 1):
        raise ValueError("brudnyi pair needs q > p > 1")
    r = 0.5 * (p + q)
    alpha = p - 1.0
    beta = q - r
    sched = brudnyi_schedule(u_cap)

    def build(with_phi: bool, which: str) -> OrliczFn:
        kinks = [0.0]
        for n, a, b, c, d in sched:
            if with_phi:
                kinks.extend([a, 0.5 * (a + b), b])
            kinks.extend([c, c + n, d])
        kinks = sorted(set(kinks))
        slopes = []
        for u in kinks:
            s = r
            for n, a, b, c, d in sched:
                if with_phi and a <= u < 0.5 * (a + b):
                    s += alpha
                elif with_phi and 0.5 * (a + b) <= u < b:
                    s -= alpha
                if c <= u < c + n:
                    s += beta
                elif c + n <= u < d:
                    s -= beta
            slopes.append(s)
        hvals = [0.0]
        for (u0, u1), s in zip(zip(kinks[:-1], kinks[1:]), slopes[:-1]):
            hvals.append(hvals[-1] + s * (u1 - u0))
        params = {"p": p, "q": q}
        return PiecewiseAffineFn(f"brudnyi:{which}", params, kinks, hvals, slopes, r)

    return build(False, "F"), build(True, "G")


class MinimalFn(OrliczFn):
    """F(x) = x^2 exp(alpha sum_n (1 - cos(2 pi log x / 2^n))).

    Series truncated where the remaining terms sum below 1e-12 (term n decays
    like (2 pi u / 2^n)^2 / 2).  Needs alpha <= 1/(4 pi) to keep h' >= 1.
    """

    TAIL = 1e-12

    def __init__(self, alpha: float = 0.05):
        if not (0 < alpha <= 1.0 / (4.0 * math.pi)):
            raise ValueError("minimal generator needs 0 < alpha <= 1/(4 pi)")
        self.name = "minimal"
        self.params = {"alpha": alpha}
        self.alpha = float(alpha)

    def _terms(self, u):
        umax = max(1.0, float(np.max(np.abs(u))))
        # sum_{n>N} (2 pi u / 2^n)^2 / 2 <= (2 pi umax)^2 / 6 * 4^-N
        n_top = max(1, int(math.ceil(math.log(((2 * math.pi * umax) ** 2) / (6 * self.TAIL), 4))))
        return np.arange(0, n_top + 1)

    def log_eval(self, u):
        u = np.asarray(u, dtype=float)
        ns = self._terms(u)
        theta = 2.0 * math.pi * u[..., None] / (2.0 ** ns)
        return 2.0 * u + self.alpha * np.sum(1.0 - np.cos(theta), axis=-1)

    def slope(self, u):
        u = np.asarray(u, dtype=float)
        ns = self._terms(u)
        freq = 2.0 * math.pi / (2.0 ** ns)
        theta = u[..., None] * freq
        return 2.0 + self.alpha * np.sum(freq * np.sin(theta), axis=-1)


class ConvexifiedFn(OrliczFn):
    """F1(x) = int_0^x F(t)/t dt, exact per affine segment of the base profile.

    With h affine of slope s on a segment, int e^h du has the closed form
    e^h/s evaluated at the ends; the lower tail below the first anchor
    contributes e^(h_0)/s_below.  Cumulative sums are kept in log space.
    F1 is convex, F1 <= F, and F(x) <= F1(2x)/log 2.
    """

    def __init__(self, base: OrliczFn):
        seg = base if base.breaks() is not None else sample_profile(base)
        self.base = seg
        self.name = f"convexify<{base.name}>"
        self.params = dict(base.params)
        u, h, s = seg._u, seg._h, seg._s
        if seg._s_below <= 0:
            raise ValueError("convexify needs a positive lower slope")
        # log integral over (-inf, u_0]
        cum = h[0] - math.log(seg._s_below)
        cums = [cum]
        for i in range(len(u) - 1):
            L = u[i + 1] - u[i]
            sl = s[i]
            # log of e^{h_i} (e^{sl L} - 1)/sl
            piece = h[i] + sl * L + np.log1p(-math.exp(-sl * L)) - math.log(sl)
            cum = np.logaddexp(cum, piece)
            cums.append(cum)
        self._cums = np.asarray(cums)

    def log_eval(self, u):
        u = np.asarray(u, dtype=float)
        base = self.base
        idx = np.searchsorted(base._u, u, side="right") - 1
        out = np.empty_like(u)
        below = idx < 0
        if np.any(below):
            # pure tail: integral up to u with slope s_below
            out[below] = base.log_eval(u[below]) - math.log(base._s_below)
        inside = ~below
        if np.any(inside):
            i = idx[inside]
            du = u[inside] - base._u[i]
            sl = base._s[i]
            with np.errstate(divide="ignore"):
                partial = np.where(
                    du > 0,
                    base._h[i] + sl * du + np.log1p(-np.exp(-sl * np.maximum(du, 1e-300)))
                    - np.log(sl),
                    -np.inf,
                )
            out[inside] = np.logaddexp(self._cums[i], partial)
        return out

    def slope(self, u):
        # h1'(u) = F(e^u)/F1(e^u)
        return np.exp(self.base.log_eval(u) - self.log_eval(u))

    def deriv(self, x):
        # F1'(x) = F(x)/x exactly, by construction
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        pos = x > 0
        if np.any(pos):
            u = np.log(x[pos])
            out[pos] = np.exp(self.base.log_eval(u) - u)
        return out if out.shape else float(out)


def sample_profile(base: OrliczFn, u_lo: float = -64.0, u_hi: float = 2048.0,
                   step: float = 0.125) -> PiecewiseAffineFn:
    """Piecewise-affine resampling of a smooth profile (uniform step <= 1/8)."""
    if step > 0.125 + 1e-12:
        raise ValueError("grid step must be <= 1/8")
    grid = np.arange(u_lo, u_hi + step, step)
    return PiecewiseAffineFn.from_samples(f"grid<{base.name}>", dict(base.params),
                                          grid, base.log_eval(grid))


def convexify(F: OrliczFn) -> ConvexifiedFn:
    """F1(x) = int_0^x F(t)/t dt; rejects profiles with a slope below 1."""
    seg = F if F.breaks() is not None else sample_profile(F)
    if seg._s_below < 1.0 - 1e-12 or np.any(seg._s < 1.0 - 1e-12):
        raise ValueError("convexify requires F(x)/x nondecreasing (slopes >= 1)")
    return ConvexifiedFn(F)


# -- generator facade --------------------------------------------------------


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    params: dict = field(default_factory=dict)
    selector: str | None = None  # "F" or "G" for the pair generator


def make_orlicz(spec):
    """Build an Orlicz function (or (F, G) pair) from a GeneratorSpec.

    ``brudnyi`` returns the pair unless a selector is given.
    """
    if isinstance(spec, OrliczFn):
        return spec
    kind, params, sel = spec.kind, dict(spec.params), spec.selector
    if kind == "power":
        return power(params["p"])
    if kind == "pwpower":
        return pwpower(params["p0"], params["p1"])
    if kind == "logfactor":
        return logfactor_fn(params["p"])
    if kind == "example1":
        return example1()
    if kind == "elastic-nl":
        return elastic_non_lorentz()
    if kind == "minimal":
        return MinimalFn(params.get("alpha", 0.05))
    if kind == "brudnyi":
        fg = brudnyi_pair(params["p"], params["q"])
        if sel is None:
            return fg
        return fg[0] if sel.upper() == "F" else fg[1]
    raise ValueError(f"unknown generator kind {kind!r}")


def logfactor_fn(p: float) -> OrliczFn:
    return LogFactorFn(p)


# ---------------------------------------------------------------------------
# indices
# ---------------------------------------------------------------------------


@dataclass
class IndexReport:
    alpha_inf: float
    beta_inf: float
    alpha_0: float
    beta_0: float
    delta2: float
    err_inf: float
    err_0: float

    @property
    def boyd_unit(self):
        """Boyd indices of L_F[0,1]: (p_F, q_F) = (alpha_inf, beta_inf)."""
        return (self.alpha_inf, self.beta_inf)

    @property
    def boyd_halfline(self):
        return (min(self.alpha_inf, self.alpha_0), max(self.beta_inf, self.beta_0))

    def to_json_dict(self):
        return {
            "alpha_inf": self.alpha_inf, "beta_inf": self.beta_inf,
            "alpha_0": self.alpha_0, "beta_0": self.beta_0,
            "delta2": self.delta2,
            "err_inf": self.err_inf, "err_0": self.err_0,
            "boyd_unit": list(self.boyd_unit),
            "boyd_halfline": list(self.boyd_halfline),
        }


def _window_slopes(F: OrliczFn, v_hi: np.ndarray, v_lo: np.ndarray):
    y = v_hi - v_lo
    return (F.log_eval(v_hi) - F.log_eval(v_lo)) / y


def _index_candidates(F: OrliczFn, grid: np.ndarray, y_layer: float, sign: int):
    """All window pairs (v_lo, v_hi) on one side of 0 with length >= y_layer.

    sign=+1 keeps windows in [0, inf) (indices at infinity: t >= 1 and
    s t >= 1); sign=-1 keeps windows in (-inf, 0].
    """
    pts = set(float(v) for v in grid)
    br = F.breaks()
    if br is not None:
        for b in br:
            if (sign > 0 and b >= 0.0) or (sign < 0 and b <= 0.0):
                pts.add(float(b))
    pts.add(0.0)
    pts = np.array(sorted(pts))
    if sign > 0:
        pts = pts[pts >= 0.0]
    else:
        pts = pts[pts <= 0.0]
    lo, hi = np.meshgrid(pts, pts, indexing="ij")
    keep = (hi - lo) >= y_layer
    return lo[keep], hi[keep]


def indices(F: OrliczFn, t_grid=None, x_grid=None, y_layer: float = 1.5) -> IndexReport:
    """Matuszewska-Orlicz indices from window-slope extremes of h.

    F(st) <= C s^p F(t) over the large-argument regime (t >= 1 and st >= 1)
    pins alpha_inf as the infimum of window slopes (h(v) - h(v'))/(v - v')
    over windows [v', v] in [0, inf); beta_inf is the supremum, and the
    0-indices use windows in (-inf, 0].  Windows shorter than ``y_layer``
    are the discarded boundary layer absorbing the constant C.  Breakpoints
    of piecewise-affine profiles are added to the grid so sustained slopes
    are measured exactly.
    """
    if t_grid is None:
        t_grid = np.exp(np.linspace(0.0, 64.0, 257))
    v_grid = np.log(np.asarray(t_grid, dtype=float))
    if x_grid is not None:
        ys = -np.log(np.asarray(x_grid, dtype=float))
        v_grid = np.unique(np.concatenate([v_grid, v_grid[-1] - ys]))

    lo, hi = _index_candidates(F, v_grid, y_layer, +1)
    slopes_inf = _window_slopes(F, hi, lo)
    lo0, hi0 = _index_candidates(F, -v_grid, y_layer, -1)
    slopes_0 = _window_slopes(F, hi0, lo0)

    span = float(np.max(v_grid) - np.min(v_grid[v_grid >= 0])) if v_grid.size else 1.0
    a_inf, b_inf = float(np.min(slopes_inf)), float(np.max(slopes_inf))
    a_0, b_0 = float(np.min(slopes_0)), float(np.max(slopes_0))
    err_inf = (b_inf - a_inf) * y_layer / max(span, y_layer)
    err_0 = (b_0 - a_0) * y_layer / max(span, y_layer)

    u_d2 = np.concatenate([v_grid, -v_grid])
    br = F.breaks()
    if br is not None:
        u_d2 = np.concatenate([u_d2, br, br - LOG2 / 2])
    d2 = float(np.exp(np.max(F.log_eval(u_d2 + LOG2) - F.log_eval(u_d2))))
    return IndexReport(a_inf, b_inf, a_0, b_0, d2, err_inf, err_0)


# ---------------------------------------------------------------------------
# lambda sequence and regular variation
# ---------------------------------------------------------------------------


def lambda_seq(F: OrliczFn, window) -> dict[int, float]:
    """lambda_n with F(lambda_n) = 2^{-n} for n in the window (n <= 0).

    Strictly decreasing in n with lambda_{n-1} <= 2 lambda_n (convexity /
    slope >= 1 of the profile).
    """
    ns = window.indices()
    if np.any(ns > 0):
        raise ValueError("lambda sequence lives on nonpositive indices")
    us = F.log_inv(-ns.astype(float) * LOG2)
    us = np.atleast_1d(us)
    return {int(n): float(math.exp(u)) for n, u in zip(ns, us)}


def rv_defect(F: OrliczFn, x_grid, t_range) -> float:
    """max_x (sup_tail F_t(x)) / (inf_tail F_t(x)), tail = upper half of t_range.

    A defect near 1 signals regular variation; the quantity equals
    exp(osc of omega over the tail).
    """
    v = _as_log_grid(t_range)
    if v.size < 64:
        raise ValueError("t_range needs at least 64 points")
    tail = v[v.size // 2:]
    worst = 1.0
    for x in np.asarray(x_grid, dtype=float):
        kappa = -math.log(x)
        omega = F.log_eval(tail) - F.log_eval(tail - kappa)
        worst = max(worst, float(np.exp(np.max(omega) - np.min(omega))))
    return worst


def regularize(F: OrliczFn, p: float, grid, y_cap: float = None,
               c_limit: float = 3.0):
    """Smooth F to a regularly-varying-order-p profile by window averaging.

    Checks the uniform deviation |h(v) - h(v-y) - p y| <= c on the tail of
    the grid first (error with the witnessing (x, y) if it exceeds
    ``c_limit``); then builds u(v) as the largest admissible window length
    capped to slope 1, averages h(s) + p(v - s) over [v - u, v], and
    convexifies the result.  |h - g| stays bounded by the measured c.
    """
    base = F if F.breaks() is not None else sample_profile(F)
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 8 or np.any(np.diff(grid) <= 0):
        raise ValueError("regularize needs an increasing grid")
    if y_cap is None:
        y_cap = (grid[-1] - grid[0]) / 4.0
    ys = np.linspace(0.0, y_cap, 65)[1:]
    tail = grid[grid >= grid[0] + (grid[-1] - grid[0]) / 2.0]
    h_tail = base.log_eval(tail)
    dev = np.abs(h_tail[:, None] - base.log_eval(tail[:, None] - ys[None, :])
                 - p * ys[None, :])
    c = float(np.max(dev))
    if c > c_limit:
        i, j = np.unravel_index(np.argmax(dev), dev.shape)
        raise ValueError(
            f"regular-variation deviation {c:.3g} exceeds {c_limit} at "
            f"x=exp({tail[i]:.3g}), y={ys[j]:.3g}")

    # largest valid window per grid point, then slope-1 cap
    dev_all = np.abs(base.log_eval(grid[:, None]) -
                     base.log_eval(grid[:, None] - ys[None, :]) - p * ys[None, :])
    ok = dev_all <= c + 1e-12
    first_bad = np.argmin(ok, axis=1)
    ubar = np.where(ok.all(axis=1), ys[-1], ys[np.maximum(first_bad - 1, 0)])
    ubar[~ok[:, 0]] = 0.0
    u = np.empty_like(ubar)
    u[0] = ubar[0]
    for i in range(1, u.size):
        u[i] = min(ubar[i], u[i - 1] + (grid[i] - grid[i - 1]))

    # integral of the piecewise-affine h, exact (trapezoid on its own kinks)
    kinks = np.unique(np.concatenate([base._u, grid, grid - u]))
    hk = base.log_eval(kinks)
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (hk[1:] + hk[:-1]) * np.diff(kinks))])

    def h_int(a, b):
        ia = np.interp(a, kinks, cum)
        ib = np.interp(b, kinks, cum)
        return ib - ia

    g = base.log_eval(grid).copy()
    pos = u > 1e-9
    g[pos] = h_int(grid[pos] - u[pos], grid[pos]) / u[pos] + 0.5 * p * u[pos]
    smoothed = PiecewiseAffineFn.from_samples(f"regularize<{base.name}>",
                                              dict(base.params), grid, g,
                                              slope_below=float(base._s_below))
    out = convexify(smoothed)
    out.regularize_c = c
    out.regularize_gap = float(np.max(np.abs(g - base.log_eval(grid))))
    return out


# ---------------------------------------------------------------------------
# oscillation counters, elasticity, bounded witness
# ---------------------------------------------------------------------------


class TGrid:
    """Geometric t-grid held in log space (t can exceed float range)."""

    def __init__(self, log_t):
        self.log = np.asarray(log_t, dtype=float)
        if self.log.ndim != 1 or self.log.size < 2 or np.any(np.diff(self.log) <= 0):
            raise ValueError("grid must be increasing")

    @property
    def size(self):
        return self.log.size

    @staticmethod
    def span(v_lo: float, v_hi: float, ratio: float = 2.0 ** 0.25) -> "TGrid":
        """Grid of t = e^v from v_lo up to exactly v_hi, steps <= log(ratio)."""
        step = math.log(ratio)
        n = int(math.ceil((v_hi - v_lo) / step - 1e-12))
        pts = v_lo + step * np.arange(n)
        return TGrid(np.append(pts, v_hi))


def geometric_grid(t_min: float, t_max: float, ratio: float = 2.0 ** 0.25) -> TGrid:
    return TGrid.span(math.log(t_min), math.log(t_max), ratio)


def _as_log_grid(grid) -> np.ndarray:
    if isinstance(grid, TGrid):
        return grid.log
    return np.log(np.asarray(grid, dtype=float))


def _check_counter_grid(grid, side: str) -> np.ndarray:
    v = _as_log_grid(grid)
    if v.ndim != 1 or v.size < 2 or np.any(np.diff(v) <= 0):
        raise ValueError("counter grid must be increasing")
    if np.any(np.diff(v) > 0.25 * LOG2 + 1e-9):
        raise ValueError("counter grid ratio must be <= 2^(1/4)")
    if side == "inf" and v[0] < -1e-12:
        raise ValueError("at-infinity grid starts at t >= 1")
    if side == "0" and v[-1] > 1e-12:
        raise ValueError("at-zero grid ends at t <= 1")
    return v


def counter(F: OrliczFn, kind: str, x: float, C: float, side: str = "inf",
            grid=None) -> int:
    """Greedy oscillation counters Phi+/Phi-/Psi_p on a geometric t-grid.

    Phi+ counts disjoint [a,b] with F_b(x) >= C F_a(x), i.e. drops of
    omega(v) = h(v) - h(v - log(1/x)) by log C; Phi- counts rises.  The
    earliest-endpoint greedy is optimal for disjoint-interval counting.
    Psi_p counts >= 2-spaced grid points where F_t(x) deviates from x^p by
    the factor C, per the Lorentz-space criterion.  All values are certified
    lower bounds for the true (grid-free) counters.
    """
    if not (0 < x <= 1):
        raise ValueError("counter argument x must lie in (0, 1]")
    if C <= 1:
        raise ValueError("counter threshold C must exceed 1")
    if grid is None:
        grid = TGrid.span(0.0, 1024.0) if side == "inf" else TGrid.span(-1024.0, 0.0)
    v = _check_counter_grid(grid, side)
    kappa = -math.log(x) if x < 1 else 0.0
    logC = math.log(C)
    omega = F.log_eval(v) - F.log_eval(v - kappa)

    if kind in ("phi+", "phi-"):
        sign = 1.0 if kind == "phi+" else -1.0
        w = sign * omega  # count drops of w by logC
        count = 0
        run_max = w[0]
        for j in range(1, w.size):
            run_max = max(run_max, w[j - 1])
            if run_max - w[j] >= logC:
                count += 1
                run_max = w[j]
        return count

    if kind.startswith("psi"):
        p = float(kind.split(":")[1]) if ":" in kind else float(kind[3:])
        dev = np.abs(p * kappa - omega)
        count = 0
        last_v = -np.inf
        for j in range(v.size):
            if dev[j] >= logC and v[j] - last_v >= LOG2 - 1e-12:
                count += 1
                last_v = v[j]
        return count

    raise ValueError(f"unknown counter kind {kind!r}")


def phi_plus(F, x, C, side="inf", grid=None):
    return counter(F, "phi+", x, C, side, grid)


def phi_minus(F, x, C, side="inf", grid=None):
    return counter(F, "phi-", x, C, side, grid)


def psi_count(F, p, x, C, side="inf", grid=None):
    return counter(F, f"psi:{p}", x, C, side, grid)


# classification thresholds, frozen from the pre-registered oracle run
# (power/pwpower/elastic-nl stay below the flat/witness bounds on the default
# grid; example1 crosses both).
ELASTIC_FLAT_BOUND = 2
WITNESS_COUNT_FLOOR = 10
WITNESS_TAIL_POINTS = 5


@dataclass
class ElasticityReport:
    x_grid: np.ndarray
    phi_plus: np.ndarray
    phi_minus: np.ndarray
    fit_r: float
    fit_logC1: float
    fit_residual: float
    classification: str
    side: str
    C0: float

    @property
    def totals(self):
        return self.phi_plus + self.phi_minus

    def to_json_dict(self):
        return {
            "C0": self.C0,
            "side": self.side,
            "x": [float(v) for v in self.x_grid],
            "phi_plus": [int(v) for v in self.phi_plus],
            "phi_minus": [int(v) for v in self.phi_minus],
            "fit": {"r": self.fit_r, "logC1": self.fit_logC1,
                    "residual": self.fit_residual},
            "classification": self.classification,
        }


def elasticity_report(F: OrliczFn, C0: float = 4.0, x_grid=None,
                      side: str = "inf", t_grid=None) -> ElasticityReport:
    """Phi counter table over x = 2^{-k} plus a power-law fit and a verdict.

    Classification is finite-data honest: "elastic-consistent" when the
    counts stay inside the envelope observed for elastic generators,
    "inelastic-witness" when they keep growing past it (thresholds frozen
    from the oracle pre-run).  One-sided counts suffice in principle; both
    are computed and reported.
    """
    if x_grid is None:
        x_grid = 2.0 ** -np.arange(4, 17, dtype=float)
    x_grid = np.asarray(x_grid, dtype=float)
    if np.any(np.diff(x_grid) >= 0):
        raise ValueError("x_grid must be decreasing")
    if t_grid is None:
        t_grid = TGrid.span(0.0, 2048.0) if side == "inf" \
            else TGrid.span(-2048.0, 0.0)
    nplus = np.array([counter(F, "phi+", x, C0, side, t_grid) for x in x_grid])
    nminus = np.array([counter(F, "phi-", x, C0, side, t_grid) for x in x_grid])
    totals = nplus + nminus

    lx = np.log(1.0 / x_grid)
    ly = np.log(totals + 1.0)
    r_hat, logC1 = np.polyfit(lx, ly, 1)
    resid = float(np.max(np.abs(ly - (r_hat * lx + logC1))))

    tail = totals[-WITNESS_TAIL_POINTS:]
    growing = bool(np.all(np.diff(tail) > 0))
    if np.max(totals) <= ELASTIC_FLAT_BOUND:
        verdict = "elastic-consistent"
    elif growing and int(np.max(totals)) > WITNESS_COUNT_FLOOR:
        verdict = "inelastic-witness"
    else:
        verdict = "elastic-consistent"
    return ElasticityReport(x_grid, nplus, nminus, float(r_hat), float(logC1),
                            resid, verdict, side, C0)


@dataclass
class WWitnessReport:
    log_t: np.ndarray
    w: np.ndarray
    C1: float
    C0: float

    def w_at(self, t: float) -> float:
        i = int(np.searchsorted(self.log_t, math.log(t), side="right")) - 1
        return float(self.w[max(i, 0)])

    def to_json_dict(self):
        return {"C0": self.C0, "C1": self.C1,
                "log_t": [float(v) for v in self.log_t],
                "w": [float(v) for v in self.w]}


def w_witness(F: OrliczFn, C0: float, t_grid=None, x_grid=None) -> WWitnessReport:
    """Monotone witness w(t) for the bounded-oscillation characterization.

    w(t) is the best total profit of disjoint grid intervals inside [1, t],
    where the profit of (a, b) is max over x of (F_b(x) - C0 F_a(x))_+ --
    weighted interval scheduling on all grid pairs.  By superadditivity
    w(t) - w(s) dominates every single-interval profit, so

        F_t(x) <= C0 F_s(x) + w(t) - w(s)

    holds on the grid by construction; C1 = w(t_max) - w(1) is the witness
    bound (finite-range: it can only certify growth, not boundedness).
    """
    if t_grid is None:
        t_grid = TGrid.span(0.0, 256.0, ratio=2.0)
    if x_grid is None:
        x_grid = 2.0 ** -np.arange(1, 17, dtype=float)
    v = _as_log_grid(t_grid)
    x_grid = np.asarray(x_grid, dtype=float)

    ft = np.empty((v.size, x_grid.size))
    for j, x in enumerate(x_grid):
        ft[:, j] = np.exp(F.log_eval(v + math.log(x)) - F.log_eval(v))
    # profit[i, k] = max_x (F_{t_k}(x) - C0 F_{t_i}(x))_+
    profit = np.maximum(ft[None, :, :] - C0 * ft[:, None, :], 0.0).max(axis=2)

    best = np.zeros(v.size)
    for k in range(1, v.size):
        best[k] = max(best[k - 1], float(np.max(best[:k] + profit[:k, k])))

    return WWitnessReport(v, best, float(best[-1] - best[0]), C0)
