"""Peetre K-functional computation.

K(t, f; X, Y) = inf{ ||x||_X + t ||y||_Y : x + y = f } is computed by convex
minimization after two exact reductions:

1. Cone reduction.  For Kothe lattice norms the infimum is unchanged when
   restricted to 0 <= x <= |f|: replacing any split f = x + y by
   x' = med(0, x, f), y' = f - x' gives |x'| <= |x| and |y'| <= |y|
   pointwise, so neither norm increases (sign transfer handles signed f,
   whose K equals K(t, |f|)).
2. Grid reduction.  For step functions the infimum is unchanged when x is
   constant on the pieces of f: conditional expectation onto the piece
   partition contracts both L_1 and L_infty, hence (Tg)** <= g**, and every
   r.i. norm with the Fatou property is monotone under **-domination.  So
   averaging an arbitrary split piece-wise never increases the objective.

What remains is a finite-dimensional convex problem over the box
0 <= c <= |f|, minimized by cyclic coordinate descent (descending-|f| sweep
order, golden-section line searches) and cross-checked against the
truncation family x = min(|f|, c) and, for sequence couples, all
prefix/suffix splits.  The reported value is the best decomposition found
(an upper bound); the certificate carries a numeric convexity gap estimate
for the lower side.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .measure import SeqVec, StepFunction, rearrange
from .spaces import (LpSpace, SeparationFit, SeqSpaceSpec, SpaceSpec,
                     e_space, fn_norm)

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
SWEEP_CAP = 64


@dataclass
class KResult:
    t: float
    value: float            # best decomposition value (upper bound)
    lower: float             # value minus the convexity gap estimate
    x_mass: float            # ||x||_X at the best split
    y_mass: float            # ||y||_Y at the best split
    sweeps: int
    converged: bool
    split: np.ndarray = field(repr=False, default=None)

    @property
    def upper(self) -> float:
        return self.value


def _norm_closure(space, template):
    """Fast ||.|| as a function of the piece/entry value vector."""
    if isinstance(template, StepFunction):
        lens = template.lengths
        if isinstance(space, LpSpace):
            p = space.p
            if math.isinf(p):
                return lambda v: float(np.max(np.abs(v))) if v.size else 0.0
            return lambda v: float(np.dot(np.abs(v) ** p, lens) ** (1.0 / p))
        return lambda v: space.fn_norm(template.with_values(v))
    space = space if isinstance(space, SeqSpaceSpec) else e_space(space, template.window)
    return space.norm_values


def _golden_min(phi, lo: float, hi: float, tol: float):
    """Golden-section minimum of a convex phi on [lo, hi]."""
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = phi(c), phi(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = phi(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = phi(d)
    xm = 0.5 * (a + b)
    return xm, phi(xm)


def k_numeric(t: float, f, X, Y, tol: float = 1e-8) -> KResult:
    """K(t, f; X, Y) over the reduced cone, by cyclic coordinate descent.

    ``f`` is a StepFunction (X, Y function spaces) or a SeqVec (X, Y sequence
    spaces, or function spaces routed through their E_X).  Convergence:
    a full sweep improving by less than tol * value; the sweep cap leaves
    ``converged=False`` with the best value and gap estimate intact.
    """
    if t <= 0:
        raise ValueError("K-functional needs t > 0")
    if isinstance(f, StepFunction):
        a = np.abs(f.vals)
        template = f
    elif isinstance(f, SeqVec):
        a = np.abs(f.values)
        template = f
    else:
        raise TypeError("f must be a StepFunction or SeqVec")
    nx = _norm_closure(X, template)
    ny = _norm_closure(Y, template)

    if not np.any(a > 0):
        return KResult(t, 0.0, 0.0, 0.0, 0.0, 0, True, a.copy())

    def objective(c: np.ndarray) -> float:
        return nx(c) + t * ny(a - c)

    # trial decompositions: trivial, truncation family, prefix/suffix splits
    best_c = np.zeros_like(a)
    best_v = objective(best_c)
    for cand in _trial_splits(a, isinstance(template, SeqVec)):
        v = objective(cand)
        if v < best_v:
            best_v, best_c = v, cand

    order = np.argsort(-a, kind="stable")
    order = order[a[order] > 0]
    c = best_c.copy()
    value = best_v
    sweeps = 0
    converged = False
    for sweep in range(SWEEP_CAP):
        sweeps = sweep + 1
        before = value
        for i in order:
            ai = a[i]

            def line(z, i=i):
                c[i] = z
                return objective(c)

            zi, vi = _golden_min(line, 0.0, ai, max(ai * tol / 10.0, 1e-15))
            c[i] = zi
            value = vi
        if before - value <= tol * max(value, 1e-300):
            converged = True
            break
    if value > best_v:  # keep the incumbent if descent stalled above it
        value, c = best_v, best_c
    gap = _convexity_gap(objective, c, a, value)
    return KResult(t, value, max(value - gap, 0.0), nx(c), ny(a - c),
                   sweeps, converged, c)


def _trial_splits(a: np.ndarray, sequence_like: bool):
    levels = np.unique(a[a > 0])
    for theta in levels:
        yield np.minimum(a, theta)       # flat part in X
        yield a - np.minimum(a, theta)   # peaks in X
    yield a.copy()
    if sequence_like:
        for m in range(1, a.size):
            cand = a.copy()
            cand[m:] = 0.0
            yield cand
            cand2 = a.copy()
            cand2[:m] = 0.0
            yield cand2


def _convexity_gap(objective, c, a, value):
    """Box lower-bound gap from a numeric subgradient at the solution."""
    gap = 0.0
    for i in range(a.size):
        if a[i] <= 0:
            continue
        h = max(a[i] * 1e-6, 1e-12)
        up = np.clip(c.copy(), 0, a)
        dn = up.copy()
        up[i] = min(c[i] + h, a[i])
        dn[i] = max(c[i] - h, 0.0)
        denom = up[i] - dn[i]
        if denom <= 0:
            continue
        g = (objective(up) - objective(dn)) / denom
        gap += max(g * (c[i] - 0.0), 0.0) if g > 0 else max(-g * (a[i] - c[i]), 0.0)
    return gap


def k_l1_linf_oracle(t: float, f: StepFunction) -> float:
    """int_0^t f*(s) ds -- the classical closed form of K(t, f; L1, Linf).

    Exact on step data; validated against ``k_numeric`` as part of the test
    suite before acceptance relies on it.
    """
    if t <= 0:
        raise ValueError("oracle needs t > 0")
    fs = rearrange(f)
    bp = np.asarray(fs.breakpoints)
    covered = np.clip(np.minimum(bp[1:], t) - bp[:-1], 0.0, None)
    return float(np.dot(fs.vals, covered))


def k_block_estimate(t: float, x: SeqVec, E: SeqSpaceSpec, F: SeqSpaceSpec,
                     fit: SeparationFit, return_index: bool = False):
    """Prefix/suffix split value ||x_(-inf,a]||_E + t ||x_(a,inf)||_F.

    For exponentially separated couples (``fit.separated`` must hold) the
    split at the index a with rho(a) <= t <= rho(a+1) is within a constant
    of K(t, x); below the rho range the bound is t ||x||_F, above it
    ||x||_E.  Each split is itself a decomposition, so the value always
    dominates K.  Among admissible indices the smallest split is returned.
    """
    if t <= 0:
        raise ValueError("block estimate needs t > 0")
    if not fit.separated:
        raise ValueError("couple is not exponentially separated")
    rho = fit.rho
    ns = sorted(rho)
    lo, hi = ns[0], ns[-1]

    def split(a: int) -> float:
        return E.norm(x.prefix(a)) + t * F.norm(x.suffix(a + 1))

    if t < min(rho.values()):
        value, a_best = t * F.norm(x), lo - 1
    elif t > max(rho.values()):
        value, a_best = E.norm(x), hi
    else:
        cands = [a for a in ns[:-1] if rho[a] <= t <= rho[a + 1]]
        if not cands:  # wobble gap: fall back to the nearest-rho index
            cands = [min(ns[:-1], key=lambda a: abs(math.log(t) - math.log(rho[a])))]
        value, a_best = math.inf, None
        for a in cands:
            v = split(a)
            if v < value:
                value, a_best = v, a
    if return_index:
        return value, a_best
    return value


def k_profile(f, X, Y, t_grid, tol: float = 1e-8, workers: int = 1):
    """Rows (t, K, x_mass, y_mass) along an increasing positive t grid."""
    ts = [float(t) for t in t_grid]
    if any(t <= 0 for t in ts) or any(b <= a for a, b in zip(ts, ts[1:])):
        raise ValueError("t grid must be positive and increasing")
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda t: k_numeric(t, f, X, Y, tol), ts))
    else:
        results = [k_numeric(t, f, X, Y, tol) for t in ts]
    return [
        {"t": r.t, "K": r.value, "x_mass": r.x_mass, "y_mass": r.y_mass}
        for r in results
    ]
