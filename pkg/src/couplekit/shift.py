"""Interlaced families and adversarial estimation of shift-property constants.

The right-shift property (RSP) of a sequence space E asks for a uniform C:
for every interlaced pair family (x_n, y_n) with ||y_n|| <= ||x_n|| = 1 and
supp x_1 < supp y_1 < supp x_2 < ..., and all scalars alpha,

    || sum alpha_n y_n || <= C || sum alpha_n x_n ||.

A finite search can only falsify: ``shift_constant_estimate`` returns the
best ratio found (a certified lower bound on the true constant) together
with a replayable witness.  The vocabulary is therefore "RSP violated with
witness (ratio r)" versus "consistent with RSP up to C-hat at this width".
The left-shift property is evaluated as RSP of the order-reversed space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import UsageError
from .measure import SeqVec, Window
from .spaces import SeqSpaceSpec

RSP = "rsp"
LSP = "lsp"


@dataclass
class InterlacedFamily:
    """Pairs (x_n, y_n) with strictly increasing alternating supports.

    Normalization ||x_n||_E = 1, ||y_n||_E <= 1 is enforced by the
    generator to 1e-10 after scaling.
    """

    window: Window
    pairs: list[tuple[SeqVec, SeqVec]]

    def validate(self, E: SeqSpaceSpec | None = None, tol: float = 1e-10):
        last_hi = -math.inf
        for x, y in self.pairs:
            sx, sy = x.support(), y.support()
            if sx.size == 0 or sy.size == 0:
                raise ValueError("empty block in interlaced family")
            if not (last_hi < sx.min() and sx.max() < sy.min()):
                raise ValueError("supports are not strictly interlaced")
            last_hi = sy.max()
        if E is not None:
            for x, y in self.pairs:
                if abs(E.norm(x) - 1.0) > tol:
                    raise ValueError("x block is not normalized")
                if E.norm(y) > 1.0 + tol:
                    raise ValueError("y block norm exceeds 1")

    def to_json_dict(self):
        return {
            "window": self.window.to_json_dict(),
            "pairs": [
                {"x": {str(k): v for k, v in x.entries().items()},
                 "y": {str(k): v for k, v in y.entries().items()}}
                for x, y in self.pairs
            ],
        }

    @staticmethod
    def from_json_dict(d) -> "InterlacedFamily":
        win = Window.from_json_dict(d["window"])
        pairs = []
        for p in d["pairs"]:
            x = SeqVec.from_entries(win, {int(k): v for k, v in p["x"].items()})
            y = SeqVec.from_entries(win, {int(k): v for k, v in p["y"].items()})
            pairs.append((x, y))
        return InterlacedFamily(win, pairs)


def gen_interlaced(E: SeqSpaceSpec, window: Window, n_pairs: int,
                   block_len_range=(1, 3), seed: int = 0,
                   rng: np.random.Generator | None = None) -> InterlacedFamily:
    """Random nonnegative interlaced family, normalized per the definition.

    2 * n_pairs blocks are placed in equal-width slots spanning the window
    (random offset and length inside each slot), which guarantees the strict
    support ordering while varying the gaps.
    """
    if rng is None:
        rng = np.random.default_rng(seed)
    lmin, lmax = block_len_range
    if lmin < 1 or lmax < lmin:
        raise UsageError("invalid block length range")
    slots = 2 * n_pairs
    if window.size < slots * lmax:
        raise UsageError(
            f"window of size {window.size} cannot pack {n_pairs} pairs "
            f"with blocks up to {lmax}")
    slot_w = window.size // slots
    pairs = []
    x_block = None
    for s in range(slots):
        length = int(rng.integers(lmin, lmax + 1))
        start_lo = window.lo + s * slot_w
        offset = int(rng.integers(0, max(1, slot_w - length + 1)))
        start = start_lo + offset
        vals = rng.random(length) + 0.05
        vec = SeqVec.from_entries(window, {start + i: float(v)
                                           for i, v in enumerate(vals)})
        nrm = E.norm(vec)
        vec = vec.scale(1.0 / nrm)
        if s % 2 == 0:
            x_block = vec
        else:
            pairs.append((x_block, vec))
    fam = InterlacedFamily(window, pairs)
    fam.validate(E)
    return fam


@dataclass
class ShiftWitness:
    space_spec: str
    side: str
    window: Window
    family: InterlacedFamily
    alpha: list[float]
    ratio: float
    seed: int

    def to_json_dict(self):
        return {
            "space": self.space_spec,
            "side": self.side,
            "window": self.window.to_json_dict(),
            "family": self.family.to_json_dict(),
            "alpha": list(self.alpha),
            "ratio": self.ratio,
            "seed": self.seed,
        }

    @staticmethod
    def from_json_dict(d) -> "ShiftWitness":
        return ShiftWitness(d["space"], d["side"],
                            Window.from_json_dict(d["window"]),
                            InterlacedFamily.from_json_dict(d["family"]),
                            [float(a) for a in d["alpha"]],
                            float(d["ratio"]), int(d["seed"]))


@dataclass
class ShiftEstimate:
    c_hat: float
    witness: ShiftWitness | None
    side: str
    evals: int
    budget: int
    history: list[dict] = field(default_factory=list)


def _family_mats(family: InterlacedFamily):
    X = np.stack([x.values for x, _ in family.pairs])
    Y = np.stack([y.values for _, y in family.pairs])
    return X, Y


def _mat_ratio(E: SeqSpaceSpec, X: np.ndarray, Y: np.ndarray, alpha) -> float:
    denom = E.norm_values(alpha @ X)
    if denom == 0.0:
        return 0.0
    return E.norm_values(alpha @ Y) / denom


def family_ratio(E: SeqSpaceSpec, family: InterlacedFamily, alpha) -> float:
    """|| sum alpha_n y_n || / || sum alpha_n x_n || in E."""
    X, Y = _family_mats(family)
    return _mat_ratio(E, X, Y, np.asarray(alpha, dtype=float))


def replay_witness(E: SeqSpaceSpec, witness: ShiftWitness) -> float:
    """Recompute the witness ratio exactly from its serialized family."""
    fam = witness.family
    if witness.side == LSP:
        E = E.reversed_space()
    return family_ratio(E, fam, witness.alpha)


def _embed_family(fam: InterlacedFamily, window: Window) -> InterlacedFamily:
    pairs = [(SeqVec.from_entries(window, x.entries()),
              SeqVec.from_entries(window, y.entries())) for x, y in fam.pairs]
    return InterlacedFamily(window, pairs)


def shift_constant_estimate(E: SeqSpaceSpec, side: str = RSP,
                            window: Window | None = None,
                            budget: int = 10000, seed: int = 0,
                            n_pairs_range=(2, 6), block_len_range=(1, 3),
                            restarts_per_family: int = 20,
                            incumbent: ShiftEstimate | None = None,
                            target: float | None = None) -> ShiftEstimate:
    """Maximize the interlaced ratio by random families plus coordinate ascent.

    ``budget`` counts ratio evaluations.  The returned C-hat is a certified
    lower bound for the true shift constant; the incumbent (witness of a
    previous run, possibly on a narrower window) is never discarded, so the
    estimate is monotone in budget and window.  LSP is evaluated as RSP of
    the order-reversed space and the witness is recorded against the
    original space.
    """
    if side not in (RSP, LSP):
        raise UsageError(f"side must be '{RSP}' or '{LSP}'")
    work = E if side == RSP else E.reversed_space()
    win = window or work.window
    if win != work.window:
        raise UsageError("window must match the space window")
    rng = np.random.default_rng(seed)

    best_ratio = 0.0
    best = None
    evals = 0
    if incumbent is not None and incumbent.witness is not None:
        fam = _embed_family(incumbent.witness.family, win)
        alpha = list(incumbent.witness.alpha)
        r = family_ratio(work, fam, alpha)
        evals += 1
        best_ratio, best = r, (fam, alpha)

    n_lo, n_hi = n_pairs_range
    n_hi = min(n_hi, max(n_lo, win.size // (2 * block_len_range[1])))
    done = False
    while evals < budget and not done:
        n_pairs = int(rng.integers(n_lo, n_hi + 1))
        fam = gen_interlaced(work, win, n_pairs, block_len_range, rng=rng)
        X, Y = _family_mats(fam)
        for _ in range(restarts_per_family):
            if evals >= budget or done:
                break
            alpha = np.exp(rng.normal(0.0, 1.5, size=len(fam.pairs)))
            r = _mat_ratio(work, X, Y, alpha)
            evals += 1
            # multiplicative coordinate ascent; driving an alpha_n down to
            # ~0 deselects a useless pair, so large families self-prune
            improved = True
            while improved and evals < budget:
                improved = False
                for i in range(alpha.size):
                    for factor in (4.0, 0.25):
                        trial = alpha.copy()
                        trial[i] *= factor
                        r2 = _mat_ratio(work, X, Y, trial)
                        evals += 1
                        if r2 > r * (1 + 1e-12):
                            r, alpha = r2, trial
                            improved = True
                        if evals >= budget:
                            break
                    if evals >= budget:
                        break
            if r > best_ratio:
                best_ratio, best = r, (fam, list(alpha))
            if target is not None and best_ratio >= target:
                done = True  # witness level reached

    witness = None
    if best is not None:
        witness = ShiftWitness(E.spec_string(), side, win, best[0],
                               [float(a) for a in best[1]], float(best_ratio),
                               seed)
    return ShiftEstimate(float(best_ratio), witness, side, evals, budget)


def shift_schedule(space_factory, side: str, widths, budget: int, seed: int,
                   target: float | None = None, **kwargs) -> ShiftEstimate:
    """Doubling-window search: run each width, carrying the incumbent.

    ``space_factory(width)`` must return the space on the width-sized
    window.  Terminates early once ``target`` is reached.  The history
    records (width, C-hat) per stage.  Extra keyword arguments go to
    ``shift_constant_estimate``.
    """
    est = None
    history = []
    for k, width in enumerate(widths):
        E = space_factory(int(width))
        est = shift_constant_estimate(E, side, budget=budget, seed=seed + k,
                                      incumbent=est, target=target, **kwargs)
        history.append({"width": int(width), "c_hat": est.c_hat})
        if target is not None and est.c_hat >= target:
            break
    est.history = history
    return est
