import json

import numpy as np
import pytest

from couplekit import (HypothesisError, LinftySeq, PositiveMatrix, SeqVec,
                       UsageError, Window, dyadic_lp, fit_separation,
                       gen_interlaced, k_transfer, majorization_transfer,
                       op_norm, rank_one_shift, rho_profile)
from couplekit.spaces import shift_values
from conftest import random_seqvec

WIN = Window("Z", -12, 12)
E1 = dyadic_lp(1, WIN)
EINF = LinftySeq(WIN)
FIT = fit_separation(rho_profile(E1, EINF, WIN))


# ---------------------------------------------------------------------------
# rank-one sums
# ---------------------------------------------------------------------------


def test_rank_one_single_pair():
    x = SeqVec.basis(WIN, 0)          # ||e_0||_{E_L1} = 1
    y = SeqVec.basis(WIN, 1, 0.5)     # ||e_1/2||_{E_L1} = 1
    T = rank_one_shift([(x, y)], E1)
    assert np.allclose(T.apply(x).values, y.values)
    assert op_norm(T, E1, "exact") == pytest.approx(1.0)


def test_rank_one_reproduces_family(rng):
    for seed in range(6):
        fam = gen_interlaced(E1, WIN, 3, (1, 3), seed=seed)
        T = rank_one_shift(fam, E1)
        for x, y in fam.pairs:
            out = T.apply(x)
            assert np.max(np.abs(out.values - y.values)) <= 1e-9


def test_rank_one_shifted_mode(rng):
    fam = gen_interlaced(E1, WIN, 3, (1, 2), seed=1)
    T = rank_one_shift(fam, E1, shifted=True)
    for n, (x, _) in enumerate(fam.pairs):
        out = T.apply(x)
        target = fam.pairs[n + 1][1].values if n + 1 < 3 else np.zeros(WIN.size)
        assert np.max(np.abs(out.values - target)) <= 1e-9


def test_rank_one_kills_off_support(rng):
    fam = gen_interlaced(E1, WIN, 2, (1, 2), seed=2)
    T = rank_one_shift(fam, E1)
    used = set()
    for x, _ in fam.pairs:
        used |= set(x.support())
    free = [n for n in WIN.indices() if n not in used]
    z = SeqVec.from_entries(WIN, {int(n): 1.0 for n in free[:5]})
    assert not np.any(T.apply(z).values)


# ---------------------------------------------------------------------------
# majorization transfer
# ---------------------------------------------------------------------------


def test_majorization_identity():
    x = SeqVec.basis(WIN, 0)
    T = majorization_transfer(x, x, E1, EINF)
    assert np.allclose(T.apply(x).values, x.values)
    assert T.certified_bounds["E"] is not None


def test_majorization_shift_example():
    x = SeqVec.basis(WIN, 0)
    y = SeqVec.basis(WIN, 1, 0.5)  # norm balanced: ||y|| = ||x||
    T = majorization_transfer(x, y, E1, EINF)
    assert np.allclose(T.apply(x).values, y.values)
    lower = op_norm(T, E1, "lower", budget=100, seed=0)
    assert lower <= T.certified_bounds["E"] + 1e-9


def test_majorization_seeded_replay(rng):
    worst = 0.0
    for _ in range(30):
        x = random_seqvec(rng, WIN, k=7)
        y = random_seqvec(rng, WIN, k=7)
        # scale y down until prefix majorization holds
        px = [E1.norm(x.prefix(int(a))) for a in WIN.indices()]
        py = [E1.norm(y.prefix(int(a))) for a in WIN.indices()]
        c = min((a / b for a, b in zip(px, py) if b > 0), default=1.0)
        y = y.scale(0.99 * c)
        T = majorization_transfer(x, y, E1, EINF)
        err = np.max(np.abs(T.apply(x).values - y.values))
        worst = max(worst, err / max(np.max(np.abs(y.values)), 1e-300))
        assert all(v >= 0 for v in T.entries.values())
    assert worst <= 1e-9


def test_majorization_hypothesis_error_names_index():
    x = SeqVec.basis(WIN, 3)
    y = SeqVec.basis(WIN, -2, 0.01)  # y has mass before x does
    with pytest.raises(HypothesisError, match="a = -2"):
        majorization_transfer(x, y, E1, EINF)


def test_majorization_zero_x_error():
    z = SeqVec(WIN, np.zeros(WIN.size))
    y = SeqVec.basis(WIN, 0, 0.5)
    with pytest.raises(HypothesisError):
        majorization_transfer(z, y, E1, EINF)
    T = majorization_transfer(z, z, E1, EINF)
    assert not T.entries


def test_majorization_rejects_signed():
    x = SeqVec.basis(WIN, 0, -1.0)
    with pytest.raises(UsageError):
        majorization_transfer(x, x, E1, EINF)


# ---------------------------------------------------------------------------
# K transfer
# ---------------------------------------------------------------------------


def test_k_transfer_identity():
    x = SeqVec.from_entries(WIN, {-4: 1.0, 0: 2.0, 5: 0.25})
    T = k_transfer(x, x, E1, EINF, FIT)
    assert np.max(np.abs(T.apply(x).values - x.values)) <= 1e-9 * 2.0


def test_k_transfer_half_multiplier():
    x = SeqVec.from_entries(WIN, {0: 1.0, 3: 0.5})
    y = x.scale(0.5)
    T = k_transfer(x, y, E1, EINF, FIT)
    assert all(j == k for (j, k) in T.entries)
    assert all(v == pytest.approx(0.5) for v in T.entries.values())


def test_k_transfer_seeded_damped_shifts(rng):
    for trial in range(8):
        vals = np.zeros(WIN.size)
        idx = rng.choice(np.arange(2, WIN.size - 2), size=6, replace=False)
        vals[idx] = rng.random(6) + 0.2
        x = SeqVec(WIN, vals)
        y = SeqVec(WIN, 0.45 * shift_values(vals, 1))
        T = k_transfer(x, y, E1, EINF, FIT)
        assert np.max(np.abs(T.apply(x).values - y.values)) <= 1e-9 * np.max(y.values)
        assert all(v >= 0 for v in T.entries.values())
        for label, space in (("E", E1), ("F", EINF)):
            lower = op_norm(T, space, "lower", budget=150, seed=trial)
            assert lower <= T.certified_bounds[label] + 1e-9


def test_k_transfer_rejects_undominated():
    x = SeqVec.basis(WIN, -5, 0.01)
    y = SeqVec.basis(WIN, 5, 50.0)
    with pytest.raises(HypothesisError, match="K-domination"):
        k_transfer(x, y, E1, EINF, FIT)


def test_k_transfer_requires_separation():
    flat = fit_separation({int(n): 1.0 for n in WIN.indices()})
    x = SeqVec.basis(WIN, 0)
    with pytest.raises(HypothesisError):
        k_transfer(x, x, E1, E1, flat)


# ---------------------------------------------------------------------------
# operator norms
# ---------------------------------------------------------------------------


def test_op_norm_diagonal_exact():
    T = PositiveMatrix(WIN)
    T.add_diagonal({-3: 0.5, 0: 2.0, 4: 1.5})
    assert op_norm(T, E1, "exact") == pytest.approx(2.0)
    assert op_norm(T, EINF, "exact") == pytest.approx(2.0)


def test_op_norm_single_entry_weight_ratio():
    T = PositiveMatrix(WIN)
    f = SeqVec.basis(WIN, -2)
    t = SeqVec.basis(WIN, 3)
    T.add_rank_one(f, t)  # T[3, -2] = 1
    assert op_norm(T, E1, "exact") == pytest.approx(2.0 ** (3 - (-2)))


def test_op_norm_lower_below_schur(rng):
    E2 = dyadic_lp(2, WIN)
    for seed in range(4):
        T = PositiveMatrix(WIN)
        g = np.random.default_rng(seed)
        for _ in range(8):
            j, k = int(g.integers(WIN.lo, WIN.hi + 1)), int(g.integers(WIN.lo, WIN.hi + 1))
            T.add_rank_one(SeqVec.basis(WIN, k, float(g.random())),
                           SeqVec.basis(WIN, j, 1.0))
        lower, upper = op_norm(T, E2, "interval", budget=200, seed=seed)
        assert lower <= upper + 1e-9


def test_op_norm_exact_unsupported():
    win = Window("Z-", -6, -1)
    from couplekit import OrliczModular, example1
    E = OrliczModular(example1(), win)
    T = PositiveMatrix(win)
    T.add_diagonal({-3: 1.0})
    with pytest.raises(UsageError):
        op_norm(T, E, "exact")
    assert op_norm(T, E, "lower", budget=50, seed=0) > 0


def test_op_norm_order_reversed_consistency():
    from couplekit import OrderReversed
    T = PositiveMatrix(WIN)
    T.add_rank_one(SeqVec.basis(WIN, -2), SeqVec.basis(WIN, 3, 0.7))
    R = OrderReversed(E1)
    direct = op_norm(T.reversed(), E1, "exact")
    via = op_norm(T, R, "exact")
    assert via == pytest.approx(direct)


# ---------------------------------------------------------------------------
# structural invariants
# ---------------------------------------------------------------------------


def test_localized_norm_sandwich(rng):
    # C1 = C0/(1 - 2^{-beta}); supp x in [a, b] localizes the norm ratio
    C1 = FIT.C0 / (1.0 - 2.0 ** -FIT.beta)
    for _ in range(12):
        a = int(rng.integers(WIN.lo, WIN.hi - 3))
        b = int(rng.integers(a, min(a + 6, WIN.hi)))
        x = random_seqvec(rng, WIN, k=3)
        x = x.restrict(range(a, b + 1))
        if not np.any(x.values):
            continue
        ratio = E1.norm(x) / EINF.norm(x)
        assert FIT.rho[a] / C1 - 1e-12 <= ratio <= C1 * FIT.rho[b] + 1e-12


def test_provenance_replay_bit_identical(rng):
    x = random_seqvec(rng, WIN, k=6)
    y = x.scale(0.5)
    T = majorization_transfer(x, y, E1, EINF)
    R = PositiveMatrix.replay(T.window, T.provenance)
    assert R.entries == T.entries


def test_matrix_json_round_trip(rng):
    x = random_seqvec(rng, WIN, k=5)
    T = majorization_transfer(x, x.scale(0.3), E1, EINF)
    blob = json.dumps(T.to_json_dict(), sort_keys=True)
    back = PositiveMatrix.from_json_dict(json.loads(blob))
    assert back.entries == T.entries
    assert back.certified_bounds == T.certified_bounds
    R = PositiveMatrix.replay(back.window, back.provenance)
    assert R.entries == T.entries


def test_positivity_enforced():
    T = PositiveMatrix(WIN)
    with pytest.raises(ValueError):
        T.add_diagonal({0: -1.0})
