import pytest

from couplekit import (FromSequenceSpace, LorentzSpace, LpSpace,
                       OrliczModular, OrliczSpace, PowerWeight, UsageError,
                       Window, boyd_indices, brudnyi_evidence, brudnyi_pair,
                       classify_couple, dyadic_lp, example1, linf_space,
                       power, pwpower)


# ---------------------------------------------------------------------------
# Boyd indices
# ---------------------------------------------------------------------------


def test_boyd_lp_exact():
    b = boyd_indices(LpSpace(2))
    assert (b.p, b.q) == (2.0, 2.0) and b.p_err == 0.0


def test_boyd_lorentz_power_weight():
    b = boyd_indices(LorentzSpace(2, PowerWeight(1.0 / 3.0)))
    assert b.p == pytest.approx(3.0, abs=0.02)
    assert b.q == pytest.approx(3.0, abs=0.02)


def test_boyd_orlicz_pwpower():
    b = boyd_indices(OrliczSpace(pwpower(2, 3)))
    assert b.p == pytest.approx(3.0, abs=0.02)
    assert b.q == pytest.approx(3.0, abs=0.02)


def test_boyd_from_sequence():
    X = FromSequenceSpace(dyadic_lp(2, Window("Z-", -32, -1)))
    b = boyd_indices(X)
    assert b.p == pytest.approx(2.0, rel=0.05)
    assert b.q == pytest.approx(2.0, rel=0.05)


# ---------------------------------------------------------------------------
# classify_couple
# ---------------------------------------------------------------------------


def test_l2_linf_is_calderon():
    rep = classify_couple(LpSpace(2), linf_space())
    assert rep.verdict == "calderon"
    assert "exact" in rep.caveat_level
    assert any("stretchability" in k for k in rep.evidence)


def test_orlicz_lorentz_vs_linf_witness():
    win = Window("Z-", -64, -1)
    X = FromSequenceSpace(OrliczModular(example1(), win))
    rep = classify_couple(X, linf_space(), {"budget": 2000, "seed": 3})
    assert rep.verdict == "not-calderon-witness"
    ev = rep.evidence["stretchability_X"]
    assert ev["classification"] == "inelastic-witness"
    assert ev["rsp_search"]["c_hat"] > 1.0


def test_brudnyi_pair_inconclusive_with_annotation():
    F, G = brudnyi_pair(1.5, 3.0)
    rep = classify_couple(OrliczSpace(F), OrliczSpace(G), {"seed": 1})
    assert rep.verdict == "inconclusive"
    assert "brudnyi" in rep.evidence
    assert any("counterexample-pair" in r for r in rep.reasons)


def test_orlicz_elastic_vs_linf_stays_inconclusive():
    # consistency-level positive evidence must not certify
    rep = classify_couple(OrliczSpace(pwpower(2, 3)), linf_space())
    assert rep.verdict == "inconclusive"
    assert rep.evidence["stretchability_X"]["classification"] == "elastic-consistent"


def test_power_orlicz_vs_linf_calderon():
    rep = classify_couple(OrliczSpace(power(2)), linf_space())
    assert rep.verdict == "calderon"


def test_boyd_gap_route_both_exact():
    rep = classify_couple(LpSpace(1), LpSpace(4))
    assert "separated-Boyd" in rep.applicable[0]
    assert rep.verdict == "calderon"


def test_domain_mismatch_rejected():
    with pytest.raises(UsageError):
        classify_couple(LpSpace(2, "unit"), LpSpace(2, "halfline"))


def test_report_schema_fields():
    rep = classify_couple(LpSpace(2), linf_space(), {"seed": 5})
    d = rep.to_json_dict()
    for key in ("spaces", "indices", "theorem", "applicable_theorems", "verdict",
                "caveat_level", "evidence", "seeds", "windows"):
        assert key in d
    assert d["spaces"]["X"] == "lp:p=2"


def test_verdict_deterministic_under_seed():
    a = classify_couple(LpSpace(2), linf_space(), {"seed": 7}).to_json_dict()
    b = classify_couple(LpSpace(2), linf_space(), {"seed": 7}).to_json_dict()
    assert a == b


# ---------------------------------------------------------------------------
# counterexample-pair evidence
# ---------------------------------------------------------------------------


def test_brudnyi_evidence_contents():
    pair = brudnyi_pair(1.5, 3.0)
    ev = brudnyi_evidence(pair, Window("Z-", -256, -1), n_samples=60, seed=2)
    assert ev["r"] == pytest.approx(2.25)
    assert ev["J0_size"] > 0 and ev["J1_size"] > 0
    assert ev["J0_norm_ratio"]["spread"] <= 2.0
    assert ev["J1_weighted_lr_spread_F"]["spread"] <= 1.5
    assert ev["J1_weighted_lr_spread_G"]["spread"] <= 1.5


def test_brudnyi_evidence_window_too_narrow():
    pair = brudnyi_pair(1.5, 3.0)
    with pytest.raises(UsageError, match="window too narrow"):
        brudnyi_evidence(pair, Window("Z-", -4, -1), n_samples=5, seed=0)
