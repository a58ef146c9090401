from __future__ import annotations

import itertools
import shutil

import pytest

from ovalis.codes import enumerate_schemes, parse_scheme, parse_type
from ovalis.corpus import diff_tables
from ovalis.ledger import check_paths, shipped_certificate_dir
from ovalis.orientation import fg_deficit
from ovalis.pipeline import (
    DEFAULT_PLACEMENT,
    RULES,
    STRUCTURAL_RULES,
    RuleDisabledError,
    admissible,
    apply_structural,
    derive_table,
    filter_jump,
    filter_nonseparating,
    filter_separating,
    fit_chain_placement,
    joint_types,
    lambda_feasibility,
    table16_flags,
    theorem_survivors,
    triangle_system,
    InfeasibleError,
)


def _t(*tokens):
    return parse_type(tokens)


def test_rule_registry_names():
    assert {"R-L18", "R-L19", "R-L20", "R-L21", "R-L9", "R-P1", "R-P2", "R-ID"} == set(RULES)


def test_jump_filter_gives_fourteen():
    kept = filter_jump(enumerate_schemes("EEO", True) + enumerate_schemes("EOO", True))
    assert len(kept) == 14


def test_jump_filter_rejects_small_pi():
    assert filter_jump([parse_scheme(["+", "(+,-)", "(+,+,+)"])]) == []


def test_ooo_jump_only_all_joint():
    kept = filter_jump(enumerate_schemes("OOO", True))
    assert kept
    for s in kept:
        assert all(c.collapse().joint for c in s.codes if not c.jump)


def test_separating_examples():
    assert filter_separating([_t("(+,d)", "-", "(pm,mp)")]) != []
    t = _t("+", "+", "(+,+,s)")
    assert fg_deficit(t, 3) == -3
    assert filter_separating([t]) == []
    t = _t("-", "-", "(-,-,s)")
    assert fg_deficit(t, 3) == -1
    assert filter_separating([t]) == []


def test_nonseparating_examples():
    assert filter_nonseparating([_t("+", "+", "(+,+)")]) == []
    assert filter_nonseparating([_t("(pm,mp)", "(pm,mp)", "(+,-,-)")]) != []
    # a type with a non-empty zone set is untouched
    t = _t("(-,n)", "(-,n)", "(pm,mp,n)")
    assert filter_nonseparating([t]) == [t]


def test_lambda_feasibility_table6_pair():
    profiles = lambda_feasibility(_t("(-,n)", "(-,n)", "(pm,mp,n)"))
    assert sorted(p[0].constant for p in profiles) == [-2, -1]


def test_lambda_feasibility_eliminations():
    assert lambda_feasibility(_t("(+,n)", "(-,n)", "(pm,mp,n)")) == []
    t = _t("(-,d)", "(-,d)", "(-,-,n)")
    s = triangle_system(t)
    # both down chains of negative nests sit in their own triangles
    assert s.base[0] == 0
    assert lambda_feasibility(t) == []


def test_placement_fit_is_default(corpus):
    assert fit_chain_placement(corpus) == dict(DEFAULT_PLACEMENT)


@pytest.mark.parametrize("tid,rows", [(5, 14), (6, 3), (10, 7), (16, 12), (18, 2)])
def test_filter_tables(corpus, tid, rows):
    table = derive_table(tid)
    assert len(table.rows) == rows
    assert diff_tables(table, corpus[tid]) == []


def test_table5_affine_cell():
    t = derive_table(5)
    cells = {c for row in t.rows for c in row}
    assert "L0+3" in cells


def test_table16_flags():
    flags = table16_flags()
    modes = {m for _, m in flags}
    assert modes <= {"joint-empty", "equality-branch"}
    assert flags, "the one-zone listing keeps rows that the joint analysis removes"


def test_non_crossing_jump_empty_triangles():
    t = _t("(+,u)", "(pm,mp,n)", "(-,+,+)")
    with pytest.raises(InfeasibleError):
        triangle_system(t)


def test_filter_order_invariance():
    types = joint_types("EEO", False) + joint_types("EEO", True) + joint_types("EOO", False)
    ids = [r for r, _ in STRUCTURAL_RULES]
    reference = set(apply_structural(types))
    for order in itertools.permutations(ids):
        assert set(apply_structural(types, order=order)) == reference


def test_theorem_survivors():
    out = theorem_survivors()
    assert out["EEO"] == []
    by_scheme = {}
    for e in out["EEO-jump"]:
        key = " ".join(str(c) for c in e.ctype.codes)
        by_scheme.setdefault(key, []).append(e)
    assert set(by_scheme) == {"+ (pm,mp) (+,-,-)", "+ (pm,mp) (-,+,+)"}
    for e in by_scheme["+ (pm,mp) (+,-,-)"]:
        assert e.ctype.attributes[0].kind == "u"
        assert e.ctype.jump_mode == "crossing"
        assert sorted(p[0].constant for p in e.profiles) == [0, 1]
    (e,) = by_scheme["+ (pm,mp) (-,+,+)"]
    assert e.ctype.attributes[0].kind == "n"
    assert e.ctype.attributes[0].laterality == "right"
    assert e.ctype.jump_mode == "non-crossing"
    assert [p[0].constant for p in e.profiles] == [0]


def test_gating_disabled_restores_tables():
    out = theorem_survivors(enabled=False)
    assert len(out["EEO"]) == len(admissible("EEO", False))
    assert len(out["EEO-jump"]) == len(admissible("EEO", True))


def test_gating_refuses_unverified(tmp_path):
    root = tmp_path / "certs"
    shutil.copytree(str(shipped_certificate_dir()), root)
    f = root / "lemma-01.cert"
    f.write_text(f.read_text().replace("ovals=DPH1QG O=4", "ovals=DPH1QG O=2"))
    report = check_paths(sorted(root.glob("*.cert")))
    assert not report.verified("lemma-01")
    with pytest.raises(RuleDisabledError) as info:
        theorem_survivors(report=report)
    assert "did not verify" in str(info.value)
