from __future__ import annotations

import dataclasses

import pytest

from ovalis.codes import enumerate_schemes, parse_scheme, parse_type
from ovalis.corpus import Corpus, E_TABLES
from ovalis.pipeline import filter_jump
from ovalis.orientation import (
    L0,
    AffineValue,
    CoefficientError,
    FitError,
    LambdaProfile,
    OrientationCoefficients,
    PreconditionError,
    capital_lambda,
    default_coefficients,
    e_params,
    epsilon3,
    fg_deficit,
    fit_coefficients,
    lambda_identities,
    mu,
    parse_affine,
    pi_difference,
    zone_set,
)


def S(*tokens):
    return parse_scheme(tokens)


def test_pi_difference_examples():
    assert pi_difference(S("+", "+", "(+,+)")) == -1
    assert pi_difference(S("+", "(+,-)", "(+,-,-)")) == 3
    assert pi_difference(S("(+,-)", "(+,-)", "(+,-,-)")) == 4


def test_capital_lambda_examples():
    assert capital_lambda(S("+", "+", "(+,+)")) == -5
    assert capital_lambda(S("(pm,mp)", "(pm,mp)", "(pm,mp)")) == -1
    assert capital_lambda(S("-", "(-,-)", "(-,-)")) == -6


def test_e_params_examples():
    assert e_params(S("+", "+", "(+,+)")) == (-4, -3, -3, -2)
    assert e_params(S("+", "(+,-)", "(+,-,-)")) == (0, 1, 0, -1)
    assert e_params(S("(pm,mp)", "(pm,mp)", "(pm,mp)")) == (0, 0, 0, 0)


def test_zone_set_examples():
    assert zone_set(S("+", "-", "(+,-)")) == frozenset({1})
    assert zone_set(S("-", "-", "(+,-)")) == frozenset({0, 3})
    assert zone_set(S("+", "(+,-)", "(+,-,-)")) == frozenset({0, 2})


def test_fg_deficit_examples():
    assert fg_deficit(parse_type(["(+,u)", "+", "(+,+)"]), 1) == -4
    assert fg_deficit(parse_type(["-", "-", "(pm,mp,s)"]), 3) == 0
    assert fg_deficit(parse_type(["(pm,mp,s)", "(pm,mp)", "(+,-,-)"]), 1) == 1


def test_fg_deficit_needs_separating_nest():
    with pytest.raises(PreconditionError):
        fg_deficit(parse_type(["+", "+", "(+,+)"]), 1)


def test_undetermined_g_raises():
    with pytest.raises(CoefficientError):
        fg_deficit(parse_type(["(pm,mp,s)", "(pm,mp)", "(-,+,+)"]), 1)


def test_fitted_values_match_expected_solution():
    c = default_coefficients()
    expected = {
        "+": (-1, 0, -1, 1),
        "-": (0, -1, 0, 0),
        "(+,+)": (-2, 0, -2, 2),
        "(pm,mp)": (0, 0, 0, 0),
        "(-,-)": (0, -2, 0, 0),
        "(+,-,-)": (1, 0, 1, -1),
    }
    for key, (phi0, psi, chi, g) in expected.items():
        assert (c.phi0[key], c.psi[key], c.chi[key], c.G[key]) == (phi0, psi, chi, g)
    assert (c.phi0["(-,+,+)"], c.psi["(-,+,+)"], c.chi["(-,+,+)"]) == (0, 1, 0)
    assert c.F[("+", "u")] == c.F[("-", "u")] == -1
    assert c.F[("+", "d")] == c.F[("-", "d")] == 0
    assert c.F[("(+,+)", "s")] == c.F[("(-,-)", "s")] == -1
    assert c.F[("(pm,mp)", "s")] == 0
    assert "(-,+,+)" not in c.G


def test_e_symmetry_on_enumerated_schemes():
    for cls, jump in (("EEO", False), ("EEO", True), ("EOO", False), ("EOO", True), ("OOO", False)):
        schemes = enumerate_schemes(cls, jump)
        for s in filter_jump(schemes) if jump else schemes:
            e = e_params(s)
            a, b, c = s.codes
            swapped = e_params(parse_scheme([str(b), str(a), str(c)]))
            assert swapped == (e[0], e[2], e[1], e[3])
            rotated = e_params(parse_scheme([str(c), str(a), str(b)]))
            assert rotated[0] == e[0]


def test_gauge_invariance(corpus):
    base = fit_coefficients(corpus, gauge_g_plus=1)
    for c in (0, 2, 5):
        other = fit_coefficients(corpus, gauge_g_plus=c)
        for key, g in base.G.items():
            assert other.G[key] == g + (c - 1)
        for key, f in base.F.items():
            assert other.F[key] == f + 2 * (c - 1)
        for tokens, i in ((["(+,u)", "+", "(+,+)"], 1), (["(pm,mp,s)", "(pm,mp)", "(+,-,-)"], 1), (["-", "-", "(pm,mp,s)"], 3)):
            t = parse_type(tokens)
            assert fg_deficit(t, i, other) == fg_deficit(t, i, base)


def test_fit_reports_perturbed_cell(corpus):
    t1 = corpus[1]
    rows = list(t1.rows)
    col = t1.columns.index("E2")
    row = list(rows[3])
    row[col] = str(int(row[col]) + 1)
    rows[3] = tuple(row)
    bad = Corpus({**corpus.tables, 1: dataclasses.replace(t1, rows=tuple(rows))})
    with pytest.raises(FitError) as info:
        fit_coefficients(bad)
    assert "table 1 row 4 E2" in info.value.offending
    assert "table 1 row 4 E2" in str(info.value)


def test_coefficients_dump_load_round_trip():
    c = default_coefficients()
    back = OrientationCoefficients.load(c.dump())
    assert back.dump() == c.dump()


def test_affine_parsing_and_printing():
    assert parse_affine("λ_0 + 3") == AffineValue(3, 1)
    assert parse_affine("1-L0") == AffineValue(1, -1)
    assert parse_affine("-2") == AffineValue(-2, 0)
    for text in ("L0", "L0+3", "1-L0", "-L0", "0", "-1-L0"):
        assert str(parse_affine(text)) == text
    with pytest.raises(ValueError):
        parse_affine("L1+2")


def test_lambda_identities_examples():
    l1, l2, l3 = lambda_identities(L0, 0, L0 + 1, 0)
    assert (l1, l2, l3) == (-L0, AffineValue(1), -L0)
    assert lambda_identities(0, 0, 0, 0) == (AffineValue(0),) * 3
    assert lambda_identities(-1, 0, 0, 2) == (AffineValue(1), AffineValue(1), AffineValue(3))


def test_mu_and_epsilon3():
    row1 = LambdaProfile((L0, -L0, AffineValue(1), -L0, AffineValue(0), L0 + 1, AffineValue(0)), -1)
    assert mu(row1) == AffineValue(1)
    assert epsilon3(S("+", "(pm,mp)", "(+,-,-)")) == 1
    row7 = LambdaProfile(tuple(AffineValue(v) for v in (0, 0, 0, 1, 0, 0, 1)), -1)
    assert mu(row7) == AffineValue(-1) and epsilon3(S("+", "(pm,mp)", "(-,+,+)")) == -1
    zero = LambdaProfile((AffineValue(0),) * 7, 0)
    assert mu(zero) == AffineValue(0)
    with pytest.raises(PreconditionError):
        epsilon3(S("+", "+", "(+,+)"))


def test_profile_rejects_inconsistent_capital_lambda():
    with pytest.raises(ValueError):
        LambdaProfile(tuple(AffineValue(v) for v in (0, 0, 0, 0, 0, 0, 1)), 0)


def test_e_tables_fully_reproduced(corpus):
    for tid in E_TABLES:
        t = corpus[tid]
        for row in t.rows:
            s = parse_scheme(row[:3])
            assert e_params(s) == tuple(int(row[t.columns.index(f"E{i}")]) for i in range(4))
