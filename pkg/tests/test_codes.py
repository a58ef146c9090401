from __future__ import annotations

import itertools

import pytest

from ovalis.codes import (
    MINUS,
    PLUS,
    ComplexScheme,
    ComplexType,
    NestAttribute,
    NestCode,
    RealSchemeParams,
    SchemeError,
    TokenError,
    attribute_domain,
    canonicalize,
    enumerate_schemes,
    expand_types,
    parity,
    parse_code,
    parse_scheme,
    parse_type,
    parse_type_token,
    type_token,
)


def test_parity_examples():
    assert parity(NestCode(PLUS, 0)) == "even"
    assert parity(NestCode(PLUS, -2)) == "even"
    assert parity(NestCode(MINUS, 1)) == "odd"


def test_parity_stable_under_sign_flip():
    for sign, delta in itertools.product((PLUS, MINUS), (-2, -1, 0, 1, 2)):
        assert parity(NestCode(sign, delta)) == parity(NestCode(-sign, delta))


def test_jump_iff_delta_two():
    for sign, delta in itertools.product((PLUS, MINUS), (-2, -1, 0, 1, 2)):
        assert NestCode(sign, delta).jump == (abs(delta) == 2)


@pytest.mark.parametrize(
    "token, sign, delta, kind",
    [
        ("+", PLUS, 0, None),
        ("(-,u)", MINUS, 0, "u"),
        ("(+,+)", PLUS, 1, None),
        ("(-,+,s)", MINUS, 1, "s"),
        ("(+,-,-)", PLUS, -2, None),
        ("(-,+,+)", MINUS, 2, None),
        ("(±,∓,s)", PLUS, -1, "s"),
    ],
)
def test_parse_type_token(token, sign, delta, kind):
    code, attr = parse_type_token(token)
    assert (code.sign, code.delta) == (sign, delta)
    assert (attr.kind if attr else None) == kind


def test_joint_token_round_trip():
    code = parse_code("(pm,mp)")
    assert code.joint
    assert str(code) == "(pm,mp)"
    assert {str(c) for c in code.concrete()} == {"(+,-)", "(-,+)"}
    assert NestCode(MINUS, 1).collapse() == code


@pytest.mark.parametrize("bad", ["(+,x)", "(+)", "(+,+,-)", "++", "(pm)", ""])
def test_malformed_tokens_rejected(bad):
    with pytest.raises(TokenError):
        parse_type_token(bad)


def test_type_token_round_trip_over_all_domains():
    codes = [NestCode(PLUS, 0), NestCode(MINUS, 0), NestCode(PLUS, 1), NestCode(PLUS, -1, joint=True), NestCode(MINUS, -1)]
    for code in codes:
        for attr in attribute_domain(code):
            tok = type_token(code, attr)
            back_code, back_attr = parse_type_token(tok)
            assert back_code == code
            assert back_attr.kind == attr.kind


def test_attribute_rules():
    with pytest.raises(SchemeError):
        parse_type(["(+,s)", "+", "(+,+)"])
    with pytest.raises(SchemeError):
        parse_type(["(+,u)", "+", "(+,+,u)"])
    with pytest.raises(SchemeError):
        ComplexType(parse_scheme(["+", "+", "(+,+)"]), (NestAttribute("u", laterality="left"), NestAttribute(), NestAttribute()))
    with pytest.raises(SchemeError):
        ComplexType(parse_scheme(["+", "+", "(+,+)"]), (NestAttribute(jump_mode="crossing"), NestAttribute(), NestAttribute()))


def test_scheme_invariants():
    with pytest.raises(SchemeError):
        parse_scheme(["+", "-", "+"])
    with pytest.raises(SchemeError):
        parse_scheme(["(+,-,-)", "(-,+,+)", "(+,+)"])


def test_real_scheme_params():
    RealSchemeParams((3, 5, 7), 10)
    with pytest.raises(SchemeError):
        RealSchemeParams((3, 5, 7), 11)


def test_enumeration_counts():
    assert len(enumerate_schemes("EEO")) == 12
    assert len(enumerate_schemes("EOO")) == 12
    assert len(enumerate_schemes("OOO")) == 10


def test_enumeration_duplicate_free_under_canonicalize():
    for cls in ("EEO", "EOO", "OOO"):
        schemes = enumerate_schemes(cls)
        assert len({canonicalize(s) for s in schemes}) == len(schemes)


def test_jump_nest_last():
    for s in enumerate_schemes("EEO", True) + enumerate_schemes("EOO", True):
        assert s.jump_index() == 2


def test_expand_types_counts():
    s = parse_scheme(["+", "+", "(+,-)"])
    types = expand_types(s)
    assert len(types) == 18
    assert any(all(a.kind == "n" for a in t.attributes) for t in types)
    jump = parse_scheme(["+", "(+,-)", "(+,-,-)"])
    modes = {t.attributes[2].jump_mode for t in expand_types(jump)}
    assert modes == {"crossing", "non-crossing"}


def test_canonicalize_examples():
    a = canonicalize(parse_scheme(["(+,-)", "(-,+)", "(-,-)"]), joint=True)
    b = canonicalize(parse_scheme(["(-,+)", "(+,-)", "(-,-)"]), joint=True)
    assert a == b
    assert canonicalize(parse_scheme(["-", "+", "(+,+)"])).tokens() == ("+", "-", "(+,+)")
    s = parse_scheme(["(-,-)", "-", "(pm,mp)"])
    assert canonicalize(canonicalize(s)) == canonicalize(s)
    assert len({canonicalize(s, joint=True) for s in enumerate_schemes("OOO")}) == 10
