"""Combinatorial vocabulary for degree-9 M-curves with three nests.

A nest is coded by the sign of its outer oval and the difference
``alpha+ - alpha-`` of its inner ovals (0 for an even nest, +-1 for an odd
nest, +-2 for a nest with an odd jump).  Three codes make a short complex
scheme; adding a separating/up/down (and laterality, jump-mode) attribute
per nest makes a complex type.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Optional

PLUS = 1
MINUS = -1

EVEN = "even"
ODD = "odd"

PARITY_CLASSES = ("EEO", "EOO", "OOO")

_SIGN_CHAR = {PLUS: "+", MINUS: "-"}
_CHAR_SIGN = {"+": PLUS, "-": MINUS}


class TokenError(ValueError):
    """Raised for a malformed code or type token."""


class SchemeError(ValueError):
    """Raised when a scheme or type violates a structural invariant."""


@dataclass(frozen=True, order=True)
class NestCode:
    """Code of one nest.

    ``joint`` marks the printed ``(+-, -+)`` row, which stands for both
    ``(+,-)`` and ``(-,+)``; it is stored with the ``(+,-)`` representative.
    """

    sign: int
    delta: int
    joint: bool = False

    def __post_init__(self) -> None:
        if self.sign not in (PLUS, MINUS):
            raise SchemeError(f"bad sign {self.sign!r}")
        if self.delta not in (-2, -1, 0, 1, 2):
            raise SchemeError(f"bad delta {self.delta!r}")
        if self.joint and (self.sign, self.delta) != (PLUS, -1):
            raise SchemeError("joint code must use the (+,-) representative")

    @property
    def jump(self) -> bool:
        return abs(self.delta) == 2

    @property
    def parity(self) -> str:
        return parity(self)

    @property
    def is_even(self) -> bool:
        return abs(self.delta) != 1

    def concrete(self) -> tuple["NestCode", ...]:
        """Concrete codes this one stands for."""
        if self.joint:
            return (NestCode(PLUS, -1), NestCode(MINUS, 1))
        return (self,)

    def collapse(self) -> "NestCode":
        """Map ``(+,-)`` and ``(-,+)`` onto the joint token."""
        if abs(self.delta) == 1 and self.sign * self.delta == -1:
            return NestCode(PLUS, -1, joint=True)
        return self

    def sort_key(self) -> tuple:
        group = 2 if self.jump else (0 if self.is_even else 1)
        chain = _chain_sign(self)
        return (group, -self.sign, -chain, self.joint)

    def __str__(self) -> str:
        if self.joint:
            return "(pm,mp)"
        s = _SIGN_CHAR[self.sign]
        if self.delta == 0:
            return s
        c = "+" if self.delta > 0 else "-"
        if self.jump:
            return f"({s},{c},{c})"
        return f"({s},{c})"


def _chain_sign(code: NestCode) -> int:
    if code.delta == 0:
        return 0
    return 1 if code.delta > 0 else -1


def parity(code: NestCode) -> str:
    """``odd`` iff the nest holds an odd number of empty ovals."""
    return ODD if abs(code.delta) == 1 else EVEN


# -- attributes ---------------------------------------------------------------

NON_SEPARATING = "n"
SEPARATING = "s"
UP = "u"
DOWN = "d"
KINDS = (NON_SEPARATING, SEPARATING, UP, DOWN)
LATERALITIES = ("left", "right")
JUMP_MODES = ("crossing", "non-crossing")

_KIND_RANK_EVEN = {DOWN: 0, UP: 1, NON_SEPARATING: 2}
_KIND_RANK_ODD = {NON_SEPARATING: 0, SEPARATING: 1}


@dataclass(frozen=True)
class NestAttribute:
    kind: str = NON_SEPARATING
    laterality: Optional[str] = None
    jump_mode: Optional[str] = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise SchemeError(f"bad attribute kind {self.kind!r}")
        if self.laterality not in (None, *LATERALITIES):
            raise SchemeError(f"bad laterality {self.laterality!r}")
        if self.jump_mode not in (None, *JUMP_MODES):
            raise SchemeError(f"bad jump mode {self.jump_mode!r}")

    @property
    def separating(self) -> bool:
        """True for every kind that Lemma-20-style deficits apply to."""
        return self.kind != NON_SEPARATING


def check_attribute(code: NestCode, attr: NestAttribute) -> None:
    if code.jump:
        if attr.kind != NON_SEPARATING:
            raise SchemeError(f"jump nest {code} must be non-separating")
        if attr.laterality is not None:
            raise SchemeError("laterality is only defined for even non-jump nests")
        return
    if attr.jump_mode is not None:
        raise SchemeError(f"jump mode given for non-jump nest {code}")
    if code.is_even:
        if attr.kind == SEPARATING:
            raise SchemeError(f"even nest {code} is up or down, not 's'")
        if attr.laterality is not None and attr.kind != NON_SEPARATING:
            raise SchemeError("laterality needs a non-separating even nest")
    else:
        if attr.kind in (UP, DOWN):
            raise SchemeError(f"odd nest {code} cannot be up/down")
        if attr.laterality is not None:
            raise SchemeError("laterality needs a non-separating even nest")


def attribute_domain(code: NestCode) -> tuple[NestAttribute, ...]:
    if code.jump:
        return tuple(NestAttribute(jump_mode=m) for m in JUMP_MODES)
    if code.is_even:
        return (NestAttribute(NON_SEPARATING), NestAttribute(UP), NestAttribute(DOWN))
    return (NestAttribute(NON_SEPARATING), NestAttribute(SEPARATING))


# -- schemes and types --------------------------------------------------------


@dataclass(frozen=True)
class ComplexScheme:
    codes: tuple[NestCode, NestCode, NestCode]

    def __post_init__(self) -> None:
        if len(self.codes) != 3:
            raise SchemeError("a scheme has exactly three nests")
        if sum(c.jump for c in self.codes) > 1:
            raise SchemeError("at most one nest may have a jump")
        if all(c.is_even for c in self.codes):
            raise SchemeError("at least one nest is odd")

    @property
    def parity_class(self) -> str:
        n_odd = sum(not c.is_even for c in self.codes)
        return {1: "EEO", 2: "EOO", 3: "OOO"}[n_odd]

    @property
    def has_jump(self) -> bool:
        return any(c.jump for c in self.codes)

    def jump_index(self) -> Optional[int]:
        for i, c in enumerate(self.codes):
            if c.jump:
                return i
        return None

    def tokens(self) -> tuple[str, ...]:
        return tuple(str(c) for c in self.codes)

    def __str__(self) -> str:
        return ", ".join(self.tokens())


@dataclass(frozen=True)
class ComplexType:
    scheme: ComplexScheme
    attributes: tuple[NestAttribute, NestAttribute, NestAttribute]

    def __post_init__(self) -> None:
        if len(self.attributes) != 3:
            raise SchemeError("a type has exactly three attributes")
        for code, attr in zip(self.scheme.codes, self.attributes):
            check_attribute(code, attr)

    @property
    def codes(self) -> tuple[NestCode, NestCode, NestCode]:
        return self.scheme.codes

    @property
    def jump_mode(self) -> Optional[str]:
        j = self.scheme.jump_index()
        return None if j is None else self.attributes[j].jump_mode

    def tokens(self) -> tuple[str, ...]:
        return tuple(type_token(c, a) for c, a in zip(self.codes, self.attributes))

    def __str__(self) -> str:
        return ", ".join(self.tokens())


@dataclass(frozen=True)
class RealSchemeParams:
    alpha: tuple[int, int, int]
    beta: int

    def __post_init__(self) -> None:
        if any(a < 0 for a in self.alpha) or self.beta < 0:
            raise SchemeError("oval counts are non-negative")
        if sum(self.alpha) + self.beta != 25:
            raise SchemeError("alpha1 + alpha2 + alpha3 + beta must be 25")


# -- tokens -------------------------------------------------------------------

def _normalize(token: str) -> str:
    t = token.strip().replace("\\pm", "pm").replace("\\mp", "mp")
    t = t.replace("±", "pm").replace("∓", "mp").replace("−", "-")
    return re.sub(r"\s+", "", t)


def parse_code(token: str) -> NestCode:
    code, attr = parse_type_token(token)
    if attr is not None:
        raise TokenError(f"unexpected attribute in code token {token!r}")
    return code


def parse_type_token(token: str) -> tuple[NestCode, Optional[NestAttribute]]:
    """Parse ``+``, ``(+,u)``, ``(pm,mp,s)``, ``(+,-,-)`` and friends."""
    t = _normalize(token)
    if t in _CHAR_SIGN:
        return NestCode(_CHAR_SIGN[t], 0), None
    if not (t.startswith("(") and t.endswith(")")):
        raise TokenError(f"malformed token {token!r}")
    parts = t[1:-1].split(",")
    attr = None
    if parts and parts[-1] in KINDS:
        attr = NestAttribute(parts[-1])
        parts = parts[:-1]
    if parts == ["pm", "mp"]:
        return NestCode(PLUS, -1, joint=True), attr
    if not parts or any(p not in _CHAR_SIGN for p in parts):
        raise TokenError(f"malformed token {token!r}")
    signs = [_CHAR_SIGN[p] for p in parts]
    if len(signs) == 1:
        if attr is None:
            raise TokenError(f"malformed token {token!r}")
        return NestCode(signs[0], 0), attr
    if len(signs) == 2:
        return NestCode(signs[0], signs[1]), attr
    if len(signs) == 3 and signs[1] == signs[2]:
        return NestCode(signs[0], 2 * signs[1]), attr
    raise TokenError(f"malformed token {token!r}")


def type_token(code: NestCode, attr: Optional[NestAttribute]) -> str:
    base = str(code)
    if attr is None or code.jump:
        return base
    kind = attr.kind
    if code.delta == 0:
        return f"({base},{kind})"
    return f"{base[:-1]},{kind})"


def parse_scheme(tokens: Iterable[str]) -> ComplexScheme:
    return ComplexScheme(tuple(parse_code(t) for t in tokens))


def parse_type(tokens: Iterable[str]) -> ComplexType:
    codes, attrs = [], []
    for t in tokens:
        code, attr = parse_type_token(t)
        codes.append(code)
        attrs.append(attr if attr is not None else NestAttribute())
    return ComplexType(ComplexScheme(tuple(codes)), tuple(attrs))


# -- enumeration --------------------------------------------------------------

EVEN_CODES = (NestCode(PLUS, 0), NestCode(MINUS, 0))
ODD_CODES = (NestCode(PLUS, 1), NestCode(PLUS, -1), NestCode(MINUS, 1), NestCode(MINUS, -1))
JOINT_ODD_CODES = (NestCode(PLUS, 1), NestCode(PLUS, -1, joint=True), NestCode(MINUS, -1))
JUMP_CODES = (NestCode(PLUS, -2), NestCode(MINUS, 2), NestCode(PLUS, 2), NestCode(MINUS, -2))


def _multisets(pool: tuple[NestCode, ...], k: int) -> list[tuple[NestCode, ...]]:
    return list(itertools.combinations_with_replacement(pool, k))


def enumerate_schemes(parity_class: str, with_jump: bool = False) -> list[ComplexScheme]:
    """Candidate short complex schemes before any admissibility filter.

    EEO and jump candidates use concrete odd codes, as Tables 1 and 7 list
    ``(+,-)`` and ``(-,+)`` separately; jump-free EOO and OOO use the joint
    ``(pm,mp)`` token.  Jump candidates carry the jump nest last and span all
    four +-2 codes; ``OOO`` with a jump has no +-2 nest, so its candidates are
    the ordinary OOO schemes.
    """
    if parity_class not in PARITY_CLASSES:
        raise ValueError(f"unknown parity class {parity_class!r}")
    out: list[ComplexScheme] = []
    if parity_class == "OOO":
        for odds in _multisets(JOINT_ODD_CODES, 3):
            out.append(ComplexScheme(odds))
        return out
    if not with_jump:
        if parity_class == "EEO":
            for evens in _multisets(EVEN_CODES, 2):
                for odd in ODD_CODES:
                    out.append(ComplexScheme((*evens, odd)))
        else:
            for even in EVEN_CODES:
                for odds in _multisets(JOINT_ODD_CODES, 2):
                    out.append(ComplexScheme((even, *odds)))
        return out
    for jump in JUMP_CODES:
        if parity_class == "EEO":
            for even in EVEN_CODES:
                for odd in ODD_CODES:
                    out.append(ComplexScheme((even, odd, jump)))
        else:
            for odds in _multisets(ODD_CODES, 2):
                out.append(ComplexScheme((*odds, jump)))
    return out


def expand_types(scheme: ComplexScheme) -> list[ComplexType]:
    domains = [attribute_domain(c) for c in scheme.codes]
    return [ComplexType(scheme, attrs) for attrs in itertools.product(*domains)]


def _attr_rank(code: NestCode, attr: Optional[NestAttribute]) -> tuple:
    if attr is None:
        return (0, "", "")
    table = _KIND_RANK_EVEN if code.is_even else _KIND_RANK_ODD
    return (table.get(attr.kind, 9), attr.laterality or "", attr.jump_mode or "")


def canonical_permutation(
    codes: tuple[NestCode, ...],
    attrs: Optional[tuple[Optional[NestAttribute], ...]] = None,
    tiebreak: Optional[tuple] = None,
) -> tuple[int, ...]:
    """Positions of the nests in canonical order (evens, odds, jump last)."""
    attrs = attrs or (None,) * len(codes)
    tiebreak = tiebreak or (0,) * len(codes)

    def key(i: int) -> tuple:
        c = codes[i].collapse() if codes[i].joint else codes[i]
        return (c.sort_key(), _attr_rank(c, attrs[i]), tiebreak[i])

    return tuple(sorted(range(len(codes)), key=key))


def canonicalize(scheme: ComplexScheme, joint: bool = False) -> ComplexScheme:
    """Sort nests into canonical order; with ``joint`` collapse +- pairs."""
    codes = scheme.codes
    if joint:
        codes = tuple(c.collapse() for c in codes)
    perm = canonical_permutation(codes)
    return ComplexScheme(tuple(codes[i] for i in perm))


def canonicalize_type(ctype: ComplexType, joint: bool = False) -> ComplexType:
    codes = ctype.codes
    if joint:
        codes = tuple(c.collapse() for c in codes)
    perm = canonical_permutation(codes, ctype.attributes)
    return ComplexType(
        ComplexScheme(tuple(codes[i] for i in perm)),
        tuple(ctype.attributes[i] for i in perm),
    )


def concrete_schemes(scheme: ComplexScheme) -> list[ComplexScheme]:
    """Expand joint tokens into every concrete scheme they stand for."""
    return [ComplexScheme(c) for c in itertools.product(*(x.concrete() for x in scheme.codes))]
