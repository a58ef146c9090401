"""Admissibility filters, lambda feasibility and table derivation.

Structural filters are per-type predicates, so their order never matters.
The triangle parameters are then constrained by the zone sets, the chain
placement of separating nests, the capital-Lambda equation and the bounds on
triangles that hold only exterior ovals.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Mapping, Optional, Sequence

from ovalis.codes import (
    DOWN,
    NON_SEPARATING,
    UP,
    ComplexScheme,
    ComplexType,
    NestAttribute,
    canonicalize,
    canonicalize_type,
    enumerate_schemes,
    expand_types,
    parse_type,
    parse_type_token,
    type_token,
)
from ovalis.corpus import ROW_COUNTS, Table, format_zone, load_corpus
from ovalis.orientation import (
    L0,
    AffineValue,
    CoefficientError,
    LambdaProfile,
    OrientationCoefficients,
    capital_lambda,
    default_coefficients,
    e_params,
    fg_deficit,
    forced_jump_mode,
    parse_affine,
    pi_difference,
    profile_from_triangles,
    zone_set,
)


class PipelineError(RuntimeError):
    pass


class RuleDisabledError(PipelineError):
    """An elimination was requested whose certificate did not verify."""

    def __init__(self, lemma: str, reason: str = ""):
        super().__init__(f"rule disabled: certificate {lemma} did not verify{': ' + reason if reason else ''}")
        self.lemma = lemma


@dataclass(frozen=True)
class FilterRule:
    id: str
    description: str
    basis: str


RULES = {
    r.id: r
    for r in (
        FilterRule("R-L18", "jump schemes need Pi+ - Pi- in {3, 4}; Pi = 3 pins the jump mode", "Lemma 18"),
        FilterRule("R-L19", "exterior ovals only in triangles with E_i = 0; Lambda equation solvable", "Lemma 19"),
        FilterRule("R-L20", "a separating, up or down nest has zero F-G deficit", "Lemma 20"),
        FilterRule("R-L21", "all-non-separating types with no admissible triangle are the two listed schemes", "Lemma 21"),
        FilterRule("R-L9", "a non-crossing jump forces the other nests non-separating and T0..T2 empty", "Lemma 9"),
        FilterRule("R-P1", "|lambda_{i+3}| <= 2, or = 3 with Lambda = -2, for a triangle with only exterior ovals", "Proposition 1"),
        FilterRule("R-P2", "|lambda_0| <= 2 for T0 with only exterior ovals", "Proposition 2"),
        FilterRule("R-ID", "lambda_i = lambda_{i+3} - lambda_0", "lambda identities"),
    )
}


# -- chain placement ------------------------------------------------------------


@dataclass(frozen=True)
class ChainPlacement:
    """Where the interior chain of an up/down nest lands.

    ``triangle`` is added to lambda_{i+3} of the nest's own triangle,
    ``apex`` to lambda_0.
    """

    triangle: int
    apex: int

    def __post_init__(self) -> None:
        if abs(self.triangle) + abs(self.apex) > 1:
            raise ValueError("a chain occupies at most one triangle")


# Result of ``fit_chain_placement`` on the shipped corpus (checked by tests).
DEFAULT_PLACEMENT: Mapping[tuple[int, str], ChainPlacement] = {
    (1, DOWN): ChainPlacement(0, 1),
    (-1, DOWN): ChainPlacement(-1, 0),
    (1, UP): ChainPlacement(1, 0),
    (-1, UP): ChainPlacement(0, -1),
}

_PLACEMENT_OPTIONS = tuple(
    ChainPlacement(t, a) for t, a in ((0, 0), (1, 0), (-1, 0), (0, 1), (0, -1))
)


# -- structural filters -----------------------------------------------------------

_LEMMA21_SCHEMES = frozenset(
    canonicalize(parse_type(toks).scheme, joint=True)
    for toks in (("(pm,mp)", "(pm,mp)", "(+,-,-)"), ("(pm,mp)", "(pm,mp)", "(-,+,+)"))
)


def type_jump_mode(ctype: ComplexType) -> Optional[str]:
    return ctype.jump_mode or forced_jump_mode(ctype.scheme)


def type_zones(ctype: ComplexType, coeffs: Optional[OrientationCoefficients] = None) -> frozenset[int]:
    return zone_set(ctype.scheme, coeffs, type_jump_mode(ctype))


def filter_jump(schemes: Iterable[ComplexScheme]) -> list[ComplexScheme]:
    """Keep jump candidates with Pi+ - Pi- in {3, 4}.

    A scheme with Pi = 3 carries the tag ``forced_jump_mode(scheme)``.  A
    candidate without a +-2 nest stands for an odd-odd-odd curve with a jump
    inside one of its odd nests, allowed only when all three are (pm,mp).
    """
    out = []
    for s in schemes:
        if s.has_jump:
            if pi_difference(s) in (3, 4):
                out.append(s)
        elif all(c.collapse().joint for c in s.codes):
            out.append(s)
    return out


def rule_jump(ctype: ComplexType, coeffs=None) -> bool:
    if not ctype.scheme.has_jump:
        return True
    pi = pi_difference(ctype.scheme)
    if pi not in (3, 4):
        return False
    forced = forced_jump_mode(ctype.scheme)
    return forced is None or ctype.jump_mode in (None, forced)


def rule_crossing(ctype: ComplexType, coeffs=None) -> bool:
    if type_jump_mode(ctype) != "non-crossing":
        return True
    return all(not a.separating for c, a in zip(ctype.codes, ctype.attributes) if not c.jump)


def rule_separating(ctype: ComplexType, coeffs=None, strict: bool = False) -> bool:
    """Zero deficit on every separating nest.

    With ``strict`` an undetermined coefficient raises; otherwise the rule
    abstains for that nest, which keeps every rule independent of the others.
    """
    for i, attr in enumerate(ctype.attributes, start=1):
        if not attr.separating:
            continue
        try:
            if fg_deficit(ctype, i, coeffs) != 0:
                return False
        except CoefficientError:
            if strict:
                raise
    return True


def rule_nonseparating(ctype: ComplexType, coeffs=None) -> bool:
    if any(a.separating for a in ctype.attributes):
        return True
    if type_zones(ctype, coeffs):
        return True
    return canonicalize(ctype.scheme, joint=True) in _LEMMA21_SCHEMES


def rule_zone_consistency(ctype: ComplexType, coeffs=None, placement=None) -> bool:
    try:
        triangle_system(ctype, coeffs, placement)
    except InfeasibleError:
        return False
    return True


StructuralRule = Callable[[ComplexType, Optional[OrientationCoefficients]], bool]

STRUCTURAL_RULES: tuple[tuple[str, StructuralRule], ...] = (
    ("R-L18", rule_jump),
    ("R-L9", rule_crossing),
    ("R-L20", rule_separating),
    ("R-L21", rule_nonseparating),
    ("R-L19", rule_zone_consistency),
)


def filter_separating(types: Iterable[ComplexType], coeffs=None, strict: bool = True) -> list[ComplexType]:
    return [t for t in types if rule_separating(t, coeffs, strict)]


def filter_nonseparating(types: Iterable[ComplexType], coeffs=None) -> list[ComplexType]:
    return [t for t in types if rule_nonseparating(t, coeffs)]


def apply_structural(
    types: Iterable[ComplexType],
    coeffs=None,
    order: Optional[Sequence[str]] = None,
) -> list[ComplexType]:
    """Run the structural rules in ``order`` (rule ids), default as listed."""
    rules = dict(STRUCTURAL_RULES)
    ids = list(order) if order is not None else [r for r, _ in STRUCTURAL_RULES]
    current = list(types)
    for rid in ids:
        current = [t for t in current if rules[rid](t, coeffs)]
    return current


# -- triangle parameters ----------------------------------------------------------


class InfeasibleError(ValueError):
    pass


@dataclass(frozen=True)
class TriangleSystem:
    """Linear data on (lambda_0, lambda_4, lambda_5, lambda_6).

    Triangle 0 is T0 (lambda_0); triangle i is T_i (lambda_{i+3}).
    ``free`` triangles may hold exterior ovals; the others hold only the
    chains in ``base``.  ``chained`` triangles contain an interior chain, so
    the exterior-only bounds do not apply to them.
    """

    capital: int
    free: tuple[int, ...]
    base: tuple[int, int, int, int]
    chained: frozenset[int]

    def allowed(self, t: int) -> Optional[range | tuple]:
        """Values permitted by the exterior-only bounds, or None if unbounded."""
        if t in self.chained:
            return None
        if t == 0:
            return tuple(range(-2, 3))
        vals = tuple(range(-2, 3))
        return vals + (3,) if self.capital == -2 else vals

    def residual(self, values: Mapping[int, int]) -> int:
        """Lambda - (l0 - l4 - l5 - l6) with fixed triangles taken from ``base``."""
        v = [values.get(t, self.base[t]) for t in range(4)]
        return self.capital - (v[0] - v[1] - v[2] - v[3])


def triangle_system(
    ctype: ComplexType,
    coeffs: Optional[OrientationCoefficients] = None,
    placement: Optional[Mapping] = None,
) -> TriangleSystem:
    placement = placement or DEFAULT_PLACEMENT
    base = [0, 0, 0, 0]
    chained = set()
    for i, (code, attr) in enumerate(zip(ctype.codes, ctype.attributes), start=1):
        if attr.kind in (UP, DOWN):
            p = placement[(code.sign, attr.kind)]
            base[i] += p.triangle
            base[0] += p.apex
            if p.triangle:
                chained.add(i)
            if p.apex:
                chained.add(0)
    zones = type_zones(ctype, coeffs)
    mode = type_jump_mode(ctype)
    if mode == "non-crossing" and any(base[t] for t in (0, 1, 2)):
        raise InfeasibleError("a non-crossing jump leaves T0..T2 empty")
    system = TriangleSystem(capital_lambda(ctype.scheme), tuple(sorted(zones)), tuple(base), frozenset(chained))
    if not system.free and system.residual({}) != 0:
        raise InfeasibleError("Lambda equation fails with every triangle fixed")
    return system


def _profile(values: Mapping[int, AffineValue], capital: int) -> LambdaProfile:
    return profile_from_triangles(values[0], values[1], values[2], values[3], capital)


def symbolic_profile(
    ctype: ComplexType,
    coeffs: Optional[OrientationCoefficients] = None,
    placement: Optional[Mapping] = None,
) -> Optional[LambdaProfile]:
    """The structural profile with lambda_0 as the free symbol.

    None when the zone set leaves more than one free parameter other than
    lambda_0.  Raises ``InfeasibleError`` when the system has no solution.
    """
    s = triangle_system(ctype, coeffs, placement)
    values = {t: AffineValue(s.base[t]) for t in range(4)}
    free = s.free
    if len(free) == 0:
        pass
    elif len(free) == 1 or (len(free) == 2 and 0 in free):
        if len(free) == 2:
            values[0] = L0
            pivot = free[1]
        else:
            pivot = free[0]
        values[pivot] = AffineValue(0)
        rest = values[0] - values[1] - values[2] - values[3]
        values[pivot] = (rest - s.capital) if pivot else (s.capital - rest)
    else:
        return None
    return _profile(values, s.capital)


def lambda_feasibility(
    ctype: ComplexType,
    coeffs: Optional[OrientationCoefficients] = None,
    placement: Optional[Mapping] = None,
) -> list[LambdaProfile]:
    """All triangle-parameter profiles compatible with the bounds.

    Free triangles without an interior chain are bounded; fixed triangles
    take their chain contribution.  With one unbounded free triangle it
    absorbs the Lambda equation; with two or more the set is infinite and
    the symbolic profile is returned instead.
    """
    try:
        s = triangle_system(ctype, coeffs, placement)
    except InfeasibleError:
        return []
    if not s.free:
        return [_profile({t: AffineValue(s.base[t]) for t in range(4)}, s.capital)]
    unbounded = [t for t in s.free if s.allowed(t) is None]
    if len(unbounded) > 1:
        sym = symbolic_profile(ctype, coeffs, placement)
        if sym is None:
            raise PipelineError(f"{ctype}: feasible set has several unbounded parameters")
        return [sym]
    bounded = [t for t in s.free if t not in unbounded]
    out = []
    for combo in itertools.product(*(s.allowed(t) for t in bounded)):
        values = dict(zip(bounded, combo))
        if unbounded:
            t = unbounded[0]
            values[t] = 0
            r = s.residual(values)
            values[t] = -r if t == 0 else r
        elif s.residual(values) != 0:
            continue
        full = {t: AffineValue(values.get(t, s.base[t])) for t in range(4)}
        out.append(_profile(full, s.capital))
    out.sort(key=lambda p: tuple(-v.constant for v in p.lambdas))
    return out


def uses_equality_branch(profile: LambdaProfile) -> bool:
    """True when some lambda_{i+3} sits at the boundary value 3."""
    return any(profile[i].is_constant and profile[i].constant == 3 for i in (4, 5, 6))


def single_zone_feasible(
    ctype: ComplexType,
    coeffs: Optional[OrientationCoefficients] = None,
    placement: Optional[Mapping] = None,
) -> bool:
    """Bounds applied only when at most one triangle is free.

    This is the weaker, one-zone-at-a-time analysis behind the
    even-odd-odd listing: with two or more free triangles the bounds are
    not combined and the type is kept.
    """
    try:
        s = triangle_system(ctype, coeffs, placement)
    except InfeasibleError:
        return False
    if len(s.free) != 1:
        return True
    return bool(lambda_feasibility(ctype, coeffs, placement))


# -- chain placement fit ----------------------------------------------------------


def fit_chain_placement(corpus=None, coeffs=None) -> dict[tuple[int, str], ChainPlacement]:
    """Choose the chain placement per (sign, up/down) reproducing the affine
    lambda columns of the structural tables exactly; the choice must be unique.
    """
    corpus = corpus or load_corpus()
    checks = []
    for tid in (5, 10):
        table = corpus[tid]
        for row in table.rows:
            ctype = parse_type(row[:3])
            keys = {(c.sign, a.kind) for c, a in zip(ctype.codes, ctype.attributes) if a.kind in (UP, DOWN)}
            if not keys:
                continue
            expected = {
                int(col[-1]): parse_affine(cell)
                for col, cell in zip(table.columns, row)
                if col.startswith("lambda")
            }
            checks.append((ctype, keys, expected))
    keys = sorted({k for _, ks, _ in checks for k in ks})
    solutions = []
    for combo in itertools.product(_PLACEMENT_OPTIONS, repeat=len(keys)):
        placement = dict(zip(keys, combo))
        ok = True
        for ctype, _, expected in checks:
            try:
                prof = symbolic_profile(ctype, coeffs, placement)
            except InfeasibleError:
                ok = False
                break
            if prof is None or any(prof[i] != v for i, v in expected.items()):
                ok = False
                break
        if ok:
            solutions.append(placement)
    if len(solutions) != 1:
        raise PipelineError(f"chain placement fit has {len(solutions)} solutions")
    return solutions[0]


# -- candidate families -------------------------------------------------------------


def joint_types(parity_class: str, with_jump: bool) -> list[ComplexType]:
    """All types of a family at the (pm,mp) level, canonical and deduplicated.

    Every invariant depends on an odd code only through its collapsed token,
    so (+,-) and (-,+) variants are merged before filtering.
    """
    seen = {}
    for scheme in enumerate_schemes(parity_class, with_jump):
        if with_jump and parity_class != "OOO":
            if pi_difference(scheme) not in (3, 4):
                continue
        for t in expand_types(scheme):
            c = canonicalize_type(t, joint=True)
            seen.setdefault(c, None)
    return list(seen)


def structural_survivors(parity_class: str, with_jump: bool, coeffs=None) -> list[ComplexType]:
    return apply_structural(joint_types(parity_class, with_jump), coeffs)


@dataclass(frozen=True)
class Admissible:
    ctype: ComplexType
    profiles: tuple[LambdaProfile, ...]


def admissible(parity_class: str, with_jump: bool, coeffs=None) -> list[Admissible]:
    """Structural survivors with a non-empty lambda profile set."""
    out = []
    for t in structural_survivors(parity_class, with_jump, coeffs):
        profiles = lambda_feasibility(t, coeffs)
        if profiles:
            out.append(Admissible(t, tuple(profiles)))
    return out


# -- certificate-gated eliminations ---------------------------------------------------


@dataclass(frozen=True)
class TypePattern:
    """Canonical type tokens; a token without attribute matches any attribute."""

    tokens: tuple[str, str, str]

    def matches(self, ctype: ComplexType) -> bool:
        try:
            _pattern_alignment(self, ctype)
        except PipelineError:
            return False
        return True


@dataclass(frozen=True)
class Conclusion:
    """One machine-usable consequence of a verified certificate."""

    action: str  # "eliminate" | "restrict" | "laterality"
    pattern: TypePattern
    lambda0: Optional[tuple[int, ...]] = None
    nest: int = 0
    laterality: Optional[str] = None
    source: str = ""


def _lambda0_value(p: LambdaProfile) -> Optional[int]:
    return p[0].constant if p[0].is_constant else None


def _apply_one(entry: Admissible, c: Conclusion) -> Optional[Admissible]:
    if not c.pattern.matches(entry.ctype):
        return entry
    if c.action == "eliminate":
        if c.lambda0 is None:
            return None
        kept = tuple(p for p in entry.profiles if _lambda0_value(p) not in c.lambda0)
        return replace(entry, profiles=kept) if kept else None
    if c.action == "restrict":
        kept = []
        for p in entry.profiles:
            if p[0].is_constant:
                if p[0].constant in c.lambda0:
                    kept.append(p)
            else:
                kept.extend(p.at(v) for v in c.lambda0)
        return replace(entry, profiles=tuple(kept)) if kept else None
    if c.action == "laterality":
        attrs = list(entry.ctype.attributes)
        perm = _pattern_alignment(c.pattern, entry.ctype)
        k = perm[c.nest - 1]
        attrs[k] = replace(attrs[k], laterality=c.laterality)
        return replace(entry, ctype=ComplexType(entry.ctype.scheme, tuple(attrs)))
    raise PipelineError(f"unknown conclusion action {c.action!r}")


def _pattern_alignment(pattern: TypePattern, ctype: ComplexType) -> tuple[int, ...]:
    """Position in ``ctype`` of each pattern nest."""
    parsed = [parse_type_token(t) for t in pattern.tokens]
    for perm in itertools.permutations(range(3)):
        if all(
            parsed[k][0].collapse() == ctype.codes[perm[k]].collapse()
            and (parsed[k][1] is None or parsed[k][1].kind == ctype.attributes[perm[k]].kind)
            for k in range(3)
        ):
            return perm
    raise PipelineError(f"pattern {pattern.tokens} does not fit {ctype}")


def apply_theorem_certificates(
    entries: Iterable[Admissible],
    report=None,
    enabled: bool = True,
) -> list[Admissible]:
    """Apply the conclusions of verified certificates.

    ``report`` is a ``LedgerReport``; when omitted the shipped certificates
    are checked.  With ``enabled`` false the entries pass through unchanged.
    A conclusion whose certificate (or one it depends on) failed raises
    ``RuleDisabledError`` naming it.
    """
    entries = list(entries)
    if not enabled:
        return entries
    if report is None:
        from ovalis.ledger import check_shipped

        report = check_shipped()
    for cert_id, conclusions in report.conclusions():
        if not report.verified(cert_id):
            raise RuleDisabledError(cert_id, report.reason(cert_id))
        for c in conclusions:
            entries = [e for e in (_apply_one(x, c) for x in entries) if e is not None]
    return entries


def theorem_survivors(report=None, enabled: bool = True, coeffs=None) -> dict[str, list[Admissible]]:
    """Even-even-odd survivors without and with a jump after the gated rules."""
    return {
        "EEO": apply_theorem_certificates(admissible("EEO", False, coeffs), report, enabled),
        "EEO-jump": apply_theorem_certificates(admissible("EEO", True, coeffs), report, enabled),
    }


# -- table derivation --------------------------------------------------------------

CAPTIONS = {
    1: "Admissible short complex schemes even, even, odd, without jump",
    2: "Even, even, odd, without jump O1 separating",
    3: "Even, even, odd, without jump O2 separating",
    4: "Even, even, odd, without jump O3 separating",
    5: "Admissible complex types even, even, odd without jump",
    6: "Even, even, odd, without jump, last cases left",
    7: "Admissible short complex schemes with odd jump",
    8: "Even, even, odd and even, odd, odd with jump, O1 separating",
    9: "Even, even, odd with jump, O2 separating",
    10: "Admissible complex types even, even, odd with jump",
    11: "Admissible short complex schemes even, odd, odd without jump",
    12: "Even, odd, odd, O3 separating",
    13: "Even, odd, odd, O2 separating",
    14: "Even, odd, odd, O1 up",
    15: "Even, odd, odd, O1 down",
    16: "Admissible complex types even, odd, odd without jump",
    17: "Short complex schemes odd, odd, odd",
    18: "Short complex schemes odd, odd, odd, cases left",
}

_SCHEME_COLUMNS = ("O1", "O2", "O3", "E0", "E1", "E2", "E3", "Z", "Lambda")
_LAMBDA_ORDER = {
    5: (0, 4, 5, 6),
    6: (0, 1, 2, 3, 4, 5, 6),
    10: (0, 4, 5, 6, 1, 2, 3),
}


def _scheme_row(scheme: ComplexScheme, coeffs) -> tuple[str, ...]:
    e = e_params(scheme, coeffs)
    z = zone_set(scheme, coeffs)
    return (*scheme.tokens(), *(str(x) for x in e), format_zone(z), str(capital_lambda(scheme)))


def _scheme_table(tid: int, schemes: Iterable[ComplexScheme], coeffs) -> Table:
    rows = [_scheme_row(s, coeffs) for s in schemes]
    return Table(tid, CAPTIONS[tid], _SCHEME_COLUMNS, tuple(sorted(rows)))


def _deficit_columns(i: int) -> tuple[str, ...]:
    others = [k for k in (1, 2, 3) if k != i]
    return ("O1", "O2", "O3", f"F{i}-G{others[0]}-G{others[1]}")


# Listing membership: (parity class, jump, selector over a canonical type)
# returning the 1-based nest that is separating in this listing, or None.


def _single_separating(t: ComplexType) -> Optional[int]:
    seps = [i for i, a in enumerate(t.attributes, start=1) if a.separating]
    return seps[0] if len(seps) == 1 else None


_ODD_ORDER = {"(pm,mp)": 0, "(+,+)": 1, "(-,-)": 2}


def _listing_member(tid: int, t: ComplexType) -> bool:
    i = _single_separating(t)
    if i is None:
        return False
    codes, attrs = t.codes, t.attributes
    sep_code = codes[i - 1]
    cls = t.scheme.parity_class
    jump = t.scheme.has_jump
    if tid in (2, 3, 4):
        if cls != "EEO" or jump:
            return False
        if tid == 4:
            return not sep_code.is_even
        if not sep_code.is_even:
            return False
        other = codes[1] if i == 1 else codes[0]
        second_minus = sep_code.sign < 0 and other.sign > 0
        return second_minus if tid == 3 else not second_minus
    if tid in (8, 9):
        if not jump or not any(c.collapse() == parse_type_token("(+,-,-)")[0] for c in codes):
            return False
        if tid == 9:
            return cls == "EEO" and not sep_code.is_even
        return sep_code.is_even or cls == "EOO"
    if cls != "EOO" or jump:
        return False
    if tid == 14:
        return attrs[i - 1].kind == UP
    if tid == 15:
        return attrs[i - 1].kind == DOWN
    if not sep_code.is_even:
        other = [c for k, c in enumerate(codes, start=1) if k != i and not c.is_even][0]
        a, b = _ODD_ORDER[str(sep_code.collapse())], _ODD_ORDER[str(other.collapse())]
        return (a >= b) if tid == 12 else (a < b)
    return False


def _listing_candidates(tid: int) -> list[ComplexType]:
    if tid in (2, 3, 4):
        return joint_types("EEO", False)
    if tid in (8, 9):
        return joint_types("EEO", True) + joint_types("EOO", True)
    return joint_types("EOO", False)


def _listing_tokens(t: ComplexType) -> tuple[str, ...]:
    """Tokens with the attribute shown only on the separating nest."""
    out = []
    for c, a in zip(t.codes, t.attributes):
        out.append(type_token(c, a) if a.separating else str(c))
    return tuple(out)


def _deficit_table(tid: int, coeffs) -> Table:
    rows = []
    columns = None
    seen = set()
    for t in _listing_candidates(tid):
        if t.jump_mode not in (None, "crossing"):
            continue
        if not _listing_member(tid, t):
            continue
        i = _single_separating(t)
        toks = _listing_tokens(t)
        if toks in seen:
            continue
        seen.add(toks)
        # Show the separating nest first among its parity group, as printed.
        cols = _deficit_columns(i)
        columns = columns or cols
        if cols != columns:
            perm = _swap_to(i, int(columns[3][1]))
            toks = tuple(toks[k] for k in perm)
        rows.append((*toks, str(fg_deficit(t, i, coeffs))))
    return Table(tid, CAPTIONS[tid], columns, tuple(sorted(rows)))


def _swap_to(i: int, j: int) -> tuple[int, ...]:
    perm = [0, 1, 2]
    perm[i - 1], perm[j - 1] = perm[j - 1], perm[i - 1]
    return tuple(perm)


def _type_row(t: ComplexType, cells: Sequence[str]) -> tuple[str, ...]:
    return (*t.tokens(), *cells)


def _strip_odd_attr(tokens: tuple[str, ...], pos: int) -> tuple[str, ...]:
    code, _ = parse_type_token(tokens[pos])
    return tokens[:pos] + (str(code),) + tokens[pos + 1:]


def _merge_odd_attributes(rows: list[tuple[str, ...]]) -> list[tuple[str, ...]]:
    """Merge rows differing only in an odd nest being n or s."""
    rows = sorted(set(rows))
    out = []
    used = set()
    for r in rows:
        if r in used:
            continue
        merged = False
        for pos in range(3):
            code, attr = parse_type_token(r[pos])
            if code.is_even or attr is None or attr.kind != NON_SEPARATING:
                continue
            twin = r[:pos] + (type_token(code, NestAttribute("s")),) + r[pos + 1:]
            if twin in rows and twin not in used:
                used.update((r, twin))
                out.append(_strip_odd_attr(r, pos))
                merged = True
                break
        if not merged:
            used.add(r)
            out.append(r)
    return sorted(out)


def _format_lambda(p: LambdaProfile, order: Sequence[int]) -> tuple[str, ...]:
    return tuple(str(p[i]) for i in order)


def derive_table(tid: int, coeffs: Optional[OrientationCoefficients] = None) -> Table:
    """Rebuild one table from enumeration, invariants and filters."""
    if tid not in ROW_COUNTS:
        raise ValueError(f"no table {tid}")
    coeffs = coeffs or default_coefficients()
    if tid == 1:
        return _scheme_table(1, enumerate_schemes("EEO"), coeffs)
    if tid == 7:
        jumps = filter_jump(enumerate_schemes("EEO", True) + enumerate_schemes("EOO", True))
        return _scheme_table(7, jumps, coeffs)
    if tid == 11:
        return _scheme_table(11, enumerate_schemes("EOO"), coeffs)
    if tid == 17:
        return _scheme_table(17, enumerate_schemes("OOO"), coeffs)
    if tid == 18:
        kept = {canonicalize(a.ctype.scheme, joint=True) for a in admissible("OOO", False, coeffs)}
        return _scheme_table(18, kept, coeffs)
    if tid in (2, 3, 4, 8, 9, 12, 13, 14, 15):
        return _deficit_table(tid, coeffs)
    if tid == 5:
        rows = []
        for t in structural_survivors("EEO", False, coeffs):
            p = symbolic_profile(t, coeffs)
            rows.append(_type_row(t, (format_zone(type_zones(t, coeffs)), *_format_lambda(p, _LAMBDA_ORDER[5]))))
        return Table(5, CAPTIONS[5], ("O1", "O2", "O3", "Z", "lambda0", "lambda4", "lambda5", "lambda6"), tuple(sorted(rows)))
    if tid == 6:
        rows = []
        for a in admissible("EEO", False, coeffs):
            for p in a.profiles:
                rows.append(_type_row(a.ctype, _format_lambda(p, _LAMBDA_ORDER[6])))
        cols = ("O1", "O2", "O3") + tuple(f"lambda{i}" for i in _LAMBDA_ORDER[6])
        return Table(6, CAPTIONS[6], cols, tuple(_merge_odd_attributes(rows)))
    if tid == 10:
        rows = []
        for a in admissible("EEO", True, coeffs):
            p = symbolic_profile(a.ctype, coeffs)
            rows.append(_type_row(a.ctype, (format_zone(type_zones(a.ctype, coeffs)), *_format_lambda(p, _LAMBDA_ORDER[10]))))
        cols = ("O1", "O2", "O3", "Z") + tuple(f"lambda{i}" for i in _LAMBDA_ORDER[10])
        return Table(10, CAPTIONS[10], cols, tuple(sorted(rows)))
    if tid == 16:
        rows = []
        for t in structural_survivors("EOO", False, coeffs):
            if single_zone_feasible(t, coeffs):
                rows.append(_type_row(t, (format_zone(type_zones(t, coeffs)), str(capital_lambda(t.scheme)))))
        return Table(16, CAPTIONS[16], ("O1", "O2", "O3", "Z", "Lambda"), tuple(sorted(rows)))
    raise AssertionError(tid)


def table16_flags(coeffs=None) -> list[tuple[str, str]]:
    """Rows of the even-odd-odd listing that depend on the analysis mode.

    ``joint-empty``: combining the bounds over all free triangles leaves no
    profile.  ``equality-branch``: the row survives only through the
    boundary case lambda_{i+3} = 3, Lambda = -2.
    """
    coeffs = coeffs or default_coefficients()
    flags = []
    for t in structural_survivors("EOO", False, coeffs):
        if not single_zone_feasible(t, coeffs):
            continue
        profiles = lambda_feasibility(t, coeffs)
        label = " ".join(t.tokens())
        if not profiles:
            flags.append((label, "joint-empty"))
        elif all(uses_equality_branch(p) for p in profiles):
            flags.append((label, "equality-branch"))
    return flags


def derive_all(coeffs=None) -> dict[int, Table]:
    return {tid: derive_table(tid, coeffs) for tid in sorted(ROW_COUNTS)}
