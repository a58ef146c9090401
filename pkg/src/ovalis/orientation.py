"""Orientation invariants of short complex schemes and complex types.

The per-nest constants behind E0..E3, F and G are not given numerically in
the source tables; they are reconstructed here as additive per-code
contributions and fitted exactly against the table values.
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Union

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from ovalis.codes import (
    EVEN_CODES,
    JOINT_ODD_CODES,
    JUMP_CODES,
    NON_SEPARATING,
    SEPARATING,
    UP,
    DOWN,
    ComplexScheme,
    ComplexType,
    NestCode,
)


class CoefficientError(KeyError):
    """A coefficient needed for an evaluation is missing or undetermined."""


class FitError(ValueError):
    """The observation system is inconsistent or under-determined."""

    def __init__(self, message: str, offending: Sequence[str] = ()):
        super().__init__(message)
        self.offending = list(offending)


class PreconditionError(ValueError):
    pass


# -- affine values in the free symbol lambda_0 ---------------------------------


@dataclass(frozen=True)
class AffineValue:
    """``constant + coeff * L0`` with integer parts."""

    constant: int = 0
    coeff: int = 0

    @classmethod
    def of(cls, value: Union[int, "AffineValue"]) -> "AffineValue":
        return value if isinstance(value, AffineValue) else cls(int(value), 0)

    @property
    def is_constant(self) -> bool:
        return self.coeff == 0

    def __add__(self, other):
        o = AffineValue.of(other)
        return AffineValue(self.constant + o.constant, self.coeff + o.coeff)

    __radd__ = __add__

    def __neg__(self):
        return AffineValue(-self.constant, -self.coeff)

    def __sub__(self, other):
        return self + (-AffineValue.of(other))

    def __rsub__(self, other):
        return AffineValue.of(other) - self

    def __mul__(self, k: int):
        return AffineValue(self.constant * k, self.coeff * k)

    __rmul__ = __mul__

    def at(self, l0: int) -> int:
        return self.constant + self.coeff * l0

    def __str__(self) -> str:
        c, k = self.constant, self.coeff
        if k == 0:
            return str(c)
        sym = {1: "L0", -1: "-L0"}.get(k, f"{k}*L0")
        if c == 0:
            return sym
        if k == -1:
            return f"{c}-L0"
        return f"{sym}{c:+d}"


_TERM_RE = re.compile(r"[+-]?[^+-]+")


def parse_affine(text: str) -> AffineValue:
    """Parse table cells such as ``-2``, ``L0``, ``L0+3``, ``1-L0``."""
    t = text.replace(" ", "").replace("λ_0", "L0").replace("lambda0", "L0")
    if not t or _TERM_RE.sub("", t):
        raise ValueError(f"unparseable affine cell {text!r}")
    const = coeff = 0
    for term in _TERM_RE.findall(t):
        if term.endswith("L0"):
            k = term[:-2].rstrip("*")
            if k in ("", "+", "-"):
                coeff += -1 if k == "-" else 1
            elif re.fullmatch(r"[+-]?\d+", k):
                coeff += int(k)
            else:
                raise ValueError(f"unparseable affine cell {text!r}")
        elif re.fullmatch(r"[+-]?\d+", term):
            const += int(term)
        else:
            raise ValueError(f"unparseable affine cell {text!r}")
    return AffineValue(const, coeff)


L0 = AffineValue(0, 1)


# -- Pi and capital Lambda ------------------------------------------------------


def pi_difference(scheme: ComplexScheme) -> int:
    """Pi+ - Pi-, the signed count of positive minus negative nest pairs."""
    return -sum(c.sign * c.delta for c in scheme.codes)


def capital_lambda(scheme: ComplexScheme) -> int:
    return pi_difference(scheme) - 4


def forced_jump_mode(scheme: ComplexScheme) -> Optional[str]:
    """Jump mode pinned by the Pi = 3 case: positive crossing, negative not."""
    j = scheme.jump_index()
    if j is None or pi_difference(scheme) != 3:
        return None
    return "crossing" if scheme.codes[j].sign > 0 else "non-crossing"


def lemma9_allowed_zones(jump_mode: Optional[str]) -> frozenset[int]:
    """Triangles that may hold ovals given the jump mode."""
    if jump_mode == "crossing":
        return frozenset({0, 1, 2})
    if jump_mode == "non-crossing":
        return frozenset({3})
    if jump_mode == "mixed":
        return frozenset()
    return frozenset({0, 1, 2, 3})


# -- coefficients -------------------------------------------------------------

EVEN_KINDS = (UP, DOWN)


def code_key(code: NestCode) -> str:
    return str(code.collapse())


ALL_CODE_KEYS = tuple(code_key(c) for c in (*EVEN_CODES, *JOINT_ODD_CODES, *JUMP_CODES[:2]))


@dataclass(frozen=True)
class OrientationCoefficients:
    phi0: Mapping[str, int]
    psi: Mapping[str, int]
    chi: Mapping[str, int]
    F: Mapping[tuple[str, str], int]
    G: Mapping[str, int]
    gauge_g_plus: int = 1
    undetermined: tuple[str, ...] = ()

    def _get(self, table: Mapping, key, name: str):
        try:
            return table[key]
        except KeyError:
            raise CoefficientError(f"{name}[{key}] is undetermined") from None

    def dump(self) -> str:
        lines = [f"gauge.chi[(pm,mp)]=0", f"gauge.G[+]={self.gauge_g_plus}"]
        for name in ("phi0", "psi", "chi", "G"):
            table = getattr(self, name)
            for key in sorted(table):
                lines.append(f"{name}[{key}]={table[key]}")
        for code, kind in sorted(self.F):
            lines.append(f"F[{code}|{kind}]={self.F[(code, kind)]}")
        for u in self.undetermined:
            lines.append(f"{u}=undetermined")
        return "\n".join(lines) + "\n"

    @classmethod
    def load(cls, text: str) -> "OrientationCoefficients":
        tables: dict[str, dict] = {"phi0": {}, "psi": {}, "chi": {}, "F": {}, "G": {}}
        gauge = 1
        undetermined = []
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            lhs, _, rhs = line.partition("=")
            m = re.fullmatch(r"([\w.]+)\[(.+)\]", lhs)
            if not m:
                raise ValueError(f"bad coefficient line {raw!r}")
            name, key = m.groups()
            if rhs == "undetermined":
                undetermined.append(lhs)
                continue
            if name == "gauge.G":
                gauge = int(rhs)
            elif name.startswith("gauge."):
                continue
            elif name == "F":
                code, kind = key.split("|")
                tables["F"][(code, kind)] = int(rhs)
            else:
                tables[name][key] = int(rhs)
        return cls(gauge_g_plus=gauge, undetermined=tuple(undetermined), **tables)


# -- observations and the exact fit --------------------------------------------


@dataclass(frozen=True)
class Observation:
    """One table cell: E_index of a scheme or the deficit of nest ``index``."""

    label: str
    codes: tuple[NestCode, NestCode, NestCode]
    quantity: str  # "E" or "FG"
    index: int
    value: int
    kind: Optional[str] = None  # attribute of the separating nest for "FG"


def _e_terms(codes, i: int) -> dict:
    terms: dict = {}

    def add(key, k):
        terms[key] = terms.get(key, 0) + k

    if i == 0:
        for c in codes:
            add(("phi0", code_key(c)), 1)
    else:
        for l, c in enumerate(codes, start=1):
            add(("psi" if l == i else "chi", code_key(c)), 1)
    return terms


def _fg_terms(codes, i: int, kind: str) -> dict:
    terms: dict = {("F", (code_key(codes[i - 1]), kind)): 1}
    for l, c in enumerate(codes, start=1):
        if l != i:
            key = ("G", code_key(c))
            terms[key] = terms.get(key, 0) - 1
    return terms


def _terms(obs: Observation) -> dict:
    if obs.quantity == "E":
        return _e_terms(obs.codes, obs.index)
    return _fg_terms(obs.codes, obs.index, obs.kind)


def _system(rows: Sequence[tuple[dict, int]], unknowns: Sequence):
    col = {u: j for j, u in enumerate(unknowns)}
    a = [[QQ(0)] * len(unknowns) for _ in rows]
    b = []
    for r, (terms, value) in enumerate(rows):
        for u, k in terms.items():
            a[r][col[u]] += QQ(k)
        b.append([QQ(value)])
    return a, b


def _consistent(a, b) -> bool:
    n = len(a[0])
    A = DomainMatrix(a, (len(a), n), QQ)
    Ab = DomainMatrix([row + brow for row, brow in zip(a, b)], (len(a), n + 1), QQ)
    return A.rank() == Ab.rank()


def fit_coefficients(corpus, gauge_g_plus: int = 1) -> OrientationCoefficients:
    """Solve the integer linear system of all E and F-G cells exactly.

    ``corpus`` is a ``Corpus`` or any iterable of ``Observation``.  The gauge
    pins chi((pm,mp)) = 0 and G(+) = ``gauge_g_plus``.  Raises ``FitError``
    naming the offending cells when the system is inconsistent, or the free
    unknowns when it is under-determined beyond the gauge.
    """
    observations = list(corpus.observations() if hasattr(corpus, "observations") else corpus)
    rows = [(_terms(o), o.value) for o in observations]
    labels = [o.label for o in observations]
    unknowns = sorted({u for terms, _ in rows for u in terms}, key=repr)
    gauge = [({("chi", "(pm,mp)"): 1}, 0), ({("G", "+"): 1}, gauge_g_plus)]
    for terms, _ in gauge:
        for u in terms:
            if u not in unknowns:
                unknowns.append(u)
    a, b = _system(rows + gauge, unknowns)
    if not _consistent(a, b):
        offending = []
        for r in range(len(rows)):
            keep = [i for i in range(len(a)) if i != r]
            if _consistent([a[i] for i in keep], [b[i] for i in keep]):
                offending.append(labels[r])
        hint = "; dropping any one of these restores consistency: " + ", ".join(offending) if offending else ""
        raise FitError("inconsistent table values" + hint, offending)
    A = DomainMatrix(a, (len(a), len(unknowns)), QQ)
    if A.rank() != len(unknowns):
        null = A.nullspace().to_Matrix()
        free = [repr(unknowns[j]) for j in range(len(unknowns)) if any(null[r, j] != 0 for r in range(null.rows))]
        raise FitError("rank-deficient beyond the gauge", free)
    Ab = DomainMatrix([row + brow for row, brow in zip(a, b)], (len(a), len(unknowns) + 1), QQ)
    rref, pivots = Ab.rref()
    R = rref.to_Matrix()
    solution = {}
    for r, p in enumerate(pivots):
        v = R[r, len(unknowns)]
        if v.q != 1:
            raise FitError(f"non-integer value for {unknowns[p]!r}", [repr(unknowns[p])])
        solution[unknowns[p]] = int(v)
    tables: dict[str, dict] = {"phi0": {}, "psi": {}, "chi": {}, "F": {}, "G": {}}
    for (name, key), v in solution.items():
        tables[name][key] = v
    undetermined = tuple(
        f"G[{k}]" for k in ALL_CODE_KEYS if k not in tables["G"]
    )
    return OrientationCoefficients(gauge_g_plus=gauge_g_plus, undetermined=undetermined, **tables)


@functools.lru_cache(maxsize=None)
def default_coefficients() -> OrientationCoefficients:
    """Coefficients fitted on the shipped table corpus."""
    from ovalis.corpus import load_corpus

    return fit_coefficients(load_corpus())


# -- evaluators -----------------------------------------------------------------


def e_params(scheme: ComplexScheme, coeffs: Optional[OrientationCoefficients] = None) -> tuple[int, int, int, int]:
    c = coeffs or default_coefficients()
    keys = [code_key(x) for x in scheme.codes]
    e0 = sum(c._get(c.phi0, k, "phi0") for k in keys)
    out = [e0]
    for i in range(3):
        v = c._get(c.psi, keys[i], "psi")
        v += sum(c._get(c.chi, keys[l], "chi") for l in range(3) if l != i)
        out.append(v)
    return tuple(out)


def zone_set(
    scheme: ComplexScheme,
    coeffs: Optional[OrientationCoefficients] = None,
    jump_mode: Optional[str] = None,
) -> frozenset[int]:
    """Triangles T_i that may contain exterior ovals (E_i = 0).

    For a jump scheme the jump mode (given, or forced by Pi = 3) further
    empties T_3 (crossing) or T_0..T_2 (non-crossing).
    """
    e = e_params(scheme, coeffs)
    zones = frozenset(i for i in range(4) if e[i] == 0)
    mode = jump_mode or forced_jump_mode(scheme)
    return zones & lemma9_allowed_zones(mode)


def fg_deficit(ctype: ComplexType, i: int, coeffs: Optional[OrientationCoefficients] = None) -> int:
    """F_i - G_j - G_k for the separating (or up/down) nest ``i`` in 1..3."""
    c = coeffs or default_coefficients()
    attr = ctype.attributes[i - 1]
    if attr.kind == NON_SEPARATING:
        raise PreconditionError(f"nest {i} of {ctype} is non-separating")
    codes = ctype.codes
    value = c._get(c.F, (code_key(codes[i - 1]), attr.kind), "F")
    for l in range(3):
        if l != i - 1:
            value -= c._get(c.G, code_key(codes[l]), "G")
    return value


# -- lambda profiles ----------------------------------------------------------


@dataclass(frozen=True)
class LambdaProfile:
    """lambda_0..lambda_6 (affine in L0) and capital Lambda."""

    lambdas: tuple[AffineValue, ...]
    capital: int

    def __post_init__(self) -> None:
        if len(self.lambdas) != 7:
            raise ValueError("a profile holds lambda_0..lambda_6")
        if all(v.is_constant for v in self.lambdas):
            l = [v.constant for v in self.lambdas]
            if l[0] - l[4] - l[5] - l[6] != self.capital:
                raise ValueError("Lambda must equal l0 - l4 - l5 - l6")

    def __getitem__(self, i: int) -> AffineValue:
        return self.lambdas[i]

    def at(self, l0: int) -> "LambdaProfile":
        return LambdaProfile(tuple(AffineValue(v.at(l0)) for v in self.lambdas), self.capital)

    @property
    def is_constant(self) -> bool:
        return all(v.is_constant for v in self.lambdas)


def lambda_identities(l0, l4, l5, l6) -> tuple[AffineValue, AffineValue, AffineValue]:
    """Quadrangle parameters from the triangle ones: l_i = l_{i+3} - l_0."""
    l0, l4, l5, l6 = (AffineValue.of(x) for x in (l0, l4, l5, l6))
    return (l4 - l0, l5 - l0, l6 - l0)


def profile_from_triangles(l0, l4, l5, l6, capital: int) -> LambdaProfile:
    l0, l4, l5, l6 = (AffineValue.of(x) for x in (l0, l4, l5, l6))
    l1, l2, l3 = lambda_identities(l0, l4, l5, l6)
    return LambdaProfile((l0, l1, l2, l3, l4, l5, l6), capital)


def mu(profile: LambdaProfile) -> AffineValue:
    return profile[1] + profile[2] - profile[3]


def epsilon3(scheme: Union[ComplexScheme, NestCode]) -> int:
    """Sign of the outer oval of the jump nest."""
    if isinstance(scheme, NestCode):
        if not scheme.jump:
            raise PreconditionError(f"{scheme} is not a jump nest")
        return scheme.sign
    j = scheme.jump_index()
    if j is None:
        raise PreconditionError(f"{scheme} has no jump nest")
    return scheme.codes[j].sign
