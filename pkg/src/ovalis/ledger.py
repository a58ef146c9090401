"""Arithmetic checks behind the geometric case analyses.

A certificate transcribes one argument as a list of candidates (auxiliary
conics, pencil portions, sweep sequences, orderings, lambda relations).  The
checker recomputes every candidate's verdict from the transcribed data and
compares it with the verdict the certificate expects; nothing is trusted
except candidates of kind ``axiom``, which are listed in the report.

Budgets come from degrees: the Cremona image of a degree-9 curve has degree
18, so a conic meets it in at most 36 points and a line in at most 18.
"""

from __future__ import annotations

import functools
import itertools
import math
import re
import shlex
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence, Union

from ovalis.codes import parse_type
from ovalis.orientation import AffineValue, LambdaProfile
from ovalis.pipeline import (
    Conclusion,
    InfeasibleError,
    TypePattern,
    symbolic_profile,
    type_jump_mode,
)

CURVE_DEGREE = 18
CONIC_BUDGET = 2 * CURVE_DEGREE
LINE_BUDGET = 1 * CURVE_DEGREE

BASE_LINES = ("A1A2", "A2A3", "A1A3")
_LINE_ALIASES = {"A2A1": "A1A2", "A3A2": "A2A3", "A3A1": "A1A3"}
# A conic maximal with respect to a base line meets cr(O_k) and cr(A_k) at
# four points each, k being the vertex opposite the line.
_OPPOSITE = {"A1A2": 3, "A2A3": 1, "A1A3": 2}
MAXIMAL_LINE_POINTS = 4 + 4

PRINCIPAL_IMAGES = tuple(f"cr({x}{k})" for x in "OA" for k in (1, 2, 3))
ODD_BRANCH = "O"

REFUTING = frozenset({"contradiction", "exceeded", "fail"})


class LedgerError(ValueError):
    pass


class ParityError(LedgerError):
    """A closed curve was claimed to be crossed an odd number of times."""


class CertificateFormatError(LedgerError):
    pass


class CertificateInvalid(LedgerError):
    def __init__(self, cert_id: str, candidate: str, message: str):
        super().__init__(f"{cert_id}: candidate {candidate}: {message}")
        self.cert_id = cert_id
        self.candidate = candidate


def canonical_line(name: str) -> str:
    n = _LINE_ALIASES.get(name, name)
    if n not in BASE_LINES:
        raise LedgerError(f"unknown base line {name!r}")
    return n


# -- objects --------------------------------------------------------------------

OBJECT_KINDS = ("empty-oval", "principal-oval-image", "base-line", "odd-branch")


@dataclass(frozen=True)
class LedgerObject:
    name: str
    kind: str
    zone: str = ""

    def __post_init__(self) -> None:
        if self.kind not in OBJECT_KINDS:
            raise LedgerError(f"unknown object kind {self.kind!r}")

    @property
    def closed(self) -> bool:
        return self.kind in ("principal-oval-image", "odd-branch", "empty-oval")


def standard_objects() -> dict[str, LedgerObject]:
    objs = {n: LedgerObject(n, "base-line") for n in BASE_LINES}
    objs.update({n: LedgerObject(n, "principal-oval-image") for n in PRINCIPAL_IMAGES})
    objs[ODD_BRANCH] = LedgerObject(ODD_BRANCH, "odd-branch")
    return objs


# -- budgets ------------------------------------------------------------------------


@dataclass(frozen=True)
class ConicSpec:
    """An auxiliary conic through empty ovals of the image curve.

    ``o_crossings`` counts intersections with the odd branch image, ``maximal``
    lists the base lines the conic is maximal with respect to, and ``extra``
    adds further crossings with principal images.
    """

    ovals: tuple[str, ...] = ()
    o_crossings: int = 0
    maximal: frozenset[str] = frozenset()
    extra: tuple[tuple[str, int], ...] = ()


@dataclass(frozen=True)
class Budget:
    total: int
    limit: int
    verdict: str


def _closed_parity(o_crossings: int, extra: Iterable[tuple[str, int]]) -> None:
    if o_crossings % 2:
        raise ParityError(f"odd crossing count {o_crossings} with closed curve {ODD_BRANCH}")
    for image, n in extra:
        if image not in PRINCIPAL_IMAGES:
            raise LedgerError(f"unknown principal image {image!r}")
        if n % 2:
            raise ParityError(f"odd crossing count {n} with closed curve {image}")


def _maximal_points(maximal: Iterable[str]) -> int:
    return MAXIMAL_LINE_POINTS * len({canonical_line(m) for m in maximal})


def conic_budget(spec: ConicSpec) -> Budget:
    """Real intersections of the conic with the image curve; > 36 refutes it."""
    _closed_parity(spec.o_crossings, spec.extra)
    total = 2 * len(spec.ovals) + spec.o_crossings + _maximal_points(spec.maximal)
    total += sum(n for _, n in spec.extra)
    verdict = "contradiction" if total > CONIC_BUDGET else "admissible"
    return Budget(total, CONIC_BUDGET, verdict)


def line_budget(ovals: int, o_crossings: int, extra: Iterable[tuple[str, int]] = ()) -> Budget:
    """Same count for a line; a line meets the odd branch an odd number of times."""
    if o_crossings % 2 == 0:
        raise ParityError("a line meets the odd branch an odd number of times")
    extra = tuple(extra)
    _closed_parity(0, extra)
    total = 2 * ovals + o_crossings + sum(n for _, n in extra)
    return Budget(total, LINE_BUDGET, "contradiction" if total > LINE_BUDGET else "admissible")


@dataclass(frozen=True)
class PortionSpec:
    name: str
    o_crossings: int = 0
    maximal: frozenset[str] = frozenset()
    extra: tuple[tuple[str, int], ...] = ()


@dataclass(frozen=True)
class PencilSpec:
    """A pencil of conics through four base ovals, cut in portions."""

    base: tuple[str, str, str, str]
    portions: tuple[PortionSpec, ...] = ()

    def __post_init__(self) -> None:
        if len(self.base) != 4:
            raise LedgerError("a pencil of conics has four base ovals")

    def portion(self, name: str) -> PortionSpec:
        for p in self.portions:
            if p.name == name:
                return p
        raise KeyError(name)


def portion_reality(spec: PencilSpec, portion: Union[str, PortionSpec]) -> Budget:
    """``totally-real`` when the forced real intersections already reach 36."""
    p = spec.portion(portion) if isinstance(portion, str) else portion
    _closed_parity(p.o_crossings, p.extra)
    total = 2 * len(spec.base) + p.o_crossings + _maximal_points(p.maximal)
    total += sum(n for _, n in p.extra)
    if total == CONIC_BUDGET:
        verdict = "totally-real"
    elif total < CONIC_BUDGET:
        verdict = "not-forced"
    else:
        verdict = "exceeded"
    return Budget(total, CONIC_BUDGET, verdict)


# -- sweep sequences ------------------------------------------------------------------

SWEEP_KINDS = ("Q", "T0", "T3", "T1")


@dataclass(frozen=True)
class SweptOval:
    kind: str
    sign: int

    def __str__(self) -> str:
        return f"{self.kind}{'+' if self.sign > 0 else '-'}"


@dataclass(frozen=True)
class SweepSequence:
    """Ovals met by a pencil, grouped in kind-homogeneous chains."""

    chains: tuple[tuple[SweptOval, ...], ...]
    base: str = "D"

    def __post_init__(self) -> None:
        for ch in self.chains:
            if not ch:
                raise LedgerError("empty chain")
            if len({o.kind for o in ch}) != 1:
                raise LedgerError("a chain holds ovals of one kind")

    @property
    def ovals(self) -> tuple[SweptOval, ...]:
        return tuple(o for ch in self.chains for o in ch)

    @classmethod
    def from_ovals(cls, ovals: Sequence[SweptOval], base: str = "D") -> "SweepSequence":
        """Split into maximal same-kind runs with alternating orientation."""
        chains: list[list[SweptOval]] = []
        for o in ovals:
            last = chains[-1][-1] if chains else None
            if last is not None and last.kind == o.kind and last.sign == -o.sign:
                chains[-1].append(o)
            else:
                chains.append([o])
        return cls(tuple(tuple(c) for c in chains), base)

    def sums(self) -> dict[str, int]:
        return kind_sums(self.ovals)

    def __str__(self) -> str:
        return "/".join(",".join(str(o) for o in ch) for ch in self.chains)


def kind_sums(ovals: Iterable[SweptOval]) -> dict[str, int]:
    out: dict[str, int] = {}
    for o in ovals:
        out[o.kind] = out.get(o.kind, 0) + o.sign
    return {k: v for k, v in sorted(out.items()) if v}


def parse_sweep(text: str, default_kind: str = "Q", base: str = "D") -> SweepSequence:
    """``T3+,T3-/Q+`` (``/`` separates chains); bare ``+``/``-`` use ``default_kind``.

    Without ``/`` the chains are the maximal alternating same-kind runs.
    """
    def oval(tok: str) -> SweptOval:
        tok = tok.strip()
        if not tok or tok[-1] not in "+-":
            raise LedgerError(f"bad swept oval {tok!r}")
        kind = tok[:-1] or default_kind
        if kind not in SWEEP_KINDS:
            raise LedgerError(f"unknown oval kind {kind!r}")
        return SweptOval(kind, 1 if tok[-1] == "+" else -1)

    if not text.strip():
        return SweepSequence((), base)
    if "/" in text:
        chains = tuple(tuple(oval(t) for t in part.split(",")) for part in text.split("/"))
        return SweepSequence(chains, base)
    return SweepSequence.from_ovals([oval(t) for t in text.split(",")], base)


def fiedler_check(seq: SweepSequence) -> bool:
    """Consecutive ovals of one chain have opposite orientations."""
    return all(a.sign == -b.sign for ch in seq.chains for a, b in zip(ch, ch[1:]))


def reduce_sequences(seq: SweepSequence) -> SweepSequence:
    """Delete even chains, collapse odd chains to one extremity and cancel
    inessential pairs until every remaining oval is alone in its chain.

    Each deletion removes a pair of adjacent same-kind ovals of opposite
    orientation, so the per-kind signed sums are preserved.  Any order of
    deletions reaches the same result (the reduced word in the free group on
    the kinds), which is computed here with a stack.
    """
    if not fiedler_check(seq):
        raise LedgerError("input chains must alternate in orientation")
    stack: list[SweptOval] = []
    for o in seq.ovals:
        if stack and stack[-1].kind == o.kind and stack[-1].sign == -o.sign:
            stack.pop()
        else:
            stack.append(o)
    return SweepSequence(tuple((o,) for o in stack), seq.base)


def kinds_alternate(seq: SweepSequence) -> bool:
    ov = seq.ovals
    return all(a.kind != b.kind for a, b in zip(ov, ov[1:]))


# -- mu bookkeeping ---------------------------------------------------------------------

MU_SPLIT = {"crossing": (1, 0), "non-crossing": (0, -1)}
EPSILON = {"crossing": 1, "non-crossing": -1}


def mu_bookkeeping(mode: str, split: Sequence[int]) -> bool:
    """The two sweep portions contribute (1, 0) when crossing and (0, -1)
    when non-crossing, so that mu = epsilon_3."""
    if mode not in MU_SPLIT:
        raise LedgerError(f"unknown jump mode {mode!r}")
    split = tuple(split)
    return split == MU_SPLIT[mode] and sum(split) == EPSILON[mode]


# -- orderings -------------------------------------------------------------------------


def _dihedral(seq: Sequence[str]) -> set[tuple[str, ...]]:
    seq = list(seq)
    out = set()
    for s in (seq, seq[::-1]):
        for k in range(len(s)):
            out.add(tuple(s[k:] + s[:k]))
    return out


def parse_pencil_order(text: str) -> list[frozenset[str]]:
    """``A<E<B<{G,F}<C``: groups in sweep order, braces for unordered groups."""
    groups = []
    for part in text.split("<"):
        part = part.strip()
        if part.startswith("{") and part.endswith("}"):
            groups.append(frozenset(x.strip() for x in part[1:-1].split(",")))
        elif part:
            groups.append(frozenset([part]))
        else:
            raise LedgerError(f"bad pencil order {text!r}")
    return groups


def order_consistent(conic: Sequence[str], at: str, pencil: Sequence[frozenset[str]]) -> bool:
    """Whether the pencil of lines at ``at`` can meet the other conic points
    in the order they have on the conic (up to rotation and reversal)."""
    if at not in conic:
        raise LedgerError(f"{at} is not on the conic {''.join(conic)}")
    k = list(conic).index(at)
    others = list(conic[k + 1:]) + list(conic[:k])
    rank = {}
    for i, g in enumerate(pencil):
        for p in g:
            rank[p] = i
    missing = [p for p in others if p not in rank]
    if missing:
        raise LedgerError(f"pencil at {at} does not order {', '.join(missing)}")
    targets = _dihedral(others)
    for perm in itertools.permutations(others):
        if all(rank[a] <= rank[b] for a, b in zip(perm, perm[1:])) and perm in targets:
            return True
    return False


# -- lambda relations ------------------------------------------------------------------

_TERM = re.compile(r"([+-]?)\s*(\d*)\s*\*?\s*([A-Za-z_]\w*)?")
QUADRANT_VARS = {"Q1": ("l1", 1), "Q2": ("l2", 1), "Q3": ("l3", -1), "Q3ext": ("l3ext", -1), "Q3int": ("l3int", -1)}


def _linear(expr: str, env: Mapping[str, AffineValue]) -> AffineValue:
    expr = expr.replace(" ", "")
    if not expr:
        raise LedgerError("empty expression")
    total = AffineValue(0)
    pos = 0
    while pos < len(expr):
        m = _TERM.match(expr, pos)
        if not m or m.end() == pos:
            raise LedgerError(f"bad linear expression {expr!r}")
        sign, num, var = m.groups()
        if not num and not var:
            raise LedgerError(f"bad linear expression {expr!r}")
        k = int(num) if num else 1
        if sign == "-":
            k = -k
        if var:
            if var not in env:
                raise LedgerError(f"unknown variable {var!r}")
            total = total + env[var] * k
        else:
            total = total + k
        pos = m.end()
    return total


def solve_l0(
    equations: Sequence[AffineValue],
    bounds: Sequence[tuple[AffineValue, int, int]] = (),
) -> Optional[tuple[int, ...]]:
    """Integer values of L0 satisfying ``eq == 0`` and ``lo <= v <= hi``.

    Returns None when L0 is unconstrained, otherwise the (possibly empty)
    sorted tuple of solutions.
    """
    fixed: Optional[set[int]] = None
    for eq in equations:
        if eq.coeff == 0:
            if eq.constant != 0:
                return ()
            continue
        if eq.constant % eq.coeff:
            return ()
        v = -eq.constant // eq.coeff
        fixed = {v} if fixed is None else fixed & {v}
    lo_hi: Optional[tuple[float, float]] = None
    for v, lo, hi in bounds:
        if v.coeff == 0:
            if not lo <= v.constant <= hi:
                return ()
            continue
        a, b = (lo - v.constant) / v.coeff, (hi - v.constant) / v.coeff
        a, b = min(a, b), max(a, b)
        lo_hi = (a, b) if lo_hi is None else (max(lo_hi[0], a), min(lo_hi[1], b))
    if fixed is None and lo_hi is None:
        return None
    if fixed is None:
        return tuple(range(math.ceil(lo_hi[0]), math.floor(lo_hi[1]) + 1))
    return tuple(sorted(x for x in fixed if lo_hi is None or lo_hi[0] <= x <= lo_hi[1]))


def lambda_verdict(solutions: Optional[tuple[int, ...]]) -> str:
    if solutions is None:
        return "consistent"
    if not solutions:
        return "contradiction"
    return "L0=" + ",".join(str(s) for s in solutions)


def profile_env(profile: LambdaProfile, values: Mapping[str, int] = ()) -> dict[str, AffineValue]:
    env = {f"l{i}": profile[i] for i in range(7)}
    env["L0"] = AffineValue(0, 1)
    for k, v in dict(values).items():
        env[k] = AffineValue(int(v))
    return env


# -- certificates -----------------------------------------------------------------------


@dataclass(frozen=True)
class Candidate:
    kind: str
    name: str
    attrs: tuple[tuple[str, str], ...]
    expect: str
    refutes: tuple[str, ...] = ()

    def get(self, key: str, default: Optional[str] = None) -> Optional[str]:
        for k, v in self.attrs:
            if k == key:
                return v
        return default


@dataclass(frozen=True)
class LedgerCertificate:
    id: str
    statement: str
    requires: tuple[str, ...]
    objects: Mapping[str, LedgerObject]
    candidates: tuple[Candidate, ...]
    assumptions: tuple[str, ...]
    claims: tuple[tuple[str, str], ...]
    source: str = ""

    def claim_values(self, key: str) -> list[str]:
        return [v for k, v in self.claims if k == key]


CANDIDATE_KINDS = ("conic", "portion", "fiedler", "reduce", "mu", "lambda", "split", "order", "axiom")
_SECTIONS = ("CERTIFICATE", "OBJECTS", "CANDIDATES", "ASSUMPTIONS", "CLAIMS")


def parse_certificate(text: str, source: str = "<text>") -> LedgerCertificate:
    section = None
    header: dict[str, str] = {}
    objects = standard_objects()
    candidates: list[Candidate] = []
    assumptions: list[str] = []
    claims: list[tuple[str, str]] = []
    seen_sections = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = re.fullmatch(r"\[([A-Z]+)\]", line)
        if m:
            section = m.group(1)
            if section not in _SECTIONS:
                raise CertificateFormatError(f"{source}:{lineno}: unknown section [{section}]")
            seen_sections.add(section)
            continue
        where = f"{source}:{lineno}"
        if section in ("CERTIFICATE", "CLAIMS"):
            key, sep, value = line.partition("=")
            if not sep:
                raise CertificateFormatError(f"{where}: expected key = value")
            if section == "CERTIFICATE":
                header[key.strip()] = value.strip()
            else:
                claims.append((key.strip(), value.strip()))
        elif section == "OBJECTS":
            key, sep, value = line.partition("=")
            parts = value.split(None, 1)
            if not sep or not parts:
                raise CertificateFormatError(f"{where}: expected NAME = kind [zone]")
            name = key.strip()
            try:
                objects[name] = LedgerObject(name, parts[0], parts[1] if len(parts) > 1 else "")
            except LedgerError as exc:
                raise CertificateFormatError(f"{where}: {exc}") from None
        elif section == "CANDIDATES":
            candidates.append(_parse_candidate(line, where))
        elif section == "ASSUMPTIONS":
            assumptions.append(line.lstrip("- ").strip())
        else:
            raise CertificateFormatError(f"{where}: content outside a section")
    missing = [s for s in _SECTIONS if s not in seen_sections and s != "ASSUMPTIONS"]
    if missing:
        raise CertificateFormatError(f"{source}: missing section(s) {', '.join(missing)}")
    if "id" not in header:
        raise CertificateFormatError(f"{source}: certificate has no id")
    names = [c.name for c in candidates]
    dup = {n for n in names if names.count(n) > 1}
    if dup:
        raise CertificateFormatError(f"{source}: duplicate candidate names {sorted(dup)}")
    requires = tuple(x.strip() for x in header.get("requires", "").split(",") if x.strip())
    return LedgerCertificate(
        header["id"], header.get("statement", ""), requires, objects,
        tuple(candidates), tuple(assumptions), tuple(claims), source,
    )


def _parse_candidate(line: str, where: str) -> Candidate:
    try:
        parts = shlex.split(line)
    except ValueError as exc:
        raise CertificateFormatError(f"{where}: {exc}") from None
    if len(parts) < 2 or parts[0] not in CANDIDATE_KINDS:
        raise CertificateFormatError(f"{where}: expected '<kind> <name> key=value ...'")
    attrs = []
    for p in parts[2:]:
        k, sep, v = p.partition("=")
        if not sep:
            raise CertificateFormatError(f"{where}: bad attribute {p!r}")
        attrs.append((k, v))
    d = dict(attrs)
    if "expect" not in d:
        raise CertificateFormatError(f"{where}: candidate {parts[1]} has no expect=")
    refutes = tuple(x for x in d.get("refutes", "").split(",") if x)
    rest = tuple((k, v) for k, v in attrs if k not in ("expect", "refutes"))
    return Candidate(parts[0], parts[1], rest, d["expect"], refutes)


def load_certificate(path: Union[str, Path]) -> LedgerCertificate:
    p = Path(path)
    return parse_certificate(p.read_text(encoding="utf-8"), p.name)


# -- recomputation ------------------------------------------------------------------------


def _names(value: Optional[str]) -> tuple[str, ...]:
    if not value:
        return ()
    if "," in value:
        return tuple(x.strip() for x in value.split(",") if x.strip())
    return tuple(re.findall(r"[A-Z][a-z0-9']*", value))


def _maximal(value: Optional[str]) -> frozenset[str]:
    if not value or value == "none":
        return frozenset()
    if value == "all":
        return frozenset(BASE_LINES)
    return frozenset(canonical_line(x.strip()) for x in value.split(","))


def _extra(value: Optional[str]) -> tuple[tuple[str, int], ...]:
    if not value:
        return ()
    out = []
    for item in value.split(","):
        image, _, n = item.rpartition(":")
        out.append((image, int(n)))
    return tuple(out)


def _check_ovals(cert: LedgerCertificate, names: Iterable[str], cand: Candidate) -> None:
    for n in names:
        obj = cert.objects.get(n)
        if obj is None:
            raise CertificateInvalid(cert.id, cand.name, f"undeclared oval {n}")
        if obj.kind != "empty-oval":
            raise CertificateInvalid(cert.id, cand.name, f"{n} is not an empty oval")


def _profile_for(cand: Candidate) -> tuple[Optional[LambdaProfile], Optional[str]]:
    tokens = cand.get("type")
    if tokens is None:
        return None, None
    ctype = parse_type(tokens.split())
    try:
        prof = symbolic_profile(ctype)
    except InfeasibleError as exc:
        raise LedgerError(f"type {tokens} has no profile: {exc}") from None
    if prof is None:
        raise LedgerError(f"type {tokens} has no single-parameter profile")
    at = cand.get("l0")
    if at is not None:
        prof = prof.at(int(at))
    return prof, type_jump_mode(ctype)


def _values(cand: Candidate) -> dict[str, int]:
    raw = cand.get("values")
    if not raw:
        return {}
    out = {}
    for item in raw.split(","):
        k, _, v = item.partition(":")
        out[k.strip()] = int(v)
    return out


def _equations(text: Optional[str], env) -> list[AffineValue]:
    eqs = []
    for eq in (text or "").split(";"):
        if not eq.strip():
            continue
        lhs, sep, rhs = eq.partition("=")
        if not sep:
            raise LedgerError(f"bad equation {eq!r}")
        eqs.append(_linear(lhs, env) - _linear(rhs, env))
    return eqs


def _bounds(text: Optional[str], env) -> list[tuple[AffineValue, int, int]]:
    out = []
    for item in (text or "").split(";"):
        if not item.strip():
            continue
        expr, _, rng = item.rpartition(":")
        lo, _, hi = rng.partition("..")
        out.append((_linear(expr, env), int(lo), int(hi)))
    return out


def _quadrant_sum(parts: Sequence[str], env) -> AffineValue:
    total = AffineValue(0)
    for p in parts:
        if p not in QUADRANT_VARS:
            raise LedgerError(f"unknown quadrant part {p!r}")
        var, sigma = QUADRANT_VARS[p]
        if var not in env:
            raise LedgerError(f"no value for {var}")
        total = total + env[var] * sigma
    return total


@dataclass(frozen=True)
class CandidateResult:
    name: str
    kind: str
    verdict: str
    expected: str
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.verdict == self.expected


def evaluate_candidate(cert: LedgerCertificate, cand: Candidate) -> CandidateResult:
    """Recompute the verdict of one candidate from its transcribed data."""
    k = cand.kind
    detail = ""
    if k == "conic":
        ovals = _names(cand.get("ovals"))
        _check_ovals(cert, ovals, cand)
        spec = ConicSpec(ovals, int(cand.get("O", "0")), _maximal(cand.get("maximal")), _extra(cand.get("extra")))
        b = conic_budget(spec)
        verdict, detail = b.verdict, f"{b.total}/{b.limit}"
    elif k == "portion":
        base = _names(cand.get("base"))
        _check_ovals(cert, base, cand)
        spec = PencilSpec(base, (PortionSpec(cand.name, int(cand.get("O", "0")), _maximal(cand.get("maximal")), _extra(cand.get("extra"))),))
        b = portion_reality(spec, cand.name)
        verdict, detail = b.verdict, f"{b.total}/{b.limit}"
    elif k == "fiedler":
        text = cand.get("seq", "")
        seq = parse_sweep(text, default_kind=cand.get("kind", "Q"))
        if "/" not in text:
            # one chain per run of same-kind ovals, whatever the orientations
            runs = [list(g) for _, g in itertools.groupby(seq.ovals, key=lambda o: o.kind)]
            seq = SweepSequence(tuple(tuple(r) for r in runs), seq.base)
        verdict = "pass" if fiedler_check(seq) else "fail"
        detail = str(seq)
    elif k == "reduce":
        seq = parse_sweep(cand.get("seq", ""))
        out = reduce_sequences(seq)
        expected_out = parse_sweep(cand.get("output", ""))
        ok = out.ovals == expected_out.ovals and out.sums() == seq.sums() and kinds_alternate(out)
        prof, _ = _profile_for(cand)
        if prof is not None:
            sums = out.sums()
            for kind, idx in (("T0", 0), ("T1", 4), ("T3", 6)):
                v = prof[idx]
                if not v.is_constant or sums.get(kind, 0) != v.constant:
                    ok = False
        verdict = "pass" if ok else "fail"
        detail = f"{seq} -> {out}"
    elif k == "mu":
        split = tuple(int(x) for x in cand.get("split", "").split(","))
        verdict = "pass" if mu_bookkeeping(cand.get("mode", ""), split) else "fail"
        detail = f"{cand.get('mode')} {split}"
    elif k in ("lambda", "split"):
        prof, mode = _profile_for(cand)
        if prof is None:
            raise CertificateInvalid(cert.id, cand.name, "lambda claims need type=")
        env = profile_env(prof, _values(cand))
        eqs = _equations(cand.get("require"), env)
        if k == "split":
            mode = cand.get("mode", mode)
            if mode not in MU_SPLIT:
                raise CertificateInvalid(cert.id, cand.name, f"jump mode {mode!r}")
            t1, t2 = MU_SPLIT[mode]
            first = [x for x in cand.get("first", "").split(",") if x]
            second = [x for x in cand.get("second", "").split(",") if x]
            eqs.append(_quadrant_sum(first, env) - t1)
            eqs.append(_quadrant_sum(second, env) - t2)
        verdict = lambda_verdict(solve_l0(eqs, _bounds(cand.get("bounds"), env)))
        detail = " ".join(f"l{i}={prof[i]}" for i in (0, 1, 2, 3, 4, 5, 6))
    elif k == "order":
        conic = _names(cand.get("conic"))
        _check_ovals(cert, conic, cand)
        ok = True
        for item in cand.get("pencils", "").split(";"):
            at, _, order = item.partition(":")
            if not order_consistent(conic, at.strip(), parse_pencil_order(order)):
                ok = False
        verdict = "consistent" if ok else "contradiction"
        detail = "".join(conic)
    elif k == "axiom":
        if not cand.get("ref"):
            raise CertificateInvalid(cert.id, cand.name, "axiom without ref=")
        verdict, detail = cand.expect, f"axiom {cand.get('ref')}"
    else:
        raise CertificateInvalid(cert.id, cand.name, f"unknown kind {k}")
    return CandidateResult(cand.name, k, verdict, cand.expect, detail)


_SURVIVING_KINDS = ("conic", "order", "lambda", "split", "axiom")


def _is_surviving(verdict: str) -> bool:
    return verdict in ("admissible", "consistent") or verdict.startswith("L0=")


@dataclass(frozen=True)
class CertificateResult:
    id: str
    source: str
    passed: bool
    errors: tuple[str, ...]
    candidates: tuple[CandidateResult, ...]
    axioms: tuple[tuple[str, str], ...]
    assumptions: tuple[str, ...]
    requires: tuple[str, ...]
    conclusions: tuple[Conclusion, ...]


def _parse_conclusion(cert: LedgerCertificate, key: str, value: str, results: Mapping[str, CandidateResult]) -> Conclusion:
    parts = [p.strip() for p in value.split("|")]
    tokens = tuple(parts[0].split())
    if len(tokens) != 3:
        raise CertificateFormatError(f"{cert.id}: conclusion needs three nest tokens: {value!r}")
    opts = {}
    for p in parts[1:]:
        k, _, v = p.partition("=")
        opts[k.strip()] = v.strip()
    l0 = tuple(int(x) for x in opts["lambda0"].split(",")) if "lambda0" in opts else None
    pattern = TypePattern(tokens)
    if key == "eliminate":
        return Conclusion("eliminate", pattern, l0, source=cert.id)
    if key == "restrict":
        src = opts.get("from")
        if src is None or src not in results:
            raise CertificateFormatError(f"{cert.id}: restrict needs from=<candidate>")
        if results[src].verdict != lambda_verdict(l0):
            raise CertificateInvalid(cert.id, src, f"restriction lambda0={l0} differs from verdict {results[src].verdict}")
        return Conclusion("restrict", pattern, l0, source=cert.id)
    if key == "laterality":
        return Conclusion("laterality", pattern, None, int(opts.get("nest", "1")), opts.get("side"), cert.id)
    raise CertificateFormatError(f"{cert.id}: unknown conclusion {key!r}")


def check_certificate(cert: LedgerCertificate, strict: bool = False) -> CertificateResult:
    """Recompute every candidate and compare with the claims.

    With ``strict`` the first failure raises ``CertificateInvalid``.
    """
    errors: list[str] = []
    results: dict[str, CandidateResult] = {}
    for cand in cert.candidates:
        try:
            r = evaluate_candidate(cert, cand)
        except CertificateInvalid as exc:
            if strict:
                raise
            errors.append(str(exc))
            continue
        except LedgerError as exc:
            if strict:
                raise CertificateInvalid(cert.id, cand.name, str(exc)) from None
            errors.append(f"{cert.id}: candidate {cand.name}: {exc}")
            continue
        results[cand.name] = r
        if not r.ok:
            msg = f"{cert.id}: candidate {cand.name}: recomputed {r.verdict} ({r.detail}), certificate claims {r.expected}"
            if strict:
                raise CertificateInvalid(cert.id, cand.name, f"recomputed {r.verdict}, claimed {r.expected}")
            errors.append(msg)
    names = {c.name for c in cert.candidates}
    for c in cert.candidates:
        for target in c.refutes:
            if target not in names:
                errors.append(f"{cert.id}: candidate {c.name} refutes unknown candidate {target}")
    claimed = cert.claim_values("survivors")
    if claimed:
        refuted = {t for c in cert.candidates if c.name in results and results[c.name].verdict in REFUTING for t in c.refutes}
        actual = sorted(
            n for n, r in results.items()
            if r.kind in _SURVIVING_KINDS and _is_surviving(r.verdict) and n not in refuted
        )
        want = sorted(x.strip() for x in claimed[-1].split(",") if x.strip() and x.strip() != "none")
        if actual != want:
            errors.append(f"{cert.id}: survivors are {actual or ['none']}, certificate claims {want or ['none']}")
    conclusions = []
    for key, value in cert.claims:
        if key in ("eliminate", "restrict", "laterality"):
            try:
                conclusions.append(_parse_conclusion(cert, key, value, results))
            except LedgerError as exc:
                if strict:
                    raise
                errors.append(str(exc))
    axioms = tuple((c.get("ref"), c.name) for c in cert.candidates if c.kind == "axiom")
    return CertificateResult(
        cert.id, cert.source, not errors, tuple(errors), tuple(results.values()),
        axioms, cert.assumptions, cert.requires, tuple(conclusions),
    )


@dataclass
class LedgerReport:
    results: dict[str, CertificateResult] = field(default_factory=dict)

    def verified(self, cert_id: str, _seen: Optional[frozenset] = None) -> bool:
        r = self.results.get(cert_id)
        if r is None or not r.passed:
            return False
        seen = (_seen or frozenset()) | {cert_id}
        return all(dep not in seen and self.verified(dep, seen) for dep in r.requires)

    def reason(self, cert_id: str) -> str:
        r = self.results.get(cert_id)
        if r is None:
            return "certificate missing"
        if not r.passed:
            return "; ".join(r.errors)
        bad = [d for d in r.requires if not self.verified(d)]
        return f"depends on unverified {', '.join(bad)}" if bad else ""

    @property
    def all_passed(self) -> bool:
        return all(self.verified(i) for i in self.results)

    def conclusions(self) -> list[tuple[str, tuple[Conclusion, ...]]]:
        return [(i, r.conclusions) for i, r in sorted(self.results.items()) if r.conclusions]

    def axiom_report(self) -> list[tuple[str, str, str]]:
        """(axiom reference, certificate, candidate) for every cited axiom."""
        return sorted((ref, i, cand) for i, r in self.results.items() for ref, cand in r.axioms)

    def assumption_report(self) -> list[tuple[str, str]]:
        return [(i, a) for i, r in sorted(self.results.items()) for a in r.assumptions]


def shipped_certificate_dir():
    return resources.files("ovalis") / "data" / "certificates"


def shipped_certificate_paths() -> list:
    root = shipped_certificate_dir()
    return sorted((p for p in root.iterdir() if p.name.endswith(".cert")), key=lambda p: p.name)


def check_paths(paths: Iterable) -> LedgerReport:
    report = LedgerReport()
    for p in paths:
        if isinstance(p, str):
            p = Path(p)
        cert = parse_certificate(p.read_text(encoding="utf-8"), p.name)
        if cert.id in report.results:
            raise CertificateFormatError(f"duplicate certificate id {cert.id}")
        report.results[cert.id] = check_certificate(cert)
    return report


@functools.lru_cache(maxsize=1)
def check_shipped() -> LedgerReport:
    return check_paths(shipped_certificate_paths())
