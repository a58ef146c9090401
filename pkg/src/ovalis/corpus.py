"""Reading, validating, emitting and diffing the transcribed tables.

Every table is a TSV file with a ``#table <id> "<caption>"`` header line,
optional ``#erratum`` lines, a column header and data rows.  The first three
columns always hold the nest tokens.
"""

from __future__ import annotations

import json
import os
import re
from collections import defaultdict
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

from ovalis.codes import (
    SchemeError,
    TokenError,
    canonical_permutation,
    parse_type_token,
)
from ovalis.orientation import Observation, parse_affine

ROW_COUNTS = {
    1: 12, 2: 18, 3: 6, 4: 9, 5: 14, 6: 3, 7: 14, 8: 5, 9: 2,
    10: 7, 11: 12, 12: 12, 13: 7, 14: 12, 15: 12, 16: 12, 17: 10, 18: 2,
}

E_TABLES = (1, 7, 11, 17)
FG_TABLES = (2, 3, 4, 8, 9, 12, 13, 14, 15)
TYPE_TABLES = (5, 6, 10, 16)
SCHEME_TABLES = E_TABLES + (18,)

ENV_VAR = "OVALIS_CORPUS"

_HEADER_RE = re.compile(r'#table\s+(\d+)\s+"(.*)"\s*$')
_ERRATUM_RE = re.compile(r"#erratum\s+(.*)$")
_FG_RE = re.compile(r"F(\d)-G(\d)-G(\d)$")
_Z_RE = re.compile(r"\((\d(?:,\d)*)?\)$")


class CorpusError(ValueError):
    """A table file is missing, malformed or has the wrong shape."""


@dataclass(frozen=True)
class Table:
    """One table: transcribed from the source or produced by the pipeline."""

    id: int
    caption: str
    columns: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]
    errata: tuple[tuple[tuple[str, str], ...], ...] = ()

    @property
    def kind(self) -> str:
        if self.id in E_TABLES or self.id == 18:
            return "scheme"
        if self.id in FG_TABLES:
            return "deficit"
        return "type"

    def column(self, name: str) -> list[str]:
        j = self.columns.index(name)
        return [r[j] for r in self.rows]


CorpusTable = Table
DerivedTable = Table


@dataclass
class Corpus:
    tables: dict[int, Table]
    warnings: list[str] = field(default_factory=list)
    source: str = ""

    def __getitem__(self, table_id: int) -> Table:
        return self.tables[table_id]

    def observations(self) -> list[Observation]:
        """Every E cell and every F-G cell as a fitting observation."""
        out: list[Observation] = []
        for tid in E_TABLES:
            t = self.tables[tid]
            for r, row in enumerate(t.rows, start=1):
                codes = tuple(parse_type_token(x)[0] for x in row[:3])
                for i in range(4):
                    value = int(row[t.columns.index(f"E{i}")])
                    out.append(Observation(f"table {tid} row {r} E{i}", codes, "E", i, value))
        seen = set()
        for tid in FG_TABLES:
            t = self.tables[tid]
            i = deficit_index(t.columns)
            for r, row in enumerate(t.rows, start=1):
                if (tid, row) in seen:
                    continue
                seen.add((tid, row))
                parsed = [parse_type_token(x) for x in row[:3]]
                codes = tuple(c for c, _ in parsed)
                attr = parsed[i - 1][1]
                out.append(
                    Observation(
                        f"table {tid} row {r} {t.columns[3]}", codes, "FG", i,
                        int(row[3]), attr.kind,
                    )
                )
        return out


def deficit_index(columns: Sequence[str]) -> int:
    m = _FG_RE.match(columns[3])
    if not m:
        raise CorpusError(f"not a deficit table header: {columns[3]!r}")
    return int(m.group(1))


def parse_zone(text: str) -> tuple[int, ...]:
    m = _Z_RE.match(text.replace(" ", ""))
    if not m:
        raise CorpusError(f"bad zone cell {text!r}")
    return tuple(int(x) for x in m.group(1).split(",")) if m.group(1) else ()


def format_zone(zones: Iterable[int]) -> str:
    return "(" + ",".join(str(z) for z in sorted(zones)) + ")"


# -- loading ------------------------------------------------------------------


def _validate_cell(tid: int, column: str, cell: str) -> None:
    try:
        if column in ("O1", "O2", "O3"):
            parse_type_token(cell)
        elif column == "Z":
            parse_zone(cell)
        elif column.startswith("lambda"):
            parse_affine(cell)
        else:
            int(cell)
    except (TokenError, SchemeError, ValueError) as exc:
        raise CorpusError(f"table {tid}, column {column}: {exc}") from None


def parse_table(text: str, name: str = "<text>") -> Table:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise CorpusError(f"{name}: empty table file")
    m = _HEADER_RE.match(lines[0])
    if not m:
        raise CorpusError(f"{name}: first line must be '#table <id> \"<caption>\"'")
    tid, caption = int(m.group(1)), m.group(2)
    errata = []
    body = lines[1:]
    while body and body[0].startswith("#"):
        em = _ERRATUM_RE.match(body[0])
        if not em:
            raise CorpusError(f"table {tid}: unknown directive {body[0]!r}")
        errata.append(tuple(tuple(kv.split("=", 1)) for kv in em.group(1).split()))
        body = body[1:]
    if not body:
        raise CorpusError(f"table {tid}: missing column header")
    columns = tuple(body[0].split("\t"))
    if columns[:3] != ("O1", "O2", "O3"):
        raise CorpusError(f"table {tid}: first three columns must be O1 O2 O3")
    rows = []
    for ln in body[1:]:
        cells = tuple(c.strip() for c in ln.split("\t"))
        if len(cells) != len(columns):
            raise CorpusError(f"table {tid}: row {ln!r} has {len(cells)} cells, expected {len(columns)}")
        for col, cell in zip(columns, cells):
            _validate_cell(tid, col, cell)
        rows.append(cells)
    return Table(tid, caption, columns, tuple(rows), tuple(errata))


def _default_root():
    return resources.files("ovalis") / "data" / "tables"


def load_corpus(path: Optional[Union[str, os.PathLike]] = None) -> Corpus:
    """Load all 18 tables from ``path``, ``$OVALIS_CORPUS`` or the package data."""
    if path is None:
        path = os.environ.get(ENV_VAR) or None
    root = Path(path) if path is not None else _default_root()
    tables: dict[int, Table] = {}
    warnings: list[str] = []
    for tid, expected in sorted(ROW_COUNTS.items()):
        f = root / f"table-{tid:02d}.tsv"
        if not f.is_file():
            raise CorpusError(f"table {tid} is missing ({f})")
        table = parse_table(f.read_text(encoding="utf-8"), str(f))
        if table.id != tid:
            raise CorpusError(f"{f} declares table {table.id}, expected {tid}")
        if len(table.rows) != expected:
            raise CorpusError(f"table {tid} has {len(table.rows)} rows, expected {expected}")
        seen: dict[tuple, int] = {}
        for r, row in enumerate(table.rows, start=1):
            if row in seen:
                warnings.append(f"table {tid}: row {r} duplicates row {seen[row]}: {' '.join(row)}")
            else:
                seen[row] = r
        tables[tid] = table
    return Corpus(tables, warnings, str(root))


# -- emitting -----------------------------------------------------------------


def emit_table(table: Table, fmt: str = "tsv") -> str:
    if fmt == "tsv":
        out = [f'#table {table.id} "{table.caption}"']
        for e in table.errata:
            out.append("#erratum " + " ".join(f"{k}={v}" for k, v in e))
        out.append("\t".join(table.columns))
        out.extend("\t".join(r) for r in table.rows)
        return "\n".join(out) + "\n"
    if fmt == "json":
        doc = {
            "id": table.id,
            "caption": table.caption,
            "columns": list(table.columns),
            "rows": [list(r) for r in table.rows],
            "errata": [dict(e) for e in table.errata],
        }
        return json.dumps(doc, indent=2, ensure_ascii=True) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def table_from_json(text: str) -> Table:
    doc = json.loads(text)
    return Table(
        int(doc["id"]), doc["caption"], tuple(doc["columns"]),
        tuple(tuple(r) for r in doc["rows"]),
        tuple(tuple(e.items()) for e in doc.get("errata", [])),
    )


def write_corpus(corpus: Corpus, directory: Union[str, os.PathLike]) -> None:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    for tid, table in sorted(corpus.tables.items()):
        (d / f"table-{tid:02d}.tsv").write_text(emit_table(table, "tsv"), encoding="utf-8")


# -- canonical rows and diffs ---------------------------------------------------

_PER_NEST = (
    re.compile(r"E([123])$"),
    re.compile(r"lambda([456])$"),
    re.compile(r"lambda([123])$"),
)


def _nest_of_column(column: str) -> Optional[tuple[str, int]]:
    """(column family, 0-based nest) for columns that follow the nests."""
    for rx in _PER_NEST:
        m = rx.match(column)
        if m:
            k = int(m.group(1))
            family = column[: -1]
            return family, (k - 1) % 3
    return None


def canonical_row(columns: Sequence[str], row: Sequence[str]) -> tuple[tuple[str, ...], dict[str, str]]:
    """Reorder the nests of a row canonically, carrying every nest-indexed cell.

    Returns the canonical nest tokens and a column->cell mapping.  The
    ``F<i>-G<j>-G<k>`` header is folded into a ``deficit`` column because the
    separating nest is already identified by its attribute.
    """
    parsed = [parse_type_token(t) for t in row[:3]]
    codes = tuple(c for c, _ in parsed)
    attrs = tuple(a for _, a in parsed)
    cells = dict(zip(columns[3:], row[3:]))
    per_nest: list[tuple] = [[] for _ in range(3)]
    for col, cell in cells.items():
        nc = _nest_of_column(col)
        if nc:
            per_nest[nc[1]].append((nc[0], cell))
    tiebreak = tuple(tuple(sorted(x)) for x in per_nest)
    perm = canonical_permutation(codes, attrs, tiebreak)
    inverse = {old: new for new, old in enumerate(perm)}
    out: dict[str, str] = {}
    for col, cell in cells.items():
        nc = _nest_of_column(col)
        if nc:
            family, nest = nc
            base = {"E": 1, "lambda": 4 if col[-1] in "456" else 1}[family]
            out[f"{family}{base + inverse[nest]}"] = cell
        elif col == "Z":
            zones = parse_zone(cell)
            out[col] = format_zone(z if z == 0 else inverse[z - 1] + 1 for z in zones)
        elif _FG_RE.match(col):
            out["deficit"] = cell
        else:
            out[col] = cell
    return tuple(row[i] for i in perm), out


@dataclass(frozen=True)
class DiffEntry:
    row_key: str
    column: str
    expected: str
    got: str

    def __str__(self) -> str:
        return f"{self.row_key}\t{self.column}\texpected={self.expected}\tgot={self.got}"


def _canonical_rows(table: Table, dedupe: bool) -> dict[tuple[str, ...], list[dict[str, str]]]:
    groups: dict[tuple[str, ...], list[dict[str, str]]] = defaultdict(list)
    seen = set()
    for row in table.rows:
        if dedupe and row in seen:
            continue
        seen.add(row)
        key, cells = canonical_row(table.columns, row)
        groups[key].append(cells)
    for key in groups:
        groups[key].sort(key=lambda c: sorted(c.items()))
    return groups


def diff_tables(derived: Table, corpus: Table) -> list[DiffEntry]:
    """Cell-level differences after canonical nest ordering.

    Rows are matched by their canonical nest tokens; rows sharing tokens
    (e.g. one row per admissible lambda_0) are paired in sorted order.  A
    duplicated corpus row (flagged as a warning at load time) is compared
    once.  ``expected`` is the corpus value and ``got`` the derived one.
    """
    if derived.id != corpus.id:
        raise ValueError(f"cannot diff table {derived.id} against table {corpus.id}")
    exp = _canonical_rows(corpus, dedupe=True)
    got = _canonical_rows(derived, dedupe=False)
    diffs: list[DiffEntry] = []
    for key in sorted(set(exp) | set(got)):
        e_rows, g_rows = exp.get(key, []), got.get(key, [])
        label = " ".join(key)
        for n in range(max(len(e_rows), len(g_rows))):
            rk = label if max(len(e_rows), len(g_rows)) == 1 else f"{label} #{n + 1}"
            if n >= len(g_rows):
                diffs.append(DiffEntry(rk, "<row>", "present", "missing"))
                continue
            if n >= len(e_rows):
                diffs.append(DiffEntry(rk, "<row>", "absent", "present"))
                continue
            e, g = e_rows[n], g_rows[n]
            for col in sorted(set(e) | set(g)):
                ev, gv = e.get(col, ""), g.get(col, "")
                if _cell_key(col, ev) != _cell_key(col, gv):
                    diffs.append(DiffEntry(rk, col, ev, gv))
    return diffs


def _cell_key(column: str, cell: str):
    if column.startswith("lambda") and cell:
        try:
            return parse_affine(cell)
        except ValueError:
            return cell
    return cell
