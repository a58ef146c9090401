from __future__ import annotations

import dataclasses
import shutil

import pytest

from ovalis.corpus import (
    ENV_VAR,
    ROW_COUNTS,
    CorpusError,
    DiffEntry,
    diff_tables,
    emit_table,
    load_corpus,
    parse_table,
    table_from_json,
    write_corpus,
)
from ovalis.orientation import AffineValue, parse_affine
from ovalis.pipeline import derive_table


def test_shipped_corpus_shape(corpus):
    assert sorted(corpus.tables) == list(range(1, 19))
    counts = tuple(len(corpus[t].rows) for t in range(1, 19))
    assert counts == (12, 18, 6, 9, 14, 3, 14, 5, 2, 7, 12, 12, 7, 12, 12, 12, 10, 2)
    assert len(corpus.warnings) == 1
    assert "table 13" in corpus.warnings[0]


def test_table7_erratum_recorded(corpus):
    errata = [dict(e) for e in corpus[7].errata]
    assert errata == [{"row": "8", "column": "Lambda", "printed": "0", "corrected": "-1"}]


def test_affine_cell(corpus):
    cells = corpus[5].column("lambda5") + corpus[5].column("lambda6")
    assert AffineValue(3, 1) in {parse_affine(c) for c in cells}


def _copy(tmp_path):
    root = tmp_path / "corpus"
    src = load_corpus().source
    shutil.copytree(src, root)
    return root


def test_missing_table_named(tmp_path):
    root = _copy(tmp_path)
    (root / "table-07.tsv").unlink()
    with pytest.raises(CorpusError, match="table 7"):
        load_corpus(root)


def test_wrong_row_count(tmp_path):
    root = _copy(tmp_path)
    f = root / "table-06.tsv"
    lines = f.read_text().splitlines()
    f.write_text("\n".join(lines[:-1]) + "\n")
    with pytest.raises(CorpusError, match="table 6 has 2 rows"):
        load_corpus(root)


def test_malformed_cells():
    header = '#table 6 "x"\nO1\tO2\tO3\tlambda0\n'
    with pytest.raises(CorpusError):
        parse_table(header + "(-,q)\t(-,n)\t(pm,mp)\t-1\n")
    with pytest.raises(CorpusError):
        parse_table(header + "(-,n)\t(-,n)\t(pm,mp)\tL7\n")
    with pytest.raises(CorpusError):
        parse_table('#table 6 "x"\n#note hello\nO1\tO2\tO3\n')


def test_env_var_override(tmp_path, monkeypatch):
    root = _copy(tmp_path)
    monkeypatch.setenv(ENV_VAR, str(root))
    assert load_corpus().source == str(root)


def test_round_trip_tsv(tmp_path, corpus):
    write_corpus(corpus, tmp_path / "out")
    again = load_corpus(tmp_path / "out")
    assert again.tables == corpus.tables
    assert again.warnings == corpus.warnings


def test_round_trip_json(corpus):
    for table in corpus.tables.values():
        assert table_from_json(emit_table(table, "json")) == table


def test_diff_identical_is_empty(corpus):
    for tid in ROW_COUNTS:
        if tid == 13:
            continue
        assert diff_tables(corpus[tid], corpus[tid]) == []


def test_duplicate_row_compared_once(corpus):
    # the corpus side is deduplicated, the derived side is not, so a
    # derived table carrying the duplicate shows one surplus row
    diffs = diff_tables(corpus[13], corpus[13])
    assert [(d.column, d.expected, d.got) for d in diffs] == [("<row>", "absent", "present")]


def test_diff_single_perturbed_cell(corpus):
    t = corpus[1]
    rows = [list(r) for r in t.rows]
    col = t.columns.index("E1")
    rows[2][col] = str(int(rows[2][col]) + 7)
    perturbed = dataclasses.replace(t, rows=tuple(tuple(r) for r in rows))
    diffs = diff_tables(perturbed, t)
    assert len(diffs) == 1
    d = diffs[0]
    assert isinstance(d, DiffEntry)
    # canonical nest ordering may relabel the column, but it stays an E column
    assert d.column in {"E1", "E2", "E3"}
    assert int(d.got) == int(d.expected) + 7


def test_diff_missing_row(corpus):
    t = corpus[6]
    shorter = dataclasses.replace(t, rows=t.rows[:-1])
    diffs = diff_tables(shorter, t)
    assert [d.column for d in diffs] == ["<row>"]
    assert diffs[0].got == "missing"


def test_diff_compares_affine_cells_semantically(corpus):
    t = corpus[10]
    j = t.columns.index("lambda5")
    rows = [list(r) for r in t.rows]
    assert rows[0][j] == "L0+1"
    rows[0][j] = "1+L0"
    assert diff_tables(dataclasses.replace(t, rows=tuple(map(tuple, rows))), t) == []


def test_derived_table10_matches(corpus):
    assert diff_tables(derive_table(10), corpus[10]) == []
