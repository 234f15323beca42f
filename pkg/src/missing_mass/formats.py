"""Reading and writing incidence data.

Three text formats, all UTF-8, all skipping lines that start with ``#``:

``list``
    One sample per line, features as tokens separated by ASCII spaces or
    tabs.  An empty line is an empty sample.
``csv``
    A header row of feature names, then one row of ``0``/``1`` cells per
    sample.
``pairs``
    ``sample_index feature_token`` per line, 0-based indices.  A line with
    just an index declares that sample, so empty samples survive.

Tokens are interned to integer ids in order of first appearance.
"""

from __future__ import annotations

import csv
import io
import re
from pathlib import Path
from typing import Iterator

from .errors import ParseError
from .spectrum import SampleMatrix

FORMATS = ("list", "csv", "pairs")
_SPLIT = re.compile(r"[ \t]+")
_EXTENSIONS = {".csv": "csv", ".pairs": "pairs", ".tsv": "pairs"}


def detect_format(path, fmt: str | None = None) -> str:
    if fmt:
        if fmt not in FORMATS:
            raise ParseError(f"unknown format {fmt!r}", kind="UnknownFormat")
        return fmt
    return _EXTENSIONS.get(Path(path).suffix.lower(), "list")


class Interner:
    def __init__(self):
        self.ids: dict = {}
        self.tokens: list = []

    def __call__(self, token: str) -> int:
        i = self.ids.get(token)
        if i is None:
            i = self.ids[token] = len(self.tokens)
            self.tokens.append(token)
        return i


def _lines(text: str):
    if not text:
        return
    lines = text.split("\n")
    if text.endswith("\n"):
        lines.pop()
    for lineno, line in enumerate(lines, start=1):
        line = line.rstrip("\r")
        if line.startswith("#"):
            continue
        yield lineno, line


def _tokens(line: str) -> list:
    line = line.strip(" \t")
    return _SPLIT.split(line) if line else []


def _parse_list_line(lineno, line, intern) -> frozenset:
    toks = _tokens(line)
    if len(set(toks)) != len(toks):
        raise ParseError("feature listed twice in one sample", line=lineno, kind="DuplicateFeature")
    return frozenset(intern(t) for t in toks)


def _read_list(text: str, intern: Interner) -> list:
    return [_parse_list_line(lineno, line, intern) for lineno, line in _lines(text)]


def _read_csv(text: str, intern: Interner) -> list:
    rows = list(_lines(text))
    if not rows:
        return []
    header_line, header = rows[0]
    names = next(csv.reader([header]), [])
    if len(set(names)) != len(names):
        raise ParseError("duplicate column name", line=header_line, kind="DuplicateFeature")
    ids = [intern(name) for name in names]
    samples = []
    for lineno, line in rows[1:]:
        cells = next(csv.reader([line]), [])
        if len(cells) != len(ids):
            raise ParseError(f"expected {len(ids)} cells, got {len(cells)}", line=lineno, kind="RowLength")
        present = []
        for fid, cell in zip(ids, cells):
            cell = cell.strip()
            if cell == "1":
                present.append(fid)
            elif cell != "0":
                raise ParseError(f"cell {cell!r} is not 0 or 1", line=lineno, kind="BadCell")
        samples.append(frozenset(present))
    return samples


def _read_pairs(text: str, intern: Interner) -> list:
    by_sample: dict = {}
    for lineno, line in _lines(text):
        toks = _tokens(line)
        if not toks:
            continue
        if len(toks) > 2:
            raise ParseError("expected 'sample_index feature_token'", line=lineno, kind="BadPair")
        try:
            idx = int(toks[0])
        except ValueError:
            raise ParseError(f"sample index {toks[0]!r} is not an integer", line=lineno, kind="BadPair") from None
        if idx < 0:
            raise ParseError("negative sample index", line=lineno, kind="BadPair")
        feats = by_sample.setdefault(idx, set())
        if len(toks) == 2:
            fid = intern(toks[1])
            if fid in feats:
                raise ParseError("duplicate (sample, feature) pair", line=lineno, kind="DuplicateFeature")
            feats.add(fid)
    if not by_sample:
        return []
    n = max(by_sample) + 1
    return [frozenset(by_sample.get(i, ())) for i in range(n)]


_READERS = {"list": _read_list, "csv": _read_csv, "pairs": _read_pairs}


def parse_text(text: str, fmt: str) -> SampleMatrix:
    intern = Interner()
    samples = _READERS[fmt](text, intern)
    if not samples:
        raise ParseError("input contains no samples", kind="EmptyInput")
    return SampleMatrix(tuple(samples), labels=tuple(intern.tokens))


def read_incidence(path, fmt: str | None = None) -> SampleMatrix:
    fmt = detect_format(path, fmt)
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"not valid UTF-8: {exc}", kind="Encoding") from None
    return parse_text(text, fmt)


def stream_feature_list(path) -> Iterator[frozenset]:
    """Samples of a ``list`` file one at a time, without reading it whole."""
    intern = Interner()
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if line.startswith("#"):
                continue
            yield _parse_list_line(lineno, line, intern)


def _label(matrix: SampleMatrix, fid: int) -> str:
    label = matrix.labels[fid] if matrix.labels is not None else str(fid)
    if not label or label.startswith("#") or _SPLIT.search(label) or "\n" in label or "\r" in label:
        raise ValueError(f"feature label {label!r} cannot be written as a text token")
    return label


def _used_ids(matrix: SampleMatrix) -> list:
    ids = set().union(*matrix.samples) if matrix.samples else set()
    return sorted(ids)


def format_text(matrix: SampleMatrix, fmt: str) -> str:
    out = io.StringIO()
    if fmt == "list":
        for s in matrix.samples:
            out.write(" ".join(_label(matrix, f) for f in sorted(s)) + "\n")
    elif fmt == "csv":
        ids = _used_ids(matrix)
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow([_label(matrix, f) for f in ids])
        for s in matrix.samples:
            writer.writerow(["1" if f in s else "0" for f in ids])
    elif fmt == "pairs":
        for i, s in enumerate(matrix.samples):
            if not s:
                out.write(f"{i}\n")
            for f in sorted(s):
                out.write(f"{i} {_label(matrix, f)}\n")
    else:
        raise ParseError(f"unknown format {fmt!r}", kind="UnknownFormat")
    return out.getvalue()


def write_incidence(matrix: SampleMatrix, path, fmt: str | None = None) -> None:
    fmt = detect_format(path, fmt)
    Path(path).write_text(format_text(matrix, fmt), encoding="utf-8")
