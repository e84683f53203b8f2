"""Readers and writers for the matrix JSON and counts CSV formats.

Matrix JSON::

    {"basis": ["HH", "HV", "VH", "VV"], "matrix": [[[re, im], ...], ...]}

Counts CSV (UTF-8, header required, optional ``duration_tag`` column)::

    first,second,count
    H,H,34210
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .tomography import KETS, CoincidenceRecord, MeasurementSetting

BASIS = ["HH", "HV", "VH", "VV"]
COUNTS_HEADER = ["first", "second", "count"]


class InputError(ValueError):
    """Bad input file. ``kind`` names the failure (``wrong-shape``, ``unknown-label``, ...)."""

    def __init__(self, kind: str, message: str):
        super().__init__(f"{kind}: {message}")
        self.kind = kind


class InputKind(enum.Enum):
    MATRIX = "matrix"
    COUNTS = "counts"


@dataclass(frozen=True, eq=False)
class InputDocument:
    kind: InputKind
    payload: object
    metadata: dict[str, str] = field(default_factory=dict)

    @property
    def input_id(self) -> str:
        return self.metadata.get("source", "<stdin>")


def read_text(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError("io-error", f"cannot read {path}: {exc}") from exc


def _entry(value, where: str) -> complex:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise InputError("malformed-json", f"entry {where} must be a [re, im] pair")
    parts = []
    for v in value:
        if isinstance(v, bool):
            raise InputError("malformed-json", f"entry {where} is not numeric")
        if isinstance(v, str):
            try:
                v = float(v)
            except ValueError:
                raise InputError("malformed-json", f"entry {where} is not numeric") from None
            if math.isfinite(v):
                raise InputError("malformed-json", f"entry {where} is a string, not a number")
        if not isinstance(v, (int, float)):
            raise InputError("malformed-json", f"entry {where} is not numeric")
        if not math.isfinite(v):
            raise InputError("non-finite-entry", f"entry {where} is {v!r}")
        parts.append(float(v))
    return complex(parts[0], parts[1])


def parse_matrix_text(text: str, source: str = "<stdin>") -> InputDocument:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError("malformed-json", str(exc)) from exc
    if not isinstance(data, dict) or "matrix" not in data:
        raise InputError("malformed-json", "expected an object with a 'matrix' key")
    if data.get("basis") != BASIS:
        raise InputError("malformed-json", f"'basis' must be exactly {BASIS}")
    rows = data["matrix"]
    if not isinstance(rows, list) or len(rows) != 4 or any(
        not isinstance(r, list) or len(r) != 4 for r in rows
    ):
        raise InputError("wrong-shape", "matrix must be 4x4")
    m = np.array(
        [[_entry(v, f"({i},{j})") for j, v in enumerate(r)] for i, r in enumerate(rows)]
    )
    meta = {"source": source}
    meta.update({k: str(v) for k, v in data.get("metadata", {}).items()})
    return InputDocument(InputKind.MATRIX, m, meta)


def parse_matrix_file(path) -> InputDocument:
    return parse_matrix_text(read_text(path), str(path))


def parse_counts_text(text: str, source: str = "<stdin>") -> InputDocument:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise InputError("malformed-csv", "empty counts file") from None
    header = [h.strip() for h in header]
    if header not in (COUNTS_HEADER, COUNTS_HEADER + ["duration_tag"]):
        raise InputError("malformed-csv", f"header must be {','.join(COUNTS_HEADER)}")
    records = []
    seen = set()
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) not in (3, len(header)):
            raise InputError("malformed-csv", f"line {lineno}: expected {len(header)} fields")
        first, second, raw = (c.strip() for c in row[:3])
        for label in (first, second):
            if label not in KETS:
                raise InputError("unknown-label", f"line {lineno}: label {label!r}")
        try:
            count = int(raw)
        except ValueError:
            raise InputError("malformed-csv", f"line {lineno}: count {raw!r} is not an integer") from None
        if count < 0:
            raise InputError("negative-count", f"line {lineno}: count {count}")
        setting = MeasurementSetting(first, second)
        if setting in seen:
            raise InputError("duplicate-setting", f"line {lineno}: ({first},{second}) repeated")
        seen.add(setting)
        tag = row[3].strip() if len(row) > 3 and row[3].strip() else None
        records.append(CoincidenceRecord(setting, count, tag))
    if not records:
        raise InputError("malformed-csv", "no count rows")
    return InputDocument(InputKind.COUNTS, records, {"source": source})


def parse_counts_file(path) -> InputDocument:
    return parse_counts_text(read_text(path), str(path))


def parse_input_text(text: str, source: str = "<stdin>") -> InputDocument:
    """Dispatch on content: a JSON object is a matrix, anything else counts CSV."""
    if text.lstrip().startswith("{"):
        return parse_matrix_text(text, source)
    return parse_counts_text(text, source)


def parse_settings_text(text: str) -> list[MeasurementSetting]:
    """Setting list: one ``first,second`` pair per line, optional header."""
    settings = []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        cells = [c.strip() for c in row]
        if not cells or not any(cells):
            continue
        if lineno == 1 and cells[:2] == ["first", "second"]:
            continue
        if len(cells) < 2 or cells[0] not in KETS or cells[1] not in KETS:
            raise InputError("unknown-label", f"settings line {lineno}: {row!r}")
        settings.append(MeasurementSetting(cells[0], cells[1]))
    if not settings:
        raise InputError("malformed-csv", "settings file lists no settings")
    return settings


def parse_settings_file(path) -> list[MeasurementSetting]:
    return parse_settings_text(read_text(path))


def matrix_to_json(m) -> dict:
    m = np.asarray(m, dtype=complex)
    return {
        "basis": list(BASIS),
        "matrix": [[[float(v.real), float(v.imag)] for v in row] for row in m],
    }


def counts_to_csv(records) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(COUNTS_HEADER)
    for r in records:
        writer.writerow([r.setting.first, r.setting.second, r.count])
    return out.getvalue()
