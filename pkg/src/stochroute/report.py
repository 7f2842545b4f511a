"""Typed tabular reports that round-trip losslessly between CSV and JSON.

Every CLI command emits a Report: a column schema plus rows of values.
Floats are serialized with ``repr`` so re-reading reproduces the exact
double, which is what makes byte-for-byte determinism checks meaningful.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass


@dataclass(frozen=True)
class Column:
    name: str
    kind: str   # "str" | "int" | "float"

    def parse(self, token: str):
        if self.kind == "int":
            return int(token)
        if self.kind == "float":
            return float(token)
        return token

    def render(self, value) -> str:
        if self.kind == "float":
            return repr(float(value))
        return str(value)


@dataclass
class Report:
    columns: tuple[Column, ...]
    rows: list[tuple]

    def append(self, *values) -> None:
        if len(values) != len(self.columns):
            raise ValueError(f"expected {len(self.columns)} values, got {len(values)}")
        self.rows.append(tuple(values))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([c.name for c in self.columns])
        for row in self.rows:
            writer.writerow([c.render(v) for c, v in zip(self.columns, row)])
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "columns": [{"name": c.name, "kind": c.kind} for c in self.columns],
            "rows": [
                {c.name: (float(v) if c.kind == "float" else v)
                 for c, v in zip(self.columns, row)}
                for row in self.rows
            ],
        }
        return json.dumps(doc, indent=2) + "\n"

    @classmethod
    def from_csv(cls, text: str, columns: tuple[Column, ...]) -> "Report":
        reader = csv.reader(io.StringIO(text))
        header = next(reader)
        if header != [c.name for c in columns]:
            raise ValueError(f"unexpected CSV header {header}")
        rows = [tuple(c.parse(tok) for c, tok in zip(columns, line)) for line in reader]
        return cls(columns=columns, rows=rows)

    @classmethod
    def from_json(cls, text: str) -> "Report":
        doc = json.loads(text)
        columns = tuple(Column(c["name"], c["kind"]) for c in doc["columns"])
        rows = [tuple(r[c.name] for c in columns) for r in doc["rows"]]
        return cls(columns=columns, rows=rows)

    def render(self, fmt: str) -> str:
        if fmt == "csv":
            return self.to_csv()
        if fmt == "json":
            return self.to_json()
        raise ValueError(f"unknown format {fmt!r}")
