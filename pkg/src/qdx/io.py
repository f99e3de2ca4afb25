"""Deterministic CSV/JSON writers, the frozen table schemas and run manifests."""
from __future__ import annotations

import csv
import hashlib
import json
import math
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import SchemaError

MANIFEST_VERSION = 1


def load_schemas():
    text = resources.files("qdx").joinpath("schemas/tables.json").read_text()
    return json.loads(text)


SCHEMAS = load_schemas()


def table_schema(name):
    try:
        return SCHEMAS["tables"][name]
    except KeyError:
        raise SchemaError(f"unknown table schema {name!r}") from None


def format_value(x, precision=None):
    """Text for one cell: shortest round-trip repr unless ``precision`` is set."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if precision is None:
            return repr(x)
        return f"{x:.{int(precision)}g}"
    return str(x)


def parse_value(s):
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


def jsonable(x):
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isfinite(x):
            return x
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return x


def dumps(obj):
    return json.dumps(jsonable(obj), indent=2, allow_nan=False) + "\n"


class Writer:
    """Single writer for one output directory; records every file for the manifest."""

    def __init__(self, out_dir, precision=None):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.precision = precision
        self.files = []

    def _record(self, path, schema, n_rows):
        data = path.read_bytes()
        self.files.append({
            "path": path.relative_to(self.out_dir).as_posix(),
            "schema": schema,
            "schema_version": table_schema(schema)["version"],
            "rows": n_rows,
            "sha256": hashlib.sha256(data).hexdigest(),
        })

    def table(self, name, schema, rows):
        """Write ``rows`` (dicts or sequences in column order) as CSV."""
        cols = table_schema(schema)["columns"]
        path = self.out_dir / name
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(cols)
            for r in rows:
                vals = [r[c] for c in cols] if isinstance(r, dict) else list(r)
                if len(vals) != len(cols):
                    raise SchemaError(f"{name}: row has {len(vals)} cells, schema {schema!r} has {len(cols)}")
                w.writerow([format_value(v, self.precision) for v in vals])
        self._record(path, schema, len(rows))
        return path

    def json(self, name, obj, schema="report"):
        path = self.out_dir / name
        path.write_text(dumps(obj))
        self._record(path, schema, 0)
        return path

    def manifest(self, config, created=None):
        created = created or datetime.now(timezone.utc).isoformat(timespec="seconds")
        from . import __version__
        doc = {
            "manifest_version": MANIFEST_VERSION,
            "schema_set_version": SCHEMAS["schema_set_version"],
            "qdx_version": __version__,
            "created": created,
            "config": config,
            "files": self.files,
        }
        path = self.out_dir / "manifest.json"
        path.write_text(dumps(doc))
        return path


def read_table(path, schema):
    """Rows of a CSV file as dicts, after checking the header against ``schema``."""
    cols = table_schema(schema)["columns"]
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        try:
            header = next(r)
        except StopIteration:
            raise SchemaError(f"{path}: empty file, expected header with column {cols[0]!r}") from None
        for c in cols:
            if c not in header:
                raise SchemaError(f"{path}: missing column {c!r}")
        idx = [header.index(c) for c in cols]
        return [{c: parse_value(row[i]) for c, i in zip(cols, idx)} for row in r if row]


def read_manifest(path):
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"{path}: cannot read manifest ({exc})") from None
    for key in ("manifest_version", "files"):
        if key not in doc:
            raise SchemaError(f"{path}: missing manifest field {key!r}")
    return doc


def write_plot(path, x_label, y_label, pairs):
    """Two-column whitespace-separated text with a one-line header."""
    path = Path(path)
    lines = [f"# {x_label} {y_label}"]
    lines += [f"{format_value(x)} {format_value(y)}" for x, y in pairs]
    path.write_text("\n".join(lines) + "\n")
    return path
