"""Read the gaahsim result files: CSV with a leading meta line, or JSON.

Only the documented file formats couple this package to the simulator, so
everything here parses from scratch: a `# meta: {...}` comment, a header
row naming the columns, then plain rows.
"""

import csv
import json
from pathlib import Path

import numpy as np


class SchemaError(ValueError):
    """An input file does not carry the columns a figure kind needs."""


class Table:
    """Columnar view of one result CSV.

    Numeric columns become float arrays; anything that fails to parse as
    float (observable tags, path ids) stays an object array of strings.
    """

    def __init__(self, path, columns, cells, meta):
        self.path = Path(path)
        self.columns = list(columns)
        self.meta = meta
        self._data = {}
        for j, name in enumerate(self.columns):
            raw = [row[j] for row in cells]
            try:
                self._data[name] = np.array([float(x) for x in raw])
            except ValueError:
                self._data[name] = np.array(raw, dtype=object)

    def __len__(self):
        first = self.columns[0]
        return len(self._data[first]) if self.columns else 0

    def __getitem__(self, name):
        if name not in self._data:
            raise SchemaError(
                f"column '{name}' missing from {self.path.name}; "
                f"found columns: {', '.join(self.columns)}")
        return self._data[name]

    def require(self, names, kind):
        missing = [n for n in names if n not in self._data]
        if missing:
            raise SchemaError(
                f"column '{missing[0]}' missing from {self.path.name} "
                f"(figure kind '{kind}' needs {', '.join(names)}; "
                f"found: {', '.join(self.columns)})")
        return self


def read_table(path):
    """Parse one result CSV into a Table; empty data is an error."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"input file {path} does not exist")
    meta = None
    with open(path, newline="") as fh:
        first = fh.readline()
        if first.startswith("# meta:"):
            meta = json.loads(first[len("# meta:"):])
        else:
            fh.seek(0)
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path.name} has no header row")
        cells = [row for row in reader if row]
    if not header or not any(header):
        raise SchemaError(f"{path.name} has no header row")
    for k, row in enumerate(cells):
        if len(row) != len(header):
            raise SchemaError(
                f"{path.name} row {k + 1} has {len(row)} cells, header "
                f"names {len(header)} columns")
    if not cells:
        raise SchemaError(f"{path.name} contains a header but no data rows")
    return Table(path, header, cells, meta)


def read_fit(path):
    """Parse one scaling-fit JSON, checking its named fields."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"input file {path} does not exist")
    with open(path) as fh:
        payload = json.load(fh)
    for key in ("point", "q", "a", "b", "sizes"):
        if key not in payload:
            raise SchemaError(
                f"field '{key}' missing from {path.name}; found: "
                f"{', '.join(sorted(payload))}")
    return payload
