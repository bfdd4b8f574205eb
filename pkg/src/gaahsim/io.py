"""CSV/JSON output with a metadata header line.

Every data file starts with a single comment line

    # meta: {...json...}

followed by a plain CSV header and rows. Floats are written with repr() so
that round-tripping is exact and two runs with the same seed are
byte-identical in the data rows (the meta line carries wall time and is
excluded from comparisons).
"""

import json
import os


def _format_cell(x):
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, (int,)):
        return str(x)
    return str(x)


def write_csv(path, columns, rows, meta=None):
    """Write rows (iterables matching `columns`) with a meta header line."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w") as fh:
        if meta is not None:
            fh.write("# meta: " + json.dumps(meta, sort_keys=True) + "\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_format_cell(x) for x in row) + "\n")


def read_csv(path):
    """Read a file written by :func:`write_csv`.

    Returns (meta dict or None, column names, list of string-cell rows).
    """
    meta = None
    with open(path) as fh:
        first = fh.readline()
        if first.startswith("# meta:"):
            meta = json.loads(first[len("# meta:"):])
            header = fh.readline()
        else:
            header = first
        columns = header.rstrip("\n").split(",")
        rows = [line.rstrip("\n").split(",") for line in fh if line.strip()]
    return meta, columns, rows


def data_bytes(path):
    """File content minus the meta line, for byte-level comparisons."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob.startswith(b"# meta:"):
        nl = blob.index(b"\n")
        return blob[nl + 1:]
    return blob


def write_json(path, payload):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
