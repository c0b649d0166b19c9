"""CSV emission with '#'-prefixed metadata headers.

Every artifact is a plain CSV whose header lines start with '#'; data rows
follow one 'col1,col2,...' title line.  Floats are written with repr-level
precision so identical runs produce byte-identical files.  The manifest is
the single file allowed a wall-clock line.
"""

import datetime
import os

import numpy as np

__all__ = ["write_csv", "write_manifest", "read_csv"]


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def write_csv(path: str, columns: dict, metadata: dict | None = None) -> None:
    """Write named columns with '# key=value' header lines."""
    arrays = {k: np.atleast_1d(np.asarray(v)) for k, v in columns.items()}
    lengths = {a.size for a in arrays.values()}
    if len(lengths) != 1:
        raise ValueError(f"column lengths differ: { {k: a.size for k, a in arrays.items()} }")
    with open(path, "w", newline="") as fh:
        for key, value in (metadata or {}).items():
            fh.write(f"# {key}={_fmt(value)}\n")
        fh.write(",".join(arrays) + "\n")
        for row in zip(*arrays.values()):
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_manifest(out_dir: str, command: str, params: dict, files: list,
                   status: str, version: str) -> str:
    """Manifest of one run: parameters, produced files, status, artifact version.

    The timestamp line is the only nondeterministic output of a run.
    """
    path = os.path.join(out_dir, "manifest.csv")
    with open(path, "w", newline="") as fh:
        fh.write(f"# timestamp={datetime.datetime.now(datetime.timezone.utc).isoformat()}\n")
        fh.write("record,key,value\n")
        fh.write(f"command,,{command}\n")
        fh.write(f"status,,{status}\n")
        fh.write(f"version,,{version}\n")
        for key in sorted(params):
            fh.write(f"param,{key},{_fmt(params[key])}\n")
        for name in files:
            fh.write(f"file,,{name}\n")
    return path


def read_csv(path: str):
    """Read a CSV written by write_csv: returns (metadata dict, column dict)."""
    metadata: dict = {}
    names: list = []
    rows: list = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    key, _, value = body.partition("=")
                    metadata[key.strip()] = value.strip()
                continue
            if not names:
                names = line.split(",")
                continue
            rows.append(line.split(","))
    if not names:
        raise ValueError(f"{path}: no column header found")
    data = {}
    for j, name in enumerate(names):
        col = [row[j] for row in rows]
        try:
            data[name] = np.array([float(c) for c in col])
        except ValueError:
            data[name] = np.array(col)
    return metadata, data
