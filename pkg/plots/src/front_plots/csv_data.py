"""Reader for the '#'-metadata CSV dialect the solver CLI emits."""

import numpy as np


class BadArtifact(ValueError):
    """Input file is missing, empty, or lacks the documented columns."""


def read_table(path: str, required: tuple) -> tuple:
    """Return (metadata dict, column dict); raise BadArtifact with the path."""
    metadata = {}
    names = []
    rows = []
    try:
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                if line.startswith("#"):
                    key, _, value = line[1:].strip().partition("=")
                    if value:
                        metadata[key.strip()] = value.strip()
                    continue
                if not names:
                    names = [c.strip() for c in line.split(",")]
                    continue
                rows.append(line.split(","))
    except OSError as exc:
        raise BadArtifact(f"{path}: {exc}") from exc
    missing = [c for c in required if c not in names]
    if missing:
        raise BadArtifact(f"{path}: missing columns {missing} (found {names})")
    if not rows:
        raise BadArtifact(f"{path}: no data rows")
    columns = {}
    for j, name in enumerate(names):
        raw = [row[j] for row in rows]
        try:
            columns[name] = np.array([float(c) for c in raw])
        except ValueError as exc:
            raise BadArtifact(f"{path}: column {name!r} is not numeric") from exc
    return metadata, columns
