"""Column CSV files with optional ``#`` comment header lines.

Floats are written with ``repr`` so reading a file back recovers every value
bitwise.
"""
import csv
from pathlib import Path

import numpy as np


def _fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def write_csv(path, columns: dict, comments=()):
    path = Path(path)
    names = list(columns)
    data = [np.asarray(columns[n]).reshape(-1) for n in names]
    if len({d.size for d in data}) > 1:
        raise ValueError("columns have different lengths")
    with path.open("w", newline="") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(names)
        for row in zip(*data):
            writer.writerow([_fmt(v) for v in row])
    return path


def read_csv(path) -> tuple[dict, list]:
    """Return ``({column: float array}, [comment lines])``."""
    comments = []
    rows = []
    with Path(path).open(newline="") as fh:
        lines = []
        for line in fh:
            if line.startswith("#"):
                comments.append(line[1:].strip())
            else:
                lines.append(line)
        rows = list(csv.reader(lines))
    if not rows:
        raise ValueError(f"{path}: no header row")
    header, body = rows[0], rows[1:]
    cols = {name: np.array([float(r[i]) for r in body]) for i, name in enumerate(header)}
    return cols, comments
