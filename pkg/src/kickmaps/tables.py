"""Deterministic CSV/JSON table output and the run sidecar."""

import json
from pathlib import Path

import numpy as np


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def _plain(x):
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    return x


def write_table(path, columns, rows, fmt="csv"):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        lines = [",".join(columns)]
        lines.extend(",".join(_fmt(v) for v in row) for row in rows)
        path.write_text("\n".join(lines) + "\n")
    elif fmt == "json":
        payload = {"columns": list(columns), "rows": [[_plain(v) for v in row] for row in rows]}
        path.write_text(json.dumps(payload, indent=1) + "\n")
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return path


def read_csv(path):
    """(columns, rows as float tuples); for tests and tooling."""
    lines = Path(path).read_text().strip().splitlines()
    cols = lines[0].split(",")
    return cols, [tuple(float(v) for v in ln.split(",")) for ln in lines[1:]]


def sidecar_path(path):
    path = Path(path)
    return path.with_name(path.name + ".meta.json")


def write_sidecar(path, config):
    out = sidecar_path(path)
    out.write_text(json.dumps(config, indent=1, sort_keys=True, default=_plain) + "\n")
    return out
