"""Snapshot serialization: JSONL state records plus a CSV diagnostics series.

One JSON document per line:

    {"t": ..., "L": ..., "nodes": [[x, y], ...], "h": [...], "diag": {...}}

All numbers are written with 17 significant digits, which round-trips IEEE
double exactly; parsing a line therefore reproduces the state bit for bit.
The CSV file (same path with a .csv suffix) carries one diagnostics row per
snapshot.
"""

import json
import os
from dataclasses import dataclass

import numpy as np

from .diagnostics import Diagnostics
from .errors import RunIOError
from .geometry import PeriodicCurve


def _num(x):
    return format(float(x), ".17g")


def _numlist(values):
    return "[" + ",".join(_num(v) for v in values) + "]"


def snapshot_line(t, curve, L, h, diag):
    nodes = ",".join(f"[{_num(x)},{_num(y)}]" for x, y in curve.samples)
    dd = diag.as_dict()
    diag_body = ",".join(f'"{k}":{_num(dd[k])}' for k in Diagnostics.FIELDS)
    return (f'{{"t":{_num(t)},"L":{_num(L)},"nodes":[{nodes}],'
            f'"h":{_numlist(h)},"diag":{{{diag_body}}}}}')


def csv_header():
    return ",".join(Diagnostics.FIELDS)


def csv_row(diag):
    dd = diag.as_dict()
    return ",".join(_num(dd[k]) for k in Diagnostics.FIELDS)


class SnapshotWriter:
    """Snapshot sink writing JSONL + CSV; single writer per output file."""

    def __init__(self, jsonl_path):
        self.jsonl_path = str(jsonl_path)
        base, _ = os.path.splitext(self.jsonl_path)
        self.csv_path = base + ".csv"
        try:
            parent = os.path.dirname(self.jsonl_path)
            if parent:
                os.makedirs(parent, exist_ok=True)
            self._jsonl = open(self.jsonl_path, "w", encoding="utf-8")
            self._csv = open(self.csv_path, "w", encoding="utf-8")
            self._csv.write(csv_header() + "\n")
        except OSError as exc:
            raise RunIOError(f"cannot open snapshot output: {exc}") from exc

    def __call__(self, t, curve, L, h, diag):
        try:
            self._jsonl.write(snapshot_line(t, curve, L, h, diag) + "\n")
            self._csv.write(csv_row(diag) + "\n")
            self._jsonl.flush()
            self._csv.flush()
        except OSError as exc:
            raise RunIOError(
                f"snapshot write failed, output truncated at t={t:.6g}: {exc}"
            ) from exc

    def close(self):
        for f in (self._jsonl, self._csv):
            try:
                f.close()
            except OSError:  # pragma: no cover
                pass

    def __enter__(self):
        return self

    def __exit__(self, *exc_info):
        self.close()


@dataclass(frozen=True)
class Snapshot:
    t: float
    L: float
    nodes: np.ndarray
    h: np.ndarray
    diag: Diagnostics

    @property
    def curve(self):
        return PeriodicCurve(self.nodes, self.L)


def parse_snapshot(line):
    doc = json.loads(line)
    diag = Diagnostics(**{k: float(doc["diag"][k]) for k in Diagnostics.FIELDS})
    return Snapshot(
        t=float(doc["t"]),
        L=float(doc["L"]),
        nodes=np.asarray(doc["nodes"], dtype=np.float64),
        h=np.asarray(doc["h"], dtype=np.float64),
        diag=diag,
    )


def read_snapshots(path):
    with open(path, "r", encoding="utf-8") as f:
        return [parse_snapshot(line) for line in f if line.strip()]
