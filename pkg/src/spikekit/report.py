"""Deterministic report serialization.

Reports must be byte-identical across reruns with the same seed, so floats
are printed with 17 significant digits (enough to round-trip a double) by a
small JSON emitter with stable key order, and files are written atomically
(temp file + rename).  numpy scalars and arrays are accepted anywhere.
"""

import csv
import io
import json
import math
import os

import numpy as np

SCHEMA = "spikekit/1"


def fmt_float(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def _emit(obj, out: io.StringIO, indent: int, level: int):
    pad = " " * (indent * level)
    pad_in = " " * (indent * (level + 1))
    if isinstance(obj, dict):
        if not obj:
            out.write("{}")
            return
        out.write("{\n")
        items = list(obj.items())
        for idx, (key, val) in enumerate(items):
            out.write(f'{pad_in}{json.dumps(str(key))}: ')
            _emit(val, out, indent, level + 1)
            out.write(",\n" if idx < len(items) - 1 else "\n")
        out.write(pad + "}")
    elif isinstance(obj, (list, tuple)) or isinstance(obj, np.ndarray):
        seq = obj.tolist() if isinstance(obj, np.ndarray) else list(obj)
        if not seq:
            out.write("[]")
            return
        out.write("[\n")
        for idx, val in enumerate(seq):
            out.write(pad_in)
            _emit(val, out, indent, level + 1)
            out.write(",\n" if idx < len(seq) - 1 else "\n")
        out.write(pad + "]")
    elif isinstance(obj, bool) or isinstance(obj, np.bool_):
        out.write("true" if obj else "false")
    elif obj is None:
        out.write("null")
    elif isinstance(obj, (int, np.integer)):
        out.write(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.write(fmt_float(obj))
    else:
        out.write(json.dumps(str(obj)))


def dumps(obj, indent: int = 2) -> str:
    out = io.StringIO()
    _emit(obj, out, indent, 0)
    out.write("\n")
    return out.getvalue()


def write_atomic(path, text: str):
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def write_json(path, obj):
    write_atomic(path, dumps(obj))


def write_csv(path, header, rows):
    """CSV with the same 17-digit float policy as the JSON reports."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format(float(v), ".17g")
                         if isinstance(v, (float, np.floating)) else v
                         for v in row])
    write_atomic(path, out.getvalue())
