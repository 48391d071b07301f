"""Deterministic text formats: census JSON Lines and count CSV.

Floats are written with 17 significant digits so that a write/read cycle
reproduces every double exactly and output bytes do not depend on how a
value was computed.
"""

from __future__ import annotations

import json
import math

from .errors import ValidationError
from .records import CensusTable, OrbitRecord
from .symplin import Parity

FORMAT = "anosovsh-census/1"
FLOAT_FORMAT = ".17g"
COUNTS_HEADER = ("T", "P", "Pg", "rate_est", "slope_est")


def format_float(x):
    x = float(x)
    if not math.isfinite(x):
        raise ValidationError(f"cannot serialize non-finite value {x}")
    return format(x, FLOAT_FORMAT)


def dumps(obj):
    """Compact JSON with keys in insertion order and floats at 17 digits."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return json.dumps(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, Parity):
        return json.dumps(str(obj))
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {dumps(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(dumps(v) for v in obj) + "]"
    if hasattr(obj, "item"):  # numpy scalar
        return dumps(obj.item())
    raise ValidationError(f"cannot serialize {type(obj).__name__}")


def record_to_dict(r):
    return {
        "simple_id": r.simple_id,
        "iterate": r.iterate,
        "period": float(r.period),
        "class_label": r.class_label,
        "cz_parity": str(r.cz_parity),
        "cz_index": r.cz_index,
        "good": r.good,
        "type": r.orbit_type,
        "holonomy_sign": r.holonomy_sign,
    }


def record_from_dict(d):
    try:
        return OrbitRecord(
            simple_id=str(d["simple_id"]),
            iterate=int(d["iterate"]),
            period=float(d["period"]),
            class_label=int(d["class_label"]),
            cz_parity=Parity.EVEN if d["cz_parity"] == "Even" else Parity.ODD,
            cz_index=None if d.get("cz_index") is None else int(d["cz_index"]),
            good=bool(d["good"]),
            orbit_type=str(d.get("type", "other")),
            holonomy_sign=d.get("holonomy_sign"),
        )
    except KeyError as exc:
        raise ValidationError(f"census record lacks field {exc.args[0]!r}") from exc


def dump_census(table):
    """Header line, then one record per line."""
    P, Pg = table.counts
    header = {
        "format": FORMAT,
        "model": table.model,
        "truncation": float(table.truncation),
        "grading": table.grading,
        "label_coarsened": table.label_coarsened,
        "P": P,
        "Pg": Pg,
        "meta": table.meta,
    }
    lines = [dumps(header)] + [dumps(record_to_dict(r)) for r in table.records]
    return "\n".join(lines) + "\n"


def load_census(text):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValidationError("empty census file")
    try:
        header = json.loads(lines[0])
        rows = [json.loads(ln) for ln in lines[1:]]
    except json.JSONDecodeError as exc:
        raise ValidationError(f"census is not JSON Lines: {exc}") from exc
    if header.get("format") != FORMAT:
        raise ValidationError(f"unknown census format {header.get('format')!r}")
    table = CensusTable(
        model=header["model"],
        truncation=float(header["truncation"]),
        records=tuple(record_from_dict(d) for d in rows),
        grading=header.get("grading", "integer"),
        label_coarsened=bool(header.get("label_coarsened", False)),
        meta=header.get("meta", {}),
    )
    if "P" in header and (header["P"], header["Pg"]) != table.counts:
        raise ValidationError("header counts disagree with the records")
    return table


def write_census(table, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dump_census(table))


def read_census(path):
    with open(path, encoding="utf-8") as fh:
        return load_census(fh.read())


def counts_csv(series):
    """CSV of ``(T, P, Pg)`` rows with pointwise ``log P / T`` and ``log P / log T``."""
    out = [",".join(COUNTS_HEADER)]
    for T, P, Pg in series:
        rate = format_float(math.log(P) / T) if P > 0 else ""
        slope = format_float(math.log(P) / math.log(T)) if P > 0 and T > 1 else ""
        out.append(f"{format_float(T)},{P},{Pg},{rate},{slope}")
    return "\n".join(out) + "\n"
