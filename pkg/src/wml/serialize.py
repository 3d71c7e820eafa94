"""Machine-readable output: JSON and CSV with stable schemas.

Numeric fields are serialised with 17 significant digits in both
formats, so a value parsed back from CSV is bit-identical to the same
value parsed from JSON.  Non-finite floats become null (JSON) or the
tokens inf/-inf/nan (CSV).
"""

from __future__ import annotations

import csv
import io

import numpy as np

__all__ = ["format_number", "dumps_json", "dumps_csv", "flatten_doc",
           "experiment_doc", "eval_doc", "sweep_doc"]


def format_number(x: float) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if not np.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    return format(x, ".17g")


def _json_scalar(x) -> str:
    if x is None:
        return "null"
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format_number(float(x)) if np.isfinite(x) else "null"
    if isinstance(x, str):
        out = x.replace("\\", "\\\\").replace('"', '\\"')
        out = out.replace("\n", "\\n").replace("\r", "\\r").replace("\t", "\\t")
        return f'"{out}"'
    raise TypeError(f"cannot serialise {type(x).__name__} to JSON")


def dumps_json(obj, indent: int = 2) -> str:
    pieces = []
    _write_json(obj, pieces, indent, 0)
    pieces.append("\n")
    return "".join(pieces)


def _write_json(obj, out, indent, level):
    pad = " " * (indent * level)
    pad_in = " " * (indent * (level + 1))
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (key, val) in enumerate(obj.items()):
            out.append(f'{pad_in}"{key}": ')
            _write_json(val, out, indent, level + 1)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(np.asarray(obj).tolist()) if isinstance(obj, np.ndarray) else list(obj)
        if not seq:
            out.append("[]")
            return
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            out.append("[" + ", ".join(_json_scalar(v) for v in seq) + "]")
            return
        out.append("[\n")
        for i, val in enumerate(seq):
            out.append(pad_in)
            _write_json(val, out, indent, level + 1)
            out.append(",\n" if i < len(seq) - 1 else "\n")
        out.append(pad + "]")
    else:
        out.append(_json_scalar(obj))


def dumps_csv(rows, columns=None) -> str:
    """Row-oriented CSV with a header; column order is first-seen order."""
    rows = list(rows)
    if columns is None:
        columns = []
        for row in rows:
            for key in row:
                if key not in columns:
                    columns.append(key)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_csv_cell(row.get(col)) for col in columns])
    return buf.getvalue()


def _csv_cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    return format_number(x)


def flatten_doc(doc, prefix=""):
    """Flatten a nested document to (dotted-key, scalar) pairs."""
    items = []
    if isinstance(doc, dict):
        for key, val in doc.items():
            items.extend(flatten_doc(val, f"{prefix}{key}."))
    elif isinstance(doc, (list, tuple, np.ndarray)):
        seq = np.asarray(doc).tolist() if isinstance(doc, np.ndarray) else list(doc)
        for i, val in enumerate(seq):
            items.extend(flatten_doc(val, f"{prefix}{i}."))
    else:
        items.append((prefix[:-1], doc))
    return items


def experiment_doc(res) -> dict:
    return {
        "name": res.name,
        "pass": bool(res.passed),
        "metrics": dict(res.metrics),
        "tolerances": dict(res.tolerances),
        "runtime_seconds": res.runtime_seconds,
        "diagnostic": res.diagnostic,
        "table": [dict(row) for row in res.table],
    }


def experiment_csv(res) -> str:
    rows = [{"experiment": res.name, "metric": k, "value": v,
             "tolerance": res.tolerances.get(k), "pass": bool(res.passed)}
            for k, v in res.metrics.items()]
    return dumps_csv(rows, ["experiment", "metric", "value", "tolerance", "pass"])


def eval_doc(model_text, kernel, spec, features, tensor, rank, trans) -> dict:
    return {
        "model": model_text,
        "kernel": {"s": kernel.s, "c": kernel.c},
        "orders": list(spec.orders),
        "path": spec.path,
        "features": {
            "values": list(features.values),
            "errors": list(features.errors),
            "paths": list(features.paths),
        },
        "metric_tensor": {
            "matrix": [list(row) for row in tensor.matrix],
            "det": tensor.det,
            "condition_number": tensor.condition_number,
            "correlation_det": tensor.correlation_det,
        },
        "joint_rank_report": {
            "singular_values": list(rank.singular_values),
            "rank": rank.rank,
            "tol_used": rank.tol_used,
        },
        "transversality": {
            "submersive": bool(trans.submersive),
            "model_rank": trans.model_rank,
            "joint_rank": trans.joint_rank,
            "enrichment": trans.enrichment,
            "verdicts": [
                {"stratum": v.name, "status": v.status,
                 "distance": v.distance, "normal_rank": v.normal_rank}
                for v in trans.verdicts
            ],
        },
    }


def sweep_doc(rows) -> dict:
    return {"rows": [dict(row) for row in rows]}
