"""Canonical file formats: reach results, verdicts, trajectories.

Floats are written with 17 significant digits and ``-0`` is folded into
``0``, so a file that is read back and written again is byte-identical.
"""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from importlib import resources
from pathlib import Path

import numpy as np

from .geometry import PolyUnion, Polytope
from .system import ReachResult
from .verify import SafetySpec, SafetyVerdict

RESULT_FORMAT = "relureach.reach/1"
VERDICT_FORMAT = "relureach.verdict/1"


def fmt_float(x: float) -> str:
    return format(float(x) + 0.0, ".17g")


def _is_number_list(v):
    return isinstance(v, list) and all(isinstance(e, (int, float)) and not isinstance(e, bool) for e in v)


def _scalar(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return fmt_float(v)
    return json.dumps(v, ensure_ascii=False)


def dumps(obj, indent: int = 0) -> str:
    """JSON text with fixed float formatting; numeric rows stay on one line."""
    pad = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + "  " * indent + "}"
    if isinstance(obj, (list, tuple)):
        obj = list(obj)
        if not obj:
            return "[]"
        if _is_number_list(obj):
            return "[" + ", ".join(_scalar(e) for e in obj) + "]"
        items = [pad + dumps(v, indent + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + "  " * indent + "]"
    if isinstance(obj, np.ndarray):
        return dumps(obj.tolist(), indent)
    if isinstance(obj, np.generic):
        return _scalar(obj.item())
    return _scalar(obj)


def write_atomic(path, text: str):
    """Write via a temp file in the target directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def polytope_to_dict(P: Polytope) -> dict:
    return {"H": P.H.tolist(), "b": P.b.tolist(), "vertices": P.vertices.tolist()}


def polytope_from_dict(d: dict) -> Polytope:
    n = len(d["H"][0]) if d["H"] else len(d["vertices"][0])
    H = np.array(d["H"], dtype=float).reshape(-1, n)
    return Polytope(H, d["b"], vertices=d.get("vertices"), normalize=False)


def union_to_dict(U: PolyUnion) -> dict:
    return {"parts": [polytope_to_dict(p) for p in U]}


def union_from_dict(d: dict, dim: int | None = None, sort: bool = False) -> PolyUnion:
    return PolyUnion([polytope_from_dict(p) for p in d["parts"]], dim=dim, sort=sort)


def result_to_dict(result: ReachResult, model_name: str = "", sigma0: int | None = None,
                   unsafe: SafetySpec | None = None) -> dict:
    cumulative = [[h, i] for h, X in enumerate(result.per_step) for i in range(len(X))]
    return {
        "format": RESULT_FORMAT,
        "model": model_name,
        "mode": result.mode,
        "coupling": result.coupling,
        "horizon": result.horizon,
        "sigma0": sigma0,
        "mode_ids": list(result.mode_ids),
        "dim": result.per_step[0].dim,
        "piece_counts": list(result.piece_counts),
        "per_step": [dict(step=h, **union_to_dict(X)) for h, X in enumerate(result.per_step)],
        "cumulative": cumulative,
        "unsafe": None if unsafe is None else dict(label=unsafe.label, **union_to_dict(unsafe.unsafe)),
    }


def result_from_dict(d: dict) -> tuple[ReachResult, dict]:
    """Rebuild a :class:`ReachResult`; the second item holds the metadata fields."""
    if d.get("format") != RESULT_FORMAT:
        raise ValueError(f"not a reach result file (format={d.get('format')!r})")
    dim = d.get("dim")
    per_step = [union_from_dict(s, dim) for s in d["per_step"]]
    res = ReachResult(per_step, d["mode"], list(d["mode_ids"]), list(d["piece_counts"]), coupling=d["coupling"])
    meta = {k: d[k] for k in ("model", "sigma0", "horizon")}
    if d.get("unsafe") is not None:
        meta["unsafe"] = SafetySpec(union_from_dict(d["unsafe"], dim), d["unsafe"].get("label", "unsafe"))
    else:
        meta["unsafe"] = None
    return res, meta


def dump_result(result: ReachResult, path, **meta):
    write_atomic(path, dumps(result_to_dict(result, **meta)) + "\n")


def load_result(path):
    return result_from_dict(json.loads(Path(path).read_text()))


def verdict_to_dict(v: SafetyVerdict, mode: str, coupling: str, sigma0=None, model_name: str = "",
                    label: str = "unsafe") -> dict:
    return {
        "format": VERDICT_FORMAT,
        "model": model_name,
        "status": v.status,
        "horizon": v.horizon,
        "mode": mode,
        "coupling": coupling,
        "sigma0": sigma0,
        "first_violation_step": v.first_violation_step,
        "witness": None if v.witness is None else [float(x) for x in v.witness],
        "conclusive": v.conclusive,
        "unsafe_label": label,
    }


def verdict_schema() -> dict:
    text = (resources.files("relureach") / "data" / "verdict.schema.json").read_text()
    return json.loads(text)


def trajectories_to_csv(trajs) -> str:
    T = np.asarray(trajs, dtype=float)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["traj_id", "step"] + [f"x{i + 1}" for i in range(T.shape[2])])
    for t, traj in enumerate(T):
        for h, x in enumerate(traj):
            w.writerow([t, h] + [fmt_float(v) for v in x])
    return buf.getvalue()


def trajectories_from_csv(text: str) -> np.ndarray:
    rows = list(csv.reader(io.StringIO(text)))
    body = rows[1:]
    if not body:
        return np.zeros((0, 0, len(rows[0]) - 2))
    n_traj = max(int(r[0]) for r in body) + 1
    n_step = max(int(r[1]) for r in body) + 1
    T = np.zeros((n_traj, n_step, len(rows[0]) - 2))
    for r in body:
        T[int(r[0]), int(r[1])] = [float(v) for v in r[2:]]
    return T
