"""CSV and JSON serialisation of prediction reports."""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

from .analytic import PredictionReport
from .errors import ValidationError

TAIL_COLUMNS = ["predicted", "exact", "ratio", "error_estimate"]


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        if v.is_integer() and abs(v) < 2**53:
            return str(int(v))
        return repr(v)
    return str(v)


def _num(s: str) -> float | None:
    return None if s == "" else float(s)


def sort_reports(reports: Iterable[PredictionReport]) -> list[PredictionReport]:
    return sorted(reports, key=lambda r: (r.x, r.k, r.predictor))


def reports_to_csv(reports: Sequence[PredictionReport]) -> str:
    reports = sort_reports(reports)
    widths = {len(r.k) for r in reports}
    if len(widths) > 1:
        raise ValidationError("reports mix different numbers of parts")
    n = widths.pop() if widths else 0
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "predictor"] + [f"k_{j}" for j in range(n)] + TAIL_COLUMNS)
    for r in reports:
        w.writerow([_fmt(float(r.x)), r.predictor] + [str(v) for v in r.k]
                   + [_fmt(r.predicted), _fmt(r.exact), _fmt(r.ratio), _fmt(r.error_estimate)])
    return buf.getvalue()


def reports_from_csv(text: str) -> list[PredictionReport]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise ValidationError("empty report CSV")
    head = rows[0]
    if head[:2] != ["x", "predictor"] or head[-4:] != TAIL_COLUMNS:
        raise ValidationError(f"unexpected report columns {head}")
    n = len(head) - 6
    out = []
    for r in rows[1:]:
        if not r:
            continue
        exact = _num(r[2 + n + 1])
        out.append(PredictionReport(
            x=float(r[0]), predictor=r[1], k=tuple(int(v) for v in r[2 : 2 + n]),
            predicted=float(r[2 + n]), exact=None if exact is None else int(exact),
            ratio=_num(r[2 + n + 2]), error_estimate=_num(r[2 + n + 3]),
        ))
    return out


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    return v


def reports_to_json(reports: Sequence[PredictionReport]) -> str:
    docs = []
    for r in sort_reports(reports):
        docs.append({
            "x": r.x,
            "predictor": r.predictor,
            "k": list(r.k),
            "rho": None if r.rho is None else list(r.rho),
            "spec_digest": r.spec_digest,
            "predicted": _jsonable(r.predicted),
            "exact": r.exact,
            "ratio": _jsonable(r.ratio),
            "error_estimate": _jsonable(r.error_estimate),
        })
    return json.dumps(docs, indent=1) + "\n"


def reports_from_json(text: str) -> list[PredictionReport]:
    out = []
    for d in json.loads(text):
        def f(key):
            v = d.get(key)
            return float(v) if isinstance(v, str) else v
        out.append(PredictionReport(
            x=float(d["x"]), predictor=d["predictor"], k=tuple(d["k"]), predicted=f("predicted"),
            spec_digest=d.get("spec_digest"), rho=None if d.get("rho") is None else tuple(d["rho"]),
            exact=d.get("exact"), ratio=f("ratio"), error_estimate=f("error_estimate"),
        ))
    return out


def emit_report(reports: Sequence[PredictionReport], path: str | Path | None, fmt: str = "csv") -> str:
    """Render reports in ``fmt`` and write them to ``path`` (returned text either way)."""
    if fmt == "csv":
        text = reports_to_csv(reports)
    elif fmt == "json":
        text = reports_to_json(reports)
    else:
        raise ValidationError(f"unknown report format {fmt!r}")
    if path is not None:
        try:
            Path(path).write_text(text)
        except OSError as exc:
            raise OSError(f"cannot write report to {path}: {exc.strerror}") from exc
    return text
