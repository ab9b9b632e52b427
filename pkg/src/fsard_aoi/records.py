"""CSV and JSON serialisation of analytic, simulated and sweep results.

Floats are written with ``repr`` (shortest exact round-trip form), so
parsing an emitted document gives back the same values bit for bit.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict
from pathlib import Path

from .analytic import AnalyticReport
from .simulation import SimStats
from .sweep import SweepPoint, SweepResult, Table1Cell

FORMATS = ("csv", "json")
SWEEP_COLUMNS = ("param1", "param2", "aaoi", "ci", "source", "best", "error")


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_cell(text: str):
    if text == "":
        return None
    if text in ("true", "false"):
        return text == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def emit_records(records, fmt: str, dest: str | Path | None = None) -> bytes:
    """Encode records as CSV (list of flat dicts) or JSON (any document).

    An empty CSV record list yields just the header when ``records`` carries
    one via :class:`Rows`; a plain empty list yields an empty document.
    """
    if fmt == "csv":
        rows = records if isinstance(records, Rows) else Rows(records)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(rows.columns)
        for row in rows:
            writer.writerow([_cell(row.get(col)) for col in rows.columns])
        data = buf.getvalue().encode()
    elif fmt == "json":
        data = (json.dumps(records, indent=2) + "\n").encode()
    else:
        raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")
    if dest is not None:
        try:
            Path(dest).write_bytes(data)
        except OSError as exc:
            raise OSError(f"cannot write {fmt} output to {dest}: {exc}") from exc
    return data


def parse_records(data, fmt: str):
    """Inverse of :func:`emit_records`."""
    if isinstance(data, bytes):
        data = data.decode()
    if fmt == "json":
        return json.loads(data)
    if fmt == "csv":
        reader = csv.reader(io.StringIO(data))
        header = next(reader, None)
        if header is None:
            return Rows([], ())
        return Rows([{k: _parse_cell(v) for k, v in zip(header, line)} for line in reader], tuple(header))
    raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")


class Rows(list):
    """A list of row dicts that remembers its column order."""

    def __init__(self, rows=(), columns=None):
        super().__init__(rows)
        if columns is None:
            columns = []
            for row in self:
                columns.extend(k for k in row if k not in columns)
        self.columns = tuple(columns)

    def __eq__(self, other):
        return list.__eq__(self, other) and tuple(getattr(other, "columns", self.columns)) == self.columns


# ---------------------------------------------------------------- documents


def to_document(obj):
    """JSON-ready form of a result object."""
    if isinstance(obj, (AnalyticReport, SimStats)):
        return obj.to_dict()
    if isinstance(obj, SweepResult):
        best = obj.points.index(obj.best) if obj.best is not None else None
        return {
            "param_names": list(obj.param_names),
            "points": [
                {"params": list(p.params), "aaoi": p.aaoi, "ci": p.ci, "source": p.source, "error": p.error}
                for p in obj.points
            ],
            "best": best,
            "caveat": obj.caveat,
        }
    if isinstance(obj, list) and all(isinstance(c, Table1Cell) for c in obj):
        return [dict(asdict(c), best_params=list(c.best_params)) for c in obj]
    raise TypeError(f"no document form for {type(obj).__name__}")


def from_document(kind: type, doc):
    """Rebuild a result of type ``kind`` from :func:`to_document` output."""
    if kind is AnalyticReport or kind is SimStats:
        return kind.from_dict(doc)
    if kind is SweepResult:
        points = tuple(
            SweepPoint(tuple(p["params"]), float(p["aaoi"]), p["source"], p["ci"], p["error"])
            for p in doc["points"]
        )
        best = points[doc["best"]] if doc["best"] is not None else None
        return SweepResult(tuple(doc["param_names"]), points, best, doc["caveat"])
    if kind is Table1Cell:
        return [Table1Cell(**dict(c, best_params=tuple(c["best_params"]))) for c in doc]
    raise TypeError(f"no document form for {kind.__name__}")


# --------------------------------------------------------------------- rows


def to_rows(obj) -> Rows:
    """Flat CSV rows of a result object."""
    if isinstance(obj, AnalyticReport):
        row = {}
        for key, value in obj.to_dict().items():
            if key == "phi":
                row.update({f"phi_{a}": x for a, x in zip(obj.alphas, obj.phi)})
            else:
                row[key] = value
        return Rows([row])
    if isinstance(obj, SimStats):
        row = {}
        for key, value in obj.to_dict().items():
            if key == "per_user_aoi":
                row.update({f"aoi_user_{i}": x for i, x in enumerate(value)})
            elif key == "replication_means":
                row.update({f"rep_mean_{i}": x for i, x in enumerate(value)})
            elif key == "key":
                row[key] = json.dumps(value)
            else:
                row[key] = value
        return Rows([row])
    if isinstance(obj, SweepResult):
        rows = []
        for p in obj.points:
            params = list(p.params) + [None] * (2 - len(p.params))
            rows.append({
                "param1": params[0], "param2": params[1], "aaoi": p.aaoi, "ci": p.ci,
                "source": p.source, "best": p is obj.best, "error": p.error,
            })
        return Rows(rows, SWEEP_COLUMNS)
    if isinstance(obj, list) and all(isinstance(c, Table1Cell) for c in obj):
        rows = []
        for c in obj:
            row = asdict(c)
            params = list(row.pop("best_params")) + [None, None]
            row["param1"], row["param2"] = params[0], params[1]
            rows.append(row)
        return Rows(rows, ("table", "scheme", "num_users", "arrival_prob", "reference", "value",
                           "rel_dev", "param1", "param2", "ci"))
    raise TypeError(f"no row form for {type(obj).__name__}")


def report_from_row(row: dict) -> AnalyticReport:
    phi_keys = sorted((k for k in row if k.startswith("phi_")), key=lambda k: int(k[4:]))
    data = {k: v for k, v in row.items() if not k.startswith("phi_")}
    data["phi"] = [row[k] for k in phi_keys]
    return AnalyticReport.from_dict(data)


def stats_from_row(row: dict) -> SimStats:
    def series(prefix):
        keys = sorted((k for k in row if k.startswith(prefix)), key=lambda k: int(k[len(prefix):]))
        return [row[k] for k in keys]

    data = {k: v for k, v in row.items() if not k.startswith(("aoi_user_", "rep_mean_"))}
    data["per_user_aoi"] = series("aoi_user_")
    data["replication_means"] = series("rep_mean_")
    data["key"] = json.loads(row["key"])
    return SimStats.from_dict(data)
