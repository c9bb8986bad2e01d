"""Convergence tables with fitted log-log slopes and pass/fail bookkeeping."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError

CSV_COLUMNS = ["case_id", "domain", "method", "g", "h_or_ny", "t", "error", "runtime_ms"]


@dataclass
class ConvergenceReport:
    """Rows of (parameter, norm-index, error) plus fitted slopes against targets.

    ``rows`` is a list of dicts with the fixed CSV column keys; slopes are
    fitted per norm index t by least squares on log-log data over the sweep
    parameter (the g column when it varies, else the resolution column).
    """

    rows: list = field(default_factory=list)
    targets: dict = field(default_factory=dict)  # t -> minimum slope magnitude
    notes: list = field(default_factory=list)

    def add_row(self, case_id, domain, method, g, h_or_ny, t, error, runtime_ms):
        # canonical types so a written file re-reads to the identical file
        self.rows.append({
            "case_id": str(case_id), "domain": str(domain), "method": str(method),
            "g": float(g), "h_or_ny": float(h_or_ny), "t": int(t),
            "error": float(error), "runtime_ms": float(runtime_ms),
        })

    def _sweep_values(self, rows):
        gs = sorted({r["g"] for r in rows})
        if len(gs) > 1:
            return "g"
        return "h_or_ny"

    def slopes(self):
        """Fitted |error| ~ param^slope per norm index; None when undefined."""
        out = {}
        ts = sorted({r["t"] for r in self.rows})
        for t in ts:
            rows = sorted([r for r in self.rows if r["t"] == t],
                          key=lambda r: r["g"])
            key = self._sweep_values(rows)
            xs = np.array([r[key] for r in rows], dtype=float)
            es = np.array([r["error"] for r in rows], dtype=float)
            if len(xs) < 2 or np.any(es <= 0) or np.any(xs <= 0):
                out[t] = {"slope": None, "residual": None}
                continue
            coef, res = np.polyfit(np.log(xs), np.log(es), 1, full=False), None
            fit = np.polyval(coef, np.log(xs))
            res = float(np.sqrt(np.mean((fit - np.log(es)) ** 2)))
            out[t] = {"slope": float(coef[0]), "residual": res}
        return out

    def monotone(self, t):
        rows = sorted([r for r in self.rows if r["t"] == t], key=lambda r: -r["g"])
        es = [r["error"] for r in rows]
        return all(b <= a for a, b in zip(es, es[1:]))

    def passes(self):
        """Per-t pass flags against the declared minimum slopes."""
        sl = self.slopes()
        out = {}
        for t, target in self.targets.items():
            s = sl.get(t, {}).get("slope")
            out[t] = (s is not None) and (s >= target)
        return out

    def to_csv(self, path=None):
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        for r in self.rows:
            w.writerow({k: r[k] for k in CSV_COLUMNS})
        text = buf.getvalue()
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text

    @classmethod
    def from_csv(cls, path):
        rep = cls()
        with open(path) as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames != CSV_COLUMNS:
                raise InvalidArgumentError(
                    f"unexpected CSV columns {reader.fieldnames}")
            for r in reader:
                rep.add_row(r["case_id"], r["domain"], r["method"],
                            float(r["g"]), float(r["h_or_ny"]), int(r["t"]),
                            float(r["error"]), float(r["runtime_ms"]))
        return rep
