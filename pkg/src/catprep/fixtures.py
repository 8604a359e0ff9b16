"""Read-only reference tables: circuit metrics and acceptance rates per (t, w).

Each CSV row holds our construction's columns, the recursive construction's
columns and the printed differences. Acceptance rates are in percent.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

_NAME = re.compile(r"t(\d+)_p([0-9.e-]+)\.csv$")


@dataclass(frozen=True)
class FixtureRow:
    t: int
    p: float
    w: int
    ra_ours: float
    d_ours: int
    cx_ours: int
    q_ours: int
    ra_rec: float
    d_rec: int
    cx_rec: int
    q_rec: int
    delta_ra: float
    delta_d: int
    delta_cx: int
    delta_q: int

    @property
    def w_prime(self) -> int:
        return self.q_ours - self.w


def _parse(path, t: int, p: float) -> list[FixtureRow]:
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            vals = {k: (float(v) if k.startswith(("ra_", "delta_ra")) else int(v)) for k, v in rec.items()}
            rows.append(FixtureRow(t=t, p=p, **vals))
    return rows


def load_fixtures(directory: str | Path | None = None) -> dict[int, list[FixtureRow]]:
    """Rows keyed by FT order; ``directory`` defaults to the packaged tables."""
    root = Path(directory) if directory is not None else Path(str(resources.files("catprep") / "data"))
    out: dict[int, list[FixtureRow]] = {}
    for path in sorted(root.glob("t*_p*.csv")):
        m = _NAME.search(path.name)
        if not m:
            continue
        t, p = int(m.group(1)), float(m.group(2))
        out.setdefault(t, []).extend(_parse(path, t, p))
    for rows in out.values():
        rows.sort(key=lambda r: r.w)
    return out


def fixture_row(t: int, w: int, directory: str | Path | None = None) -> FixtureRow | None:
    return next((r for r in load_fixtures(directory).get(t, []) if r.w == w), None)
