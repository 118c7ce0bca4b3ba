"""Structured pass/fail records and deterministic JSON/CSV rendering.

JSON output is byte-reproducible: fixed field order, floats at 17
significant digits, reports sorted by (check, triple, q, truncation).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

FIELDS = ("check", "triple", "q", "truncation", "value", "expected",
          "provenance", "tolerance", "status", "detail")

STATUS_ORDER = ("pass", "warn", "inconclusive", "fail")


@dataclass
class Report:
    check: str
    triple: str | None = None
    q: float | None = None
    truncation: int | None = None
    value: float | None = None
    expected: float | None = None
    provenance: str = ""
    tolerance: float | None = None
    status: str = "pass"
    detail: str = ""

    def __post_init__(self):
        if self.status not in STATUS_ORDER:
            raise ValueError(f"unknown status {self.status!r}")


def make_report(check: str, value: float | None, expected: float | None,
                tolerance: float | None, provenance: str, *, triple: str | None = None,
                q: float | None = None, truncation: int | None = None,
                detail: str = "", warn_only: bool = False) -> Report:
    """Report with status derived from |value - expected| <= tolerance."""
    if value is None or expected is None or tolerance is None:
        status = "inconclusive"
    else:
        ok = abs(value - expected) <= tolerance
        status = "pass" if ok else ("warn" if warn_only else "fail")
    return Report(check, triple, q, truncation, value, expected, provenance,
                  tolerance, status, detail)


def _fmt(x) -> str:
    if x is None:
        return "null"
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        if math.isnan(x):
            return '"nan"'
        if math.isinf(x):
            return '"inf"' if x > 0 else '"-inf"'
        return format(x, ".17g")
    if isinstance(x, int):
        return str(x)
    s = str(x).replace("\\", "\\\\").replace('"', '\\"')
    return f'"{s}"'


def sort_key(r: Report):
    return (r.check, r.triple or "", r.q if r.q is not None else -1.0,
            r.truncation if r.truncation is not None else -1)


def render_json(reports: Iterable[Report]) -> str:
    rows = []
    for r in sorted(reports, key=sort_key):
        body = ", ".join(f'"{f}": {_fmt(getattr(r, f))}' for f in FIELDS)
        rows.append("  {" + body + "}")
    return "[\n" + ",\n".join(rows) + "\n]\n"


def render_series_csv(rows: Iterable[tuple[int, float, bool]]) -> str:
    """CSV of an eigenvalue series: lambda, a_lambda, valid."""
    out = ["lambda,a_lambda,valid"]
    for lam, a, valid in rows:
        out.append(f"{lam},{format(a, '.17g')},{'true' if valid else 'false'}")
    return "\n".join(out) + "\n"


@dataclass
class Summary:
    n_pass: int = 0
    n_warn: int = 0
    n_fail: int = 0
    n_inconclusive: int = 0
    failures: list = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        if self.n_fail:
            return 1
        if self.n_inconclusive:
            return 2
        return 0


def summarize(reports: Iterable[Report]) -> Summary:
    s = Summary()
    for r in reports:
        if r.status == "pass":
            s.n_pass += 1
        elif r.status == "warn":
            s.n_warn += 1
        elif r.status == "inconclusive":
            s.n_inconclusive += 1
            s.failures.append(r)
        else:
            s.n_fail += 1
            s.failures.append(r)
    return s


def format_line(r: Report) -> str:
    tags = []
    if r.triple:
        tags.append(r.triple)
    if r.q is not None:
        tags.append(f"q={r.q:g}")
    if r.truncation is not None:
        tags.append(f"N={r.truncation}")
    ctx = (" [" + ", ".join(tags) + "]") if tags else ""
    val = "" if r.value is None else f" value={r.value:.12g}"
    exp = "" if r.expected is None else f" expected={r.expected:.12g}"
    tol = "" if r.tolerance is None else f" tol={r.tolerance:.1g}"
    det = f" ({r.detail})" if r.detail else ""
    return f"[{r.status.upper():12s}] {r.check}{ctx}{val}{exp}{tol}{det}"
