"""Deterministic table rendering and file output."""

from __future__ import annotations

import csv
import io
import math
import os
import tempfile
from decimal import ROUND_HALF_EVEN, Decimal
from pathlib import Path
from typing import Sequence, Union

from pavecarbon.engine import Scope
from pavecarbon.sensitivity import SweepResult

FORMATS = ("table", "csv", "md")


def fmt_number(x: float, digits: int = 2) -> str:
    """Fixed-point, half-even rounding; ``-0`` is printed as ``0``."""
    if isinstance(x, str):
        return x
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    q = Decimal(repr(float(x))).quantize(Decimal(1).scaleb(-digits), rounding=ROUND_HALF_EVEN)
    if q.is_zero():
        q = abs(q)
    return f"{q:f}"


def fmt_sig(x: float, sig: int = 3) -> str:
    """Round to ``sig`` significant digits, printed without exponent."""
    if x == 0 or not math.isfinite(x):
        return fmt_number(x, 0)
    d = Decimal(repr(float(x)))
    exponent = d.adjusted() - sig + 1
    q = d.quantize(Decimal(1).scaleb(exponent), rounding=ROUND_HALF_EVEN)
    return f"{q:f}" if exponent < 0 else f"{int(q)}"


def render(headers: Sequence[str], rows: Sequence[Sequence[str]], fmt: str = "table") -> str:
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")
    rows = [[str(c) for c in row] for row in rows]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(headers)
        writer.writerows(rows)
        return buf.getvalue()
    if fmt == "md":
        lines = ["| " + " | ".join(headers) + " |", "|" + "|".join("---" for _ in headers) + "|"]
        lines += ["| " + " | ".join(row) + " |" for row in rows]
        return "\n".join(lines) + "\n"
    widths = [max([len(h)] + [len(r[i]) for r in rows]) for i, h in enumerate(headers)]
    def line(cells):
        return "  ".join(
            c.ljust(w) if i == 0 else c.rjust(w) for i, (c, w) in enumerate(zip(cells, widths))
        ).rstrip()
    out = [line(headers), line(["-" * w for w in widths])] + [line(r) for r in rows]
    return "\n".join(out) + "\n"


def atomic_write(path: Union[str, Path], text: str) -> None:
    """Write ``text`` next to ``path`` and rename it into place."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def pair_column(pair: tuple[str, str]) -> str:
    return f"{pair[0]}_vs_{pair[1]}_pct"


def plot_data_rows(result: SweepResult, digits: int = 2, provenance: str = "") -> tuple[list[str], list[list[str]]]:
    """Long-format rows: one per (vector, scenario, scope), sorted by vector label."""
    headers = ["vector", "scenario", "scope", "total_kg"] + [pair_column(p) for p in result.pairs]
    if provenance:
        headers.append("provenance")
    scope_order = [s for s in (Scope.FULL, Scope.SERVICE) if s in result.scopes]
    rows = []
    for label in sorted(result.labels):
        for name in result.scenario_names:
            for scope in scope_order:
                row = [label, name, scope.value, fmt_number(result.totals[(label, name, scope)], digits)]
                row += [fmt_number(result.savings[(label, p, scope)], digits) for p in result.pairs]
                if provenance:
                    row.append(provenance)
                rows.append(row)
    return headers, rows


def emit_plot_data(result: SweepResult, path: Union[str, Path], digits: int = 2,
                   fmt: str = "csv", provenance: str = "") -> None:
    """Write the data behind savings bar charts to ``path``."""
    headers, rows = plot_data_rows(result, digits, provenance)
    atomic_write(path, render(headers, rows, fmt))
