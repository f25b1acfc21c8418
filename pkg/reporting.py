"""
Rendering of flat result records as text tables, CSV or JSON.

Numbers are rounded half-to-even; a Fraction is rounded from its exact value,
so 5/9 prints as 0.555556 with no float detour.
"""
import io
import csv
import json
import math
from decimal import Decimal
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional

from settings import OutputFormat, SolverConfig, __version__

Record = Dict[str, Any]


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float, Fraction)) and not isinstance(value, bool)


def format_decimal(value, decimals: int) -> str:
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    exact = value if isinstance(value, Fraction) else Fraction(value)
    scaled = round(exact * 10**decimals)  # Fraction.__round__ is half-even
    return format(Decimal(scaled).scaleb(-decimals), "f")


def _round_field(value: Any, decimals: int) -> Any:
    if isinstance(value, (float, Fraction)):
        return float(format_decimal(value, decimals))
    return value


def build_report(
    command: str,
    params: Dict[str, Any],
    records: Iterable[Record],
    config: SolverConfig,
    fmt: OutputFormat,
    metadata_extra: Optional[Dict[str, Any]] = None,
) -> Dict[str, Any]:
    results = [{key: _round_field(value, fmt.decimals) for key, value in rec.items()} for rec in records]
    metadata: Dict[str, Any] = {
        "version": __version__,
        "config": config.model_dump(),
        "decimals": fmt.decimals,
    }
    metadata.update(metadata_extra or {})
    return {
        "command": command,
        "params": dict(params),
        "results": results,
        "metadata": metadata,
    }


def _columns(results: List[Record]) -> List[str]:
    columns: List[str] = []
    for rec in results:
        for key in rec:
            if key not in columns:
                columns.append(key)
    return columns


def _cell(value: Any, decimals: int, empty: str) -> str:
    if value is None:
        return empty
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if _is_number(value):
        return format_decimal(value, decimals)
    return str(value)


def render_text(report: Dict[str, Any], fmt: OutputFormat) -> str:
    results = report["results"]
    columns = _columns(results)
    rows = [[_cell(rec.get(col), fmt.decimals, "-") for col in columns] for rec in results]
    widths = [max([len(col)] + [len(row[i]) for row in rows]) for i, col in enumerate(columns)]

    lines = ["  ".join(col.rjust(w) for col, w in zip(columns, widths))]
    lines.append("  ".join("-" * w for w in widths))
    for row in rows:
        lines.append("  ".join(cell.rjust(w) for cell, w in zip(row, widths)))
    for note in report["metadata"].get("notes", []):
        lines.append(f"# {note}")
    return "\n".join(lines) + "\n"


def render_csv(report: Dict[str, Any], fmt: OutputFormat) -> str:
    results = report["results"]
    columns = _columns(results)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for rec in results:
        writer.writerow([_cell(rec.get(col), fmt.decimals, "") for col in columns])
    return buf.getvalue()


def render_json(report: Dict[str, Any]) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False) + "\n"


def render_report(report: Dict[str, Any], fmt: OutputFormat) -> str:
    if fmt.kind == "json":
        return render_json(report)
    if fmt.kind == "csv":
        return render_csv(report, fmt)
    return render_text(report, fmt)
