"""CSV, JSON-lines and human renderings of result rows, plus replay documents."""

import csv
import io
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Literal, Optional, Sequence, TextIO

import numpy as np

from concurrence_monogamy.utils.errors import StateValidationError
from concurrence_monogamy.utils.monogamy import BoundReport
from concurrence_monogamy.utils.tensor_core import DensityMatrix, DimProfile, PureState, StateLike

logger = logging.getLogger(__name__)

OutputFormat = Literal["csv", "jsonl", "human"]

REPORT_COLUMNS = ["state", "inequality", "lhs", "relation", "rhs", "margin", "satisfied", "tolerance", "certificate"]
MEASURE_COLUMNS = ["state", "quantity", "cut", "value", "direction", "restarts", "converged"]
REPRODUCE_COLUMNS = ["quantity", "expected", "computed", "delta", "tolerance", "ok"]


def fmt(value: Any) -> str:
    """Nine significant digits for floats; empty for None."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.9g}"
    return str(value)


def report_row(report: BoundReport, state_label: str = "") -> Dict[str, Any]:
    return {
        "state": state_label,
        "inequality": report.inequality,
        "lhs": report.lhs,
        "relation": report.relation,
        "rhs": report.rhs,
        "margin": report.margin,
        "satisfied": report.satisfied,
        "tolerance": report.tolerance,
        "certificate": report.certificate,
    }


def provenance_lines(report: BoundReport) -> List[str]:
    lines = []
    terms = ([report.lhs_term] if report.lhs_term is not None else []) + report.terms
    for term in terms:
        weight = "" if term.coefficient is None else f"{fmt(term.coefficient)} x "
        search = f", {term.restarts} restarts, converged={term.converged}" if term.restarts else ""
        lines.append(f"    {weight}{term.label} = {fmt(term.squared)} [{term.direction}; {term.method}{search}]")
    lines.extend(f"    note: {note}" for note in report.notes)
    return lines


def render(
    rows: Sequence[Dict[str, Any]],
    columns: Sequence[str],
    output_format: OutputFormat,
    annotations: Optional[Sequence[List[str]]] = None,
) -> str:
    """Render rows; ``annotations`` (one list per row) are shown only in the human format."""
    if output_format == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([fmt(row.get(column)) for column in columns])
        return buffer.getvalue()
    if output_format == "jsonl":
        return "".join(json.dumps({c: _json_value(row.get(c)) for c in columns}) + "\n" for row in rows)

    cells = [[fmt(row.get(column)) for column in columns] for row in rows]
    widths = [max([len(column)] + [len(line[i]) for line in cells]) for i, column in enumerate(columns)]
    lines = ["  ".join(column.ljust(width) for column, width in zip(columns, widths))]
    for index, line in enumerate(cells):
        lines.append("  ".join(cell.ljust(width) for cell, width in zip(line, widths)).rstrip())
        if annotations is not None:
            lines.extend(annotations[index])
    return "\n".join(lines) + "\n"


def _json_value(value: Any) -> Any:
    if isinstance(value, (float, np.floating)):
        return float(fmt(value))
    if isinstance(value, np.integer):
        return int(value)
    return value


def emit(text: str, output: Optional[Path], stream: TextIO) -> None:
    """Single writer for command output."""
    if output is None:
        stream.write(text)
        stream.flush()
        return
    output.parent.mkdir(parents=True, exist_ok=True)
    output.write_text(text, encoding="utf-8")
    logger.info(f"[Report] wrote {len(text)} characters to {output}")


def _complex_pairs(values: Iterable[complex]) -> List[List[float]]:
    return [[float(np.real(v)), float(np.imag(v))] for v in values]


def encode_state(state: StateLike) -> Dict[str, Any]:
    """Self-contained JSON form: dims plus row-major [re, im] pairs."""
    if isinstance(state, PureState):
        return {"kind": "pure", "dims": list(state.profile.dims), "data": _complex_pairs(state.amplitudes)}
    return {"kind": "density", "dims": list(state.profile.dims), "data": _complex_pairs(state.matrix.ravel())}


def decode_state(document: Dict[str, Any]) -> StateLike:
    try:
        profile = DimProfile(dims=tuple(document["dims"]))
        values = np.array([complex(re, im) for re, im in document["data"]], dtype=np.complex128)
        kind = document["kind"]
    except (KeyError, TypeError, ValueError) as exc:
        raise StateValidationError(f"malformed embedded state: {exc}") from exc
    if kind == "pure":
        return PureState(amplitudes=values, profile=profile)
    if kind == "density":
        return DensityMatrix(matrix=values.reshape(profile.total, profile.total), profile=profile)
    raise StateValidationError(f"unknown embedded state kind {kind!r}")


def replay_document(run_config: Dict[str, Any], case: int, state: StateLike, report: BoundReport) -> str:
    """Deterministic JSON text for one failing fuzz case."""
    document = {
        "run_config": run_config,
        "case": case,
        "state": encode_state(state),
        "report": json.loads(report.model_dump_json()),
    }
    return json.dumps(document, indent=2, sort_keys=True) + "\n"


def read_replay(path: Path) -> Dict[str, Any]:
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise StateValidationError(f"cannot read replay file {path}: {exc}") from exc
