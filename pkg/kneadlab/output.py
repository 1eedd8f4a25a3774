"""
Flat-file writers for sweep reports and verification tables.

Numbers are written with 17 significant digits so that reading a file back
reproduces every value exactly.
"""
import contextlib
import csv
import json
import sys
from typing import Dict, Iterator, List, Optional, TextIO

from .schemas import OutputFormat, SweepRecord, SweepReport, VerificationReport

SWEEP_COLUMNS = (
    "a",
    "r",
    "word",
    "h_kneading",
    "h_kneading_err",
    "h_laps",
    "h_laps_err",
    "flags",
)

CHECK_COLUMNS = ("name", "cases", "max_residual", "tolerance", "passed", "detail")

NUMERIC_COLUMNS = {"a", "r", "h_kneading", "h_kneading_err", "h_laps", "h_laps_err"}

FLAG_SEPARATOR = "|"


def format_number(x: Optional[float]) -> str:
    if x is None:
        return ""
    return format(x, ".17g")


def record_row(record: SweepRecord) -> Dict[str, object]:
    kneading, laps = record.entropy_kneading, record.entropy_laps
    return {
        "a": record.a,
        "r": record.r,
        "word": record.word,
        "h_kneading": kneading.value if kneading else None,
        "h_kneading_err": kneading.error_bound if kneading else None,
        "h_laps": laps.value if laps else None,
        "h_laps_err": laps.error_bound if laps else None,
        "flags": list(record.flags),
    }


@contextlib.contextmanager
def open_output(path: Optional[str]) -> Iterator[TextIO]:
    """The file at `path`, or stdout when no path is given."""
    if path is None or path == "-":
        yield sys.stdout
        return
    with open(path, "w", newline="", encoding="utf-8") as f:
        yield f


def write_sweep_csv(report: SweepReport, stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for record in report.records:
        row = record_row(record)
        writer.writerow(
            [
                FLAG_SEPARATOR.join(row[c]) if c == "flags" else format_number(row[c]) if c in NUMERIC_COLUMNS else row[c]
                for c in SWEEP_COLUMNS
            ]
        )
    stream.write(f"# violations: {len(report.violations)}\n")
    for violation in report.violations:
        stream.write(f"# {violation.kind} {violation.i} {violation.j} {format_number(violation.magnitude)}\n")
    stream.write(f"# max_entropy_backstep: {format_number(report.max_entropy_backstep)}\n")


def write_sweep_json(report: SweepReport, stream: TextIO) -> None:
    payload = {
        "records": [record_row(record) for record in report.records],
        "violations": [violation.model_dump() for violation in report.violations],
        "max_entropy_backstep": report.max_entropy_backstep,
    }
    stream.write(json.dumps(payload, indent=2))
    stream.write("\n")


def write_sweep(report: SweepReport, stream: TextIO, output_format: str = OutputFormat.CSV) -> None:
    if OutputFormat(output_format) == OutputFormat.JSON:
        write_sweep_json(report, stream)
    else:
        write_sweep_csv(report, stream)


def read_sweep_csv(stream: TextIO) -> List[Dict[str, object]]:
    """Rows of a sweep CSV with numbers parsed back to floats; summary lines are skipped."""
    lines = [line for line in stream if not line.startswith("#")]
    rows = []
    for row in csv.DictReader(lines):
        parsed = {}
        for column in SWEEP_COLUMNS:
            value = row[column]
            if column in NUMERIC_COLUMNS:
                parsed[column] = float(value) if value else None
            elif column == "flags":
                parsed[column] = value.split(FLAG_SEPARATOR) if value else []
            else:
                parsed[column] = value
        rows.append(parsed)
    return rows


def write_verification(report: VerificationReport, stream: TextIO, output_format: str = OutputFormat.CSV) -> None:
    if OutputFormat(output_format) == OutputFormat.JSON:
        stream.write(json.dumps(report.model_dump(), indent=2))
        stream.write("\n")
        return
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CHECK_COLUMNS)
    for check in report.checks:
        writer.writerow(
            [
                check.name,
                check.cases,
                format_number(check.max_residual),
                format_number(check.tolerance),
                "true" if check.passed else "false",
                check.detail,
            ]
        )
