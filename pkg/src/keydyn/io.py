"""Event CSV ingestion and export.

Schema (header exact, comma-separated):

    user_id,sample_id,key_index,key_label,down_ms,up_ms,pressure,size,x,y

Sensor columns hold the empty string where a reading is absent. On load,
timestamps are re-based so each sample's first down_ms is 0 (recorded
convention: timestamps are treated as sample-relative from here on).
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Optional

from .errors import EmptyFile, MalformedHeader, MalformedRow
from .model import Dataset, KeystrokeEvent, KeystrokeSample, validate_sample

CSV_FIELDS = ("user_id", "sample_id", "key_index", "key_label", "down_ms", "up_ms", "pressure", "size", "x", "y")
CSV_HEADER = ",".join(CSV_FIELDS)


def _parse_optional(raw: str, column: str, problems: list[str]) -> Optional[float]:
    if raw == "":
        return None
    try:
        return float(raw)
    except ValueError:
        problems.append(f"column {column} is not numeric: {raw!r}")
        return None


def load_events_csv(path: str | Path) -> Dataset:
    """Parse and validate an event CSV into a Dataset.

    Raises MalformedHeader / EmptyFile for file-level problems. Row-level
    problems and sample-invariant violations are collected and raised as
    one MalformedRow carrying every message and the first offending line
    number, so nothing is silently dropped.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyFile(f"{path} is empty")
        if [h.strip() for h in header] != list(CSV_FIELDS):
            raise MalformedHeader(f"{path} header must be exactly {CSV_HEADER!r}")

        rows: dict[tuple[str, str], list[tuple[int, KeystrokeEvent]]] = {}
        problems: list[tuple[int, str]] = []
        n_rows = 0
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            n_rows += 1
            if len(row) != len(CSV_FIELDS):
                problems.append((line_no, f"expected {len(CSV_FIELDS)} fields, got {len(row)}"))
                continue
            row_problems: list[str] = []
            user_id, sample_id, key_index_raw, key_label = row[0], row[1], row[2], row[3]
            try:
                key_index = int(key_index_raw)
            except ValueError:
                row_problems.append(f"column key_index is not an integer: {key_index_raw!r}")
                key_index = -1
            down_ms = _parse_optional(row[4], "down_ms", row_problems)
            up_ms = _parse_optional(row[5], "up_ms", row_problems)
            if down_ms is None and not row_problems:
                row_problems.append("column down_ms must not be empty")
            if up_ms is None and not row_problems:
                row_problems.append("column up_ms must not be empty")
            pressure = _parse_optional(row[6], "pressure", row_problems)
            size = _parse_optional(row[7], "size", row_problems)
            x = _parse_optional(row[8], "x", row_problems)
            y = _parse_optional(row[9], "y", row_problems)
            if row_problems:
                problems.extend((line_no, p) for p in row_problems)
                continue
            event = KeystrokeEvent(
                key_index=key_index,
                key_label=key_label,
                down_ms=down_ms,
                up_ms=up_ms,
                pressure=pressure,
                size=size,
                x=x,
                y=y,
            )
            rows.setdefault((user_id, sample_id), []).append((line_no, event))

    if n_rows == 0:
        raise EmptyFile(f"{path} contains a header but no event rows")

    samples: list[KeystrokeSample] = []
    for (user_id, sample_id), numbered in rows.items():
        first_line = numbered[0][0]
        events = [ev for _, ev in numbered]
        rebased = _rebase(events)
        sample = KeystrokeSample(user_id=user_id, sample_id=sample_id, events=tuple(rebased))
        violations = validate_sample(sample)
        if violations:
            for v in violations:
                problems.append((first_line, f"sample {user_id}/{sample_id}: {v}"))
            continue
        samples.append(sample)

    if problems:
        problems.sort(key=lambda item: item[0])
        first = problems[0][0]
        raise MalformedRow(first, [f"line {ln}: {msg}" for ln, msg in problems])
    return Dataset(samples=tuple(samples))


def _rebase(events: list[KeystrokeEvent]) -> list[KeystrokeEvent]:
    base = events[0].down_ms
    if base == 0:
        return events
    return [
        KeystrokeEvent(
            key_index=e.key_index,
            key_label=e.key_label,
            down_ms=e.down_ms - base,
            up_ms=e.up_ms - base,
            pressure=e.pressure,
            size=e.size,
            x=e.x,
            y=e.y,
        )
        for e in events
    ]


def save_events_csv(dataset: Dataset, path: str | Path):
    """Write a dataset in the event CSV schema (inverse of load)."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_FIELDS)
        for sample in dataset.samples:
            for e in sample.events:
                writer.writerow(
                    [
                        sample.user_id,
                        sample.sample_id,
                        e.key_index,
                        e.key_label,
                        _format_number(e.down_ms),
                        _format_number(e.up_ms),
                        _format_optional(e.pressure),
                        _format_optional(e.size),
                        _format_optional(e.x),
                        _format_optional(e.y),
                    ]
                )


def _format_number(v: float) -> str:
    return repr(float(v))


def _format_optional(v: Optional[float]) -> str:
    return "" if v is None else repr(float(v))
