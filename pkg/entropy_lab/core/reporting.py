"""Writing report rows as CSV or JSON."""

import csv
import json
import math
import sys
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any, TextIO

from ..logging_config import get_logger
from .constants import FLAGGED_STATUSES, METADATA_COLUMNS, OutputFormat

logger = get_logger(__name__)

STDOUT = "-"


def fieldnames_of(records: Sequence[dict[str, Any]]) -> list[str]:
    """Union of record keys in order of first appearance."""
    names: dict[str, None] = {}
    for record in records:
        names.update(dict.fromkeys(record))
    return list(names)


def _json_safe(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    return value


def _sort_value(value: Any) -> tuple[int, Any]:
    return (0, "") if value is None else (1, value)


def _write(records: list[dict[str, Any]], handle: TextIO, fmt: OutputFormat) -> None:
    if fmt == OutputFormat.JSON:
        safe = [{k: _json_safe(v) for k, v in record.items()} for record in records]
        handle.write(json.dumps(safe, indent=2) + "\n")
        return
    fieldnames = fieldnames_of(records)
    writer = csv.DictWriter(handle, fieldnames=fieldnames, lineterminator="\n")
    writer.writeheader()
    for record in records:
        writer.writerow({k: record.get(k, "") for k in fieldnames})


def with_metadata(
    records: Iterable[dict[str, Any]], metadata: dict[str, Any]
) -> list[dict[str, Any]]:
    """Put the metadata columns first in every record.

    Values already in a record win; missing ones come from ``metadata`` and
    are left empty (None) when it has no entry either.
    """
    stamped = []
    for record in records:
        head = {key: record.get(key, metadata.get(key)) for key in METADATA_COLUMNS}
        stamped.append({**head, **record})
    return stamped


def write_records(
    records: Iterable[dict[str, Any]],
    output: str | Path = STDOUT,
    fmt: OutputFormat | str = OutputFormat.CSV,
    sort_keys: Sequence[str] = (),
) -> int:
    """Write ``records`` to ``output`` (``-`` for stdout).

    Rows are sorted by ``sort_keys`` when given; otherwise their order is kept.
    Empty cells sort first.

    Returns:
        Number of rows whose status is flagged
    """
    fmt = OutputFormat(fmt)
    rows = list(records)
    if sort_keys:
        rows.sort(key=lambda r: tuple(_sort_value(r.get(k)) for k in sort_keys))

    if str(output) == STDOUT:
        _write(rows, sys.stdout, fmt)
    else:
        path = Path(output)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="") as handle:
            _write(rows, handle, fmt)
        logger.info(f"wrote {len(rows)} rows to {path}")

    return count_flagged(rows)


def count_flagged(records: Iterable[dict[str, Any]]) -> int:
    return sum(1 for record in records if record.get("status") in FLAGGED_STATUSES)
