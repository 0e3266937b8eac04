"""Readers for the documented cbpsim output schemas."""

from __future__ import annotations

import csv
import json


class SchemaError(ValueError):
    """An input file does not match the documented schema."""


def read_csv_columns(path, required: list[str]) -> dict[str, list[float]]:
    """Load a raw.csv into named float columns, checking required headers."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: file is empty") from None
        missing = [name for name in required if name not in header]
        if missing:
            raise SchemaError(f"{path}: missing required columns {missing} (header: {header})")
        columns: dict[str, list[float]] = {name: [] for name in header}
        for row in reader:
            if len(row) != len(header):
                raise SchemaError(f"{path}: row with {len(row)} fields, header has {len(header)}")
            for name, value in zip(header, row):
                columns[name].append(float(value))
    if not columns[header[0]]:
        raise SchemaError(f"{path}: no data rows")
    return columns


def read_verdict(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    for field in ("name", "kind", "checks"):
        if field not in payload:
            raise SchemaError(f"{path}: verdict is missing the {field!r} field")
    return payload


def gap_ks_checks(verdict: dict) -> list[dict]:
    """The ks-gap-k checks of a stationarity verdict, ordered by gap index."""
    checks = []
    for check in verdict["checks"]:
        name = check.get("name", "")
        if name.startswith("ks-gap-"):
            if "rate" not in check or "pvalue" not in check:
                raise SchemaError(f"verdict check {name} lacks rate/pvalue fields")
            checks.append((int(name.removeprefix("ks-gap-")), check))
    if not checks:
        raise SchemaError(f"verdict {verdict['name']!r} has no ks-gap checks")
    return [check for _, check in sorted(checks)]
