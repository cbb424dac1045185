"""Deterministic JSON / CSV report serialization.

Identical sweep inputs must produce byte-identical files, so floats are
written with ``repr`` (shortest round-trip form), JSON keys are sorted and
no timestamps or environment details enter the payload.
"""

from __future__ import annotations

import dataclasses
import json

from .sweep import ROW_FIELDS, SweepEvaluation, SweepRow


def _jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {k: _jsonable(v) for k, v in dataclasses.asdict(obj).items()}
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "item"):  # numpy scalars
        return obj.item()
    return obj


def sweep_report(config: dict, rows: list[SweepRow],
                 evaluation: SweepEvaluation | None) -> dict:
    """Assemble the full report payload."""
    return {
        "config": _jsonable(config),
        "rows": [row.to_dict() for row in rows],
        "evaluation": evaluation.to_dict() if evaluation is not None else None,
    }


def dumps_json(payload: dict) -> str:
    return json.dumps(_jsonable(payload), sort_keys=True, indent=2) + "\n"


def write_json(payload: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_json(payload))


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def dumps_csv(rows: list[SweepRow]) -> str:
    lines = [",".join(ROW_FIELDS)]
    for row in rows:
        record = row.to_dict()
        lines.append(",".join(_csv_escape(_cell(record[name])) for name in ROW_FIELDS))
    return "\n".join(lines) + "\n"


def _csv_escape(text: str) -> str:
    if any(ch in text for ch in ',"\n'):
        return '"' + text.replace('"', '""') + '"'
    return text


def write_csv(rows: list[SweepRow], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(dumps_csv(rows))
