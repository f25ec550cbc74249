"""
Text and JSON rendering of check reports
"""
import json
from typing import Dict, List, Sequence

from src.bialgebra import CheckItem, CheckReport, ItemVerdict
from src.config import SCHEMA_VERSION

FORMATS = ("text", "json")


def _item_line(item: CheckItem, bound: object) -> str:
    if item.verdict is ItemVerdict.MEMBER:
        line = f"{item.label}: member"
    elif item.verdict is ItemVerdict.FAIL:
        line = f"{item.label}: FAIL"
        if item.remainder:
            line += f" remainder: {item.remainder}"
    else:
        line = f"{item.label}: INCONCLUSIVE (bound {bound})"
    if item.note and item.verdict is not ItemVerdict.MEMBER:
        line += f" [{item.note}]"
    return line


def _text(report: CheckReport, depth: int, details: bool, bound: object) -> List[str]:
    pad = "  " * depth
    bound = report.metadata.get("degree_bound", bound)
    passed, total = report.counts()
    lines = [f"{pad}{report.check_name}: {', '.join(report.presentations)} ({passed}/{total})"]
    for item in report.items:
        lines.append(f"{pad}  {_item_line(item, bound)}")
        if details:
            lines.extend(f"{pad}    {step}" for step in item.trace)
            lines.extend(f"{pad}    oracle {trial}" for trial in item.oracle_trials)
    for part in report.parts:
        lines.extend(_text(part, depth + 1, details, bound))
    return lines


def _item_dict(item: CheckItem) -> Dict[str, object]:
    data: Dict[str, object] = {
        "label": item.label,
        "verdict": item.verdict.value,
        "remainder": item.remainder,
        "steps": item.steps,
        "oracle": item.oracle,
        "note": item.note,
    }
    if item.trace:
        data["trace"] = list(item.trace)
    if item.oracle_trials:
        data["oracle_trials"] = list(item.oracle_trials)
    return data


def report_dict(report: CheckReport) -> Dict[str, object]:
    return {
        "check": report.check_name,
        "presentations": list(report.presentations),
        "overall": report.overall.value,
        "metadata": dict(report.metadata),
        "items": [_item_dict(item) for item in report.items],
        "parts": [report_dict(part) for part in report.parts],
    }


def emit_report(report: CheckReport, format: str = "text", details: bool = False, summary: Sequence[str] = ()) -> str:
    """Render a report; identical reports render to identical text"""
    if format == "json":
        data = {"schema": SCHEMA_VERSION, **report_dict(report)}
        if summary:
            data["summary"] = list(summary)
        return json.dumps(data, indent=2, ensure_ascii=False) + "\n"
    if format != "text":
        raise ValueError(f"unknown report format '{format}' (expected one of {', '.join(FORMATS)})")
    lines = _text(report, 0, details, report.metadata.get("degree_bound", "?"))
    passed, total = report.counts()
    lines.append(f"overall: {report.overall.value} ({passed}/{total})")
    lines.extend(summary)
    return "\n".join(lines) + "\n"
