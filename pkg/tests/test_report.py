import json

import pytest

from src.bialgebra import CheckItem, CheckReport, ItemVerdict
from src.report import emit_report, report_dict


def _report():
    items = (
        CheckItem("REL 1", ItemVerdict.MEMBER, steps=3, oracle="member_at_all_points"),
        CheckItem("REL 2", ItemVerdict.INCONCLUSIVE, remainder="ab"),
        CheckItem("REL 3", ItemVerdict.FAIL, remainder="-ab + b^2", oracle="non_member_witness", note="oracle disagreement"),
    )
    part = CheckReport("delta_hom", ("p",), items, {"degree_bound": 8})
    return CheckReport("bialgebra", ("p",), (), {"degree_bound": 8, "seed": 42}, (part,))


def test_text_report():
    text = emit_report(_report())
    assert text.splitlines() == [
        "bialgebra: p (1/3)",
        "  delta_hom: p (1/3)",
        "    REL 1: member",
        "    REL 2: INCONCLUSIVE (bound 8)",
        "    REL 3: FAIL remainder: -ab + b^2 [oracle disagreement]",
        "overall: fail (1/3)",
    ]


def test_summary_lines_follow_the_overall_line():
    text = emit_report(_report(), summary=("no new deformation: REFUTED",))
    assert text.endswith("overall: fail (1/3)\nno new deformation: REFUTED\n")


def test_details_show_trace_and_oracle_trials():
    item = CheckItem("REL 1", ItemVerdict.MEMBER, trace=("step 1: rule 1 at 0 in b^2 -> ab - ba",), oracle_trials=("no parameters: 3x4, rank 3, member",))
    report = CheckReport("delta_hom", ("p",), (item,), {"degree_bound": 8})
    lines = emit_report(report, details=True).splitlines()
    assert "    step 1: rule 1 at 0 in b^2 -> ab - ba" in lines
    assert "    oracle no parameters: 3x4, rank 3, member" in lines
    assert "step 1" not in emit_report(report)


def test_json_report():
    data = json.loads(emit_report(_report(), "json", summary=("done",)))
    assert list(data) == ["schema", "check", "presentations", "overall", "metadata", "items", "parts", "summary"]
    assert data["schema"] == 1
    assert data["overall"] == "fail"
    item = data["parts"][0]["items"][2]
    assert item == {
        "label": "REL 3",
        "verdict": "fail",
        "remainder": "-ab + b^2",
        "steps": 0,
        "oracle": "non_member_witness",
        "note": "oracle disagreement",
    }


def test_identical_reports_render_identically():
    assert emit_report(_report(), "json") == emit_report(_report(), "json")
    assert report_dict(_report()) == report_dict(_report())


def test_unknown_format():
    with pytest.raises(ValueError):
        emit_report(_report(), "yaml")
