import functools
import json

import pytest

import src.cli as cli
from src.archive import RunArchive
from src.cli import build_parser, run_command
from src.dsl import parse_presentation


@pytest.fixture
def archive_home(tmp_path, monkeypatch):
    home = tmp_path / "archive"
    monkeypatch.setattr(cli, "RunArchive", functools.partial(RunArchive, home=str(home)))
    return home


def test_parser_defaults():
    args = build_parser().parse_args(["reduce", "illy", "--expr", "ba"])
    assert args.degree_bound == 8
    assert args.seed == 42
    assert args.json is False


def test_reduce(capsys):
    assert run_command(["reduce", "illy", "--expr", "b^2"]) == 0
    assert capsys.readouterr().out == "ab - ba\n"
    assert run_command(["reduce", "illy", "-e", "ba"]) == 0
    assert capsys.readouterr().out == "ba\n"


def test_reduce_json_with_trace(capsys):
    assert run_command(["reduce", "illy", "--expr", "b^2", "--json", "--trace"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["schema"] == 1
    assert data["normal_form"] == "ab - ba"
    assert data["verdict"] == "non_member_up_to_bound"
    assert data["trace"] == ["step 1: rule 1 at 0 in b^2 -> ab - ba"]


def test_reduce_member(capsys):
    assert run_command(["reduce", "illy", "--expr", "[a,c]"]) == 0
    assert capsys.readouterr().out == "0\n"


def test_check_bialgebra_illy(capsys):
    assert run_command(["check", "bialgebra", "illy"]) == 0
    out = capsys.readouterr().out
    assert "    REL 1: member\n" in out
    assert out.rstrip().endswith("overall: pass (24/24)")


def test_check_bialgebra_json(capsys):
    assert run_command(["check", "bialgebra", "illy", "--json", "--no-oracle"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["check"] == "bialgebra"
    assert data["overall"] == "pass"
    assert [part["check"] for part in data["parts"]] == ["delta_hom", "coassoc", "counit"]
    assert data["metadata"]["oracle"] is False


def test_failing_presentation_exits_one(tmp_path, capsys, bad_counit_text):
    path = tmp_path / "bad.hopf"
    path.write_text(bad_counit_text, encoding="utf-8")
    assert run_command(["check", "bialgebra", str(path)]) == 1
    assert "LEFT c: FAIL remainder: c" in capsys.readouterr().out


def test_specialize_to_file_then_check_equivalence(tmp_path, capsys, glgh01):
    out = tmp_path / "special.hopf"
    assert run_command(["specialize", "glgh", "--set", "g=0", "--set", "h=1", "--out", str(out)]) == 0
    assert f"✓ Wrote glgh_specialized to {out}" in capsys.readouterr().out
    special = parse_presentation(out.read_text(encoding="utf-8"))
    assert special.with_order(glgh01.generators).canonical_relations() == glgh01.canonical_relations()
    assert run_command(["check", "equiv", str(out), "illy", "--map", "exchange"]) == 0
    assert "overall: pass (20/20)" in capsys.readouterr().out


def test_specialize_to_stdout(capsys):
    assert run_command(["specialize", "glgh", "--set", "g=0", "--name", "half"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("# specialized at g=0\npresentation half {\n    params h\n")


def test_show(capsys):
    assert run_command(["show", "glgh01"]) == 0
    assert capsys.readouterr().out.startswith("presentation glgh01 {")


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["check"],
        ["check", "equiv", "illy", "illy"],
        ["check", "bialgebra", "nope"],
        ["specialize", "glgh", "--set", "q=1"],
        ["specialize", "glgh", "--set", "g"],
        ["reduce", "illy", "--expr", "a +"],
        ["check", "equiv", "illy", "illy", "--map", "flip"],
    ],
)
def test_errors_exit_three(argv, capsys):
    assert run_command(argv) == 3


def test_error_message_has_line_and_column(tmp_path, capsys):
    path = tmp_path / "broken.hopf"
    path.write_text("presentation t {\n  gens a, b\n  rel ab - ax\n}\n", encoding="utf-8")
    assert run_command(["show", str(path)]) == 3
    assert "broken.hopf:3:13:" in capsys.readouterr().err


def test_non_invertible_map_is_an_error(capsys):
    assert run_command(["check", "equiv", "illy", "illy", "--map", "a=a+b;b=b;c=c;d=d"]) == 3
    assert "error:" in capsys.readouterr().err


def test_record_and_history(archive_home, capsys):
    assert run_command(["reduce", "illy", "--expr", "ba"]) == 0
    assert run_command(["check", "bialgebra", "glgh01", "--record", "--no-oracle"]) == 0
    assert "✓ Recorded as run 1" in capsys.readouterr().err

    assert run_command(["history"]) == 0
    listing = capsys.readouterr().out
    assert "1. " in listing
    assert "check bialgebra glgh01" in listing

    assert run_command(["history", "--show", "1"]) == 0
    assert json.loads(capsys.readouterr().out)["check"] == "bialgebra"

    assert run_command(["history", "--delete", "1"]) == 0
    assert run_command(["history", "--show", "1"]) == 3


def test_empty_history(archive_home, capsys):
    assert run_command(["history"]) == 0
    assert "No archived runs" in capsys.readouterr().out


@pytest.mark.slow
def test_paper_confirms_and_is_deterministic(capsys):
    assert run_command(["paper"]) == 0
    assert "no new deformation: CONFIRMED" in capsys.readouterr().out
    assert run_command(["paper", "--json", "--seed", "42"]) == 0
    first = capsys.readouterr().out
    assert run_command(["paper", "--json", "--seed", "42"]) == 0
    assert capsys.readouterr().out == first


@pytest.mark.slow
def test_symbolic_equivalence_fails(capsys):
    assert run_command(["check", "equiv", "glgh", "illy", "--map", "exchange"]) == 1
