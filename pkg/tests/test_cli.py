import json

import pytest

from cadshrink import eval_to_core, parse, to_text
from cadshrink.cli import cli_main
from cadshrink.pipeline import validate

from conftest import WHEEL_IDEAL, WHEEL_TARGET


@pytest.fixture()
def wheel_file(tmp_path):
    f = tmp_path / "wheel.csexp"
    f.write_text(WHEEL_IDEAL)
    return f


def test_shrink_writes_program_and_report(tmp_path, wheel_file, capsys):
    out = tmp_path / "wheel.caddy"
    report = tmp_path / "report.json"
    code = cli_main(
        ["shrink", str(wheel_file), "-o", str(out), "--json", str(report)]
    )
    assert code == 0
    program = parse(out.read_text())
    assert "(Tabulate (i 6)" in to_text(program)
    payload = json.loads(report.read_text())
    assert payload["validated"] is True
    assert payload["output_cost"] < payload["input_cost"]
    assert payload["stop_reason"] == "saturated"


def test_validate_exit_codes(tmp_path, wheel_file):
    good = tmp_path / "good.caddy"
    good.write_text(WHEEL_TARGET)
    assert cli_main(["validate", str(wheel_file), str(good)]) == 0
    bad = tmp_path / "bad.caddy"
    bad.write_text("(Sphere 1)")
    assert cli_main(["validate", str(wheel_file), str(bad)]) == 1


def test_input_errors_exit_2(tmp_path, capsys):
    missing = tmp_path / "nope.csexp"
    assert cli_main(["eval", str(missing)]) == 2
    bad = tmp_path / "bad.csexp"
    bad.write_text("(Wedge 1)")
    assert cli_main(["eval", str(bad)]) == 2
    err = capsys.readouterr().err
    assert "error:" in err


def test_eval_prints_core(tmp_path, capsys):
    f = tmp_path / "prog.caddy"
    f.write_text("(Repeat 2 (Sphere 1))")
    assert cli_main(["eval", str(f)]) == 0
    out = capsys.readouterr().out
    assert parse(out) == parse("(List (Sphere 1) (Sphere 1))")


def test_perturb_roundtrip(tmp_path, wheel_file, capsys):
    assert cli_main(["perturb", str(wheel_file), "--seed", "7"]) == 0
    out = capsys.readouterr().out
    perturbed = parse(out)
    assert validate(eval_to_core(parse(WHEEL_IDEAL)), perturbed, 1e-6)
    # deterministic in the seed
    cli_main(["perturb", str(wheel_file), "--seed", "7"])
    assert capsys.readouterr().out == out


def test_shrink_ablation_flags(tmp_path, wheel_file, capsys):
    assert cli_main(["shrink", str(wheel_file), "--no-inverse"]) == 0
    capsys.readouterr()


def test_bench_over_directory(tmp_path, capsys):
    for k in (3, 4):
        src = "(Union " + " ".join(
            f"(Translate [{5 * i}, 0, 0] (Sphere 1))" for i in range(k)
        ) + ")"
        (tmp_path / f"row{k}.csexp").write_text(src)
    report = tmp_path / "bench.json"
    assert cli_main(["bench", str(tmp_path), "--json", str(report)]) == 0
    payload = json.loads(report.read_text())
    assert payload["summary"]["files"] == 2
    assert payload["summary"]["validated"] == 2
    assert payload["summary"]["mean_reduction"] > 0
    names = [run["file"] for run in payload["runs"]]
    assert names == sorted(names)
