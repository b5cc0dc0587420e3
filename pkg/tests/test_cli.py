import csv
import io
import json
import math
from pathlib import Path

import jsonschema
import pytest

from unfair_dice.chi2_analysis import Chi2Plan, expected_chi2_at_N
from unfair_dice.cli import main

SCHEMAS = Path(__file__).resolve().parents[1] / "docs" / "schemas"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def schema(name):
    return json.loads((SCHEMAS / name).read_text())


def test_cdf_table_header_and_monotone(capsys):
    code, out, _ = run(capsys, "cdf-table", "--p0", "0.25")
    assert code == 0
    table = rows(out)
    assert table[0] == ["x", "F", "err"]
    assert len(table) == 1026
    F = [float(r[1]) for r in table[1:]]
    assert all(a <= b for a, b in zip(F, F[1:]))
    assert F[0] == 0.0 and F[-1] == 1.0


def test_cdf_table_fair(capsys):
    code, out, _ = run(capsys, "cdf-table", "--p0", "0.5", "--points", "257")
    assert code == 0
    for x, F, _ in rows(out)[1:]:
        assert abs(float(x) - float(F)) <= 1e-12


def test_cdf_table_cantor_middle_third(capsys):
    code, out, _ = run(capsys, "cdf-table", "--die", "0.5,0,0.5", "--points", "28")
    assert code == 0
    middle = [float(F) for x, F, _ in rows(out)[1:] if 1 / 3 <= float(x) <= 2 / 3]
    assert len(middle) == 10
    assert all(v == 0.5 for v in middle)


def test_arclength(capsys):
    code, out, _ = run(capsys, "arclength", "--p0", "0.5", "--n-min", "0", "--n-max", "10")
    assert code == 0
    table = rows(out)
    assert table[0] == ["n", "length", "method"]
    assert [int(r[0]) for r in table[1:]] == list(range(11))
    assert all(abs(float(r[1]) - math.sqrt(2)) <= 1e-12 and r[2] == "grouped" for r in table[1:])

    code, out, _ = run(capsys, "arclength", "--p0", "0.25", "--n-max", "30")
    L = [float(r[1]) for r in rows(out)[1:]]
    assert all(a <= b + 1e-15 for a, b in zip(L, L[1:])) and max(L) <= 2


def test_arclength_both(capsys):
    code, out, _ = run(capsys, "arclength", "--die", "0.2,0.5,0.3", "--n-max", "8", "--method", "both")
    assert code == 0
    table = rows(out)
    assert table[0] == ["n", "length_naive", "length_grouped"]
    for _, a, g in table[1:]:
        assert abs(float(a) - float(g)) <= 1e-10


def test_arclength_cap(capsys, monkeypatch):
    monkeypatch.setenv("UNFAIR_DICE_ENUM_CAP", "100")
    code, _, err = run(capsys, "arclength", "--p0", "0.25", "--n-max", "8", "--method", "naive")
    assert code == 3 and "cap" in err


def test_supnorm(capsys):
    code, out, _ = run(capsys, "supnorm", "--p0", "0.4")
    assert code == 0
    obj = json.loads(out)
    jsonschema.validate(obj, schema("supnorm.schema.json"))
    assert obj["f1_norm"] == pytest.approx(0.1, abs=1e-15)
    assert obj["bound"] == pytest.approx(0.25, abs=1e-15)
    assert obj["fn_norm"] <= obj["bound"]

    code, out, _ = run(capsys, "supnorm", "--die", "0.25,0.25,0.25,0.25")
    obj = json.loads(out)
    assert obj["f1_norm"] == obj["bound"] == obj["fn_norm"] == 0.0


def test_expected_samples(capsys):
    code, out, _ = run(capsys, "expected-samples", "--b", "1", "--alpha", "0.05", "--p0", "0.6")
    assert code == 0
    obj = json.loads(out)
    jsonschema.validate(obj, schema("expected_samples.schema.json"))
    assert obj["df"] == 1
    assert obj["EN"] == pytest.approx(72.04, abs=5e-3)

    code, out, _ = run(capsys, "expected-samples", "--b", "3", "--alpha", "0.01", "--p0", "0.55")
    obj = json.loads(out)
    assert 0 < obj["EN"] < math.inf
    assert expected_chi2_at_N(Chi2Plan(3, 0.01), 0.55, obj["EN"]) == pytest.approx(obj["crit"], abs=1e-9)


def test_fair_coin_exit_code(capsys):
    code, out, err = run(capsys, "expected-samples", "--p0", "0.5")
    assert code == 4 and out == ""
    assert "fair coin: E[N] undefined (infinite)" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["cdf-table", "--p0", "0.25", "--bogus", "1"],
        ["cdf-table", "--p0", "0.25", "--die", "0.5,0.5"],
        ["cdf-table", "--die", "0.5,0.6"],
        ["cdf-table", "--die", "1"],
        ["cdf-table", "--p0", "0.25", "--points", "1"],
        ["arclength", "--p0", "0.25", "--n-min", "5", "--n-max", "2"],
        ["simulate", "--p0", "0.6", "--min-n", "50", "--n-cap", "10"],
        ["expected-samples", "--p0", "1.5"],
        ["nosuchcommand"],
    ],
)
def test_config_errors(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_simulate(capsys, tmp_path):
    summary_path = tmp_path / "summary.json"
    argv = ["simulate", "--p0", "0.6", "--trials", "200", "--seed", "11", "--summary", str(summary_path)]
    code, out, _ = run(capsys, *argv)
    assert code == 0
    table = rows(out)
    assert table[0] == ["trial_index", "stop_N", "final_statistic", "seed", "capped"]
    assert len(table) == 201
    obj = json.loads(summary_path.read_text())
    jsonschema.validate(obj, schema("simulate_summary.schema.json"))
    assert "analytic_EN" in obj and "ratio" in obj

    code, out, _ = run(capsys, *argv[:-2], "--format", "json")
    assert json.loads(out) == obj


def test_simulate_all_capped(capsys):
    code, _, _ = run(capsys, "simulate", "--p0", "0.51", "--trials", "5", "--n-cap", "2", "--alpha", "0.001")
    assert code == 3


def test_diagnose(capsys):
    code, out, _ = run(capsys, "diagnose", "--p0", "0.5", "--points", "50")
    assert code == 0
    table = rows(out)
    assert table[0] == ["rank", "median_ratio_uniform", "median_ratio_mu"]
    assert all(float(r[1]) == 1.0 and float(r[2]) == 1.0 for r in table[1:])

    code, out, _ = run(capsys, "diagnose", "--p0", "0.25", "--ranks", "10,20,40", "--points", "500")
    med = [float(r[1]) for r in rows(out)[1:]]
    assert med[0] >= med[1] >= med[2]


def test_sample_and_digit_check(capsys):
    code, out, _ = run(capsys, "sample", "--die", "0.2,0.5,0.3", "--depth", "12", "--n", "5", "--seed", "3")
    assert code == 0
    table = rows(out)
    assert table[0] == ["index", "numerator", "denominator", "x"]
    for _, num, den, x in table[1:]:
        assert 3**12 % int(den) == 0 and float(x) == pytest.approx(int(num) / int(den), rel=1e-15)

    code, out, _ = run(capsys, "digit-check", "--p0", "0.25", "--n", "100000", "--seed", "3")
    table = rows(out)
    assert table[0] == ["digit", "count", "frequency", "p", "band", "pass"]
    assert sum(int(r[1]) for r in table[1:]) == 100000


def test_out_flag(capsys, tmp_path):
    path = tmp_path / "t.csv"
    code, out, _ = run(capsys, "cdf-table", "--p0", "0.3", "--points", "9", "--out", str(path))
    assert code == 0 and out == ""
    assert path.read_text().startswith("x,F,err\n")
