import csv
import subprocess
import sys

import numpy as np
import pytest

from cocomo_esp.cli import main
from cocomo_esp.dataset import bundled_path, write_dataset
from cocomo_esp.synthetic import cocomo2_dataset

NOMINAL = str(bundled_path("nominal3.csv"))
STANDIN = str(bundled_path("coc81_standin.csv"))


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def body_rows(text):
    """Data rows of the first plain-text table."""
    lines = text.splitlines()
    start = next(i for i, line in enumerate(lines) if set(line.replace(" ", "")) == {"-"}) + 1
    rows = []
    for line in lines[start:]:
        if not line.strip():
            break
        rows.append(line.split())
    return rows


def test_estimate_nominal(capsys):
    code, out, _ = run(capsys, "estimate", NOMINAL)
    assert code == 0
    rows = body_rows(out)
    assert len(rows) == 3
    for row, kloc in zip(rows, (10, 50, 100)):
        assert float(row[2]) == pytest.approx(2.94 * kloc ** 1.0997, abs=0.006)


def test_estimate_csv_agrees_with_table(capsys, tmp_path):
    target = tmp_path / "est.csv"
    _, out, _ = run(capsys, "estimate", NOMINAL, "--out", str(target))
    table = body_rows(out)
    with open(target) as fh:
        records = list(csv.DictReader(fh))
    assert [r["id"] for r in records] == [row[0] for row in table]
    for rec, row in zip(records, table):
        assert f"{float(rec['estimate']):.2f}" == row[2]


def test_missing_file(capsys):
    code, out, err = run(capsys, "estimate", "/nonexistent/data.csv")
    assert code == 1 and "no such file" in err and out == ""


def test_usage_errors_exit_one(capsys):
    assert run(capsys, "frobnicate")[0] == 1
    assert run(capsys, "perturb")[0] == 1
    assert run(capsys, "perturb", NOMINAL, "--levels", "0.2,x")[0] == 1


def test_perturb_standin(capsys):
    code, out, _ = run(capsys, "perturb", STANDIN, "--format", "cocomo81", "--repeats", "30", "--baseline-draws", "200")
    assert code == 0
    rows = body_rows(out)
    assert len(rows) == 6
    baseline = next(r for r in rows if r[0] == "COCOMO2")
    assert baseline[1] == "1"


def test_perturb_baseline_only(capsys):
    _, out, _ = run(capsys, "perturb", NOMINAL, "--levels", "", "--repeats", "5")
    rows = body_rows(out)
    assert len(rows) == 1 and rows[0][0] == "COCOMO2" and rows[0][1] == "1"


def test_perturb_single_repeat_has_no_spread(capsys):
    _, out, _ = run(capsys, "perturb", NOMINAL, "--repeats", "1")
    assert all(float(r[4]) == 0 for r in body_rows(out))


def test_perturb_deterministic(capsys, tmp_path):
    args = ["perturb", STANDIN, "--format", "cocomo81", "--repeats", "10", "--seed", "4"]
    first = run(capsys, *args, "--out", str(tmp_path / "a.csv"))[1]
    second = run(capsys, *args, "--out", str(tmp_path / "b.csv"), "--workers", "3")[1]
    assert first == second
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_env_overrides_and_flag_precedence(capsys, monkeypatch):
    monkeypatch.setenv("ESP_REPEATS", "1")
    _, out, _ = run(capsys, "perturb", NOMINAL)
    assert "over 1 repeats" in out
    _, out, _ = run(capsys, "perturb", NOMINAL, "--repeats", "3")
    assert "over 3 repeats" in out
    monkeypatch.setenv("ESP_REPEATS", "many")
    assert run(capsys, "perturb", NOMINAL)[0] == 1


def test_bounds_defaults(capsys, tmp_path):
    code, out, _ = run(capsys, "bounds")
    assert code == 0
    assert "0.0569" in out and "115.5827" in out
    assert "2031.7 * KLOC^0.7379" in out
    assert not list(tmp_path.iterdir())
    target = tmp_path / "curves.csv"
    run(capsys, "bounds", "--points", "5", "--out", str(target))
    with open(target) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 10 * 5
    top = [r for r in rows if r["curve"] == "very low / upper bound"]
    assert float(top[-1]["effort"]) == pytest.approx(10_000 ** 1.7102, rel=1e-6)


def test_bounds_bad_grid(capsys):
    assert run(capsys, "bounds", "--points", "1")[0] == 1
    assert run(capsys, "bounds", "--kloc-min", "10", "--kloc-max", "5")[0] == 1


def groups_file(tmp_path, groups, header=True):
    path = tmp_path / "groups.csv"
    lines = ["label,value"] if header else []
    lines += [f"{label},{v}" for label, values in groups for v in values]
    path.write_text("\n".join(lines) + "\n")
    return str(path)


def ranks(out):
    return {row[0]: int(row[1]) for row in body_rows(out)}


def test_rank_examples(capsys, tmp_path):
    _, out, _ = run(capsys, "rank", groups_file(tmp_path, [("a", [1, 1, 1, 2]), ("b", [100, 101, 100, 99])]))
    assert ranks(out) == {"a": 1, "b": 2}
    _, out, _ = run(capsys, "rank", groups_file(tmp_path, [("solo", [3, 4, 5])], header=False))
    assert ranks(out) == {"solo": 1}


def test_rank_two_clusters(capsys, tmp_path):
    rng = np.random.default_rng(0)
    groups = [(f"g{i}", rng.normal(1 if i % 2 else 100, 0.5, 25).round(3)) for i in range(6)]
    _, out, _ = run(capsys, "rank", groups_file(tmp_path, groups))
    assert len(set(ranks(out).values())) == 2


def test_rank_bad_file(capsys, tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,1\na,oops\n")
    assert run(capsys, "rank", str(path))[0] == 1


def test_sizes(capsys, tmp_path):
    _, out, _ = run(capsys, "sizes")
    assert "13 of 14 within ±100%" in out
    _, out, _ = run(capsys, "sizes", "--stage", "pre_analysis")
    assert "236.0" in out and "-44.0" in out
    single = tmp_path / "one.csv"
    single.write_text("id,pre_analysis,pre_coding\nz,0,0\n")
    _, out, _ = run(capsys, "sizes", str(single))
    assert "1 of 1 within ±100%" in out


def test_calibrate(capsys, tmp_path):
    path = write_dataset(cocomo2_dataset(n=30, seed=2), tmp_path / "clean.csv")
    _, out, _ = run(capsys, "calibrate", str(path))
    rows = body_rows(out)
    assert len(rows) == 30 and len({tuple(r[1:]) for r in rows}) == 1
    assert rows[0][1:3] == ["2.9400", "0.9100"]
    _, out, _ = run(capsys, "calibrate", str(path), "--holdout", "1.0", "--repeats", "5")
    assert len(body_rows(out)) == 5


def test_calibrate_noisy(capsys, tmp_path):
    path = write_dataset(cocomo2_dataset(n=60, sigma=0.1, seed=8), tmp_path / "noisy.csv")
    _, out, _ = run(capsys, "calibrate", str(path))
    b = float(out.split("median b=")[1].split(";")[0])
    assert abs(b - 0.91) <= 0.05


def test_markdown(capsys):
    _, out, _ = run(capsys, "sizes", "--markdown")
    assert "| Statistic | Value |" in out and "|---|---|" in out


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "cocomo_esp.cli", "sizes"], capture_output=True, text=True)
    assert proc.returncode == 0 and "13 of 14" in proc.stdout
