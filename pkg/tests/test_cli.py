import csv
import json
import subprocess
import sys

import pytest

from ipe_lab import cli


def run(tmp_path, *argv):
    return cli.main([*argv, "--out", str(tmp_path)])


def read_jsonl(path):
    with open(path) as fh:
        return [json.loads(line) for line in fh]


def read_csv(path):
    with open(path) as fh:
        first = fh.readline()
        assert first.startswith("# ")
        return json.loads(first[2:]), list(csv.reader(fh))


def test_sample_pdip_outputs(tmp_path):
    assert run(tmp_path, "sample-pdip", "--alpha", "0.5", "--theta", "1", "--n", "7", "--seed", "3") == 0
    recs = read_jsonl(tmp_path / "pdip.jsonl")
    assert set(recs[0]) == {"metadata"} and len(recs) == 8
    assert recs[0]["metadata"]["params"]["alpha"] == 0.5
    meta, rows = read_csv(tmp_path / "pdip_summary.csv")
    assert rows[0][:3] == ["replicate", "total_mass", "leftmost"] and len(rows) == 8
    assert meta["rng"] == recs[0]["metadata"]["rng"]


def test_zero_replicates_leave_only_metadata(tmp_path):
    assert run(tmp_path, "sample-pdip", "--alpha", "0.5", "--theta", "1", "--n", "0") == 0
    assert len(read_jsonl(tmp_path / "pdip.jsonl")) == 1
    _, rows = read_csv(tmp_path / "pdip_summary.csv")
    assert len(rows) == 1


def test_fixed_seed_is_byte_identical_and_thread_free(tmp_path):
    args = ("sample-pdip", "--alpha", "0.4", "--theta", "0.5", "--n", "12", "--seed", "9")
    run(tmp_path / "a", *args)
    run(tmp_path / "b", *args, "--threads", "4")
    for name in ("pdip.jsonl", "pdip_summary.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


@pytest.mark.parametrize("engine,extra", [
    ("kernel", ["--theta1", "0.5"]),
    ("dagger", ["--theta1", "1", "--theta2", "0.5"]),
    ("immigration", ["--theta1", "1", "--theta2", "0.5"]),
    ("scaffold", ["--scaffold-csv"]),
])
def test_evolve_engines(tmp_path, engine, extra):
    code = run(tmp_path, "evolve", "--engine", engine, "--alpha", "0.5", *extra, "--init", "three",
               "--times", "0:0.2:0.1", "--n", "3", "--eps", "1e-3", "--dump")
    assert code == 0
    _, rows = read_csv(tmp_path / "evolve_summary.csv")
    assert len(rows) == 1 + 3 * 3
    assert [r[1] for r in rows[1:4]] == ["0.0", "0.1", "0.2"]
    assert len(read_jsonl(tmp_path / "evolve_partitions.jsonl")) == 1 + 9
    assert (tmp_path / "scaffold_path.csv").exists() == (engine == "scaffold")


def test_evolve_from_file(tmp_path):
    init = tmp_path / "init.json"
    init.write_text(json.dumps({"total_mass": 1.0, "blocks": [[0.0, 0.4], [0.4, 0.6]]}))
    assert run(tmp_path, "evolve", "--alpha", "0.5", "--init", str(init), "--times", "0.1,0.3", "--n", "2") == 0
    _, rows = read_csv(tmp_path / "evolve_summary.csv")
    assert [r[1] for r in rows[1:]] == ["0.1", "0.3", "0.1", "0.3"]


@pytest.mark.parametrize("argv", [
    ["sample-pdip", "--alpha", "1.5", "--theta", "1"],
    ["evolve", "--alpha", "0.5", "--theta2", "1"],
    ["evolve", "--engine", "immigration", "--alpha", "0.5", "--theta1", "0.2"],
    ["evolve", "--engine", "scaffold", "--alpha", "0.5", "--theta1", "1"],
    ["evolve", "--alpha", "0.5", "--times", "0.3,0.1"],
    ["evolve", "--alpha", "0.5", "--init", "no-such-file.json"],
    ["verify", "no_such_suite"],
])
def test_usage_errors_exit_2(tmp_path, argv):
    assert run(tmp_path, *argv) == 2


def test_argparse_errors_exit_2(tmp_path):
    with pytest.raises(SystemExit) as exc:
        cli.main(["sample-pdip"])
    assert exc.value.code == 2


def test_verify_writes_reports(tmp_path):
    assert run(tmp_path, "verify", "metric_axioms", "--n", "50") == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["experiments"][0]["name"] == "metric_axioms"
    rep = json.loads((tmp_path / "metric_axioms.json").read_text())
    assert rep["report"]["verdict"] == "pass" and "metadata" in rep


def test_parse_times():
    assert cli.parse_times("0:1:0.25") == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert cli.parse_times("0.5, 1") == [0.5, 1.0]
    for bad in ("a:b:c", "1:0:0.1", "0:1:0", "", "-1,2"):
        with pytest.raises(cli.UsageError):
            cli.parse_times(bad)


def test_console_script_module_entry(tmp_path):
    res = subprocess.run([sys.executable, "-m", "ipe_lab.cli", "verify", "nope", "--out", str(tmp_path)],
                         capture_output=True, text=True)
    assert res.returncode == 2 and "available" in res.stderr
