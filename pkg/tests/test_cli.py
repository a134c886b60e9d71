import json
import subprocess
import sys
from pathlib import Path

import pytest

from besovkit.cli import EXIT_DIVERGENT, EXIT_FAIL, EXIT_OK, EXIT_USAGE, help_text, main, parse
from besovkit.errors import UsageError
from besovkit.report import parse_report

GOLDEN = Path(__file__).parent / "golden" / "help.txt"


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_examples():
    cmd = parse(["norm", "--function", "koebe", "--kind", "bloch", "--domain", "disk"])
    assert cmd.verb == "norm" and cmd.args.kind_obj.kind == "bloch"
    assert parse(["verify", "--suite", "counterexamples"]).verb == "verify"
    with pytest.raises(UsageError):
        parse(["norm", "--function", "identity", "--kind", "besov:p=0.5"])


@pytest.mark.parametrize("argv", [
    ["norm", "--function", "identity"],
    ["norm", "--function", "identity", "--kind", "bloch", "--bogus"],
    ["norm", "--function", "identity", "--kind", "bloch", "--tol", "-1"],
    ["norm", "--function", "identity", "--kind", "decay", "--gamma", "2"],
    ["norm", "--function", "identity", "--kind", "besov", "--p", "0.5"],
    ["norm", "--function", "identity", "--kind", "bloch", "--eps-min", "0.5"],
    ["verify", "--suite", "nope"],
    ["verify", "--suite", "all", "--workers", "0"],
    ["schwarzian", "--function", "koebe", "--op", "S", "--rmax", "1.5"],
    ["frobnicate"],
])
def test_usage_errors(argv):
    with pytest.raises(UsageError):
        parse(argv)


def test_kind_flags_merge():
    cmd = parse(["norm", "--function", "identity", "--kind", "besov", "--p", "2"])
    assert cmd.args.kind_obj.label == "besov:p=2"
    cmd = parse(["norm", "--function", "identity", "--kind", "bmoa", "--depth", "6"])
    assert cmd.args.kind_obj.depth == 6


def test_norm_constant_record(capsys):
    code, out, _ = run(["norm", "--function", "constant:c=3", "--kind", "besov:p=2"], capsys)
    rec = json.loads(out)
    assert code == EXIT_OK and rec["estimate"] == 0 and rec["schema"] == 1 and rec["verb"] == "norm"


def test_norm_divergent_exit(capsys):
    argv = ["norm", "--function", "identity", "--kind", "besov:p=1", "--eps-min", str(2.0 ** -12)]
    code, out, _ = run(argv + ["--require-convergent"], capsys)
    assert code == EXIT_DIVERGENT and json.loads(out)["divergent"] is True
    code, _, _ = run(argv, capsys)
    assert code == EXIT_OK


def test_norm_csv_and_out(tmp_path, capsys):
    path = tmp_path / "n.csv"
    code, out, _ = run(["norm", "--function", "identity", "--kind", "bloch", "--format", "csv", "--out", str(path)],
                       capsys)
    assert code == EXIT_OK and out == ""
    rows = path.read_text().splitlines()
    assert rows[0] == "schema,function,kind,eps,value" and len(rows) == 15


def test_norm_domain_mismatch(capsys):
    code, _, err = run(["norm", "--function", "koebe", "--kind", "bloch", "--domain", "hplus"], capsys)
    assert code == EXIT_USAGE and "--domain" in err


def test_unknown_function(capsys):
    code, _, err = run(["norm", "--function", "nosuch", "--kind", "bloch"], capsys)
    assert code == EXIT_USAGE and "--function" in err


def test_schwarzian_csv(capsys):
    code, out, _ = run(["schwarzian", "--function", "koebe", "--op", "S", "--radii", "2", "--angles", "3"], capsys)
    rows = out.splitlines()
    assert code == EXIT_OK and len(rows) == 7
    x, y, re, im = map(float, rows[1].split(",")[3:])
    z = complex(x, y)
    assert abs(complex(re, im) + 6 / (1 - z * z) ** 2) < 1e-12


def test_variational_records(capsys):
    code, out, _ = run(["variational", "--nu", "box:c=0.3", "--z", "-1j", "--z", "0.5-2j"], capsys)
    lines = [json.loads(s) for s in out.splitlines()]
    assert code == EXIT_OK and len(lines) == 2 and "d0_schwarzian" in lines[0]


def test_variational_bad_point(capsys):
    code, _, _ = run(["variational", "--nu", "box:c=0.3", "--z", "1j"], capsys)
    assert code == EXIT_USAGE


def test_transport(capsys):
    code, out, _ = run(["transport", "--function", "halfplane_pole:k=2,half=plus", "--p", "2"], capsys)
    rep = parse_report(out.encode())
    assert code == EXIT_OK and rep.passed and rep.suite_id == "cayley-transport"


def test_beltrami_verbs(capsys):
    code, out, _ = run(["beltrami", "--mu", "gamma:gamma=1", "--p", "2", "--gamma", "1"], capsys)
    rec = json.loads(out)
    assert code == EXIT_OK and rec["finite"] and abs(rec["decay"]["estimate"] - 0.5) < 1e-9
    code, out, _ = run(["beltrami", "--section", "halfplane_log:a=0.2"], capsys)
    rec = json.loads(out)
    assert code == EXIT_OK and abs(rec["sup_mu"] - 0.4) < 1e-3
    code, _, err = run(["beltrami", "--section", "halfplane_log:a=0.6"], capsys)
    assert code == EXIT_USAGE and "HypothesisError" in err


def test_verify_counterexamples(tmp_path, capsys):
    path = tmp_path / "report.json"
    code, _, _ = run(["verify", "--suite", "counterexamples", "--format", "json", "--out", str(path)], capsys)
    rep = parse_report(path.read_bytes())
    assert code == EXIT_OK and len(rep.checks) == 4


def test_unwritable_output(capsys):
    code, _, _ = run(["norm", "--function", "identity", "--kind", "bloch", "--out", "/nonexistent/dir/x"], capsys)
    assert code == EXIT_FAIL


def test_help_golden():
    assert help_text() == GOLDEN.read_text()


def test_help_exit(capsys):
    assert main(["--help"]) == 0
    assert "usage: besovkit" in capsys.readouterr().out


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "besovkit", "norm", "--function", "identity", "--kind", "bloch"],
                       capture_output=True, text=True, check=False)
    assert r.returncode == 0 and json.loads(r.stdout)["estimate"] == 0.5
