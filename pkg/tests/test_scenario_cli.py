import csv
import io
import json
import shutil
import subprocess
import sys

import pytest

from tubetheta import cli, scenario
from tubetheta.errors import ConfigError

SMALL = """
name = "small"
seed = 4
tol = "1e-12"

[representation]
kind = "SymReal"
n = 2

[lattice]
vectors = [["1", "0"], ["1/2", "1"]]

[points]
random = 3

[checks]
run = ["theta1", "theta2", "theta3", "partialthetaid", "theta-transformation", "tail-stability"]
"""


def run_cli(args, capsys):
    code = cli.main(args)
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, text, name="sc.toml"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_classical_scenario_passes(capsys):
    code, out, _ = run_cli(["verify", "--scenario", "classical"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["all_pass"]
    assert rep["summary"]["failed"] == 0 and rep["summary"]["errors"] == 0
    tags = {c["tag"] for c in rep["checks"]}
    assert {"theta1", "theta2", "theta3", "partialthetaid", "theta-transformation", "lineartheta"} <= tags


def test_boundary_point_is_domain_error(tmp_path, capsys):
    text = SMALL.replace("random = 3", 'random = 1\nexplicit = [{ z = [["0","0"],["0","0"],["0","0"]], u = ["0","0"] }]')
    path = write(tmp_path, text)
    code, out, _ = run_cli(["verify", "--scenario", path], capsys)
    rep = json.loads(out)
    assert code == 1
    errs = [c for c in rep["checks"] if c.get("error") == "domain"]
    assert errs and all(c["inputs"]["point"] == 0 for c in errs)
    # the other point still ran
    assert any(c["pass"] for c in rep["checks"])
    code, out, _ = run_cli(["eval", "--scenario", path], capsys)
    ev = json.loads(out)["evaluations"]
    assert code == 1 and ev[0]["error"] == "domain" and "value" in ev[1]


def test_fourier_in_dimension_three_is_unsupported(tmp_path, capsys):
    text = SMALL.replace('kind = "SymReal"\nn = 2', 'kind = "SymReal"\nn = 3')
    text = text.replace('vectors = [["1", "0"], ["1/2", "1"]]', "scale = 1").replace(
        'run = ["theta1", "theta2", "theta3", "partialthetaid", "theta-transformation", "tail-stability"]',
        'run = ["fourier"]')
    code, out, _ = run_cli(["verify", "--scenario", write(tmp_path, text)], capsys)
    assert code == 2
    assert json.loads(out)["checks"][0]["error"] == "unsupported"


@pytest.mark.parametrize("bad,field", [
    ('kind = "SymReal"', "representation.kind"),
    ('vectors = [["1", "0"], ["1/2", "1"]]', "lattice.vectors"),
    ('run = ["theta1"', None),
    ('random = 3', "points.random"),
    ('run = ["theta1", "theta2"', "checks.run"),
])
def test_config_errors(tmp_path, capsys, bad, field):
    replacement = {
        'kind = "SymReal"': 'kind = "Octonion"',
        'vectors = [["1", "0"], ["1/2", "1"]]': 'vectors = [["1", "0"], ["2", "0"]]',
        'run = ["theta1"': 'run = ["theta1"',
        'random = 3': 'random = "three"',
        'run = ["theta1", "theta2"': 'run = ["theta1", "nonsense"',
    }[bad]
    text = SMALL.replace(bad, replacement)
    if field is None:
        text = SMALL.replace("seed = 4", "seed = = 4")
    code, out, err = run_cli(["verify", "--scenario", write(tmp_path, text)], capsys)
    assert code == 2 and out == ""
    assert "configuration error" in err and "line" in err
    if field:
        with pytest.raises(ConfigError) as info:
            scenario.parse_scenario(text)
        assert info.value.field == field and info.value.line


def test_unknown_scenario(capsys):
    code, _, err = run_cli(["verify", "--scenario", "no-such-scenario"], capsys)
    assert code == 2 and "no scenario" in err


def test_reports_byte_reproducible(tmp_path, capsys):
    path = write(tmp_path, SMALL)
    outs = []
    for jobs in ("1", "1", "3"):
        out_file = tmp_path / f"r{len(outs)}.json"
        assert cli.main(["verify", "--scenario", path, "--jobs", jobs, "--out", str(out_file)]) == 0
        outs.append(out_file.read_bytes())
    assert outs[0] == outs[1] == outs[2]
    a = tmp_path / "s5.json"
    cli.main(["verify", "--scenario", path, "--seed", "5", "--out", str(a)])
    assert a.read_bytes() != outs[0]
    capsys.readouterr()


def test_seed_and_tol_overrides():
    sc = scenario.load_scenario(scenario.resolve_scenario("classical"))
    other = scenario.with_overrides(sc, tol=1e-6, seed=99)
    assert other.tol == 1e-6 and other.seed == 99
    assert other.points[:sc.n_explicit] == sc.points[:sc.n_explicit]
    assert other.points[sc.n_explicit:] != sc.points[sc.n_explicit:]


def test_csv_output(tmp_path, capsys):
    code, out, _ = run_cli(["verify", "--scenario", write(tmp_path, SMALL), "--format", "csv"], capsys)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and rows and all(r["pass"] == "True" for r in rows)
    code, out, _ = run_cli(["eval", "--scenario", write(tmp_path, SMALL), "--format", "csv"], capsys)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 3 and all(float(r["tail_bound"]) <= 1e-12 for r in rows)


def test_list_scenarios_and_env_dir(tmp_path, monkeypatch, capsys):
    code, out, _ = run_cli(["list-scenarios"], capsys)
    names = [r["name"] for r in csv.DictReader(io.StringIO(out))]
    assert code == 0
    for n in ("classical", "siegel2", "hermitian", "spin", "directsum"):
        assert n in names
    write(tmp_path, SMALL, "mine.toml")
    monkeypatch.setenv(scenario.SCENARIO_ENV, str(tmp_path))
    code, out, _ = run_cli(["list-scenarios", "--format", "json"], capsys)
    assert "mine" in [r["name"] for r in json.loads(out)]
    assert scenario.resolve_scenario("mine") == tmp_path / "mine.toml"


def test_bench_csv(capsys):
    code, out, _ = run_cli(["bench", "--tol", "1e-4", "--tol", "1e-10", "--repeat", "1"], capsys)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert set(rows[0]) == set(scenario_cols())
    groups = {}
    for r in rows:
        groups.setdefault((r["config"], r["strategy"], r["kernel"]), []).append(int(r["terms"]))
    assert all(t == sorted(t) for t in groups.values())
    for r in rows:
        if r["strategy"] == "ellipsoid" and r["tol"] == "1e-10":
            box = next(b for b in rows if b["strategy"] == "box" and b["config"] == r["config"]
                       and b["kernel"] == r["kernel"] and b["tol"] == r["tol"])
            assert int(r["terms"]) < int(box["terms"])
            assert abs(complex(float(r["value_re"]), float(r["value_im"]))
                       - complex(float(box["value_re"]), float(box["value_im"]))) <= 2e-10


def scenario_cols():
    from tubetheta.bench import COLUMNS

    return COLUMNS


@pytest.mark.skipif(shutil.which("tubetheta") is None, reason="console script not installed")
def test_console_script():
    p = subprocess.run(["tubetheta", "eval", "--scenario", "classical", "--tol", "1e-10"], capture_output=True, text=True)
    assert p.returncode == 0
    assert json.loads(p.stdout)["evaluations"][0]["value"]


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "tubetheta.cli", "list-scenarios"], capture_output=True, text=True)
    assert p.returncode == 0 and "classical" in p.stdout
