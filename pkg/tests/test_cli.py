import json
import subprocess
import sys

import pytest

from juliatwin import cli


def _write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


@pytest.fixture
def maps(tmp_path):
    return {
        "pow2": _write(tmp_path, "pow2.json", {"num": [0, 0, 1]}),
        "pow3": _write(tmp_path, "pow3.json", {"num": [0, 0, 0, 1]}),
        "ex1_f": _write(tmp_path, "ex1_f.json", {"expr": "z^4+1"}),
        "ex1_g": _write(tmp_path, "ex1_g.json", {"expr": "-z^4-1"}),
        "par": _write(tmp_path, "par.json", {"expr": "z+z^2"}),
        "bad": _write(tmp_path, "bad.json", {"num": [1], "den": [0]}),
    }


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, (json.loads(out.out) if out.out else None), out.err


def test_classify_pair_circle(maps, capsys):
    code, rep, _ = run(["classify-pair", maps["pow2"], maps["pow3"], "--seed", "7"], capsys)
    assert code == 0
    assert rep["verdict"] == "condition_1" and rep["condition_1"] == "full_circle"
    assert rep["config"]["seed"] == 7


def test_funceq_witness(maps, capsys):
    code, rep, _ = run(["funceq-search", maps["ex1_f"], maps["ex1_g"]], capsys)
    assert code == 0 and rep["found"]
    assert (rep["witness"]["k"], rep["witness"]["exponents"], rep["witness"]["m"]) == (1, [1], 2)


def test_analyze_periods(maps, capsys):
    code, rep, _ = run(["analyze", maps["pow2"], "--periods", "2", "--census"], capsys)
    assert code == 0
    periods = sorted(o["period"] for o in rep["orbits"])
    assert periods == [1, 1, 1, 2]
    assert sum(len(o["points"]) * o["multiplicity"] for o in rep["orbits"]) == 5
    assert rep["census"]["nonrepelling_constant"]


def test_unresolved_is_success(maps, capsys):
    code, rep, _ = run(["funceq-search", maps["pow2"], maps["pow3"], "--max-m", "3"], capsys)
    assert code == 0 and not rep["found"]
    assert rep["searched"]["max_m"] == 3


def test_localdyn_modes(maps, capsys, tmp_path):
    k = _write(tmp_path, "k.json", {"expr": "2z+z^2"})
    code, rep, _ = run(["localdyn", k, "--fixed-point", "0+0i", "--order", "6"], capsys)
    assert code == 0 and rep["exact_coefficients"][:3] == ["0", "1", "1/2"]
    code, rep, _ = run(["localdyn", maps["par"], "--mode", "parabolic", "--fatou-samples", "4",
                        "--fatou-iter", "500"], capsys)
    assert code == 0 and rep["parabolic"]["p"] == 1 and rep["normalized"]["alpha"] == [-1.0, 0.0]
    assert max(rep["fatou"]["error"]) < 1e-5


def test_julia_sample_outputs(maps, capsys, tmp_path):
    csv, ppm = tmp_path / "c.csv", tmp_path / "c.ppm"
    code, rep, _ = run(["julia-sample", maps["pow2"], "-n", "3000", "-o", str(csv), "--ppm", str(ppm), "64"],
                       capsys)
    assert code == 0 and rep["forward_invariance"] >= 0.999
    assert len(csv.read_text().splitlines()) == 3001
    assert ppm.read_bytes().startswith(b"P6\n64 ")


def test_compare_and_tangent_cone(maps, capsys):
    code, rep, _ = run(["compare", maps["pow2"], maps["pow3"], "-n", "5000", "--tol", "1e-3"], capsys)
    assert code == 0 and rep["verdict"] and rep["config"]["tolerances"]["hausdorff"] == 1e-3
    code, rep, _ = run(["tangent-cone", maps["pow2"], "--point", "1", "-n", "20000"], capsys)
    assert code == 0 and rep["count"] == 2


def test_report_deterministic(maps, tmp_path):
    outs = []
    out = tmp_path / "r.json"
    for _ in range(2):
        assert cli.main(["compare", maps["pow2"], maps["ex1_f"], "-n", "3000", "--seed", "3",
                         "--out", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_config_file_and_flag_override(maps, tmp_path, capsys):
    cfg = _write(tmp_path, "cfg.json", {"seed": 5, "n_points": 2000, "budgets": {"max_m": 2}})
    code, rep, _ = run(["funceq-search", maps["ex1_f"], maps["ex1_g"], "--config", cfg], capsys)
    assert rep["config"]["seed"] == 5 and rep["config"]["budgets"]["max_m"] == 2 and rep["found"]
    code, rep, _ = run(["funceq-search", maps["ex1_f"], maps["ex1_g"], "--config", cfg, "--max-m", "1",
                        "--seed", "9"], capsys)
    assert rep["config"]["seed"] == 9 and rep["config"]["budgets"]["max_m"] == 1 and not rep["found"]


@pytest.mark.parametrize("argv,code", [
    (["analyze", "{bad}"], cli.EXIT_MAP),
    (["analyze", "/nonexistent.json"], cli.EXIT_MAP),
    (["analyze", "{pow2}", "--periods", "20"], cli.EXIT_BUDGET),
    (["funceq-search", "{pow2}", "{pow3}", "--tol-equality", "-1"], cli.EXIT_INPUT),
    (["localdyn", "{pow2}", "--mode", "parabolic"], cli.EXIT_INPUT),
])
def test_exit_codes(maps, capsys, argv, code):
    argv = [a.format(**maps) for a in argv]
    assert cli.main(argv) == code
    assert "juliatwin:" in capsys.readouterr().err


def test_usage_error():
    with pytest.raises(SystemExit) as e:
        cli.main(["no-such-command"])
    assert e.value.code == cli.EXIT_USAGE


def test_module_entry_point(maps):
    proc = subprocess.run([sys.executable, "-m", "juliatwin", "funceq-search", maps["ex1_f"], maps["ex1_g"]],
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0 and json.loads(proc.stdout)["found"]
