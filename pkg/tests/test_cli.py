import csv
import io
import json

import numpy as np
import pytest

from comlab import __version__
from comlab.cli import main


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _csv_rows(text):
    body = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(body))))


def test_sweep_schwarzschild_csv(capsys):
    code, out, _ = _run(capsys, "sweep", "--family", "schwarzschild", "--params", '{"m": 1}',
                        "--r0", "10", "--ratio", "2", "--count", "10")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == f"# comlab {__version__}"
    cfg = json.loads(lines[1][len("# config "):])
    assert cfg["family"] == {"kind": "schwarzschild", "m": 1}
    assert "degree=47" in lines[2]
    rows = _csv_rows(out)
    assert len(rows) == 10
    for row in rows:
        r = float(row["r"])
        assert float(row["m_adm"]) == pytest.approx((1 + 0.5 / r) ** 3, rel=1e-11)
    assert '"class": "converged"' in lines[-1]


def test_sweep_is_bitwise_reproducible_across_thread_caps(capsys, monkeypatch, tmp_path):
    args = ["sweep", "--family", "graph_slice", "--params", '{"m": 1, "T": {"type": "divergent", "u": [1, 0, 0]}}',
            "--count", "12"]
    outs = []
    for n in ("1", "4"):
        monkeypatch.setenv("COMLAB_THREADS", n)
        path = tmp_path / f"out{n}.csv"
        assert main(args + ["--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    side = json.loads((tmp_path / "out1.csv.json").read_text())
    assert side["verdict"]["com"]["class"] == "oscillatory"


def test_sweep_json_footer_prescribed(capsys, tmp_path):
    params = tmp_path / "p.json"
    params.write_text(json.dumps({"kind": "graph_slice", "m": 1, "z": [1, 0, 0],
                                  "T": {"type": "prescribed", "corrected": True}}))
    code, out, _ = _run(capsys, "sweep", "--params", str(params), "--format", "json", "--count", "24")
    assert code == 0
    doc = json.loads(out)
    assert len(doc["rows"]) == 24
    v = doc["verdict"]["com"]
    assert v["class"] == "converged"
    assert np.allclose(v["params"]["value"], [1, 0, 0], atol=1e-3)
    assert doc["verdict"]["momentum"]["class"] == "converged"


@pytest.mark.xfail(strict=True, reason="with the stated amplitude the prescribed slice center limit is -z/2")
def test_sweep_prescribed_slice_value_is_z(capsys):
    code, out, _ = _run(capsys, "sweep", "--params",
                        '{"kind": "graph_slice", "m": 1, "z": [1, 0, 0], "T": {"type": "prescribed"}}',
                        "--format", "json", "--count", "24")
    v = json.loads(out)["verdict"]["com"]
    assert np.allclose(v["params"]["value"], [1, 0, 0], atol=1e-2)


def test_sweep_divergent_slice_is_oscillatory(capsys):
    code, out, _ = _run(capsys, "sweep", "--params",
                        '{"kind": "graph_slice", "m": 1, "T": {"type": "divergent", "u": [1, 0, 0]}}',
                        "--format", "json")
    assert code == 0
    assert json.loads(out)["verdict"]["com"]["class"] == "oscillatory"


@pytest.mark.parametrize(
    "argv",
    [
        ["sweep", "--family", "schwarzschild", "--params", '{"m": 1, "bogus": 2}'],
        ["sweep", "--family", "schwarzschild", "--params", "{oops"],
        ["sweep", "--family", "schwarzschild", "--params", '{"m": 1}', "--nphi", "7"],
        ["sweep", "--family", "schwarzschild", "--params", '{"m": 1}', "--ratio", "0.5"],
        ["sweep", "--family", "york_perturbed", "--params", '{"kind": "schwarzschild", "m": 1}'],
        ["sweep", "--params", '{"m": 1}'],
        ["newton", "--params", '{"kind": "prescribed", "u": [1, 0, 0]}'],
        ["verify", "nonsense"],
        ["frobnicate"],
    ],
)
def test_config_errors_exit_2(capsys, argv):
    code, _, err = _run(capsys, *argv)
    assert code == 2
    assert err


def test_bad_thread_cap_exit_2(capsys, monkeypatch):
    monkeypatch.setenv("COMLAB_THREADS", "0")
    code, _, err = _run(capsys, "sweep", "--family", "schwarzschild", "--params", '{"m": 1}', "--count", "2")
    assert code == 2 and "COMLAB_THREADS" in err


def test_domain_error_exit_3_names_radius(capsys):
    code, _, err = _run(capsys, "sweep", "--family", "schwarzschild", "--params", '{"m": 1}',
                        "--r0", "0.25", "--count", "3")
    assert code == 3
    assert "0.25" in err


def test_newton_command(capsys):
    code, out, _ = _run(capsys, "newton", "--params", '{"kind": "divergent_u", "u": [1, 0, 0]}', "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["verdict"]["com"]["class"] == "log_divergent"
    assert doc["rows"][0]["R"] == 100.0


def test_cmc_fit_command(capsys):
    code, out, _ = _run(capsys, "cmc-fit", "--family", "schwarzschild", "--params", '{"m": 1}',
                        "--r0", "20", "--ratio", "2", "--count", "3")
    assert code == 0
    rows = _csv_rows(out)
    assert len(rows) == 3
    for row in rows:
        assert np.linalg.norm([float(row[k]) for k in ("cx", "cy", "cz")]) <= 1e-6 * float(row["sigma"])


def test_verify_schwarzschild_passes(capsys):
    code, out, _ = _run(capsys, "verify", "schwarzschild")
    assert code == 0
    assert out.count("[PASS]") == 5 and "[FAIL]" not in out


def test_verify_prescribed_reports_failure(capsys):
    code, out, _ = _run(capsys, "verify", "prescribed")
    assert code == 1
    assert "[FAIL]  4 CoM at r=1e4" in out
