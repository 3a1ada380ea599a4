import json
import math
import subprocess
import sys

import pytest

from chanent import channel_io
from chanent import channels as ch
from chanent import entropies as en
from chanent import samplers
from chanent.cli import main


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_entropy_cond_vn_swap(capsys):
    code, out, _ = _run(capsys, "entropy", "cond-vn", "--channel", "swap:d=2")
    rep = json.loads(out)
    assert code == 0
    assert math.isclose(rep["value"], -3.0, abs_tol=1e-9)
    assert rep["method"] == "closed_form" and rep["bound_kind"] == "exact"


def test_entropy_cond_min_identity(capsys):
    code, out, _ = _run(capsys, "entropy", "cond-min", "--channel", "id2x2")
    assert code == 0 and math.isclose(json.loads(out)["value"], -1.0, abs_tol=1e-6)


def test_entropy_cond_geo_within_bounds(capsys):
    code, out, _ = _run(capsys, "entropy", "cond-geo", "--alpha-ell", "2", "--channel", "mix:u=cnot:p=0.5")
    v = json.loads(out)["value"]
    lo, hi = en.cond_vn_bounds(ch.cnot().dims)
    assert code == 0 and math.isfinite(v) and lo - 1e-9 <= v <= hi + 1e-9


@pytest.mark.parametrize("functional,target", [("ns", -1.0), ("mi", 4.0), ("mi-max", 4.0), ("cond-max", -3.0)])
def test_other_functionals(capsys, functional, target):
    code, out, _ = _run(capsys, "entropy", functional, "--channel", "swap:d=2")
    assert code == 0 and math.isclose(json.loads(out)["value"], target, abs_tol=1e-4)


def test_cmi(capsys):
    code, out, _ = _run(capsys, "entropy", "cmi", "--channel", "tensor(swap,id2)")
    assert code == 0 and abs(json.loads(out)["value"]) < 1e-9


def test_causality(capsys):
    code, out, _ = _run(capsys, "causality", "check", "--channel", "swap:d=2", "--from", "A", "--to", "B")
    assert code == 0 and json.loads(out)["verdict"] == "signaling"
    code, out, _ = _run(capsys, "causality", "check", "--channel", "tensor(id2,depol:p=0.5)", "--from", "A", "--to", "B")
    assert code == 0 and json.loads(out)["verdict"] == "semicausal"


def test_validation_error_exit_code(capsys):
    code, out, err = _run(capsys, "entropy", "cond-vn", "--channel", "nosuch")
    obj = json.loads(err)
    assert code == 2 and out == ""
    assert set(obj) == {"code", "message", "defect_norms"} and obj["code"] == 2


def test_non_covariant_reports_defect(capsys, tmp_path, rng):
    c = ch.tensor(samplers.random_channel(2, 2, rng), samplers.random_channel(2, 2, rng))
    path = tmp_path / "c.json"
    path.write_text(json.dumps(channel_io.channel_to_json(c)))
    code, _, err = _run(capsys, "entropy", "cond-vn", "--channel", str(path))
    obj = json.loads(err)
    assert code == 2 and obj["defect_norms"]["covariance"] > 0


def test_solver_error_exit_code(capsys, monkeypatch):
    from chanent.errors import SolverError

    def boom(*a, **k):
        raise SolverError("did not converge", "maxiter")

    monkeypatch.setattr(en, "cond_min_sdp", boom)
    code, _, err = _run(capsys, "entropy", "cond-min", "--channel", "id2x2")
    assert code == 3 and json.loads(err)["code"] == 3


def test_bad_grid(capsys):
    code, _, err = _run(capsys, "figure", "vn-swap-cnot", "--p-grid", "0:1:0")
    assert code == 2 and json.loads(err)["code"] == 2


def test_figure_vn_rows(capsys, monkeypatch):
    monkeypatch.setenv("CHANENT_THREADS", "1")
    code, out, _ = _run(capsys, "figure", "vn-swap-cnot", "--p-grid", "0:1:11")
    assert code == 0
    assert "\r" not in out
    lines = out.splitlines()
    assert lines[0] == "p,channel,value"
    rows = [l.split(",") for l in lines[1:]]
    assert len(rows) == 33
    vals = {(r[0], r[1]): float(r[2]) for r in rows}
    assert vals[("1", "swap")] == -3.0 and vals[("1", "cnot")] == -2.0
    assert all(vals[(p, "identity")] == -1.0 for p, _ in vals)
    lo, hi = en.cond_vn_bounds(ch.swap(2).dims)
    assert all(lo - 1e-9 <= v <= hi + 1e-9 for v in vals.values())
    for r in rows:
        assert len(r[2].lstrip("-").replace(".", "").lstrip("0")) <= 12


def test_figure_default_grid_has_101_points(capsys, monkeypatch):
    monkeypatch.setenv("CHANENT_THREADS", "1")
    code, out, _ = _run(capsys, "figure", "vn-swap-cnot")
    assert code == 0 and len(out.splitlines()) == 1 + 3 * 101


def test_figure_sdp_ordering_and_endpoint(capsys, monkeypatch):
    monkeypatch.setenv("CHANENT_THREADS", "1")
    code, out, _ = _run(capsys, "figure", "sdp-swap", "--p-grid", "0:1:3")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "p,functional,alpha,value"
    rows = [l.split(",") for l in lines[1:]]
    assert len(rows) == 12
    by_p = {}
    for p, f, a, v in rows:
        by_p.setdefault(p, []).append(float(v))
    for vs in by_p.values():
        assert all(b >= a - 1e-5 for a, b in zip(vs, vs[1:]))
    assert all(math.isclose(v, -1.0, abs_tol=1e-6) for v in by_p["0"])


def test_figure_is_deterministic_and_parallel_safe(capsys, monkeypatch, tmp_path):
    outs = []
    for threads in ("1", "1", "2"):
        monkeypatch.setenv("CHANENT_THREADS", threads)
        path = tmp_path / f"f{len(outs)}.csv"
        assert main(["figure", "sdp-cnot", "--p-grid", "0.2:0.8:3", "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1] == outs[2]


def test_figure_json(capsys, monkeypatch):
    monkeypatch.setenv("CHANENT_THREADS", "1")
    code, out, _ = _run(capsys, "figure", "vn-swap-cnot", "--p-grid", "0:1:2", "--format", "json")
    rows = json.loads(out)
    assert code == 0 and rows[0].keys() == {"p", "channel", "value"}


def test_suite_fast_exit_zero(capsys):
    code, out, _ = _run(capsys, "suite", "run", "--tier", "fast")
    rep = json.loads(out)
    assert code == 0 and rep["passed"] and len(rep["criteria"]) == 12


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "chanent", "entropy", "cond-vn", "--channel", "cnot"],
                       capture_output=True, text=True, check=False)
    assert r.returncode == 0 and math.isclose(json.loads(r.stdout)["value"], -2.0, abs_tol=1e-9)
