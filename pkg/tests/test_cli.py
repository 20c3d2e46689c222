import io
import json
import math

import pytest

from moebius.cli import main


def run(capsys, argv, stdin=None, monkeypatch=None):
    if stdin is not None:
        monkeypatch.setattr("sys.stdin", io.StringIO(stdin))
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def summary(csv: str) -> dict:
    line = next(l for l in csv.splitlines() if l.startswith("# summary"))
    fields = dict(kv.split("=", 1) for kv in line.split(",")[1:])
    return {k: (v if k == "kind" else float(v)) for k, v in fields.items()}


def test_crt_two_infinities(capsys, monkeypatch):
    code, out, _ = run(capsys, ["crt"], '[[0,0,0],[1,0.5,0.2],null,"inf"]', monkeypatch)
    assert code == 0
    assert out.strip() == "0:0.5:0.5 boundary"


def test_crt_euclidean_concyclic_is_boundary(capsys, monkeypatch):
    code, out, _ = run(capsys, ["crt", "--model", "euclid"], "[[1,0],[0,1],[-1,0],[0,-1]]", monkeypatch)
    assert code == 0
    assert out.split()[-1] == "boundary"
    a, b, c = map(float, out.split()[0].split(":"))
    assert (a, b, c) == pytest.approx((0.25, 0.5, 0.25), abs=1e-15)


def test_crt_generic_heisenberg_quadruple_is_interior(capsys, monkeypatch):
    quad = "[[0.3,1,0.2],[1,-0.5,0.7],[-0.8,0.1,-0.4],[0.5,0.9,1.1]]"
    code, out, _ = run(capsys, ["crt"], quad, monkeypatch)
    assert code == 0 and out.split()[-1] == "interior"


def test_crt_json_output(capsys, monkeypatch, tmp_path):
    path = tmp_path / "crt.json"
    code, _, _ = run(capsys, ["crt", "--out", str(path)], '[[0,0,0],[1,0,0],null,null]', monkeypatch)
    assert code == 0
    obj = json.loads(path.read_text())
    assert obj["triple"] == [0.0, 0.5, 0.5] and obj["class"] == "boundary"


def test_inadmissible_input_exits_2(capsys, monkeypatch):
    code, _, err = run(capsys, ["crt"], "[[0,0,0],[0,0,0],[0,0,0],[1,0,0]]", monkeypatch)
    assert code == 2 and "Inadmissible" in err


def test_bad_json_exits_2(capsys, monkeypatch):
    code, _, _ = run(capsys, ["crt"], "not json", monkeypatch)
    assert code == 2


def test_unknown_flag_exits_2(capsys):
    assert main(["crt", "--bogus"]) == 2
    assert main(["check", "--onl", "eq:koranyi_gauge"]) == 2


def test_unknown_suite_exits_2(capsys):
    code, _, _ = run(capsys, ["check", "--only", "lem:nope"])
    assert code == 2


def test_invert_origin_goes_to_infinity(capsys, monkeypatch, tmp_path):
    path = tmp_path / "inv.json"
    code, _, _ = run(capsys, ["invert", "--out", str(path)], "[[0,0,0],[0,0,0.25]]", monkeypatch)
    assert code == 0
    images = json.loads(path.read_text())["images"]
    assert images[0] is None
    # the vertical point (0, h) goes to (0, -1/(16 h))
    assert images[1] == pytest.approx([0.0, 0.0, -0.25], abs=1e-15)


def test_invert_csv_keeps_rows_aligned(capsys, monkeypatch):
    code, out, _ = run(capsys, ["invert"], "[[0,0,0],[0,0,0.25]]", monkeypatch)
    assert code == 0
    assert out.splitlines() == ["x1,x2,x3", "inf,inf,inf", "0,0,-0.25"]


def test_circle_unit_radius(capsys):
    code, out, _ = run(capsys, ["circle", "--unit", "--samples", "16"])
    assert code == 0
    s = summary(out)
    assert s["kind"] == "R"
    assert s["max_unit_radius_error"] <= 1e-9
    assert s["ptolemy_residual"] <= 1e-9


def test_lift_unit_square(capsys):
    code, out, _ = run(capsys, ["lift", "--square", "1"])
    assert code == 0
    s = summary(out)
    assert s["displacement"] == pytest.approx(2.0, abs=1e-12)
    assert s["lifting_constant"] == pytest.approx(2.0, abs=1e-12)


def test_zigzag_orthogonal_speed(capsys):
    code, out, _ = run(capsys, ["zigzag", "--dirs", "1,i", "--steps", "1,1", "--samples", "5"])
    assert code == 0
    s = summary(out)
    assert s["speed"] == pytest.approx(math.sqrt(2) / 2, abs=1e-3)
    assert len([l for l in out.splitlines() if not l.startswith("#")]) == 6


def test_zigzag_step_mismatch_exits_2(capsys):
    code, _, _ = run(capsys, ["zigzag", "--dirs", "1,i", "--steps", "1"])
    assert code == 2


def test_check_single_suite(capsys):
    code, out, _ = run(capsys, ["check", "--k", "2", "--only", "prop:comp_dist_function"])
    assert code == 0
    lines = [l for l in out.splitlines() if l.startswith(("PASS", "FAIL"))]
    assert len(lines) == 1 and "pro:comp_dist_function" in lines[0]


def test_check_failure_exits_1(capsys):
    code, out, _ = run(capsys, ["check", "--k", "2", "--only", "eq:busemann_flat", "--tol", "0"])
    assert code == 1 and out.startswith("FAIL")


def test_check_list(capsys):
    code, out, _ = run(capsys, ["check", "--list"])
    assert code == 0 and "lem:mean_geometric" in out


def test_seed_is_reproducible(capsys):
    argv = ["check", "--k", "2", "--seed", "7", "--only", "eq:koranyi_gauge,lem:xi_norm"]
    first = run(capsys, argv)[1]
    second = run(capsys, argv)[1]
    assert first == second


def test_seed_env_variable(capsys, monkeypatch, tmp_path):
    argv = ["check", "--k", "2", "--only", "eq:koranyi_gauge"]
    monkeypatch.setenv("MOEBIUS_SEED", "7")
    run(capsys, argv + ["--out", str(tmp_path / "env.json")])
    monkeypatch.delenv("MOEBIUS_SEED")
    run(capsys, argv + ["--seed", "7", "--out", str(tmp_path / "flag.json")])
    run(capsys, argv + ["--seed", "8", "--out", str(tmp_path / "other.json")])
    env, flag, other = (json.loads((tmp_path / f).read_text()) for f in ("env.json", "flag.json", "other.json"))
    assert env == flag != other


def test_help_mentions_suite_tags(capsys):
    assert main(["lift", "--help"]) == 0
    assert "pro:lift_const_2" in capsys.readouterr().out


def test_out_csv_and_bad_extension(capsys, tmp_path):
    path = tmp_path / "square.csv"
    assert main(["lift", "--square", "2", "--out", str(path)]) == 0
    assert path.read_text().startswith("vertex,")
    assert summary(path.read_text())["displacement"] == pytest.approx(4.0, abs=1e-12)
    assert main(["lift", "--square", "2", "--out", str(tmp_path / "x.txt")]) == 2
