import json

import pytest

from robspan.cli import main
from robspan.geometry import read_graph, write_vertex_set
from robspan.metrics import RobustnessCertificate


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize(
    "argv, edges",
    [
        (["build", "g2x", "--n", 8], 17),
        (["build", "grid", "--side", 3], 12),
        (["build", "gf", "--preset", "kpow", "--epsilon", 1, "--n", 20], 57),
    ],
)
def test_build_sidecar(tmp_path, capsys, argv, edges):
    out = tmp_path / "g.txt"
    code, _, _ = run(capsys, *argv, "--out", out)
    assert code == 0
    report = json.loads((tmp_path / "g.txt.json").read_text())
    assert report["edges"] == edges
    assert read_graph(out)[1].m == edges


def test_build_robust_dd_writes_csv(tmp_path, capsys):
    out = tmp_path / "r.txt"
    code, _, _ = run(capsys, "build", "robust-dd", "--n", 40, "--audit", "--out", out)
    assert code == 0
    rep = json.loads((tmp_path / "r.txt.json").read_text())
    assert rep["measured_stretch"] <= rep["stretch_bound"]
    assert (tmp_path / "r.txt.csv").read_text().startswith("n,d,tau_measured,stretch_bound")


@pytest.mark.parametrize(
    "argv",
    [["build", "nope", "--n", 3], ["build", "gf", "--preset", "bad", "--n", 3], ["build", "g2x"], ["frobnicate"]],
)
def test_usage_errors(capsys, argv):
    try:
        code = main([str(a) for a in argv])
    except SystemExit as exc:  # argparse-level errors
        code = exc.code
    assert code == 1


@pytest.fixture
def path5(tmp_path, capsys):
    from robspan.geometry import GeomGraph, PointSet, write_graph

    V = PointSet.line(5)
    write_graph(tmp_path / "p.txt", V, GeomGraph(V, ((0, 1), (1, 2), (2, 3), (3, 4))))
    return tmp_path / "p.txt"


def test_certify_oracle(tmp_path, capsys, path5):
    write_vertex_set(tmp_path / "s", [2])
    code, out, _ = run(capsys, "certify", path5, tmp_path / "s", "--t", 1)
    assert code == 0
    cert = RobustnessCertificate.from_text(out)
    assert cert.size == 3 and cert.minimal


def test_certify_empty(tmp_path, capsys, path5):
    write_vertex_set(tmp_path / "s", [])
    code, out, _ = run(capsys, "oracle", path5, tmp_path / "s")
    assert code == 0 and RobustnessCertificate.from_text(out).S_plus == ()


def test_certify_failure_exit_two(tmp_path, capsys, path5):
    write_vertex_set(tmp_path / "s", [2])
    code, _, err = run(capsys, "certify", path5, tmp_path / "s", "--producer", "file", "--splus", tmp_path / "s")
    assert code == 2 and "u=" in err and "stretch=" in err


def test_certify_builder_g2x(tmp_path, capsys):
    run(capsys, "build", "g2x", "--n", 8, "--out", tmp_path / "g")
    write_vertex_set(tmp_path / "s", [3])
    code, out, _ = run(
        capsys, "certify", tmp_path / "g", tmp_path / "s", "--producer", "builder", "--construction", "g2x",
        "--out", tmp_path / "c",
    )
    assert code == 0
    assert RobustnessCertificate.from_text((tmp_path / "c").read_text()).verified


def test_certify_builder_mismatch(tmp_path, capsys, path5):
    write_vertex_set(tmp_path / "s", [2])
    code, _, _ = run(capsys, "certify", path5, tmp_path / "s", "--producer", "builder", "--construction", "g2x")
    assert code == 1


def test_certify_retries_exhausted(tmp_path, capsys):
    run(capsys, "build", "g2x", "--n", 64, "--out", tmp_path / "g")
    write_vertex_set(tmp_path / "s", range(0, 64, 2))
    code, _, _ = run(
        capsys, "certify", tmp_path / "g", tmp_path / "s", "--producer", "builder", "--construction", "g2x",
        "--retries", 1,
    )
    assert code in (0, 3)


def test_attack_and_probe(tmp_path, capsys):
    run(capsys, "build", "g2x", "--n", 64, "--out", tmp_path / "g")
    code, out, err = run(capsys, "attack", tmp_path / "g", "--kind", "interval_endpoints", "--k", 4, "--i", 32)
    assert code == 0 and "refused" in err
    code, out, _ = run(capsys, "attack", tmp_path / "g", "--k", 5, "--seed", 2)
    assert code == 0 and len(out.split()) == 5
    code, out, _ = run(
        capsys, "probe", tmp_path / "g", "--ks", "2,3", "--construction", "g2x", "--census", "--preset", "double",
    )
    assert code == 0 and out.startswith("kind,k,seed")
    assert "class,lo,hi,edges,flagged" in out


def test_census_and_magnification(tmp_path, capsys, path5):
    code, out, _ = run(capsys, "census", path5, "--preset", "double", "--t", 1)
    assert code == 0 and out.splitlines()[1].startswith("0,")
    code, out, _ = run(capsys, "magnification", path5, "--s-max", 2)
    assert out == "s,min_neighborhood\n1,1\n2,1\n"


def test_sweep_deterministic(tmp_path, capsys, monkeypatch):
    args = ["sweep", "g2x", "--n", "64,128", "--k", "2,4", "--trials", 2, "--seed", 5]
    run(capsys, *args, "--out", tmp_path / "a.csv")
    monkeypatch.setenv("ROBSPAN_THREADS", "3")
    run(capsys, *args, "--out", tmp_path / "b.csv")
    a = (tmp_path / "a.csv").read_bytes()
    assert a == (tmp_path / "b.csv").read_bytes()
    assert a.startswith(b"row_type,construction,n,k,trial,seed,edges,")
