import numpy as np
import pytest

from ipnn_opt import io
from ipnn_opt.cli import build_parser, main
from ipnn_opt.network import from_weights
from ipnn_opt.numerics import random_complex
from ipnn_opt.reflect import phase_objective


@pytest.fixture(scope="module")
def teacher_files(tmp_path_factory):
    d = tmp_path_factory.mktemp("teacher")
    assert main(["make-teacher", "--dims", "8,8,4", "--samples", "400", "--seed", "1",
                 "--out-network", str(d / "t.json"), "--out-dataset", str(d / "d.json")]) == 0
    assert main(["optimize", "--input", str(d / "t.json"), "--output", str(d / "o.json"),
                 "--k-max", "64"]) == 0
    return d


def test_decompose_identity(tmp_path, capsys):
    io.write_matrix(tmp_path / "i.txt", np.eye(4))
    assert main(["decompose", "--input", str(tmp_path / "i.txt"), "--output", str(tmp_path / "n.json")]) == 0
    err = float(capsys.readouterr().out.split("Frobenius): ")[1].split()[0])
    assert err < 1e-12


def test_decompose_reports_objective(tmp_path, capsys, rng):
    io.write_matrix(tmp_path / "m.txt", random_complex(10, 16, rng))
    assert main(["decompose", "--input", str(tmp_path / "m.txt"), "--output", str(tmp_path / "n.json")]) == 0
    printed = float(capsys.readouterr().out.split("phase objective: ")[1])
    layer = io.read_network(tmp_path / "n.json").layers[0]
    assert printed == pytest.approx(phase_objective(layer), abs=1e-9)


def test_decompose_bad_file(tmp_path, capsys):
    (tmp_path / "bad.txt").write_text("ipnn-matrix 1\n1 1\nfoo bar\n")
    assert main(["decompose", "--input", str(tmp_path / "bad.txt"), "--output", str(tmp_path / "n.json")]) != 0
    assert "line 3" in capsys.readouterr().err


def test_optimize_defaults():
    args = build_parser().parse_args(["optimize", "--input", "a", "--output", "b"])
    assert (args.t_init, args.alpha, args.epoch, args.mode) == (10.0, 0.8, 2, "sa")


def test_optimize_modes_and_trace(teacher_files, tmp_path, capsys):
    d = teacher_files
    assert main(["optimize", "--input", str(d / "t.json"), "--output", str(tmp_path / "e.json"),
                 "--mode", "exhaustive", "--trace", str(tmp_path / "tr.csv")]) == 0
    out = capsys.readouterr().out
    assert "total:" in out and "% reduction" in out
    header, rows = io.read_results(tmp_path / "tr.csv")
    assert header == io.FAMILIES["sa_trace"] and len(rows) == 4


def test_optimize_budget_guard(tmp_path, capsys, rng):
    io.write_network(tmp_path / "big.json", from_weights([random_complex(21, 2, rng)]))
    assert main(["optimize", "--input", str(tmp_path / "big.json"), "--output", str(tmp_path / "o.json"),
                 "--mode", "exhaustive"]) != 0
    assert "exceeds" in capsys.readouterr().err


def test_fidelity_surface_command(tmp_path):
    assert main(["fidelity-surface", "--grid", "4", "--output", str(tmp_path / "f.csv")]) == 0
    header, rows = io.read_results(tmp_path / "f.csv")
    assert header == ("theta", "phi", "inv_fidelity") and len(rows) == 16
    assert float(rows[0][2]) == 1.0


def test_ranked_perturb_zero(teacher_files, tmp_path):
    d = teacher_files
    assert main(["ranked-perturb", "--network", str(d / "t.json"), "--dataset", str(d / "d.json"),
                 "--f-high", "0", "--f-low", "0", "--iterations", "3", "--output", str(tmp_path / "r.csv")]) == 0
    _, rows = io.read_results(tmp_path / "r.csv")
    assert len(rows) == 4 and all(float(r[6]) == 0.0 for r in rows)


def test_ranked_perturb_validation(teacher_files, tmp_path):
    d = teacher_files
    assert main(["ranked-perturb", "--network", str(d / "t.json"), "--dataset", str(d / "d.json"),
                 "--f-high", "60", "--f-low", "50", "--output", str(tmp_path / "r.csv")]) != 0


def test_robustness_rows(teacher_files, tmp_path):
    d = teacher_files
    assert main(["robustness", "--conventional", str(d / "t.json"), "--optimized", str(d / "o.json"),
                 "--dataset", str(d / "d.json"), "--sigma-rels", "0,0.05,0.1,0.2", "--iterations", "10",
                 "--output", str(tmp_path / "r.csv")]) == 0
    _, rows = io.read_results(tmp_path / "r.csv")
    assert [r[0] for r in rows].count("summary") == 4
    assert [r[0] for r in rows].count("detail") == 40
    assert float(rows[0][3]) == 0 and float(rows[0][5]) == 0


def test_robustness_weight_mismatch(teacher_files, tmp_path):
    d = teacher_files
    assert main(["make-teacher", "--dims", "8,8,4", "--samples", "40", "--seed", "2",
                 "--out-network", str(tmp_path / "x.json"), "--out-dataset", str(tmp_path / "xd.json")]) == 0
    assert main(["robustness", "--conventional", str(d / "t.json"), "--optimized", str(tmp_path / "x.json"),
                 "--dataset", str(d / "d.json"), "--output", str(tmp_path / "r.csv")]) != 0


def test_make_teacher_reports_accuracy(tmp_path, capsys):
    assert main(["make-teacher", "--samples", "2000", "--out-network", str(tmp_path / "t.json"),
                 "--out-dataset", str(tmp_path / "d.json")]) == 0
    assert float(capsys.readouterr().out.split(": ")[1]) >= 0.95


def test_make_teacher_zero_samples(tmp_path):
    assert main(["make-teacher", "--samples", "0", "--out-network", str(tmp_path / "t.json"),
                 "--out-dataset", str(tmp_path / "d.json")]) != 0


def test_histogram_command(teacher_files, tmp_path):
    assert main(["histogram", "--network", str(teacher_files / "o.json"), "--bins", "8",
                 "--output", str(tmp_path / "h.csv")]) == 0
    _, rows = io.read_results(tmp_path / "h.csv")
    assert len(rows) == 8
