import json

import numpy as np
import pytest

from pdakit.cli import main
from pdakit.fileio import load_config, read_table
from pdakit.grid import GridField
from pdakit.pareto import write_points_csv


@pytest.fixture
def points_file(tmp_path, rng):
    p = tmp_path / "pts.csv"
    write_points_csv(p, rng.random((120, 2)))
    return p


def test_sort_subcommand(tmp_path, points_file):
    out = tmp_path / "sorted.csv"
    assert main(["sort", "--input", str(points_file), "--output", str(out)]) == 0
    table = read_table(out)
    assert table.header == ["depth", "front_index", "normalized_index"]
    assert len(table.rows) == 120
    out2 = tmp_path / "sorted_bf.csv"
    main(["sort", "--input", str(points_file), "--output", str(out2),
          "--bruteforce"])
    assert read_table(out2).column("depth") == table.column("depth")


def test_solver_chain(tmp_path):
    f = tmp_path / "f.bin"
    GridField.constant(1.0, 40).save(f)
    u, v, w = (tmp_path / n for n in ("u.bin", "v.bin", "w.bin"))
    assert main(["solve-hje", "--f", str(f), "--output", str(u)]) == 0
    assert main(["solve-v", "--u", str(u), "--f", str(f),
                 "--output", str(v)]) == 0
    assert main(["solve-w", "--u", str(u), "--v", str(v), "--f", str(f),
                 "--output", str(w)]) == 0
    wf = GridField.load(w)
    assert float(wf.interpolate(np.array([0.5, 0.5]))) == pytest.approx(0.5,
                                                                        abs=0.05)


def test_density_subcommand(tmp_path, points_file):
    out = tmp_path / "dens.bin"
    pre = tmp_path / "pre.bin"
    assert main(["density", "--dyads", str(points_file), "-K", "20",
                 "--output", str(out), "--preconditioned", str(pre)]) == 0
    assert (tmp_path / "dens.bin.json").exists()
    field = GridField.load(pre)
    assert field.values.min() >= (1 / 20) ** 2


def test_gen_stream_roc_pipeline(tmp_path):
    jsonl = tmp_path / "s.jsonl"
    assert main(["gen", "--generator", "uniform", "--steps", "200",
                 "--seed", "4", "--output", str(jsonl)]) == 0
    out_dir = tmp_path / "run"
    assert main(["stream", "--input", str(jsonl), "--T", "140", "-K", "25",
                 "--k", "3,4", "--evaluate", "--out-dir", str(out_dir)]) == 0
    verdicts = read_table(out_dir / "verdicts.csv")
    assert len(verdicts.rows) == 60
    roc_out = tmp_path / "roc.csv"
    assert main(["roc", "--scores", str(out_dir / "scores.csv"),
                 "--output", str(roc_out)]) == 0
    assert any(m.startswith("auc=") for m in read_table(roc_out).meta)


def test_stream_generator_with_config(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "experiment": "uniform", "steps": 240, "T": 120, "K": 25,
        "k_counts": [3, 4], "trials": 1, "seed": 2,
    }))
    out_dir = tmp_path / "run"
    assert main(["stream", "--config", str(cfg), "--evaluate", "--exact",
                 "--out-dir", str(out_dir)]) == 0
    scores = read_table(out_dir / "scores.csv")
    assert "nu_exact" in scores.header
    assert (out_dir / "verdicts_exact.csv").exists()


def test_converge_subcommands(tmp_path):
    vn = tmp_path / "vn.csv"
    assert main(["converge-vn", "--n-values", "200,400,800", "--trials", "1",
                 "--output", str(vn)]) == 0
    assert len(read_table(vn).rows) == 3
    hje = tmp_path / "hje.csv"
    assert main(["converge-hje", "--n", "50000", "--K-values", "10,20",
                 "--output", str(hje)]) == 0
    table = read_table(hje)
    assert table.header[0] == "K"
    assert len(table.rows) == 2


def test_timing_subcommand(tmp_path):
    out = tmp_path / "timing.csv"
    assert main(["timing", "--T-values", "40,80", "-K", "20", "--steps", "4",
                 "--output", str(out)]) == 0
    table = read_table(out)
    assert table.header == ["T", "pde_step_s", "exact_step_s"]
    assert all(float(r[1]) > 0 and float(r[2]) > 0 for r in table.rows)


def test_load_config_toml(tmp_path):
    try:
        import tomli  # noqa: F401
    except ImportError:
        pytest.skip("no TOML backend on this interpreter")
    p = tmp_path / "cfg.toml"
    p.write_text('T = 100\nk_counts = [6, 7]\n')
    cfg = load_config(p)
    assert cfg == {"T": 100, "k_counts": [6, 7]}
