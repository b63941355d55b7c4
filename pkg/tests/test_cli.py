"""End-to-end CLI runs against temporary directories."""
import json
import subprocess
import sys

import numpy as np
import pytest

from netrevive.cli import main
from netrevive.network import load_edge_list

BASE = {
    "network": {"type": "er", "n": 60, "k": 6.0, "seed": 3},
    "model": {"variant": "gene_normalized"},
    "control": {"u_s": 2.0, "v_s": 2.0, "t": 20.0},
    "numerics": {"dt": 0.02},
}


def write_config(tmp_path, overrides=None, name="run.json"):
    data = {**BASE, "output_dir": str(tmp_path / "out")}
    if overrides:
        for key, value in overrides.items():
            replace = key == "network" and "type" in value
            if isinstance(value, dict) and isinstance(data.get(key), dict) \
                    and not replace:
                data[key] = {**data[key], **value}
            else:
                data[key] = value
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return path


def run(cmd, cfg_path, *extra):
    return main([cmd, "--config", str(cfg_path), *extra])


class TestGen:
    def test_writes_graph_and_stats(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        assert run("gen", cfg) == 0
        out = tmp_path / "out"
        g, report = load_edge_list(out / "graph.edges")
        assert g.n == 60
        meta = json.loads((out / "graph.json").read_text())
        assert meta["n"] == 60
        assert meta["edges"] == g.num_edges
        assert meta["connected"] is True
        assert meta["degrees"]["mean"] == pytest.approx(g.k_avg)
        assert "graph.edges" in capsys.readouterr().out

    def test_seed_override_changes_graph(self, tmp_path):
        cfg = write_config(tmp_path)
        assert run("gen", cfg) == 0
        first = (tmp_path / "out" / "graph.edges").read_text()
        assert run("gen", cfg, "--seed", "4") == 0
        second = (tmp_path / "out" / "graph.edges").read_text()
        assert first != second
        meta = json.loads((tmp_path / "out" / "graph.json").read_text())
        assert meta["seed"] == 4

    def test_rejects_file_network(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {"network": {"type": "file",
                                                  "path": "x.edges"}})
        assert run("gen", cfg) == 2
        assert "er or ba" in capsys.readouterr().err

    def test_out_override(self, tmp_path):
        cfg = write_config(tmp_path)
        other = tmp_path / "elsewhere"
        assert run("gen", cfg, "--out", str(other)) == 0
        assert (other / "graph.edges").exists()


class TestLayers:
    def test_analytic_only(self, tmp_path):
        cfg = write_config(tmp_path)
        assert run("layers", cfg) == 0
        out = tmp_path / "out"
        lines = (out / "layers.csv").read_text().strip().split("\n")
        meta = json.loads((out / "layers.json").read_text())
        assert len(lines) == meta["num_layers"] + 1
        assert meta["consistent"] is True
        assert not (out / "layers_empirical.csv").exists()

    def test_with_graph_file(self, tmp_path):
        cfg = write_config(tmp_path)
        assert run("gen", cfg) == 0
        edges = str(tmp_path / "out" / "graph.edges")
        cfg2 = write_config(tmp_path,
                            {"network": {"type": "file", "path": edges}},
                            name="file.json")
        assert run("layers", cfg2) == 0
        out = tmp_path / "out"
        assert (out / "layers_empirical.csv").exists()
        lines = (out / "layers_compare.csv").read_text().strip().split("\n")
        header = lines[0].split(",")
        assert header[0] == "l"
        assert "d_analytic" in header and "d_rel_err" in header
        assert len(lines) >= 2
        meta = json.loads((out / "layers.json").read_text())
        assert meta["clamped_nodes"]


class TestPredict:
    def test_boundary_and_verdict(self, tmp_path):
        cfg = write_config(tmp_path, {
            "network": {"type": "er", "n": 500, "k": 10.0, "seed": 1},
            "control": {"u_s": 2.0, "v_s": 2.0, "t": 30.0},
            "numerics": {"dt": 0.02, "record_stride": 15.0},
            "boundary": {"n_rays": 4, "radial_tol": 0.01},
        })
        assert run("predict", cfg) == 0
        out = tmp_path / "out"
        meta = json.loads((out / "predict.json").read_text())
        assert meta["activated"] is True
        assert meta["num_layers"] == 3
        assert meta["mean_u"] > meta["threshold"]
        lines = (out / "boundary.csv").read_text().strip().split("\n")
        assert lines[0] == "angle,radius,u_s,v_s"
        assert len(lines) - 1 == meta["boundary_points"] >= 2
        traj = (out / "trajectory_reduced.csv").read_text().strip().split("\n")
        assert traj[0] == "t,layer,u,v"
        # 3 record marks x (3 layers + control node)
        assert len(traj) == 1 + 3 * 4


class TestSimulate:
    def test_summary_and_csvs(self, tmp_path):
        cfg = write_config(tmp_path, {
            "network": {"type": "er", "n": 80, "k": 8.0, "seed": 2},
            "numerics": {"dt": 0.02, "record_stride": 10.0},
        })
        assert run("simulate", cfg) == 0
        out = tmp_path / "out"
        meta = json.loads((out / "simulate.json").read_text())
        assert meta["n"] == 80
        assert len(meta["clamped_nodes"]) == 1
        scatter = (out / "scatter.csv").read_text().strip().split("\n")
        assert scatter[0] == "node,degree,layer,u,v"
        assert len(scatter) == 81
        assert (out / "trajectory.csv").exists()

    def test_explicit_nodes(self, tmp_path):
        cfg = write_config(tmp_path, {
            "network": {"type": "er", "n": 80, "k": 8.0, "seed": 2},
            "control": {"u_s": 2.0, "v_s": 2.0, "t": 10.0,
                        "nodes": [7, 3]},
        })
        assert run("simulate", cfg) == 0
        meta = json.loads(
            (tmp_path / "out" / "simulate.json").read_text())
        assert meta["clamped_nodes"] == [3, 7]

    def test_blowup_exit_code(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {
            "model": {"variant": "gene",
                      "parameters": {"B1": 2000.0, "B2": 2000.0}},
            "numerics": {"dt": 0.05},
        })
        assert run("simulate", cfg) == 3
        assert "blow-up" in capsys.readouterr().err


class TestSweep:
    def sweep_config(self, tmp_path, **extra):
        return write_config(tmp_path, {
            "network": {"type": "er", "n": 40, "k": 6.0, "seed": 8},
            "control": {"u_s": 0.0, "v_s": 0.0, "t": 15.0},
            "sweep": {"u": [0.0, 2.5], "v": [0.0, 2.5],
                      "reps": 2, "master_seed": 5, "workers": 1},
            **extra,
        })

    def test_grid_csv(self, tmp_path, capsys):
        cfg = self.sweep_config(tmp_path)
        assert run("sweep", cfg) == 0
        out = tmp_path / "out"
        lines = (out / "sweep.csv").read_text().strip().split("\n")
        assert lines[0] == "u_s,v_s,fraction,failures"
        assert len(lines) == 5
        first = lines[1].split(",")
        assert float(first[0]) == 0.0 and float(first[2]) == 0.0
        meta = json.loads((out / "sweep.json").read_text())
        assert meta["runs"] == 8
        assert meta["wall_seconds"] > 0
        assert "run 8/8" in capsys.readouterr().out

    def test_deterministic(self, tmp_path):
        cfg = self.sweep_config(tmp_path)
        assert run("sweep", cfg) == 0
        first = (tmp_path / "out" / "sweep.csv").read_bytes()
        assert run("sweep", cfg) == 0
        assert (tmp_path / "out" / "sweep.csv").read_bytes() == first


class TestCompare:
    def test_missing_inputs(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        assert run("compare", cfg) == 4
        assert "run sweep and predict first" in capsys.readouterr().err

    def test_pipeline_agreement(self, tmp_path):
        cfg = write_config(tmp_path, {
            "network": {"type": "er", "n": 300, "k": 10.0, "seed": 1},
            "control": {"u_s": 0.0, "v_s": 0.0, "t": 30.0},
            "sweep": {"u": [0.0, 1.0, 2.0, 3.0], "v": [0.0, 1.0, 2.0, 3.0],
                      "reps": 2, "master_seed": 17, "workers": 1},
            "boundary": {"n_rays": 4, "radial_tol": 0.01},
        })
        assert run("predict", cfg) == 0
        assert run("sweep", cfg) == 0
        assert run("compare", cfg) == 0
        out = tmp_path / "out"
        meta = json.loads((out / "compare.json").read_text())
        assert meta["far_cells"] + meta["near_cells"] == 16
        assert meta["total_cells"] == 16
        if meta["far_cells"]:
            assert 0.0 <= meta["agreement"] <= 1.0
            assert meta["agreement"] >= 0.7
        lines = (out / "compare.csv").read_text().strip().split("\n")
        assert lines[0].startswith("u_s,v_s,fraction,majority,predicted")
        assert len(lines) == 17


class TestErrors:
    def test_bad_config_exit(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({**BASE, "unknown_block": 1}))
        assert main(["gen", "--config", str(path)]) == 2
        assert "unknown" in capsys.readouterr().err

    def test_missing_config_is_io(self, tmp_path, capsys):
        assert main(["gen", "--config", str(tmp_path / "nope.json")]) == 4
        assert "I/O error" in capsys.readouterr().err

    def test_bad_threads(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        assert run("gen", cfg, "--threads", "0") == 2

    def test_nodes_out_of_range(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {"control": {"nodes": [999]}})
        assert run("simulate", cfg) == 2
        assert "999" in capsys.readouterr().err


def test_console_entry_point(tmp_path):
    cfg = write_config(tmp_path)
    proc = subprocess.run(
        [sys.executable, "-m", "netrevive.cli", "gen",
         "--config", str(cfg)],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert "graph.edges" in proc.stdout
