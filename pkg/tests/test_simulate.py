import csv

import numpy as np
import pytest

from netrevive.dynamics import (
    DEFAULT_PARAMS,
    activation_threshold,
    get_model,
    high_state,
)
from netrevive.errors import ConfigError, NumericalBlowupError
from netrevive.network import Graph, NetworkRecipe, bfs_shells, generate_er
from netrevive.simulate import (
    ControlSpec,
    choose_clamped_nodes,
    integrate_full,
    judge_activation,
    run_seeds,
    shell_average,
    sweep_grid,
    write_activity_scatter_csv,
    write_sweep_csv,
    write_trajectory_csv,
)

GENE_N = get_model("gene_normalized")
GENE = get_model("gene")
MUT_N = get_model("mutualism_normalized")
GP = DEFAULT_PARAMS["gene"]
MP = DEFAULT_PARAMS["mutualism"]


def star(n):
    return Graph.from_edge_array(n, [(0, i) for i in range(1, n)])


class TestChooseClamped:
    def test_single(self):
        g = generate_er(50, 5.0, seed=0)
        assert choose_clamped_nodes(g, 17, 1).tolist() == [17]

    def test_adjacent_set_star(self):
        g = star(6)
        assert choose_clamped_nodes(g, 0, 3).tolist() == [0, 1, 2]

    def test_adjacent_set_leaf(self):
        g = star(6)
        # leaf 4, then the center, then lowest-id other leaf
        assert choose_clamped_nodes(g, 4, 3).tolist() == [0, 1, 4]

    def test_too_many(self):
        g = star(4)
        with pytest.raises(ConfigError):
            choose_clamped_nodes(g, 0, 5)


class TestIntegrateFull:
    def test_dead_network_stays_dead(self):
        g = generate_er(80, 8.0, seed=1)
        res = integrate_full(g, GENE_N, GP, ControlSpec(0.0, 0.0, 5.0))
        assert not res.activated
        assert res.mean_u == 0.0
        assert res.converged  # zero state has zero derivative

    def test_clamp_held_exactly(self):
        g = generate_er(80, 8.0, seed=2)
        res = integrate_full(g, GENE_N, GP, ControlSpec(2.0, 2.0, 3.0),
                             seed_node=11)
        assert res.clamped_nodes.tolist() == [11]
        assert res.u[11] == 2.0 and res.v[11] == 2.0

    def test_revival_small_er(self):
        g = generate_er(100, 10.0, seed=3)
        res = integrate_full(g, GENE_N, GP, ControlSpec(2.0, 2.0, 60.0))
        assert res.activated
        hs = high_state(GENE_N, GP, 10.0)
        # all free nodes settle on the active state
        free = np.ones(g.n, bool)
        free[res.clamped_nodes] = False
        assert np.allclose(res.u[free], hs.u, rtol=0.05)
        assert res.converged
        assert res.steps_done < 6000  # early exit well before T

    def test_mutualism_runs(self):
        g = generate_er(60, 8.0, seed=4)
        res = integrate_full(g, MUT_N, MP, ControlSpec(1.5, 1.8, 10.0))
        assert np.all(np.isfinite(res.u))
        assert res.u[res.clamped_nodes[0]] == 1.5

    def test_release_phase_holds_active_state(self):
        g = generate_er(100, 10.0, seed=5)
        ctl = ControlSpec(2.0, 2.0, 40.0, post_release_time=20.0)
        res = integrate_full(g, GENE_N, GP, ctl)
        assert res.activated
        hs = high_state(GENE_N, GP, 10.0)
        # after release even the controlled node relaxes to the high state
        assert np.allclose(res.u, hs.u, rtol=0.05)

    def test_weak_clamp_does_not_activate(self):
        g = generate_er(100, 10.0, seed=6)
        res = integrate_full(g, GENE_N, GP, ControlSpec(0.05, 0.05, 30.0))
        assert not res.activated
        assert res.mean_u < 0.1

    def test_initial_state_passthrough(self):
        g = generate_er(50, 6.0, seed=7)
        hs = high_state(GENE_N, GP, 6.0)
        u0 = np.full(g.n, hs.u)
        v0 = np.full(g.n, hs.v)
        res = integrate_full(g, GENE_N, GP, ControlSpec(0.0, 0.0, 0.0,
                                                        post_release_time=5.0),
                             u0=u0, v0=v0, clamped_nodes=np.array([], int))
        # started active with no clamp: stays active
        assert res.activated

    def test_dt_guard(self):
        g = star(5)
        with pytest.raises(ConfigError):
            integrate_full(g, GENE, GP, ControlSpec(1, 1, 1.0), dt=0.1)
        with pytest.raises(ConfigError):
            integrate_full(g, GENE, GP, ControlSpec(1, 1, 1.0), dt=0.0)

    def test_control_validation(self):
        g = star(5)
        with pytest.raises(ConfigError):
            integrate_full(g, GENE, GP, ControlSpec(-1.0, 0.0, 1.0))
        with pytest.raises(ConfigError):
            integrate_full(g, GENE, GP, ControlSpec(1.0, 1.0, -2.0))
        with pytest.raises(ConfigError):
            integrate_full(g, GENE, GP, ControlSpec(1.0, 1.0, 1.0,
                                                    num_clamped=0))

    def test_blowup_detected(self):
        g = generate_er(40, 5.0, seed=8)
        stiff = {"B1": 2000.0, "B2": 2000.0}
        with pytest.raises(NumericalBlowupError) as exc:
            integrate_full(g, GENE, stiff, ControlSpec(2.0, 2.0, 5.0),
                           u0=np.ones(g.n), v0=np.ones(g.n), dt=0.05)
        assert exc.value.t is not None

    def test_trajectory_recording(self):
        g = generate_er(100, 10.0, seed=9)
        times = [0.0, 10.0, 30.0, 60.0]
        res = integrate_full(g, GENE_N, GP, ControlSpec(2.0, 2.0, 60.0),
                             record_times=times)
        traj = res.trajectory
        assert traj.times.tolist() == times
        shells = bfs_shells(g, res.clamped_nodes)
        assert traj.layer_u.shape == (4, shells.num_layers + 1)
        # layer 0 is the clamped node itself, pinned at u_s throughout
        assert np.all(traj.layer_u[:, 0] == 2.0)
        # network starts dead everywhere else
        assert np.all(traj.layer_u[0, 1:] == 0.0)
        # final record equals the final state
        assert traj.mean_u[-1] == res.mean_u

    def test_trajectory_times_snap_to_steps(self):
        g = generate_er(30, 6.0, seed=14)
        res = integrate_full(g, GENE, GP, ControlSpec(1.0, 1.0, 1.0),
                             record_times=[0.004, 0.5, 2.0])
        # 0.004 snaps to step 0, 2.0 clips to t_end
        assert res.trajectory.times.tolist() == [0.0, 0.5, 1.0]

    def test_judge_matches_threshold(self):
        g = generate_er(100, 10.0, seed=10)
        res = integrate_full(g, GENE_N, GP, ControlSpec(2.0, 2.0, 60.0))
        assert judge_activation(res.u, GENE_N, GP, 10.0) == res.activated
        thr = activation_threshold(GENE_N, GP, 10.0)
        assert res.threshold == thr


class TestShellAverage:
    def test_star(self):
        g = star(5)
        shells = bfs_shells(g, [0])
        x = np.array([10.0, 1.0, 2.0, 3.0, 4.0])
        avg = shell_average(x, shells)
        assert avg.tolist() == [10.0, 2.5]


class TestSweep:
    def small_sweep(self, workers=1, master_seed=77):
        recipe = NetworkRecipe(kind="er", n=60, k=6.0)
        ctl = ControlSpec(0.0, 0.0, control_time=8.0)
        return sweep_grid(recipe, GENE_N, GP, ctl,
                          u_values=[0.0, 2.5], v_values=[0.0, 2.5],
                          reps=2, master_seed=master_seed, workers=workers)

    def test_corner_behavior(self):
        sw = self.small_sweep()
        # zero clamp never activates; strong clamp always does
        assert sw.fraction[0, 0] == 0.0
        assert sw.fraction[1, 1] == 1.0
        assert np.all(sw.failures == 0)

    def test_bit_identical_reruns(self):
        a = self.small_sweep()
        b = self.small_sweep()
        assert np.array_equal(a.fraction, b.fraction)
        assert np.array_equal(a.failures, b.failures)

    def test_worker_count_invariance(self):
        a = self.small_sweep(workers=1)
        b = self.small_sweep(workers=3)
        assert np.array_equal(a.fraction, b.fraction)

    def test_seed_changes_runs(self):
        a = self.small_sweep(master_seed=1)
        b = self.small_sweep(master_seed=2)
        # seeds must actually steer the graph draw; check via run_seeds
        assert run_seeds(1, 0, 0, 0) != run_seeds(2, 0, 0, 0)
        assert a.fraction.shape == b.fraction.shape

    def test_run_seeds_distinct_across_cells(self):
        seen = {run_seeds(5, i, j, r) for i in range(3) for j in range(3)
                for r in range(3)}
        assert len(seen) == 27

    def test_reps_validation(self):
        recipe = NetworkRecipe(kind="er", n=30, k=4.0)
        with pytest.raises(ConfigError):
            sweep_grid(recipe, GENE, GP, ControlSpec(0, 0, 1.0),
                       [0.0], [0.0], reps=0, master_seed=0)


class TestCsvWriters:
    def test_sweep_csv(self, tmp_path):
        recipe = NetworkRecipe(kind="er", n=40, k=5.0)
        sw = sweep_grid(recipe, GENE_N, GP, ControlSpec(0, 0, 2.0),
                        [0.0, 1.0], [0.5], reps=1, master_seed=3)
        p = tmp_path / "sweep.csv"
        write_sweep_csv(sw, p)
        rows = list(csv.DictReader(open(p)))
        assert len(rows) == 2
        assert list(rows[0]) == ["u_s", "v_s", "fraction", "failures"]
        assert float(rows[1]["u_s"]) == 1.0
        assert float(rows[0]["fraction"]) in (0.0, 1.0)

    def test_trajectory_csv(self, tmp_path):
        g = generate_er(60, 6.0, seed=11)
        res = integrate_full(g, GENE_N, GP, ControlSpec(2.0, 2.0, 5.0),
                             record_times=[0.0, 5.0])
        p = tmp_path / "traj.csv"
        write_trajectory_csv(res.trajectory, p)
        rows = list(csv.DictReader(open(p)))
        layers = res.trajectory.layer_u.shape[1]
        assert len(rows) == 2 * layers
        assert list(rows[0]) == ["t", "layer", "u", "v"]
        assert float(rows[0]["u"]) == 2.0  # layer 0 at t=0

    def test_scatter_csv(self, tmp_path):
        g = generate_er(60, 6.0, seed=12)
        res = integrate_full(g, GENE_N, GP, ControlSpec(2.0, 2.0, 5.0))
        p = tmp_path / "scatter.csv"
        write_activity_scatter_csv(g, res, p)
        rows = list(csv.DictReader(open(p)))
        assert len(rows) == g.n
        assert list(rows[0]) == ["node", "degree", "layer", "u", "v"]
        seed = int(res.clamped_nodes[0])
        assert int(rows[seed]["layer"]) == 0
        assert float(rows[seed]["u"]) == 2.0
