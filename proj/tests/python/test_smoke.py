"""End-to-end smoke tests for the Python bindings."""

import math

import numpy as np
import pytest

import rwadmm


def test_version_and_exports():
    assert rwadmm.__version__
    for name in ("generate_network", "synthesize_least_squares", "run_async",
                 "RunConfig", "Algorithm", "run_experiment"):
        assert hasattr(rwadmm, name)


def test_network_generation_and_matrices():
    net = rwadmm.generate_network(12, 0.4, seed=3)
    assert net.n_agents == 12
    assert len(net.edges) == rwadmm.edge_count_for_density(12, 0.4)
    assert all(a < b for a, b in net.edges)
    assert net.degree(0) == len(net.neighbors[0])

    transition = rwadmm.build_transition_matrix(net).probs
    assert transition.shape == (12, 12)
    np.testing.assert_allclose(transition.sum(axis=1), np.ones(12), rtol=1e-12)

    mixing = rwadmm.build_mixing_matrix(net).probs
    np.testing.assert_allclose(mixing, mixing.T)
    np.testing.assert_allclose(mixing.sum(axis=1), np.ones(12), rtol=1e-12)

    with pytest.raises(ValueError):
        rwadmm.generate_network(10, 0.01, seed=1)  # cannot stay connected


def test_problem_synthesis_and_oracle():
    problem = rwadmm.synthesize_least_squares(8, 10, 2, seed=5)
    assert problem.n_agents == 8
    assert problem.dimension == 2
    assert problem.has_oracle()
    total = sum(
        rwadmm.local_gradient(d, problem.family, problem.oracle_solution)
        for d in problem.datasets
    )
    assert np.linalg.norm(total) <= 1e-9

    loss = rwadmm.local_loss(problem.datasets[0], problem.family, np.zeros(2))
    assert loss > 0.0
    assert rwadmm.lipschitz_constant(problem) > 0.0


def test_single_update_algebra():
    # Constant local loss: the x update balances only the penalty terms.
    data = rwadmm.LocalDataset()
    data.features = np.zeros((2, 1))
    data.targets = np.zeros(1)

    params = rwadmm.AdmmParams()
    params.rho = 2.0
    params.n_walks = 1
    params.n_agents = 4

    agent = rwadmm.AgentState()
    agent.x = np.zeros(2)
    agent.dual = np.array([1.0, -2.0])
    z = np.array([0.5, 0.25])
    x_new = rwadmm.x_update(agent, z, data, rwadmm.LossFamily.least_squares, params)
    np.testing.assert_allclose(x_new, [1.0, -0.75])


def test_async_run_converges_and_is_deterministic():
    net = rwadmm.generate_network(15, 0.4, seed=2)
    problem = rwadmm.synthesize_least_squares(15, 10, 2, seed=4)

    config = rwadmm.RunConfig()
    config.algorithm = rwadmm.Algorithm.pw_admm
    config.n_walks = 3
    config.rho = 1.0
    config.tau = 3.0
    config.seed = 7
    config.max_events = 8000

    result = rwadmm.run_async(config, net, problem)
    assert result.events == 8000
    records = result.trace.records
    assert records[0].accuracy == 1.0
    assert records[-1].accuracy < 1e-4

    again = rwadmm.run_async(config, net, problem)
    assert rwadmm.trace_to_csv(result.trace) == rwadmm.trace_to_csv(again.trace)


def test_sync_baseline_runs():
    net = rwadmm.generate_network(10, 0.5, seed=9)
    problem = rwadmm.synthesize_least_squares(10, 10, 2, seed=11)

    config = rwadmm.RunConfig()
    config.algorithm = rwadmm.Algorithm.extra
    config.alpha = 0.05
    config.max_events = 500
    result = rwadmm.run_sync(config, net, problem)
    assert result.events == 500
    assert result.trace.records[-1].accuracy < 1e-2
    # one unit per direction per edge per round
    assert result.trace.records[-1].comm_units == 2 * len(net.edges) * 500


def test_experiment_pipeline(tmp_path):
    spec = tmp_path / "spec.ini"
    spec.write_text(
        "\n".join(
            [
                "[experiment]",
                "name = pysmoke",
                "seeds = 1 2",
                "[network]",
                "agents = 8",
                "density = 0.5",
                "[problem]",
                "loss = least_squares",
                "samples = 5",
                "[run:pw]",
                "algorithm = pw_admm",
                "walks = 1 2",
                "rho = 1",
                "tau = 3",
                "max_events = 300",
                "stride = 50",
                "",
            ]
        )
    )
    out = tmp_path / "out"
    result = rwadmm.run_experiment(spec, out, jobs=2)
    assert result.out_dir == out
    assert len(result.trace_files) == 4
    assert (out / "summary.csv").exists()
    assert (out / "network.csv").exists()
    assert (out / "dataset.csv").exists()

    trace = rwadmm.read_trace_csv(out / "pw_m2_s1.csv")
    assert trace.find_meta("group") == "pw_m2"
    assert trace.records[-1].event == 300

    summary = (out / "summary.csv").read_text()
    assert summary.startswith("run,algorithm,walks,seed,")
    assert "pw_m1,pw_admm,1,median" in summary

    with pytest.raises(rwadmm.SpecError):
        rwadmm.run_experiment(tmp_path / "missing.ini", out)


def test_presets_exposed():
    names = rwadmm.preset_names()
    assert "fig2_ls" in names
    text = rwadmm.preset_text("fig2_ls")
    assert "[network]" in text
    assert rwadmm.preset_description("fig2_ls")


def test_random_stream_reproducibility():
    a = rwadmm.RandomStream(42)
    b = rwadmm.RandomStream(42)
    seq_a = [a.uniform() for _ in range(5)]
    seq_b = [b.uniform() for _ in range(5)]
    assert seq_a == seq_b
    assert all(0.0 <= u < 1.0 for u in seq_a)
    assert rwadmm.derive_seed(1, "route", 0) != rwadmm.derive_seed(1, "delay", 0)


def test_accuracy_definition():
    x_star = np.array([1.0, 0.0])
    x0 = [np.zeros(2), np.zeros(2)]
    x = [np.array([0.5, 0.0]), np.array([1.0, 0.0])]
    acc = rwadmm.accuracy(x, x_star, x0)
    assert math.isclose(acc, 0.25)  # mean of 0.5 and 0.0
