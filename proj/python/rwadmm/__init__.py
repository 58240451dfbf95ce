"""Decentralized consensus optimization with parallel random-walk ADMM.

Thin wrapper over the C++ core: network generation, local losses with oracle
solvers, per-event walk updates, the asynchronous discrete-event simulator,
synchronous baselines, and the experiment runner.
"""

from ._core import (  # noqa: F401
    AdmmParams,
    AgentState,
    Algorithm,
    ConsensusProblem,
    DescentReport,
    ExperimentResult,
    InitMode,
    LocalDataset,
    LossFamily,
    MetricsTrace,
    Network,
    RandomStream,
    RunConfig,
    RunResult,
    SpecError,
    SystemState,
    Token,
    TraceRecord,
    TransitionMatrix,
    accuracy,
    augmented_lagrangian,
    build_mixing_matrix,
    build_transition_matrix,
    derive_seed,
    descent_check,
    edge_count_for_density,
    generate_network,
    initial_token_agents,
    lambda_update,
    lipschitz_constant,
    load_datasets_csv,
    local_gradient,
    local_loss,
    make_problem,
    network_from_edges,
    next_hop_intelligent,
    next_hop_random,
    preset_description,
    preset_names,
    preset_text,
    process_token_event,
    read_trace_csv,
    run,
    run_async,
    run_experiment,
    run_sync,
    save_datasets_csv,
    save_edges_csv,
    solve_oracle,
    summarize_directory,
    synthesize_least_squares,
    synthesize_logistic,
    token_update,
    trace_to_csv,
    write_trace_csv,
    x_update,
)

__version__ = "0.1.0"
