// Python bindings for the random-walk ADMM library.
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "rwadmm/experiment.hpp"
#include "rwadmm/rng.hpp"
#include "rwadmm/routing.hpp"
#include "rwadmm/simulator.hpp"

namespace py = pybind11;
using namespace rwadmm;

PYBIND11_MODULE(_core, m) {
  m.doc() = "decentralized consensus optimization with parallel random-walk ADMM";

  // ---- rng ----
  m.def("derive_seed", &derive_seed, py::arg("master"), py::arg("stream"),
        py::arg("index") = 0,
        "Derive an independent named stream seed from a master seed.");
  py::class_<RandomStream>(m, "RandomStream")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def("uniform", py::overload_cast<>(&RandomStream::uniform),
           "U(0,1) double")
      .def("uniform", py::overload_cast<double, double>(&RandomStream::uniform),
           py::arg("lo"), py::arg("hi"))
      .def("uniform_int", &RandomStream::uniform_int, py::arg("bound"),
           "uniform integer in [0, bound)")
      .def("normal", &RandomStream::normal, "standard normal");

  // ---- topology ----
  py::class_<Network>(m, "Network")
      .def_readonly("n_agents", &Network::n_agents)
      .def_readonly("edges", &Network::edges)
      .def_readonly("neighbors", &Network::neighbors)
      .def("degree", &Network::degree, py::arg("agent"));
  m.def("edge_count_for_density", &edge_count_for_density, py::arg("n_agents"),
        py::arg("density"));
  m.def("generate_network", &generate_network, py::arg("n_agents"),
        py::arg("density"), py::arg("seed"));
  m.def("network_from_edges", &network_from_edges, py::arg("n_agents"),
        py::arg("edges"));
  py::class_<TransitionMatrix>(m, "TransitionMatrix")
      .def_readonly("probs", &TransitionMatrix::probs);
  m.def("build_transition_matrix", &build_transition_matrix, py::arg("net"),
        py::arg("include_self") = true);
  m.def("build_mixing_matrix", &build_mixing_matrix, py::arg("net"));
  m.def("save_edges_csv", &save_edges_csv, py::arg("net"), py::arg("path"));

  // ---- problems ----
  py::enum_<LossFamily>(m, "LossFamily")
      .value("least_squares", LossFamily::least_squares)
      .value("logistic", LossFamily::logistic);
  py::class_<LocalDataset>(m, "LocalDataset")
      .def(py::init<>())
      .def_readwrite("features", &LocalDataset::features)
      .def_readwrite("targets", &LocalDataset::targets)
      .def_property_readonly("samples", &LocalDataset::samples);
  py::class_<ConsensusProblem>(m, "ConsensusProblem")
      .def(py::init<>())
      .def_readwrite("family", &ConsensusProblem::family)
      .def_readwrite("dimension", &ConsensusProblem::dimension)
      .def_readwrite("datasets", &ConsensusProblem::datasets)
      .def_readwrite("oracle_solution", &ConsensusProblem::oracle_solution)
      .def_property_readonly("n_agents", &ConsensusProblem::n_agents)
      .def("has_oracle", &ConsensusProblem::has_oracle);
  m.def("synthesize_least_squares", &synthesize_least_squares, py::arg("n_agents"),
        py::arg("samples_per_agent"), py::arg("dimension"), py::arg("seed"));
  m.def(
      "synthesize_logistic",
      [](int n_agents, int samples, int dimension, std::uint64_t seed,
         std::optional<Eigen::VectorXd> hidden) {
        return synthesize_logistic(n_agents, samples, dimension, seed,
                                   hidden ? &*hidden : nullptr);
      },
      py::arg("n_agents"), py::arg("samples_per_agent"), py::arg("dimension"),
      py::arg("seed"), py::arg("hidden_vector") = py::none());
  m.def("make_problem", &make_problem, py::arg("family"), py::arg("datasets"),
        py::arg("compute_oracle") = true);
  m.def("local_loss", &local_loss, py::arg("data"), py::arg("family"), py::arg("x"));
  m.def("local_gradient", &local_gradient, py::arg("data"), py::arg("family"),
        py::arg("x"));
  m.def("lipschitz_constant", &lipschitz_constant, py::arg("problem"));
  m.def("solve_oracle", &solve_oracle, py::arg("problem"));
  m.def("save_datasets_csv", &save_datasets_csv, py::arg("problem"), py::arg("path"));
  m.def("load_datasets_csv", &load_datasets_csv, py::arg("path"), py::arg("family"),
        py::arg("compute_oracle") = true);

  // ---- walk_admm ----
  py::class_<AdmmParams>(m, "AdmmParams")
      .def(py::init<>())
      .def_readwrite("rho", &AdmmParams::rho)
      .def_readwrite("tau", &AdmmParams::tau)
      .def_readwrite("n_walks", &AdmmParams::n_walks)
      .def_readwrite("n_agents", &AdmmParams::n_agents);
  py::class_<AgentState>(m, "AgentState")
      .def(py::init<>())
      .def_readwrite("x", &AgentState::x)
      .def_readwrite("dual", &AgentState::lambda)
      .def_readwrite("update_count", &AgentState::update_count)
      .def_readwrite("tau", &AgentState::tau);
  py::class_<Token>(m, "Token")
      .def(py::init<>())
      .def_readwrite("walk_id", &Token::walk_id)
      .def_readwrite("z", &Token::z)
      .def_readwrite("step", &Token::step)
      .def_readwrite("location", &Token::location);
  py::class_<SystemState>(m, "SystemState")
      .def(py::init<>())
      .def_readwrite("agents", &SystemState::agents)
      .def_readwrite("tokens", &SystemState::tokens);
  m.def("x_update", &x_update, py::arg("agent"), py::arg("z"), py::arg("data"),
        py::arg("family"), py::arg("params"));
  m.def("lambda_update", &lambda_update, py::arg("dual"), py::arg("z"),
        py::arg("x_new"), py::arg("rho"));
  m.def("token_update", &token_update, py::arg("z"), py::arg("x_old"),
        py::arg("dual_old"), py::arg("x_new"), py::arg("dual_new"), py::arg("params"));
  m.def(
      "process_token_event",
      [](AgentState& agent, Token& token, const LocalDataset& data, LossFamily family,
         const AdmmParams& params) {
        process_token_event(agent, token, data, family, params);
      },
      py::arg("agent"), py::arg("token"), py::arg("data"), py::arg("family"),
      py::arg("params"));
  m.def("augmented_lagrangian", &augmented_lagrangian, py::arg("state"),
        py::arg("problem"), py::arg("params"));
  py::class_<DescentReport>(m, "DescentReport")
      .def_readonly("holds", &DescentReport::holds)
      .def_readonly("lhs", &DescentReport::lhs)
      .def_readonly("rhs_bound", &DescentReport::rhs_bound);
  m.def("descent_check", &descent_check, py::arg("before"), py::arg("after"),
        py::arg("problem"), py::arg("lipschitz"), py::arg("params"),
        py::arg("slack") = 1e-9);

  // ---- routing ----
  m.def("next_hop_random", &next_hop_random, py::arg("current"),
        py::arg("transition"), py::arg("rng"));
  m.def("next_hop_intelligent", &next_hop_intelligent, py::arg("current"),
        py::arg("net"), py::arg("update_counts"));

  // ---- simulator ----
  py::enum_<Algorithm>(m, "Algorithm")
      .value("w_admm", Algorithm::w_admm)
      .value("pw_admm", Algorithm::pw_admm)
      .value("ipw_admm", Algorithm::ipw_admm)
      .value("sync_admm", Algorithm::sync_admm)
      .value("dgd", Algorithm::dgd)
      .value("extra", Algorithm::extra);
  py::enum_<RunConfig::InitMode>(m, "InitMode")
      .value("zeros", RunConfig::InitMode::zeros)
      .value("dual_consistent", RunConfig::InitMode::dual_consistent);
  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_readwrite("algorithm", &RunConfig::algorithm)
      .def_readwrite("n_walks", &RunConfig::n_walks)
      .def_readwrite("rho", &RunConfig::rho)
      .def_readwrite("tau", &RunConfig::tau)
      .def_readwrite("alpha", &RunConfig::alpha)
      .def_readwrite("seed", &RunConfig::seed)
      .def_readwrite("max_events", &RunConfig::max_events)
      .def_readwrite("max_sim_time", &RunConfig::max_sim_time)
      .def_readwrite("delay_lo", &RunConfig::delay_lo)
      .def_readwrite("delay_hi", &RunConfig::delay_hi)
      .def_readwrite("compute_time", &RunConfig::compute_time)
      .def_readwrite("sample_stride", &RunConfig::sample_stride)
      .def_readwrite("allow_self_loop", &RunConfig::allow_self_loop)
      .def_readwrite("round_cost_override", &RunConfig::round_cost_override)
      .def_readwrite("init", &RunConfig::init)
      .def_readwrite("check_descent", &RunConfig::check_descent);
  py::class_<TraceRecord>(m, "TraceRecord")
      .def(py::init<>())
      .def_readwrite("event", &TraceRecord::event)
      .def_readwrite("sim_time_s", &TraceRecord::sim_time_s)
      .def_readwrite("comm_units", &TraceRecord::comm_units)
      .def_readwrite("accuracy", &TraceRecord::accuracy)
      .def("__repr__", [](const TraceRecord& r) {
        return "TraceRecord(event=" + std::to_string(r.event) +
               ", sim_time_s=" + format_g17(r.sim_time_s) +
               ", comm_units=" + format_g17(r.comm_units) +
               ", accuracy=" + format_g17(r.accuracy) + ")";
      });
  py::class_<MetricsTrace>(m, "MetricsTrace")
      .def(py::init<>())
      .def_readwrite("records", &MetricsTrace::records)
      .def_readwrite("metadata", &MetricsTrace::metadata)
      .def("set_meta", &MetricsTrace::set_meta, py::arg("key"), py::arg("value"))
      .def("find_meta", [](const MetricsTrace& t, const std::string& key) {
        const std::string* v = t.find_meta(key);
        return v ? std::optional<std::string>(*v) : std::nullopt;
      });
  m.def("trace_to_csv", &trace_to_csv, py::arg("trace"));
  m.def("write_trace_csv", &write_trace_csv, py::arg("trace"), py::arg("path"));
  m.def("read_trace_csv", &read_trace_csv, py::arg("path"));
  py::class_<RunResult>(m, "RunResult")
      .def_readonly("trace", &RunResult::trace)
      .def_readonly("final_state", &RunResult::final_state)
      .def_readonly("events", &RunResult::events)
      .def_readonly("descent_violations", &RunResult::descent_violations)
      .def_readonly("descent_min_margin", &RunResult::descent_min_margin);
  m.def("accuracy", &accuracy, py::arg("x"), py::arg("x_star"), py::arg("x0"));
  m.def("initial_token_agents", &initial_token_agents, py::arg("seed"),
        py::arg("n_agents"), py::arg("n_walks"));
  m.def(
      "run_async",
      [](const RunConfig& config, const Network& net, const ConsensusProblem& problem) {
        return run_async(config, net, problem);
      },
      py::arg("config"), py::arg("net"), py::arg("problem"));
  m.def("run_sync", &run_sync, py::arg("config"), py::arg("net"), py::arg("problem"));
  m.def("run", &run, py::arg("config"), py::arg("net"), py::arg("problem"));

  // ---- experiment ----
  py::register_exception<SpecError>(m, "SpecError");
  py::class_<ExperimentResult>(m, "ExperimentResult")
      .def_readonly("out_dir", &ExperimentResult::out_dir)
      .def_readonly("trace_files", &ExperimentResult::trace_files)
      .def_readonly("summary_file", &ExperimentResult::summary_file);
  m.def("run_experiment", &run_experiment, py::arg("spec_file"),
        py::arg("out_dir") = std::filesystem::path{}, py::arg("jobs") = 1);
  m.def("summarize_directory", &summarize_directory, py::arg("dir"),
        py::arg("thresholds") = std::vector<double>{});
  m.def("preset_names", &preset_names);
  m.def("preset_description", &preset_description, py::arg("name"));
  m.def("preset_text", &preset_text, py::arg("name"));
}
