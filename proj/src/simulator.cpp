#include "rwadmm/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <string>

#include "rwadmm/rng.hpp"
#include "rwadmm/routing.hpp"
#include "rwadmm/sync_baselines.hpp"

namespace rwadmm {

namespace {

struct WalkEvent {
  double fire_time;
  long sequence_no;  // breaks fire-time ties deterministically
  int walk_id;
  int destination;
};

struct LaterEvent {
  bool operator()(const WalkEvent& a, const WalkEvent& b) const {
    if (a.fire_time != b.fire_time) return a.fire_time > b.fire_time;
    return a.sequence_no > b.sequence_no;
  }
};

void validate_common(const RunConfig& config, const Network& net,
                     const ConsensusProblem& problem) {
  if (net.n_agents != problem.n_agents())
    throw std::invalid_argument("run: network and problem disagree on agent count");
  if (!problem.has_oracle())
    throw std::invalid_argument("run: problem has no reference solution");
  if (!(config.rho > 0.0)) throw std::invalid_argument("run: rho must be positive");
  if (config.tau < 0.0) throw std::invalid_argument("run: tau must be nonnegative");
  if (config.max_events < 0) throw std::invalid_argument("run: negative event budget");
  if (!(config.delay_lo >= 0.0) || !(config.delay_hi > config.delay_lo))
    throw std::invalid_argument("run: need 0 <= delay_lo < delay_hi");
  if (config.compute_time < 0.0)
    throw std::invalid_argument("run: negative compute time");

  // Relative-error accuracy needs every agent to start away from the optimum.
  const double init_gap = problem.oracle_solution.norm();
  if (init_gap < 1e-15)
    throw std::invalid_argument(
        "run: reference solution coincides with the zero initialization, "
        "accuracy would divide by zero");
}

std::string bool_name(bool v) { return v ? "true" : "false"; }

void common_metadata(MetricsTrace& trace, const RunConfig& config, const Network& net,
                     const ConsensusProblem& problem) {
  trace.set_meta("algorithm", to_string(config.algorithm));
  trace.set_meta("loss", to_string(problem.family));
  trace.set_meta("n_agents", std::to_string(net.n_agents));
  trace.set_meta("n_edges", std::to_string(net.edges.size()));
  trace.set_meta("dimension", std::to_string(problem.dimension));
  trace.set_meta("seed", std::to_string(config.seed));
  trace.set_meta("max_events", std::to_string(config.max_events));
  trace.set_meta("delay_lo", format_g17(config.delay_lo));
  trace.set_meta("delay_hi", format_g17(config.delay_hi));
}

double state_accuracy(const SystemState& state, const ConsensusProblem& problem,
                      const std::vector<Eigen::VectorXd>& x0) {
  std::vector<Eigen::VectorXd> xs;
  xs.reserve(state.agents.size());
  for (const auto& a : state.agents) xs.push_back(a.x);
  return accuracy(xs, problem.oracle_solution, x0);
}

}  // namespace

const char* to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::w_admm: return "w_admm";
    case Algorithm::pw_admm: return "pw_admm";
    case Algorithm::ipw_admm: return "ipw_admm";
    case Algorithm::sync_admm: return "sync_admm";
    case Algorithm::dgd: return "dgd";
    case Algorithm::extra: return "extra";
  }
  return "?";
}

Algorithm algorithm_from_string(std::string_view name) {
  if (name == "w_admm") return Algorithm::w_admm;
  if (name == "pw_admm") return Algorithm::pw_admm;
  if (name == "ipw_admm") return Algorithm::ipw_admm;
  if (name == "sync_admm") return Algorithm::sync_admm;
  if (name == "dgd") return Algorithm::dgd;
  if (name == "extra") return Algorithm::extra;
  throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

bool is_async(Algorithm algorithm) {
  return algorithm == Algorithm::w_admm || algorithm == Algorithm::pw_admm ||
         algorithm == Algorithm::ipw_admm;
}

double accuracy(const std::vector<Eigen::VectorXd>& x, const Eigen::VectorXd& x_star,
                const std::vector<Eigen::VectorXd>& x0) {
  if (x.size() != x0.size() || x.empty())
    throw std::invalid_argument("accuracy: state size mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double denom = (x0[i] - x_star).norm();
    if (denom < 1e-15)
      throw std::invalid_argument("accuracy: agent starts at the reference solution");
    sum += (x[i] - x_star).norm() / denom;
  }
  return sum / static_cast<double>(x.size());
}

std::vector<int> initial_token_agents(std::uint64_t seed, int n_agents, int n_walks) {
  if (n_walks < 1 || n_walks > n_agents)
    throw std::invalid_argument("initial_token_agents: need 1 <= walks <= agents");
  RandomStream rng(derive_seed(seed, "tokens"));
  std::vector<int> agents(n_agents);
  std::iota(agents.begin(), agents.end(), 0);
  for (int i = 0; i < n_walks; ++i) {
    const auto j =
        i + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n_agents - i)));
    std::swap(agents[i], agents[j]);
  }
  agents.resize(n_walks);
  return agents;
}

RunResult run_async(const RunConfig& config, const Network& net,
                    const ConsensusProblem& problem, const EventObserver& observer) {
  if (!is_async(config.algorithm))
    throw std::invalid_argument("run_async: not an asynchronous algorithm");
  validate_common(config, net, problem);

  const int n_agents = net.n_agents;
  const int n_walks = config.n_walks;
  if (n_walks < 1 || n_walks > n_agents)
    throw std::invalid_argument("run_async: need 1 <= n_walks <= n_agents");
  if (config.algorithm == Algorithm::w_admm && n_walks != 1)
    throw std::invalid_argument("run_async: w_admm is the single-walk case");
  if (config.algorithm == Algorithm::ipw_admm && n_agents < 2)
    throw std::invalid_argument("run_async: intelligent routing needs neighbors");
  if (config.check_descent && config.tau != 0.0)
    throw std::invalid_argument("run_async: the descent bound requires tau = 0");

  AdmmParams params;
  params.rho = config.rho;
  params.tau = config.tau;
  params.n_walks = n_walks;
  params.n_agents = n_agents;

  RunResult result;
  SystemState& state = result.final_state;
  state.agents.resize(n_agents);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(problem.dimension);
  for (auto& a : state.agents) {
    a.x = zero;
    a.lambda = zero;
    a.tau = config.tau;
  }
  if (config.init == RunConfig::InitMode::dual_consistent) {
    Eigen::VectorXd mean = zero;
    for (int i = 0; i < n_agents; ++i) {
      state.agents[i].lambda = local_gradient(problem.datasets[i], problem.family, zero);
      mean += state.agents[i].x - state.agents[i].lambda / config.rho;
    }
    mean /= static_cast<double>(n_agents);
    state.tokens.resize(n_walks);
    for (int m = 0; m < n_walks; ++m) state.tokens[m].z = mean;
  } else {
    state.tokens.resize(n_walks);
    for (auto& t : state.tokens) t.z = zero;
  }

  const auto starts = initial_token_agents(config.seed, n_agents, n_walks);
  std::priority_queue<WalkEvent, std::vector<WalkEvent>, LaterEvent> queue;
  long sequence_no = 0;
  for (int m = 0; m < n_walks; ++m) {
    state.tokens[m].walk_id = m;
    state.tokens[m].location = starts[m];
    queue.push({0.0, sequence_no++, m, starts[m]});
  }

  std::vector<RandomStream> route_rng;
  std::vector<RandomStream> delay_rng;
  route_rng.reserve(n_walks);
  delay_rng.reserve(n_walks);
  for (int m = 0; m < n_walks; ++m) {
    route_rng.emplace_back(derive_seed(config.seed, "route", m));
    delay_rng.emplace_back(derive_seed(config.seed, "delay", m));
  }

  const bool random_routing = config.algorithm != Algorithm::ipw_admm;
  TransitionMatrix transition;
  if (random_routing)
    transition = build_transition_matrix(net, config.allow_self_loop);

  std::vector<SubproblemCache> caches;
  caches.reserve(n_agents);
  for (int i = 0; i < n_agents; ++i)
    caches.push_back(make_subproblem_cache(problem.datasets[i], problem.family,
                                           config.rho, state.agents[i].tau));

  const double lipschitz =
      config.check_descent ? lipschitz_constant(problem) : 0.0;

  const std::vector<Eigen::VectorXd> x0(n_agents, zero);
  const long stride = config.sample_stride > 0 ? config.sample_stride : n_agents;

  result.trace.records.push_back(
      {0, 0.0, 0.0, state_accuracy(state, problem, x0)});

  std::vector<double> busy_until(n_agents, 0.0);
  std::vector<long> visit_counts(n_agents, 0);
  double sim_now = 0.0;
  double comm_units = 0.0;
  long processed = 0;
  SystemState before;  // scratch for the descent checker

  while (!queue.empty() && processed < config.max_events) {
    const WalkEvent ev = queue.top();
    if (config.max_sim_time > 0.0 && ev.fire_time > config.max_sim_time) break;
    queue.pop();

    const int agent_idx = ev.destination;
    AgentState& agent = state.agents[agent_idx];
    Token& token = state.tokens[ev.walk_id];
    token.location = agent_idx;

    // Serialize events at the agent: a busy agent delays execution.
    const double exec_start = std::max(ev.fire_time, busy_until[agent_idx]);
    const double exec_end = exec_start + config.compute_time;
    busy_until[agent_idx] = exec_end;
    sim_now = std::max(sim_now, exec_end);

    if (config.check_descent) before = state;

    process_token_event(agent, token, problem.datasets[agent_idx], problem.family,
                        params, &caches[agent_idx]);
    visit_counts[agent_idx] = agent.update_count;
    ++processed;

    if (config.check_descent) {
      const DescentReport report =
          descent_check(before, state, problem, lipschitz, params);
      const double margin = report.lhs - report.rhs_bound;
      result.descent_min_margin = std::min(result.descent_min_margin, margin);
      if (!report.holds) ++result.descent_violations;
    }

    if (observer) {
      observer({processed, ev.walk_id, agent_idx, ev.fire_time, exec_start, exec_end},
               state);
    }

    // Route onward: one transmitted token, one cost unit.
    const int next = random_routing
                         ? next_hop_random(agent_idx, transition, route_rng[ev.walk_id])
                         : next_hop_intelligent(agent_idx, net, visit_counts);
    token.location = next;
    comm_units += 1.0;
    const double delay =
        delay_rng[ev.walk_id].uniform(config.delay_lo, config.delay_hi);
    queue.push({exec_end + delay, sequence_no++, ev.walk_id, next});

    if (processed % stride == 0)
      result.trace.records.push_back(
          {processed, sim_now, comm_units, state_accuracy(state, problem, x0)});
  }

  if (processed % stride != 0)
    result.trace.records.push_back(
        {processed, sim_now, comm_units, state_accuracy(state, problem, x0)});

  result.events = processed;
  common_metadata(result.trace, config, net, problem);
  result.trace.set_meta("n_walks", std::to_string(n_walks));
  result.trace.set_meta("rho", format_g17(config.rho));
  result.trace.set_meta("tau", format_g17(config.tau));
  result.trace.set_meta("compute_time", format_g17(config.compute_time));
  result.trace.set_meta("sample_stride", std::to_string(stride));
  if (random_routing)
    result.trace.set_meta("allow_self_loop", bool_name(config.allow_self_loop));
  result.trace.set_meta("init", config.init == RunConfig::InitMode::zeros
                                    ? "zeros"
                                    : "dual_consistent");
  return result;
}

RunResult run_sync(const RunConfig& config, const Network& net,
                   const ConsensusProblem& problem) {
  if (is_async(config.algorithm))
    throw std::invalid_argument("run_sync: not a synchronous algorithm");
  validate_common(config, net, problem);

  const int n_agents = net.n_agents;
  const int dim = problem.dimension;

  SyncState sync = make_sync_state(n_agents, dim);
  TransitionMatrix mixing;
  if (config.algorithm != Algorithm::sync_admm) mixing = build_mixing_matrix(net);

  // One round moves 2N vectors (gather + broadcast) for sync ADMM, or one
  // vector each way per edge for the gossip baselines.
  const double default_cost = config.algorithm == Algorithm::sync_admm
                                  ? 2.0 * n_agents
                                  : 2.0 * static_cast<double>(net.edges.size());
  const long messages = static_cast<long>(default_cost);
  const double round_cost =
      config.round_cost_override > 0.0 ? config.round_cost_override : default_cost;

  RandomStream delay_stream(derive_seed(config.seed, "delay", 0));
  const std::vector<Eigen::VectorXd> x0(n_agents, Eigen::VectorXd::Zero(dim));
  const long stride = config.sample_stride > 0 ? config.sample_stride : 1;

  RunResult result;
  const auto record = [&](long round, double time, double cost) {
    std::vector<Eigen::VectorXd> xs(n_agents);
    for (int i = 0; i < n_agents; ++i) xs[i] = sync.x.row(i).transpose();
    result.trace.records.push_back(
        {round, time, cost, accuracy(xs, problem.oracle_solution, x0)});
  };
  record(0, 0.0, 0.0);

  double sim_now = 0.0;
  double comm_units = 0.0;
  long rounds = 0;
  while (rounds < config.max_events) {
    if (config.max_sim_time > 0.0 && sim_now >= config.max_sim_time) break;
    switch (config.algorithm) {
      case Algorithm::sync_admm:
        sync_admm_round(sync, problem, config.rho);
        break;
      case Algorithm::dgd:
        dgd_round(sync, problem, mixing, config.alpha);
        break;
      case Algorithm::extra:
        extra_round(sync, problem, mixing, config.alpha);
        break;
      default:
        throw std::logic_error("unreachable");
    }
    ++rounds;

    // The round completes when its slowest message arrives.
    double slowest = 0.0;
    for (long k = 0; k < messages; ++k)
      slowest = std::max(slowest,
                         delay_stream.uniform(config.delay_lo, config.delay_hi));
    sim_now += slowest;
    comm_units += round_cost;

    if (rounds % stride == 0) record(rounds, sim_now, comm_units);
  }
  if (rounds % stride != 0) record(rounds, sim_now, comm_units);

  result.events = rounds;
  result.final_state.agents.resize(n_agents);
  for (int i = 0; i < n_agents; ++i) {
    result.final_state.agents[i].x = sync.x.row(i).transpose();
    result.final_state.agents[i].lambda = sync.lambda.row(i).transpose();
    result.final_state.agents[i].update_count = rounds;
  }

  common_metadata(result.trace, config, net, problem);
  if (config.algorithm == Algorithm::sync_admm)
    result.trace.set_meta("rho", format_g17(config.rho));
  else
    result.trace.set_meta("alpha", format_g17(config.alpha));
  result.trace.set_meta("sample_stride", std::to_string(stride));
  result.trace.set_meta("round_cost", format_g17(round_cost));
  return result;
}

RunResult run(const RunConfig& config, const Network& net,
              const ConsensusProblem& problem) {
  return is_async(config.algorithm) ? run_async(config, net, problem)
                                    : run_sync(config, net, problem);
}

}  // namespace rwadmm
