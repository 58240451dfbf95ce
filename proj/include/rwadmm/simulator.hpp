#ifndef RWADMM_SIMULATOR_HPP
#define RWADMM_SIMULATOR_HPP

#include <cstdint>
#include <functional>
#include <limits>
#include <string_view>
#include <vector>

#include "rwadmm/problems.hpp"
#include "rwadmm/topology.hpp"
#include "rwadmm/trace_io.hpp"
#include "rwadmm/walk_admm.hpp"

namespace rwadmm {

enum class Algorithm { w_admm, pw_admm, ipw_admm, sync_admm, dgd, extra };

const char* to_string(Algorithm algorithm);
Algorithm algorithm_from_string(std::string_view name);
bool is_async(Algorithm algorithm);

struct RunConfig {
  Algorithm algorithm = Algorithm::pw_admm;
  int n_walks = 1;        // M (w_admm requires 1)
  double rho = 1.0;
  double tau = 0.0;
  double alpha = 0.01;    // DGD / EXTRA step size
  std::uint64_t seed = 1;

  long max_events = 100000;   // async events; sync rounds
  double max_sim_time = 0.0;  // seconds, 0 disables
  double delay_lo = 1e-5;     // per-message delay ~ U(delay_lo, delay_hi)
  double delay_hi = 1e-4;
  double compute_time = 0.0;  // seconds per processed event
  long sample_stride = 0;     // 0: every N events (async) / every round (sync)
  bool allow_self_loop = true;     // keep the current agent in the walk support
  double round_cost_override = 0.0;  // sync units per round; 0: 2N or 2|E|

  // dual_consistent sets lambda_i = grad f_i(0) and z_m = (1/N) sum_i
  // (x_i - lambda_i/rho), the initialization under which the per-event
  // descent bound is provable; zeros matches the shipped algorithm.
  enum class InitMode { zeros, dual_consistent };
  InitMode init = InitMode::zeros;

  // Evaluate the descent bound after every event (needs tau = 0; test mode).
  bool check_descent = false;
};

struct EventInfo {
  long index = 0;  // 1-based processed-event counter
  int walk_id = 0;
  int agent = 0;
  double fire_time = 0.0;
  double exec_start = 0.0;
  double exec_end = 0.0;
};

// Called after each processed event with the post-event state.
using EventObserver = std::function<void(const EventInfo&, const SystemState&)>;

struct RunResult {
  MetricsTrace trace;
  SystemState final_state;  // sync runs fill agents only
  long events = 0;          // processed events or rounds
  long descent_violations = 0;
  double descent_min_margin = std::numeric_limits<double>::infinity();
};

// (1/N) sum_i ||x_i - x*|| / ||x0_i - x*||
double accuracy(const std::vector<Eigen::VectorXd>& x, const Eigen::VectorXd& x_star,
                const std::vector<Eigen::VectorXd>& x0);

// Initial token placement: M distinct agents, uniform without replacement.
std::vector<int> initial_token_agents(std::uint64_t seed, int n_agents, int n_walks);

RunResult run_async(const RunConfig& config, const Network& net,
                    const ConsensusProblem& problem, const EventObserver& observer = {});
RunResult run_sync(const RunConfig& config, const Network& net,
                   const ConsensusProblem& problem);
RunResult run(const RunConfig& config, const Network& net, const ConsensusProblem& problem);

}  // namespace rwadmm

#endif  // RWADMM_SIMULATOR_HPP
