#include "rwadmm/walk_admm.hpp"

#include <cmath>
#include <stdexcept>

namespace rwadmm {

SubproblemCache make_subproblem_cache(const LocalDataset& data, LossFamily family,
                                      double rho, double tau) {
  SubproblemCache cache;
  cache.least_squares = family == LossFamily::least_squares;
  if (!cache.least_squares) return cache;

  const double s = 2.0 / static_cast<double>(data.samples());
  Eigen::MatrixXd a = s * (data.features * data.features.transpose());
  a.diagonal().array() += rho + tau;
  cache.system.compute(a);
  cache.rhs_base = s * (data.features * data.targets);
  return cache;
}

Eigen::VectorXd x_update_cached(const AgentState& agent, const Eigen::VectorXd& z,
                                const SubproblemCache& cache, const LocalDataset& data,
                                LossFamily family, const AdmmParams& params) {
  if (family == LossFamily::least_squares) {
    const Eigen::VectorXd rhs =
        cache.rhs_base + agent.lambda + params.rho * z + agent.tau * agent.x;
    return cache.system.solve(rhs);
  }
  const Eigen::VectorXd grad = local_gradient(data, family, agent.x);
  return (params.rho * z + agent.tau * agent.x + agent.lambda - grad) /
         (params.rho + agent.tau);
}

Eigen::VectorXd x_update(const AgentState& agent, const Eigen::VectorXd& z,
                         const LocalDataset& data, LossFamily family,
                         const AdmmParams& params) {
  const SubproblemCache cache =
      make_subproblem_cache(data, family, params.rho, agent.tau);
  return x_update_cached(agent, z, cache, data, family, params);
}

Eigen::VectorXd lambda_update(const Eigen::VectorXd& lambda, const Eigen::VectorXd& z,
                              const Eigen::VectorXd& x_new, double rho) {
  return lambda + rho * (z - x_new);
}

Eigen::VectorXd token_update(const Eigen::VectorXd& z, const Eigen::VectorXd& x_old,
                             const Eigen::VectorXd& lambda_old,
                             const Eigen::VectorXd& x_new,
                             const Eigen::VectorXd& lambda_new,
                             const AdmmParams& params) {
  const double scale = static_cast<double>(params.n_walks) / params.n_agents;
  return z + scale * (x_new - lambda_new / params.rho) -
         scale * (x_old - lambda_old / params.rho);
}

void process_token_event(AgentState& agent, Token& token, const LocalDataset& data,
                         LossFamily family, const AdmmParams& params,
                         const SubproblemCache* cache) {
  const Eigen::VectorXd x_new =
      cache ? x_update_cached(agent, token.z, *cache, data, family, params)
            : x_update(agent, token.z, data, family, params);
  const Eigen::VectorXd lambda_new =
      lambda_update(agent.lambda, token.z, x_new, params.rho);
  const Eigen::VectorXd z_new =
      token_update(token.z, agent.x, agent.lambda, x_new, lambda_new, params);

  agent.x = x_new;
  agent.lambda = lambda_new;
  ++agent.update_count;
  token.z = z_new;
  ++token.step;
}

double augmented_lagrangian(const SystemState& state, const ConsensusProblem& problem,
                            const AdmmParams& params) {
  if (state.tokens.empty()) throw std::invalid_argument("augmented_lagrangian: no tokens");
  if (static_cast<int>(state.agents.size()) != problem.n_agents())
    throw std::invalid_argument("augmented_lagrangian: agent count mismatch");

  Eigen::VectorXd zbar = Eigen::VectorXd::Zero(problem.dimension);
  for (const auto& t : state.tokens) zbar += t.z;
  zbar /= static_cast<double>(state.tokens.size());

  double value = 0.0;
  for (std::size_t i = 0; i < state.agents.size(); ++i) {
    const auto& agent = state.agents[i];
    const Eigen::VectorXd gap = zbar - agent.x;
    value += local_loss(problem.datasets[i], problem.family, agent.x) +
             agent.lambda.dot(gap) + 0.5 * params.rho * gap.squaredNorm();
  }
  return value;
}

DescentReport descent_check(const SystemState& before, const SystemState& after,
                            const ConsensusProblem& problem, double lipschitz,
                            const AdmmParams& params, double slack) {
  if (params.tau != 0.0)
    throw std::invalid_argument("descent_check: the bound only covers tau = 0");
  if (before.agents.size() != after.agents.size() ||
      before.tokens.size() != after.tokens.size())
    throw std::invalid_argument("descent_check: state sizes differ");

  int updated_agent = -1;
  for (std::size_t i = 0; i < before.agents.size(); ++i) {
    const long db = after.agents[i].update_count - before.agents[i].update_count;
    if (db == 0) continue;
    if (db != 1 || updated_agent != -1)
      throw std::invalid_argument("descent_check: expected exactly one agent update");
    updated_agent = static_cast<int>(i);
  }
  int updated_token = -1;
  for (std::size_t m = 0; m < before.tokens.size(); ++m) {
    const long db = after.tokens[m].step - before.tokens[m].step;
    if (db == 0) continue;
    if (db != 1 || updated_token != -1)
      throw std::invalid_argument("descent_check: expected exactly one token update");
    updated_token = static_cast<int>(m);
  }
  if (updated_agent < 0 || updated_token < 0)
    throw std::invalid_argument("descent_check: no update between the states");
  if (before.agents[updated_agent].tau != 0.0)
    throw std::invalid_argument("descent_check: the bound only covers tau = 0");

  DescentReport report;
  report.lhs = augmented_lagrangian(before, problem, params) -
               augmented_lagrangian(after, problem, params);

  Eigen::VectorXd zbar = Eigen::VectorXd::Zero(problem.dimension);
  for (const auto& t : before.tokens) zbar += t.z;
  zbar /= static_cast<double>(before.tokens.size());

  const double coeff =
      0.5 * params.rho - 1.5 * lipschitz - lipschitz * lipschitz / params.rho;
  const double dx2 =
      (before.agents[updated_agent].x - after.agents[updated_agent].x).squaredNorm();
  const double dispersion = (zbar - before.tokens[updated_token].z).squaredNorm();
  report.rhs_bound =
      coeff * dx2 - 0.5 * params.n_agents * params.rho * dispersion;
  report.holds = report.lhs >= report.rhs_bound - slack;
  return report;
}

}  // namespace rwadmm
