#include "rwadmm/sync_baselines.hpp"

#include <stdexcept>

#include "rwadmm/walk_admm.hpp"

namespace rwadmm {

SyncState make_sync_state(int n_agents, int dimension) {
  SyncState s;
  s.x = Eigen::MatrixXd::Zero(n_agents, dimension);
  s.lambda = Eigen::MatrixXd::Zero(n_agents, dimension);
  s.z_bar = Eigen::VectorXd::Zero(dimension);
  s.prev_x = Eigen::MatrixXd::Zero(n_agents, dimension);
  s.prev_grad = Eigen::MatrixXd::Zero(n_agents, dimension);
  return s;
}

void sync_admm_round(SyncState& state, const ConsensusProblem& problem, double rho) {
  const int n_agents = problem.n_agents();
  if (state.x.rows() != n_agents)
    throw std::invalid_argument("sync_admm_round: state/problem size mismatch");

  state.z_bar =
      (state.x - state.lambda / rho).colwise().mean().transpose();

  AdmmParams params;
  params.rho = rho;
  params.tau = 0.0;
  params.n_walks = 1;
  params.n_agents = n_agents;

  for (int i = 0; i < n_agents; ++i) {
    AgentState agent;
    agent.x = state.x.row(i).transpose();
    agent.lambda = state.lambda.row(i).transpose();
    agent.tau = 0.0;
    const Eigen::VectorXd x_new =
        x_update(agent, state.z_bar, problem.datasets[i], problem.family, params);
    const Eigen::VectorXd l_new = lambda_update(agent.lambda, state.z_bar, x_new, rho);
    state.x.row(i) = x_new.transpose();
    state.lambda.row(i) = l_new.transpose();
  }
  ++state.round;
}

void dgd_round(SyncState& state, const ConsensusProblem& problem,
               const TransitionMatrix& mixing, double alpha) {
  const int n_agents = problem.n_agents();
  const Eigen::MatrixXd mixed = mixing.probs * state.x;
  Eigen::MatrixXd next(n_agents, problem.dimension);
  for (int i = 0; i < n_agents; ++i) {
    const Eigen::VectorXd grad = local_gradient(
        problem.datasets[i], problem.family, state.x.row(i).transpose());
    next.row(i) = mixed.row(i) - alpha * grad.transpose();
  }
  state.x = next;
  ++state.round;
}

void extra_round(SyncState& state, const ConsensusProblem& problem,
                 const TransitionMatrix& mixing, double alpha) {
  const int n_agents = problem.n_agents();
  Eigen::MatrixXd grad(n_agents, problem.dimension);
  for (int i = 0; i < n_agents; ++i)
    grad.row(i) = local_gradient(problem.datasets[i], problem.family,
                                 state.x.row(i).transpose())
                      .transpose();

  if (state.round == 0) {
    state.prev_x = state.x;
    state.prev_grad = grad;
    state.x = mixing.probs * state.x - alpha * grad;
  } else {
    const Eigen::MatrixXd next =
        (state.x + mixing.probs * state.x) -
        0.5 * (state.prev_x + mixing.probs * state.prev_x) -
        alpha * (grad - state.prev_grad);
    state.prev_x = state.x;
    state.prev_grad = grad;
    state.x = next;
  }
  ++state.round;
}

}  // namespace rwadmm
