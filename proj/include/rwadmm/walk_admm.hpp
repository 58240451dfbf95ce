#ifndef RWADMM_WALK_ADMM_HPP
#define RWADMM_WALK_ADMM_HPP

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <vector>

#include "rwadmm/problems.hpp"

namespace rwadmm {

struct AdmmParams {
  double rho = 1.0;   // consensus penalty
  double tau = 0.0;   // default proximal weight
  int n_walks = 1;    // M
  int n_agents = 0;   // N
};

struct AgentState {
  Eigen::VectorXd x;
  Eigen::VectorXd lambda;
  long update_count = 0;  // times this agent has processed a token
  double tau = 0.0;       // proximal weight used by this agent
};

struct Token {
  int walk_id = 0;
  Eigen::VectorXd z;
  long step = 0;      // tokens processed by this walk
  int location = 0;   // agent holding the token, or its in-flight destination
};

struct SystemState {
  std::vector<AgentState> agents;
  std::vector<Token> tokens;
};

// Factorization of the quadratic part of the least-squares x-subproblem,
//   (2/b) O O^T + (rho + tau) I,
// which is constant across events for fixed (rho, tau). Logistic updates
// have nothing to cache.
struct SubproblemCache {
  bool least_squares = false;
  Eigen::LDLT<Eigen::MatrixXd> system;
  Eigen::VectorXd rhs_base;  // (2/b) O t
};

SubproblemCache make_subproblem_cache(const LocalDataset& data, LossFamily family,
                                      double rho, double tau);

// argmin_x f_i(x) + <lambda, z - x> + (rho/2)||z - x||^2 + (tau/2)||x - x_old||^2.
// Least squares solves the subproblem exactly; logistic minimizes the
// first-order surrogate of f_i at x_old, giving
//   x = (rho z + tau x_old + lambda - grad f_i(x_old)) / (rho + tau).
Eigen::VectorXd x_update(const AgentState& agent, const Eigen::VectorXd& z,
                         const LocalDataset& data, LossFamily family,
                         const AdmmParams& params);
Eigen::VectorXd x_update_cached(const AgentState& agent, const Eigen::VectorXd& z,
                                const SubproblemCache& cache, const LocalDataset& data,
                                LossFamily family, const AdmmParams& params);

// lambda + rho (z - x_new)
Eigen::VectorXd lambda_update(const Eigen::VectorXd& lambda, const Eigen::VectorXd& z,
                              const Eigen::VectorXd& x_new, double rho);

// z + (M/N)(x_new - lambda_new/rho) - (M/N)(x_old - lambda_old/rho)
Eigen::VectorXd token_update(const Eigen::VectorXd& z, const Eigen::VectorXd& x_old,
                             const Eigen::VectorXd& lambda_old,
                             const Eigen::VectorXd& x_new,
                             const Eigen::VectorXd& lambda_new,
                             const AdmmParams& params);

// Runs the x/lambda/token updates atomically against the visited agent and
// advances both counters.
void process_token_event(AgentState& agent, Token& token, const LocalDataset& data,
                         LossFamily family, const AdmmParams& params,
                         const SubproblemCache* cache = nullptr);

// sum_i f_i(x_i) + sum_i <lambda_i, zbar - x_i> + (rho/2) sum_i ||zbar - x_i||^2
// with zbar the mean over all tokens.
double augmented_lagrangian(const SystemState& state, const ConsensusProblem& problem,
                            const AdmmParams& params);

struct DescentReport {
  bool holds = false;
  double lhs = 0.0;        // Lagrangian decrease across the event
  double rhs_bound = 0.0;  // guaranteed decrease
};

// Checks the per-event Lagrangian descent bound
//   lhs >= (rho/2 - 3L/2 - L^2/rho) ||dx||^2 - (N rho/2) ||zbar - z_m||^2 - slack
// for a sequentialized step: `before` and `after` must differ by exactly one
// agent update and one token update, and the proximal weights must be zero
// (the bound does not cover tau != 0; such calls throw).
DescentReport descent_check(const SystemState& before, const SystemState& after,
                            const ConsensusProblem& problem, double lipschitz,
                            const AdmmParams& params, double slack = 1e-9);

}  // namespace rwadmm

#endif  // RWADMM_WALK_ADMM_HPP
