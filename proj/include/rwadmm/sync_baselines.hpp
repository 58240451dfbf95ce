#ifndef RWADMM_SYNC_BASELINES_HPP
#define RWADMM_SYNC_BASELINES_HPP

#include <Eigen/Dense>

#include "rwadmm/problems.hpp"
#include "rwadmm/topology.hpp"

namespace rwadmm {

// Shared state for the synchronous baselines; one row per agent. The
// lambda/z_bar block is used by sync ADMM, prev_x/prev_grad by EXTRA.
struct SyncState {
  Eigen::MatrixXd x;
  Eigen::MatrixXd lambda;
  Eigen::VectorXd z_bar;
  Eigen::MatrixXd prev_x;
  Eigen::MatrixXd prev_grad;
  long round = 0;
};

SyncState make_sync_state(int n_agents, int dimension);

// Gather-broadcast ADMM round:
//   z_bar <- (1/N) sum_i (x_i - lambda_i/rho)
//   x_i   <- argmin f_i(x) + <lambda_i, z_bar - x> + (rho/2)||z_bar - x||^2
//   lambda_i <- lambda_i + rho (z_bar - x_i)
// The x step reuses the walk x-update with tau = 0 (exact for least squares,
// first-order surrogate for logistic).
void sync_admm_round(SyncState& state, const ConsensusProblem& problem, double rho);

// x_i <- sum_j W_ij x_j - alpha grad f_i(x_i)
void dgd_round(SyncState& state, const ConsensusProblem& problem,
               const TransitionMatrix& mixing, double alpha);

// x^{k+2} = (I+W) x^{k+1} - (I+W)/2 x^k - alpha (grad f(x^{k+1}) - grad f(x^k));
// the first round is one DGD step.
void extra_round(SyncState& state, const ConsensusProblem& problem,
                 const TransitionMatrix& mixing, double alpha);

}  // namespace rwadmm

#endif  // RWADMM_SYNC_BASELINES_HPP
