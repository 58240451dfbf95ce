#ifndef RWADMM_PROBLEMS_HPP
#define RWADMM_PROBLEMS_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

namespace rwadmm {

enum class LossFamily { least_squares, logistic };

const char* to_string(LossFamily family);
LossFamily loss_family_from_string(std::string_view name);

// Per-agent training data; one column of `features` per sample.
struct LocalDataset {
  Eigen::MatrixXd features;  // dimension x samples
  Eigen::VectorXd targets;   // samples

  Eigen::Index samples() const { return targets.size(); }
};

// Local objectives, per agent i with b_i samples (o_j, t_j):
//   least_squares: f_i(x) = (1/b_i) sum_j (x.o_j - t_j)^2
//   logistic:      f_i(x) = (1/b_i) sum_j log(1 + exp(-t_j x.o_j))
struct ConsensusProblem {
  LossFamily family = LossFamily::least_squares;
  int dimension = 0;
  std::vector<LocalDataset> datasets;
  Eigen::VectorXd oracle_solution;  // empty until computed

  int n_agents() const { return static_cast<int>(datasets.size()); }
  bool has_oracle() const {
    return dimension > 0 && oracle_solution.size() == dimension;
  }
};

// Features and targets i.i.d. U(0, 1).
ConsensusProblem synthesize_least_squares(int n_agents, int samples_per_agent,
                                          int dimension, std::uint64_t seed);

// Features i.i.d. N(0, I); labels t = +1 when u <= sigmoid(x0 . o) for
// u ~ U(0, 1) and a hidden x0 ~ N(0, I), else -1. Tests may pin x0 via
// `hidden_vector`.
ConsensusProblem synthesize_logistic(int n_agents, int samples_per_agent,
                                     int dimension, std::uint64_t seed,
                                     const Eigen::VectorXd* hidden_vector = nullptr);

// Assembles a problem from explicit datasets (all agents share the feature
// dimension). Computes the reference solution unless told otherwise.
ConsensusProblem make_problem(LossFamily family, std::vector<LocalDataset> datasets,
                              bool compute_oracle = true);

double local_loss(const LocalDataset& data, LossFamily family, const Eigen::VectorXd& x);
Eigen::VectorXd local_gradient(const LocalDataset& data, LossFamily family,
                               const Eigen::VectorXd& x);

// Smoothness constant L = max_i L_i with
//   least_squares: L_i = (2/b_i)  lambda_max(O_i O_i^T)
//   logistic:      L_i = (1/4b_i) lambda_max(O_i O_i^T)
// lambda_max by power iteration (relative tolerance 1e-10).
double lipschitz_constant(const ConsensusProblem& problem);

// Minimizer of sum_i f_i. Least squares solves the aggregate normal
// equations (near-singular systems get a 1e-12 ridge and a warning on
// stderr); logistic runs full-gradient descent with Armijo backtracking
// until the gradient norm is at most 1e-10.
Eigen::VectorXd solve_oracle(const ConsensusProblem& problem);

// One row per sample: agent_id,target,feature_1..feature_n.
void save_datasets_csv(const ConsensusProblem& problem, const std::filesystem::path& path);
ConsensusProblem load_datasets_csv(const std::filesystem::path& path, LossFamily family,
                                   bool compute_oracle = true);

}  // namespace rwadmm

#endif  // RWADMM_PROBLEMS_HPP
