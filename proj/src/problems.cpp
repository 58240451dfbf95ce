#include "rwadmm/problems.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "rwadmm/rng.hpp"
#include "rwadmm/trace_io.hpp"

namespace rwadmm {

namespace {

double sigmoid(double u) {
  if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

double softplus(double u) {
  // log(1 + exp(u)) without overflow
  return u > 0.0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u));
}

// Largest eigenvalue of a symmetric PSD matrix by power iteration.
double largest_eigenvalue(const Eigen::MatrixXd& a) {
  const auto n = a.rows();
  if (a.cwiseAbs().maxCoeff() == 0.0) return 0.0;

  RandomStream rng(0x2545f4914f6cdd1dULL);  // fixed start, independent of callers
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.uniform() + 0.5;
  v.normalize();

  double lambda = 0.0;
  for (int it = 0; it < 100000; ++it) {
    Eigen::VectorXd w = a * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    const double next = v.dot(a * v);
    if (std::abs(next - lambda) <= 1e-10 * std::max(1.0, std::abs(next))) return next;
    lambda = next;
  }
  return lambda;
}

void check_shapes(const std::vector<LocalDataset>& datasets) {
  if (datasets.empty()) throw std::invalid_argument("problem needs at least one agent");
  const auto dim = datasets.front().features.rows();
  if (dim < 1) throw std::invalid_argument("feature dimension must be positive");
  for (const auto& d : datasets) {
    if (d.features.rows() != dim)
      throw std::invalid_argument("agents disagree on the feature dimension");
    if (d.features.cols() != d.targets.size())
      throw std::invalid_argument("feature/target sample counts differ");
    if (d.samples() < 1) throw std::invalid_argument("agent with an empty dataset");
  }
}

}  // namespace

const char* to_string(LossFamily family) {
  return family == LossFamily::least_squares ? "least_squares" : "logistic";
}

LossFamily loss_family_from_string(std::string_view name) {
  if (name == "least_squares") return LossFamily::least_squares;
  if (name == "logistic") return LossFamily::logistic;
  throw std::invalid_argument("unknown loss family '" + std::string(name) + "'");
}

ConsensusProblem synthesize_least_squares(int n_agents, int samples_per_agent,
                                          int dimension, std::uint64_t seed) {
  if (n_agents < 1 || samples_per_agent < 1 || dimension < 1)
    throw std::invalid_argument("synthesize_least_squares: sizes must be positive");

  RandomStream rng(derive_seed(seed, "data"));
  std::vector<LocalDataset> datasets(n_agents);
  for (auto& d : datasets) {
    d.features.resize(dimension, samples_per_agent);
    d.targets.resize(samples_per_agent);
    for (int j = 0; j < samples_per_agent; ++j) {
      for (int k = 0; k < dimension; ++k) d.features(k, j) = rng.uniform();
      d.targets[j] = rng.uniform();
    }
  }
  ConsensusProblem problem = make_problem(LossFamily::least_squares, std::move(datasets));
  return problem;
}

ConsensusProblem synthesize_logistic(int n_agents, int samples_per_agent, int dimension,
                                     std::uint64_t seed,
                                     const Eigen::VectorXd* hidden_vector) {
  if (n_agents < 1 || samples_per_agent < 1 || dimension < 1)
    throw std::invalid_argument("synthesize_logistic: sizes must be positive");

  Eigen::VectorXd x0(dimension);
  if (hidden_vector) {
    if (hidden_vector->size() != dimension)
      throw std::invalid_argument("synthesize_logistic: hidden vector has wrong size");
    x0 = *hidden_vector;
  } else {
    RandomStream hidden_rng(derive_seed(seed, "hidden"));
    for (int k = 0; k < dimension; ++k) x0[k] = hidden_rng.normal();
  }

  RandomStream rng(derive_seed(seed, "data"));
  std::vector<LocalDataset> datasets(n_agents);
  for (auto& d : datasets) {
    d.features.resize(dimension, samples_per_agent);
    d.targets.resize(samples_per_agent);
    for (int j = 0; j < samples_per_agent; ++j) {
      for (int k = 0; k < dimension; ++k) d.features(k, j) = rng.normal();
      const double u = rng.uniform();
      d.targets[j] = (u <= sigmoid(x0.dot(d.features.col(j)))) ? 1.0 : -1.0;
    }
  }
  return make_problem(LossFamily::logistic, std::move(datasets));
}

ConsensusProblem make_problem(LossFamily family, std::vector<LocalDataset> datasets,
                              bool compute_oracle) {
  check_shapes(datasets);
  ConsensusProblem problem;
  problem.family = family;
  problem.dimension = static_cast<int>(datasets.front().features.rows());
  problem.datasets = std::move(datasets);
  if (compute_oracle) problem.oracle_solution = solve_oracle(problem);
  return problem;
}

double local_loss(const LocalDataset& data, LossFamily family, const Eigen::VectorXd& x) {
  const double b = static_cast<double>(data.samples());
  if (family == LossFamily::least_squares) {
    const Eigen::VectorXd r = data.features.transpose() * x - data.targets;
    return r.squaredNorm() / b;
  }
  const Eigen::VectorXd scores = data.features.transpose() * x;
  double sum = 0.0;
  for (Eigen::Index j = 0; j < scores.size(); ++j)
    sum += softplus(-data.targets[j] * scores[j]);
  return sum / b;
}

Eigen::VectorXd local_gradient(const LocalDataset& data, LossFamily family,
                               const Eigen::VectorXd& x) {
  const double b = static_cast<double>(data.samples());
  if (family == LossFamily::least_squares) {
    return (2.0 / b) * (data.features * (data.features.transpose() * x - data.targets));
  }
  const Eigen::VectorXd scores = data.features.transpose() * x;
  Eigen::VectorXd weights(scores.size());
  for (Eigen::Index j = 0; j < scores.size(); ++j)
    weights[j] = -data.targets[j] * sigmoid(-data.targets[j] * scores[j]);
  return (data.features * weights) / b;
}

double lipschitz_constant(const ConsensusProblem& problem) {
  double worst = 0.0;
  for (const auto& d : problem.datasets) {
    const double b = static_cast<double>(d.samples());
    const double top = largest_eigenvalue(d.features * d.features.transpose());
    const double scale =
        problem.family == LossFamily::least_squares ? 2.0 / b : 1.0 / (4.0 * b);
    worst = std::max(worst, scale * top);
  }
  return worst;
}

Eigen::VectorXd solve_oracle(const ConsensusProblem& problem) {
  check_shapes(problem.datasets);
  const int n = problem.dimension;

  if (problem.family == LossFamily::least_squares) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
    for (const auto& d : problem.datasets) {
      const double s = 2.0 / static_cast<double>(d.samples());
      a += s * (d.features * d.features.transpose());
      c += s * (d.features * d.targets);
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
    const Eigen::VectorXd diag = ldlt.vectorD().cwiseAbs();
    if (ldlt.info() == Eigen::Success &&
        diag.minCoeff() > 1e-12 * std::max(1.0, diag.maxCoeff())) {
      return ldlt.solve(c);
    }
    // Rank-deficient data: return the minimum-norm stationary point.  The
    // right-hand side always lies in the range of the normal matrix, so the
    // pseudo-inverse solution solves the system exactly.
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
    if (eig.info() != Eigen::Success)
      throw std::runtime_error("solve_oracle: eigendecomposition failed");
    const Eigen::VectorXd& values = eig.eigenvalues();
    const double cutoff = 1e-12 * std::max(1.0, values.cwiseAbs().maxCoeff());
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < n; ++k)
      if (values[k] > cutoff) inv[k] = 1.0 / values[k];
    return eig.eigenvectors() * inv.asDiagonal() *
           (eig.eigenvectors().transpose() * c);
  }

  // Full-gradient descent with backtracking on sum_i f_i. Deliberately free of
  // matrix factorizations so this reference path shares nothing with the
  // closed-form linear solves used by the consensus updates it certifies.
  const auto total_loss = [&](const Eigen::VectorXd& x) {
    double v = 0.0;
    for (const auto& d : problem.datasets) v += local_loss(d, problem.family, x);
    return v;
  };
  const auto total_gradient = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
    for (const auto& d : problem.datasets) g += local_gradient(d, problem.family, x);
    return g;
  };

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  double f = total_loss(x);
  Eigen::VectorXd g = total_gradient(x);
  double step = 1.0;
  for (int it = 0; it < 100000; ++it) {
    const double gn = g.norm();
    if (gn <= 1e-10) return x;

    double t = step;
    // An Armijo test on f stops being meaningful once the expected decrease
    // t*||g||^2 falls below the rounding noise of f itself (that happens near
    // ||g|| ~ sqrt(eps), far above the 1e-10 target). Past that point
    // backtrack on the gradient norm instead, which stays resolvable.
    if (1e-4 * t * gn * gn > 1e-12 * std::max(1.0, std::abs(f))) {
      for (;;) {
        const Eigen::VectorXd cand = x - t * g;
        const double fc = total_loss(cand);
        if (fc <= f - 1e-4 * t * gn * gn) {
          x = cand;
          f = fc;
          g = total_gradient(x);
          break;
        }
        t *= 0.5;
        if (t < 1e-18)
          throw std::runtime_error("solve_oracle: backtracking stalled");
      }
    } else {
      t = std::max(t, 1.0);
      for (;;) {
        const Eigen::VectorXd cand = x - t * g;
        const Eigen::VectorXd gc = total_gradient(cand);
        if (gc.norm() < gn) {
          x = cand;
          g = gc;
          break;
        }
        t *= 0.5;
        if (t < 1e-18)
          throw std::runtime_error("solve_oracle: backtracking stalled");
      }
    }
    step = std::min(2.0 * t, 1e4);
  }
  throw std::runtime_error("solve_oracle: gradient descent did not reach 1e-10");
}

void save_datasets_csv(const ConsensusProblem& problem, const std::filesystem::path& path) {
  std::string out = "agent_id,target";
  for (int k = 1; k <= problem.dimension; ++k) out += ",feature_" + std::to_string(k);
  out += '\n';
  for (int i = 0; i < problem.n_agents(); ++i) {
    const auto& d = problem.datasets[i];
    for (Eigen::Index j = 0; j < d.samples(); ++j) {
      out += std::to_string(i);
      out += ',';
      out += format_g17(d.targets[j]);
      for (int k = 0; k < problem.dimension; ++k) {
        out += ',';
        out += format_g17(d.features(k, j));
      }
      out += '\n';
    }
  }
  write_file_atomic(path, out);
}

ConsensusProblem load_datasets_csv(const std::filesystem::path& path, LossFamily family,
                                   bool compute_oracle) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());

  const auto fail = [&](int line, const std::string& what) -> void {
    throw std::runtime_error(path.string() + ":" + std::to_string(line) + ": " + what);
  };

  std::string line;
  int lineno = 0;
  int dimension = -1;
  std::vector<std::vector<double>> targets;     // per agent
  std::vector<std::vector<double>> features;    // per agent, sample-major

  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (lineno == 1 && line.rfind("agent_id,", 0) == 0) continue;  // header

    std::vector<std::string_view> fields;
    std::string_view sv(line);
    std::size_t start = 0;
    while (true) {
      const auto comma = sv.find(',', start);
      fields.push_back(sv.substr(start, comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() < 3) fail(lineno, "expected agent_id,target,feature columns");
    if (dimension < 0) dimension = static_cast<int>(fields.size()) - 2;
    if (static_cast<int>(fields.size()) != dimension + 2)
      fail(lineno, "inconsistent column count");

    const auto to_double = [&](std::string_view f) {
      double v = 0.0;
      const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
      if (res.ec != std::errc{} || res.ptr != f.data() + f.size())
        fail(lineno, "bad numeric field '" + std::string(f) + "'");
      return v;
    };

    long agent = -1;
    {
      const auto f = fields[0];
      const auto res = std::from_chars(f.data(), f.data() + f.size(), agent);
      if (res.ec != std::errc{} || res.ptr != f.data() + f.size() || agent < 0)
        fail(lineno, "bad agent_id '" + std::string(f) + "'");
    }
    if (agent >= static_cast<long>(targets.size())) {
      targets.resize(agent + 1);
      features.resize(agent + 1);
    }
    targets[agent].push_back(to_double(fields[1]));
    for (int k = 0; k < dimension; ++k)
      features[agent].push_back(to_double(fields[2 + k]));
  }

  if (targets.empty()) throw std::runtime_error(path.string() + ": no samples");
  std::vector<LocalDataset> datasets(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const auto b = targets[i].size();
    if (b == 0)
      throw std::runtime_error(path.string() + ": agent " + std::to_string(i) +
                               " has no samples");
    datasets[i].targets = Eigen::Map<Eigen::VectorXd>(targets[i].data(), b);
    datasets[i].features =
        Eigen::Map<Eigen::MatrixXd>(features[i].data(), dimension, b);
  }
  return make_problem(family, std::move(datasets), compute_oracle);
}

}  // namespace rwadmm
