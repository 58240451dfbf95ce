#include "rwadmm/routing.hpp"

#include <stdexcept>
#include <string>

namespace rwadmm {

int next_hop_random(int current, const TransitionMatrix& transition, RandomStream& rng) {
  const auto row = transition.probs.row(current);
  const double u = rng.uniform();
  double cum = 0.0;
  int last_positive = -1;
  for (Eigen::Index j = 0; j < row.size(); ++j) {
    const double p = row[j];
    if (p <= 0.0) continue;
    last_positive = static_cast<int>(j);
    cum += p;
    if (u < cum) return last_positive;
  }
  if (last_positive < 0)
    throw std::invalid_argument("next_hop_random: empty transition row " +
                                std::to_string(current));
  return last_positive;  // u landed in the rounding sliver past the last bucket
}

int next_hop_intelligent(int current, const Network& net,
                         const std::vector<long>& update_counts) {
  const auto& options = net.neighbors[current];
  if (options.empty())
    throw std::invalid_argument("next_hop_intelligent: agent " +
                                std::to_string(current) + " has no neighbors");
  int best = options.front();
  for (int j : options)
    if (update_counts[j] < update_counts[best]) best = j;  // '<' keeps lowest index on ties
  return best;
}

}  // namespace rwadmm
