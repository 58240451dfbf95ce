#ifndef RWADMM_TOPOLOGY_HPP
#define RWADMM_TOPOLOGY_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

namespace rwadmm {

// Undirected, connected, simple communication graph over agents 0..n-1.
struct Network {
  int n_agents = 0;
  std::vector<std::pair<int, int>> edges;    // normalized (a < b), sorted
  std::vector<std::vector<int>> neighbors;   // sorted adjacency lists

  int degree(int i) const { return static_cast<int>(neighbors[i].size()); }
};

// round(density * n(n-1)/2)
long long edge_count_for_density(int n_agents, double density);

// Samples a uniform spanning tree (random Pruefer sequence), then adds
// uniformly chosen non-tree edges until the edge count reaches
// edge_count_for_density. Throws std::invalid_argument when the requested
// density cannot keep the graph connected.
Network generate_network(int n_agents, double density, std::uint64_t seed);

// Builds a network from an explicit edge list. Validates that the graph is
// simple and connected.
Network network_from_edges(int n_agents, std::vector<std::pair<int, int>> edges);

struct TransitionMatrix {
  Eigen::MatrixXd probs;  // row i = distribution over next hops from agent i
};

// Row i uniform over the closed neighborhood of i (include_self) or over the
// neighbors only.
TransitionMatrix build_transition_matrix(const Network& net, bool include_self = true);

// Metropolis weights W_ij = 1/(1 + max(deg_i, deg_j)) on edges, diagonal
// filled to make rows sum to one. Symmetric and doubly stochastic.
TransitionMatrix build_mixing_matrix(const Network& net);

// One "src,dst" row per edge.
void save_edges_csv(const Network& net, const std::filesystem::path& path);

}  // namespace rwadmm

#endif  // RWADMM_TOPOLOGY_HPP
