#include "rwadmm/topology.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

#include "rwadmm/rng.hpp"
#include "rwadmm/trace_io.hpp"

namespace rwadmm {

namespace {

std::vector<std::pair<int, int>> random_spanning_tree(int n, RandomStream& rng) {
  std::vector<std::pair<int, int>> edges;
  if (n < 2) return edges;
  if (n == 2) {
    edges.emplace_back(0, 1);
    return edges;
  }

  // A uniform Pruefer sequence decodes to a uniform labeled tree.
  std::vector<int> seq(n - 2);
  for (int& s : seq) s = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n)));

  std::vector<int> degree(n, 1);
  for (int s : seq) ++degree[s];

  edges.reserve(n - 1);
  int ptr = 0;
  while (degree[ptr] != 1) ++ptr;
  int leaf = ptr;
  for (int s : seq) {
    edges.emplace_back(std::min(leaf, s), std::max(leaf, s));
    if (--degree[s] == 1 && s < ptr) {
      leaf = s;
    } else {
      ++ptr;
      while (degree[ptr] != 1) ++ptr;
      leaf = ptr;
    }
  }
  edges.emplace_back(std::min(leaf, n - 1), std::max(leaf, n - 1));
  return edges;
}

void finalize(Network& net) {
  std::sort(net.edges.begin(), net.edges.end());
  net.neighbors.assign(net.n_agents, {});
  for (auto [a, b] : net.edges) {
    net.neighbors[a].push_back(b);
    net.neighbors[b].push_back(a);
  }
  for (auto& adj : net.neighbors) std::sort(adj.begin(), adj.end());
}

bool connected(int n, const std::vector<std::vector<int>>& neighbors) {
  if (n <= 1) return true;
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int visited = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int w : neighbors[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++visited;
        stack.push_back(w);
      }
    }
  }
  return visited == n;
}

}  // namespace

long long edge_count_for_density(int n_agents, double density) {
  const double max_edges = 0.5 * static_cast<double>(n_agents) * (n_agents - 1);
  return std::llround(density * max_edges);
}

Network generate_network(int n_agents, double density, std::uint64_t seed) {
  if (n_agents < 1) throw std::invalid_argument("generate_network: need at least one agent");
  if (!(density > 0.0) || density > 1.0)
    throw std::invalid_argument("generate_network: density must lie in (0, 1]");

  const long long target = edge_count_for_density(n_agents, density);
  if (n_agents >= 2 && target < n_agents - 1)
    throw std::invalid_argument(
        "generate_network: density " + std::to_string(density) + " yields " +
        std::to_string(target) + " edges, fewer than the " +
        std::to_string(n_agents - 1) + " needed for a connected graph");

  Network net;
  net.n_agents = n_agents;

  RandomStream rng(derive_seed(seed, "graph"));
  net.edges = random_spanning_tree(n_agents, rng);

  const long long extra = target - static_cast<long long>(net.edges.size());
  if (extra > 0) {
    std::set<std::pair<int, int>> used(net.edges.begin(), net.edges.end());
    std::vector<std::pair<int, int>> candidates;
    candidates.reserve(static_cast<std::size_t>(
        n_agents * (n_agents - 1) / 2 - static_cast<long long>(used.size())));
    for (int a = 0; a < n_agents; ++a)
      for (int b = a + 1; b < n_agents; ++b)
        if (!used.count({a, b})) candidates.emplace_back(a, b);

    // partial Fisher-Yates: the first `extra` slots are a uniform sample
    for (long long i = 0; i < extra; ++i) {
      const auto j = i + static_cast<long long>(
                             rng.uniform_int(static_cast<std::uint64_t>(candidates.size() - i)));
      std::swap(candidates[i], candidates[j]);
      net.edges.push_back(candidates[i]);
    }
  }

  finalize(net);
  return net;
}

Network network_from_edges(int n_agents, std::vector<std::pair<int, int>> edges) {
  if (n_agents < 1) throw std::invalid_argument("network_from_edges: need at least one agent");
  std::set<std::pair<int, int>> seen;
  for (auto& e : edges) {
    if (e.first == e.second)
      throw std::invalid_argument("network_from_edges: self-loop on agent " +
                                  std::to_string(e.first));
    if (e.first > e.second) std::swap(e.first, e.second);
    if (e.first < 0 || e.second >= n_agents)
      throw std::invalid_argument("network_from_edges: edge endpoint out of range");
    if (!seen.insert(e).second)
      throw std::invalid_argument("network_from_edges: duplicate edge");
  }

  Network net;
  net.n_agents = n_agents;
  net.edges = std::move(edges);
  finalize(net);
  if (!connected(n_agents, net.neighbors))
    throw std::invalid_argument("network_from_edges: graph is not connected");
  return net;
}

TransitionMatrix build_transition_matrix(const Network& net, bool include_self) {
  const int n = net.n_agents;
  TransitionMatrix t;
  t.probs = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const int support = net.degree(i) + (include_self ? 1 : 0);
    if (support == 0)
      throw std::invalid_argument(
          "build_transition_matrix: agent " + std::to_string(i) +
          " has no neighbors and self-loops are disabled");
    const double p = 1.0 / support;
    if (include_self) t.probs(i, i) = p;
    for (int j : net.neighbors[i]) t.probs(i, j) = p;
  }
  return t;
}

TransitionMatrix build_mixing_matrix(const Network& net) {
  const int n = net.n_agents;
  TransitionMatrix w;
  w.probs = Eigen::MatrixXd::Zero(n, n);
  for (auto [a, b] : net.edges) {
    const double v = 1.0 / (1.0 + std::max(net.degree(a), net.degree(b)));
    w.probs(a, b) = v;
    w.probs(b, a) = v;
  }
  for (int i = 0; i < n; ++i) w.probs(i, i) = 1.0 - w.probs.row(i).sum();
  return w;
}

void save_edges_csv(const Network& net, const std::filesystem::path& path) {
  std::string out = "src,dst\n";
  for (auto [a, b] : net.edges) {
    out += std::to_string(a);
    out += ',';
    out += std::to_string(b);
    out += '\n';
  }
  write_file_atomic(path, out);
}

}  // namespace rwadmm
