#ifndef RWADMM_ROUTING_HPP
#define RWADMM_ROUTING_HPP

#include <vector>

#include "rwadmm/rng.hpp"
#include "rwadmm/topology.hpp"

namespace rwadmm {

enum class RoutingKind { random_walk, intelligent };

// Samples the next hop from row `current` of the transition matrix.
int next_hop_random(int current, const TransitionMatrix& transition, RandomStream& rng);

// Greedy balancing hop: the neighbor (self excluded) with the fewest agent
// updates so far, ties broken towards the lowest agent index. Reading the
// counters is free; only the token hop itself is charged by the simulator.
int next_hop_intelligent(int current, const Network& net,
                         const std::vector<long>& update_counts);

}  // namespace rwadmm

#endif  // RWADMM_ROUTING_HPP
