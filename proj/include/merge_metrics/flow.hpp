#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace merge_metrics {

/// Bipartite transport feasibility problem: route supplies to demands along
/// admissible (source, sink) edges of unbounded capacity.
struct FlowProblem {
  std::vector<double> supplies;
  std::vector<double> demands;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
};

struct FlowArc {
  std::size_t source;
  std::size_t sink;
  double amount;
};

struct FlowResult {
  double value = 0.0;
  /// Positive arc flows only.
  std::vector<FlowArc> arcs;

  /// Dense supplies.size() x demands.size() view of `arcs`.
  std::vector<std::vector<double>> matrix(std::size_t sources, std::size_t sinks) const;
};

/// Maximum routable mass (Edmonds-Karp on real capacities). Throws
/// MalformedProblem for negative or non-finite masses, totals that differ
/// from 1 by more than 1e-12, or out-of-range edges.
FlowResult max_flow(const FlowProblem& problem);

}  // namespace merge_metrics
