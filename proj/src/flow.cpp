#include "merge_metrics/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "merge_metrics/errors.hpp"
#include "merge_metrics/measures.hpp"

namespace merge_metrics {

namespace {

// Residual capacities at or below this are treated as saturated.
constexpr double kResidualEpsilon = 1e-15;
// Capacity of source-to-sink transport edges; exceeds any routable mass.
constexpr double kUnbounded = 4.0;

struct Edge {
  std::size_t to;
  std::size_t reverse;
  double capacity;
};

class Network {
 public:
  explicit Network(std::size_t nodes) : adjacency_(nodes) {}

  std::size_t add_edge(std::size_t from, std::size_t to, double capacity) {
    adjacency_[from].push_back({to, adjacency_[to].size(), capacity});
    adjacency_[to].push_back({from, adjacency_[from].size() - 1, 0.0});
    return adjacency_[from].size() - 1;
  }

  double augment_all(std::size_t source, std::size_t sink) {
    double total = 0.0;
    std::vector<std::pair<std::size_t, std::size_t>> parent(adjacency_.size());
    while (true) {
      std::fill(parent.begin(), parent.end(),
                std::pair{std::numeric_limits<std::size_t>::max(), std::size_t{0}});
      parent[source] = {source, 0};
      std::queue<std::size_t> frontier;
      frontier.push(source);
      while (!frontier.empty() && parent[sink].first == std::numeric_limits<std::size_t>::max()) {
        const std::size_t u = frontier.front();
        frontier.pop();
        for (std::size_t e = 0; e < adjacency_[u].size(); ++e) {
          const Edge& edge = adjacency_[u][e];
          if (edge.capacity > kResidualEpsilon &&
              parent[edge.to].first == std::numeric_limits<std::size_t>::max()) {
            parent[edge.to] = {u, e};
            frontier.push(edge.to);
          }
        }
      }
      if (parent[sink].first == std::numeric_limits<std::size_t>::max()) break;
      double bottleneck = std::numeric_limits<double>::infinity();
      for (std::size_t v = sink; v != source; v = parent[v].first) {
        const auto [u, e] = parent[v];
        bottleneck = std::min(bottleneck, adjacency_[u][e].capacity);
      }
      for (std::size_t v = sink; v != source; v = parent[v].first) {
        const auto [u, e] = parent[v];
        Edge& edge = adjacency_[u][e];
        edge.capacity -= bottleneck;
        adjacency_[v][edge.reverse].capacity += bottleneck;
      }
      total += bottleneck;
    }
    return total;
  }

  double flow_on(std::size_t from, std::size_t edge_index) const {
    const Edge& edge = adjacency_[from][edge_index];
    return adjacency_[edge.to][edge.reverse].capacity;
  }

 private:
  std::vector<std::vector<Edge>> adjacency_;
};

Error malformed(const std::string& why) { return Error("MalformedProblem", why); }

void check_masses(const std::vector<double>& masses, const char* side) {
  for (double m : masses) {
    if (!(m >= 0.0) || !std::isfinite(m)) throw malformed(std::string(side) + " must be finite and nonnegative");
  }
  if (std::abs(compensated_sum(masses) - 1.0) > kNormalizationTolerance) {
    throw malformed(std::string(side) + " must sum to 1");
  }
}

}  // namespace

std::vector<std::vector<double>> FlowResult::matrix(std::size_t sources, std::size_t sinks) const {
  std::vector<std::vector<double>> out(sources, std::vector<double>(sinks, 0.0));
  for (const FlowArc& arc : arcs) out[arc.source][arc.sink] += arc.amount;
  return out;
}

FlowResult max_flow(const FlowProblem& problem) {
  check_masses(problem.supplies, "supplies");
  check_masses(problem.demands, "demands");
  const std::size_t a = problem.supplies.size();
  const std::size_t b = problem.demands.size();
  for (const auto& [i, j] : problem.edges) {
    if (i >= a || j >= b) throw malformed("edge (" + std::to_string(i) + ", " + std::to_string(j) + ") out of range");
  }

  // Node layout: 0 = source, 1..a = supply nodes, a+1..a+b = demand nodes, a+b+1 = sink.
  const std::size_t source = 0;
  const std::size_t sink = a + b + 1;
  Network net(a + b + 2);
  for (std::size_t i = 0; i < a; ++i) net.add_edge(source, 1 + i, problem.supplies[i]);
  for (std::size_t j = 0; j < b; ++j) net.add_edge(1 + a + j, sink, problem.demands[j]);
  std::vector<std::size_t> handles(problem.edges.size());
  for (std::size_t e = 0; e < problem.edges.size(); ++e) {
    const auto [i, j] = problem.edges[e];
    handles[e] = net.add_edge(1 + i, 1 + a + j, kUnbounded);
  }

  FlowResult result;
  result.value = net.augment_all(source, sink);
  for (std::size_t e = 0; e < problem.edges.size(); ++e) {
    const auto [i, j] = problem.edges[e];
    const double amount = net.flow_on(1 + i, handles[e]);
    if (amount > 0.0) result.arcs.push_back({i, j, amount});
  }
  return result;
}

}  // namespace merge_metrics
