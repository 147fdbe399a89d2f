#include "merge_metrics/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "merge_metrics/errors.hpp"
#include "merge_metrics/prokhorov.hpp"

namespace merge_metrics {

namespace {

constexpr double kDropBelow = 1e-15;
constexpr double kCouplingMassTolerance = 1e-9;

// Per-point residual after the flow, with rounding noise cut to zero.
std::vector<double> residual(const std::vector<double>& weights, const std::vector<double>& used) {
  std::vector<double> out(weights.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double r = weights[i] - used[i];
    out[i] = r > kDropBelow ? r : 0.0;
  }
  return out;
}

}  // namespace

Coupling::Coupling(SpacePtr space, std::vector<CouplingEntry> entries)
    : space_(std::move(space)), entries_(std::move(entries)) {
  if (!space_) throw Error("InvalidArgument", "coupling needs a space");
  std::vector<double> masses;
  masses.reserve(entries_.size());
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    const auto& e = entries_[k];
    if (e.source >= space_->size() || e.target >= space_->size()) {
      throw Error("InvalidArgument", "coupling entry index out of range");
    }
    if (!std::isfinite(e.mass) || e.mass < 0.0) throw NegativeWeight(k);
    masses.push_back(e.mass);
  }
  const double total = compensated_sum(masses);
  if (std::abs(total - 1.0) > kCouplingMassTolerance) throw NotNormalized(total);
}

std::vector<double> Coupling::first_marginal() const {
  std::vector<double> out(space_->size(), 0.0);
  for (const auto& e : entries_) out[e.source] += e.mass;
  return out;
}

std::vector<double> Coupling::second_marginal() const {
  std::vector<double> out(space_->size(), 0.0);
  for (const auto& e : entries_) out[e.target] += e.mass;
  return out;
}

double Coupling::mass_beyond(double threshold) const {
  std::vector<double> far;
  for (const auto& e : entries_) {
    if (space_->dist(e.source, e.target) > threshold) far.push_back(e.mass);
  }
  return compensated_sum(far);
}

double Coupling::marginal_error(const DiscreteMeasure& p, const DiscreteMeasure& q) const {
  require_common_space(space_, p.space());
  require_common_space(space_, q.space());
  const auto a = first_marginal();
  const auto b = second_marginal();
  double err = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    err = std::max(err, std::abs(a[i] - p[i]));
    err = std::max(err, std::abs(b[i] - q[i]));
  }
  return err;
}

OptimalCoupling optimal_coupling(const DiscreteMeasure& p, const DiscreteMeasure& q) {
  require_common_space(p.space(), q.space());
  const ProkhorovResult best = prokhorov_distance(p, q);
  const FlowResult flow = transport_within(p, q, best.breakpoint);

  std::map<std::pair<std::size_t, std::size_t>, double> joint;
  std::vector<double> sent(p.size(), 0.0);
  std::vector<double> received(q.size(), 0.0);
  for (const auto& arc : flow.arcs) {
    joint[{arc.source, arc.sink}] += arc.amount;
    sent[arc.source] += arc.amount;
    received[arc.sink] += arc.amount;
  }

  // Northwest-corner fill of what the flow left behind.
  std::vector<double> supply = residual(p.weights(), sent);
  std::vector<double> demand = residual(q.weights(), received);
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < supply.size() && j < demand.size()) {
    if (supply[i] <= 0.0) {
      ++i;
      continue;
    }
    if (demand[j] <= 0.0) {
      ++j;
      continue;
    }
    const double m = std::min(supply[i], demand[j]);
    joint[{i, j}] += m;
    supply[i] -= m;
    demand[j] -= m;
    if (supply[i] <= kDropBelow) supply[i] = 0.0;
    if (demand[j] <= kDropBelow) demand[j] = 0.0;
  }

  std::vector<CouplingEntry> entries;
  for (const auto& [key, mass] : joint) {
    if (mass >= kDropBelow) entries.push_back({key.first, key.second, mass});
  }
  Coupling coupling(p.space(), std::move(entries));
  const double alpha = ky_fan(coupling);
  return {std::move(coupling), alpha};
}

double ky_fan(const Coupling& coupling) {
  const MetricSpace& space = *coupling.space();
  std::vector<std::pair<double, double>> by_distance;
  by_distance.reserve(coupling.entries().size());
  for (const auto& e : coupling.entries()) {
    if (e.mass > 0.0) by_distance.emplace_back(space.dist(e.source, e.target), e.mass);
  }
  std::sort(by_distance.begin(), by_distance.end());

  // Tail masses, summed from the far end.
  std::vector<double> tail(by_distance.size() + 1, 0.0);
  for (std::size_t k = by_distance.size(); k-- > 0;) tail[k] = tail[k + 1] + by_distance[k].second;

  // Threshold t = 0 first, then each distinct distance t: the mass strictly
  // beyond t is the tail after the last entry at t.
  std::size_t k = 0;
  while (k < by_distance.size() && by_distance[k].first <= 0.0) ++k;
  double best = std::min(tail[k], 1.0);
  while (k < by_distance.size()) {
    const double t = by_distance[k].first;
    if (t >= best) break;
    while (k < by_distance.size() && by_distance[k].first == t) ++k;
    best = std::min(best, std::max(t, tail[k]));
  }
  return best;
}

bool PropertyAReport::passed() const {
  return std::all_of(records.begin(), records.end(), [](const PropertyARecord& r) { return r.holds; });
}

DiscreteMeasure first_marginal_measure(const Coupling& coupling) {
  return DiscreteMeasure(coupling.space(), coupling.first_marginal());
}

DiscreteMeasure second_marginal_measure(const Coupling& coupling) {
  return DiscreteMeasure(coupling.space(), coupling.second_marginal());
}

PropertyAReport property_A_check(const std::vector<Coupling>& sequence) {
  PropertyAReport report;
  report.records.reserve(sequence.size());
  for (const auto& gamma : sequence) {
    PropertyARecord r;
    r.pi = prokhorov_distance(first_marginal_measure(gamma), second_marginal_measure(gamma)).pi;
    r.ky_fan = ky_fan(gamma);
    r.holds = r.pi <= r.ky_fan + 1e-9;
    report.records.push_back(r);
  }
  return report;
}

}  // namespace merge_metrics
