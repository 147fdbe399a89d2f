#include "merge_metrics/function.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "merge_metrics/errors.hpp"

namespace merge_metrics {

namespace {

constexpr std::size_t kCertificateCheckLimit = 4096;
constexpr double kCertificateSlack = 1e-12;

Error invalid_modulus(const std::string& why) { return Error("InvalidModulus", why); }

}  // namespace

Modulus::Modulus(std::vector<std::pair<double, double>> knots, Tail tail)
    : knots_(std::move(knots)), tail_(tail) {
  if (knots_.empty()) throw invalid_modulus("modulus needs at least one knot");
  // A knot at h = 0 is allowed only as (0, 0); the origin is implicit.
  if (knots_.front().first == 0.0) {
    if (knots_.front().second != 0.0) throw invalid_modulus("omega(0) must be 0");
    knots_.erase(knots_.begin());
    if (knots_.empty()) throw invalid_modulus("modulus needs a knot at positive h");
  }
  double prev_h = 0.0;
  double prev_w = 0.0;
  for (const auto& [h, w] : knots_) {
    if (!std::isfinite(h) || !std::isfinite(w)) throw invalid_modulus("knots must be finite");
    if (!(h > prev_h)) throw invalid_modulus("knot positions must be strictly increasing and positive");
    if (w < prev_w) throw invalid_modulus("modulus must be nondecreasing");
    prev_h = h;
    prev_w = w;
  }
}

Modulus Modulus::linear(double slope) {
  if (!(slope >= 0.0) || !std::isfinite(slope)) throw invalid_modulus("slope must be finite and >= 0");
  return Modulus({{1.0, slope}}, Tail::Linear);
}

Modulus Modulus::zero() { return Modulus({{1.0, 0.0}}, Tail::Constant); }

double Modulus::operator()(double h) const {
  if (h <= 0.0) return 0.0;
  double h0 = 0.0;
  double w0 = 0.0;
  for (const auto& [h1, w1] : knots_) {
    if (h <= h1) {
      if (h == h1) return w1;
      return w0 + (h - h0) * ((w1 - w0) / (h1 - h0));
    }
    h0 = h1;
    w0 = w1;
  }
  if (tail_ == Tail::Constant) return w0;
  const double ha = knots_.size() >= 2 ? knots_[knots_.size() - 2].first : 0.0;
  const double wa = knots_.size() >= 2 ? knots_[knots_.size() - 2].second : 0.0;
  return w0 + (h - h0) * ((w0 - wa) / (h0 - ha));
}

FunctionOnSpace FunctionOnSpace::tabulated(SpacePtr space, std::vector<double> values) {
  if (!space) throw Error("InvalidArgument", "tabulated function needs a space");
  if (values.size() != space->size()) {
    throw Error("InvalidArgument", "function has " + std::to_string(values.size()) +
                                       " values for a space of " + std::to_string(space->size()) +
                                       " points");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) throw UndefinedAt(i);
  }
  FunctionOnSpace f;
  f.name_ = "tabulated";
  f.space_ = std::move(space);
  f.values_ = std::move(values);
  return f;
}

FunctionOnSpace FunctionOnSpace::analytic(std::string name, Rule rule,
                                          std::optional<Modulus> certificate) {
  if (!rule) throw Error("InvalidArgument", "analytic function needs a rule");
  FunctionOnSpace f;
  f.name_ = std::move(name);
  f.rule_ = std::move(rule);
  f.certificate_ = std::move(certificate);
  return f;
}

const SpacePtr& FunctionOnSpace::space() const {
  if (!is_tabulated()) throw Error("NotTabulated", "function '" + name_ + "' is not tabulated");
  return space_;
}

const std::vector<double>& FunctionOnSpace::values() const {
  if (!is_tabulated()) throw Error("NotTabulated", "function '" + name_ + "' is not tabulated");
  return values_;
}

double FunctionOnSpace::sup_norm() const {
  double best = 0.0;
  for (double v : values()) best = std::max(best, std::abs(v));
  return best;
}

double FunctionOnSpace::lip_norm() const {
  const auto& v = values();
  const MetricSpace& s = *space_;
  double best = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      best = std::max(best, std::abs(v[i] - v[j]) / s.dist(i, j));
    }
  }
  return best;
}

double FunctionOnSpace::evaluate(const MetricSpace& space, std::size_t i) const {
  if (is_tabulated()) {
    if (&space != space_.get() && !(space == *space_)) {
      throw Error("SpaceMismatch", "tabulated function evaluated on a different space");
    }
    return values_[i];
  }
  if (!space.has_coordinates() || space.dimension() == 0) throw UndefinedAt(i);
  const double v = rule_(space.coordinates()[i]);
  if (!std::isfinite(v)) throw UndefinedAt(i);
  return v;
}

FunctionOnSpace FunctionOnSpace::tabulate(const SpacePtr& space) const {
  if (is_tabulated()) return with_space(space);
  std::vector<double> values(space->size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = evaluate(*space, i);
  if (certificate_ && values.size() <= kCertificateCheckLimit) {
    const Modulus& omega = *certificate_;
    for (std::size_t i = 0; i < values.size(); ++i) {
      for (std::size_t j = i + 1; j < values.size(); ++j) {
        const double d = space->dist(i, j);
        const double bound = omega(d);
        if (std::abs(values[i] - values[j]) > bound + kCertificateSlack * std::max(bound, d)) {
          throw invalid_modulus("certificate of '" + name_ + "' violated between points " +
                                std::to_string(i) + " and " + std::to_string(j));
        }
      }
    }
  }
  FunctionOnSpace f = tabulated(space, std::move(values));
  f.name_ = name_;
  f.certificate_ = certificate_;
  return f;
}

FunctionOnSpace FunctionOnSpace::with_space(SpacePtr space) const {
  FunctionOnSpace f = tabulated(std::move(space), values());
  f.name_ = name_;
  f.certificate_ = certificate_;
  return f;
}

FunctionOnSpace named_function(const std::string& name, std::optional<Modulus> certificate) {
  if (name == "sin_quarter_pi_sq") {
    return FunctionOnSpace::analytic(
        name,
        [](std::span<const double> x) { return std::sin(std::numbers::pi / 4.0 * x[0] * x[0]); },
        std::move(certificate));
  }
  if (name == "identity") {
    return FunctionOnSpace::analytic(
        name, [](std::span<const double> x) { return x[0]; },
        certificate ? std::move(certificate) : std::optional<Modulus>(Modulus::linear(1.0)));
  }
  if (name == "bl_custom") {
    return FunctionOnSpace::analytic(
        name, [](std::span<const double> x) { return std::clamp(x[0], -1.0, 1.0) / 2.0; },
        certificate ? std::move(certificate) : std::optional<Modulus>(Modulus::linear(0.5)));
  }
  throw Error("InvalidArgument", "unknown analytic function '" + name + "'");
}

}  // namespace merge_metrics
