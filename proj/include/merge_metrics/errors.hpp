#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace merge_metrics {

/// Base of every error raised by the library. `kind()` is a stable
/// machine-readable tag ("SpaceMismatch", "Infeasible", ...) used by the CLI
/// when it serializes failures.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

/// A metric axiom fails for the triple (i, j, k). For identity and
/// nonnegativity failures k == j.
class AxiomViolation : public Error {
 public:
  AxiomViolation(std::size_t i, std::size_t j, std::size_t k, const std::string& axiom)
      : Error("AxiomViolation", "metric axiom '" + axiom + "' violated at (" + std::to_string(i) +
                                    ", " + std::to_string(j) + ", " + std::to_string(k) + ")"),
        i_(i), j_(j), k_(k), axiom_(axiom) {}

  std::size_t i() const noexcept { return i_; }
  std::size_t j() const noexcept { return j_; }
  std::size_t k() const noexcept { return k_; }
  const std::string& axiom() const noexcept { return axiom_; }

 private:
  std::size_t i_, j_, k_;
  std::string axiom_;
};

class NonSymmetric : public Error {
 public:
  NonSymmetric(std::size_t i, std::size_t j)
      : Error("NonSymmetric", "distance matrix not symmetric at (" + std::to_string(i) + ", " +
                                  std::to_string(j) + ")"),
        i_(i), j_(j) {}

  std::size_t i() const noexcept { return i_; }
  std::size_t j() const noexcept { return j_; }

 private:
  std::size_t i_, j_;
};

class NotNormalized : public Error {
 public:
  explicit NotNormalized(double sum)
      : Error("NotNormalized", "weights sum to " + std::to_string(sum) + ", expected 1"), sum_(sum) {}

  double sum() const noexcept { return sum_; }

 private:
  double sum_;
};

class NegativeWeight : public Error {
 public:
  explicit NegativeWeight(std::size_t index)
      : Error("NegativeWeight", "negative weight at index " + std::to_string(index)), index_(index) {}

  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class UndefinedAt : public Error {
 public:
  explicit UndefinedAt(std::size_t index)
      : Error("UndefinedAt", "function undefined at point " + std::to_string(index)), index_(index) {}

  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class TooLarge : public Error {
 public:
  TooLarge(std::size_t support, std::size_t limit)
      : Error("TooLarge", "combined support of " + std::to_string(support) +
                              " points exceeds the limit of " + std::to_string(limit)),
        support_(support) {}

  std::size_t support() const noexcept { return support_; }

 private:
  std::size_t support_;
};

}  // namespace merge_metrics
