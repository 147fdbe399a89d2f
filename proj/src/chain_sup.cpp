// Concave piecewise-linear recursion for the chain problem
//
//   maximize sum_i psi_i f_i  s.t.  f_i in [-M, M],  |f_{i+1} - f_i| <= r_i.
//
// V_k(y) is the best partial objective with f_k = y. It is concave on
// [-M, M]; each step takes a sliding-window maximum (the increasing part
// moves left by r, the decreasing part right by r, a flat top of width 2r
// appears) and adds psi_{k+1} y. The function is stored as its argmax D,
// the slopes on either side of D, and two deques of breakpoints carrying the
// slope decrease at each point, with lazy position offsets per side.

#include <algorithm>
#include <cmath>
#include <deque>

#include "merge_metrics/dual_metrics.hpp"
#include "merge_metrics/errors.hpp"

namespace merge_metrics {

namespace {

struct Breakpoint {
  double raw;    // position minus the side's offset
  double delta;  // slope decrease, >= 0
};

class ConcaveChain {
 public:
  ConcaveChain(double half_width, double first_slope) : m_(half_width) {
    if (first_slope > 0.0) {
      d_ = m_;
      at_right_ = true;
      sl_ = first_slope;
      vmax_ = first_slope * m_;
    } else {
      d_ = -m_;
      at_left_ = true;
      sr_ = first_slope;
      vmax_ = -first_slope * m_;
    }
  }

  double argmax() const { return d_; }
  double max_value() const { return vmax_; }

  void window(double r) {
    if (!(r > 0.0)) return;
    if (at_left_) {
      off_r_ += r;
      push_right_front(d_ + r, -sr_);
      sr_ = 0.0;
      return;
    }
    if (at_right_) {
      off_l_ -= r;
      at_right_ = false;
      sr_ = 0.0;
      shift_top_left(d_ - r);
      return;
    }
    off_l_ -= r;
    off_r_ += r;
    push_right_front(d_ + r, -sr_);
    sr_ = 0.0;
    shift_top_left(d_ - r);
  }

  void add_linear(double psi) {
    vmax_ += psi * d_;
    if (!at_left_) sl_ += psi;
    if (!at_right_) sr_ += psi;
    while (!at_right_ && sr_ > 0.0) move_right();
    while (!at_left_ && sl_ < 0.0) move_left();
  }

 private:
  void push_right_front(double x, double delta) {
    if (x < m_) {
      right_.push_front({x - off_r_, delta});
    } else {
      right_.clear();
    }
  }

  void shift_top_left(double x) {
    if (x <= -m_) {
      d_ = -m_;
      at_left_ = true;
      left_.clear();
    } else {
      d_ = x;
    }
  }

  void move_right() {
    const double delta_here = sl_ - sr_;
    const bool was_left = at_left_;
    double next;
    if (!right_.empty() && right_.front().raw + off_r_ < m_) {
      next = right_.front().raw + off_r_;
      const double delta_next = right_.front().delta;
      right_.pop_front();
      vmax_ += sr_ * (next - d_);
      sl_ = sr_;
      sr_ -= delta_next;
    } else {
      next = m_;
      right_.clear();
      vmax_ += sr_ * (next - d_);
      sl_ = sr_;
      at_right_ = true;
    }
    if (!was_left) left_.push_back({d_ - off_l_, delta_here});
    at_left_ = false;
    d_ = next;
  }

  void move_left() {
    const double delta_here = sl_ - sr_;
    const bool was_right = at_right_;
    double next;
    if (!left_.empty() && left_.back().raw + off_l_ > -m_) {
      next = left_.back().raw + off_l_;
      const double delta_next = left_.back().delta;
      left_.pop_back();
      vmax_ -= sl_ * (d_ - next);
      sr_ = sl_;
      sl_ += delta_next;
    } else {
      next = -m_;
      left_.clear();
      vmax_ -= sl_ * (d_ - next);
      sr_ = sl_;
      at_left_ = true;
    }
    if (!was_right) right_.push_front({d_ - off_r_, delta_here});
    at_right_ = false;
    d_ = next;
  }

  double m_;
  double d_ = 0.0;
  bool at_left_ = false;
  bool at_right_ = false;
  double sl_ = 0.0;  // slope just left of d_ (unused when at_left_)
  double sr_ = 0.0;  // slope just right of d_ (unused when at_right_)
  double vmax_ = 0.0;
  double off_l_ = 0.0;
  double off_r_ = 0.0;
  std::deque<Breakpoint> left_;
  std::deque<Breakpoint> right_;
};

}  // namespace

double chain_sup(const std::vector<double>& psi, const std::vector<double>& gaps,
                 double lipschitz_budget, double sup_budget, std::vector<double>* witness) {
  const std::size_t n = psi.size();
  if (n == 0) throw Error("InvalidArgument", "chain problem needs at least one point");
  if (gaps.size() + 1 != n) throw Error("InvalidArgument", "chain gaps must number one less than points");
  if (!(lipschitz_budget >= 0.0) || !(sup_budget >= 0.0)) {
    throw Error("InvalidArgument", "chain budgets must be nonnegative");
  }
  if (sup_budget == 0.0) {
    if (witness) witness->assign(n, 0.0);
    return 0.0;
  }
  ConcaveChain chain(sup_budget, psi[0]);
  std::vector<double> argmax;
  if (witness) {
    argmax.reserve(n);
    argmax.push_back(chain.argmax());
  }
  for (std::size_t k = 1; k < n; ++k) {
    chain.window(lipschitz_budget * gaps[k - 1]);
    chain.add_linear(psi[k]);
    if (witness) argmax.push_back(chain.argmax());
  }
  if (witness) {
    witness->assign(n, 0.0);
    (*witness)[n - 1] = argmax[n - 1];
    for (std::size_t k = n - 1; k-- > 0;) {
      const double r = lipschitz_budget * gaps[k];
      (*witness)[k] = std::clamp(argmax[k], (*witness)[k + 1] - r, (*witness)[k + 1] + r);
    }
  }
  return chain.max_value();
}

}  // namespace merge_metrics
