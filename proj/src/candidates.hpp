#pragma once

#include <cmath>
#include <limits>

namespace wcpd::detail {

/// Objective of the scalar prox subproblem.
template <typename F>
double prox_objective(F const &f, double gamma, double v, double u)
{
  double const d = u - v;
  return f(u) + d * d / (2.0 * gamma);
}

/// Keeps the best candidate seen so far. Objective values that agree up to
/// rounding are treated as ties and resolved toward the candidate nearest v.
class CandidatePicker
{
public:
  explicit CandidatePicker(double v) : v_(v) {}

  void offer(double u, double value)
  {
    if (!std::isfinite(u)) { return; }
    double const slack = 1e-14 * std::max(1.0, std::abs(best_value_));
    if (!has_ || value < best_value_ - slack ||
        (value <= best_value_ + slack && std::abs(u - v_) < std::abs(best_ - v_))) {
      best_ = u;
      best_value_ = value;
      has_ = true;
    }
  }

  double best() const { return best_; }
  double best_value() const { return best_value_; }

private:
  double v_;
  double best_ = std::numeric_limits<double>::quiet_NaN();
  double best_value_ = std::numeric_limits<double>::infinity();
  bool has_ = false;
};

} // namespace wcpd::detail
