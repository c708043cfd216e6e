#include "wcpd/piecewise.hpp"

#include "candidates.hpp"
#include "wcpd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <limits>
#include <stdexcept>

namespace wcpd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> real_roots(Quadratic const &q)
{
  if (q.a2 == 0.0) {
    if (q.a1 == 0.0) { return {}; }
    return {-q.a0 / q.a1};
  }
  double const disc = q.a1 * q.a1 - 4.0 * q.a2 * q.a0;
  if (disc < 0.0) { return {}; }
  double const s = std::sqrt(disc);
  double const t = -0.5 * (q.a1 + (q.a1 >= 0.0 ? s : -s));
  if (t == 0.0) { return {0.0}; }
  return {t / q.a2, q.a0 / t};
}

} // namespace

PiecewiseQuadratic &PiecewiseQuadratic::add(Quadratic q)
{
  plain_.push_back(q);
  rebuild();
  return *this;
}

PiecewiseQuadratic &PiecewiseQuadratic::add_abs(Quadratic q)
{
  abs_.push_back(q);
  rebuild();
  return *this;
}

double PiecewiseQuadratic::operator()(double u) const
{
  double s = 0.0;
  for (auto const &q : plain_) { s += q(u); }
  for (auto const &q : abs_) { s += std::abs(q(u)); }
  return s;
}

void PiecewiseQuadratic::rebuild()
{
  breaks_.clear();
  for (auto const &q : abs_) {
    for (double r : real_roots(q)) { breaks_.push_back(r); }
  }
  std::sort(breaks_.begin(), breaks_.end());
  breaks_.erase(std::unique(breaks_.begin(), breaks_.end()), breaks_.end());

  std::vector<double> edges;
  edges.push_back(-kInf);
  edges.insert(edges.end(), breaks_.begin(), breaks_.end());
  edges.push_back(kInf);

  pieces_.clear();
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    double const lo = edges[i];
    double const hi = edges[i + 1];
    double probe = 0.0;
    if (std::isfinite(lo) && std::isfinite(hi)) {
      probe = 0.5 * (lo + hi);
    } else if (std::isfinite(hi)) {
      probe = hi - 1.0;
    } else if (std::isfinite(lo)) {
      probe = lo + 1.0;
    }
    Quadratic sum;
    for (auto const &q : plain_) {
      sum.a2 += q.a2;
      sum.a1 += q.a1;
      sum.a0 += q.a0;
    }
    for (auto const &q : abs_) {
      double const sgn = q(probe) >= 0.0 ? 1.0 : -1.0;
      sum.a2 += sgn * q.a2;
      sum.a1 += sgn * q.a1;
      sum.a0 += sgn * q.a0;
    }
    pieces_.push_back({lo, hi, sum});
  }
}

double PiecewiseQuadratic::weak_convexity() const
{
  double rho = 0.0;
  for (auto const &p : pieces_) { rho = std::max(rho, -2.0 * p.q.a2); }
  return rho;
}

double PiecewiseQuadratic::prox(double gamma, double v) const
{
  if (!(gamma > 0.0) || !(gamma * weak_convexity() < 1.0)) {
    throw StepsizeViolation("piecewise prox: requires gamma*rho < 1, got gamma = " + std::to_string(gamma));
  }
  double const inv = 1.0 / gamma;
  detail::CandidatePicker pick(v);
  auto const offer = [&](double u) { pick.offer(u, detail::prox_objective(*this, gamma, v, u)); };
  for (auto const &p : pieces_) {
    double const curvature = 2.0 * p.q.a2 + inv;
    offer(std::clamp((v * inv - p.q.a1) / curvature, p.lo, p.hi));
  }
  for (double b : breaks_) { offer(b); }
  return pick.best();
}

ProxFunction piecewise_function(std::string name, PiecewiseQuadratic pq)
{
  auto const shared = std::make_shared<PiecewiseQuadratic const>(std::move(pq));
  return ProxFunction(std::move(name), shared->weak_convexity(),
                      [shared](Vec const &x) {
                        if (x.size() != 1) { throw std::invalid_argument("piecewise function is scalar"); }
                        return (*shared)(x[0]);
                      },
                      [shared](double gamma, Vec const &v) {
                        if (v.size() != 1) { throw std::invalid_argument("piecewise function is scalar"); }
                        Vec out(1);
                        out[0] = shared->prox(gamma, v[0]);
                        return out;
                      });
}

} // namespace wcpd
