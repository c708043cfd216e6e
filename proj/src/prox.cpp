#include "wcpd/prox.hpp"

#include "candidates.hpp"
#include "wcpd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

namespace wcpd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_scalar(Vec const &x, char const *who)
{
  if (x.size() != 1) { throw std::invalid_argument(std::string(who) + ": scalar function called on a vector"); }
}

void require_same_size(Vec const &x, Vec const &ref, char const *who)
{
  if (x.size() != ref.size()) {
    throw std::invalid_argument(std::string(who) + ": dimension mismatch (" + std::to_string(x.size()) + " vs " +
                                std::to_string(ref.size()) + ")");
  }
}

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

SubdiffBox abs_subdiff(Vec const &x, double weight)
{
  SubdiffBox box(static_cast<std::size_t>(x.size()));
  for (Index i = 0; i < x.size(); ++i) {
    auto &iv = box[static_cast<std::size_t>(i)];
    if (x[i] == 0.0) {
      iv = {-weight, weight};
    } else {
      iv = {weight * sign(x[i]), weight * sign(x[i])};
    }
  }
  return box;
}

double box_indicator(Vec const &y, double radius)
{
  return (y.array().abs() <= radius * (1.0 + 1e-12)).all() ? 0.0 : kInf;
}

} // namespace

double dist_to_box(Vec const &y, SubdiffBox const &box)
{
  if (static_cast<std::size_t>(y.size()) != box.size()) {
    throw std::invalid_argument("dist_to_box: dimension mismatch");
  }
  double s = 0.0;
  for (Index i = 0; i < y.size(); ++i) {
    auto const &iv = box[static_cast<std::size_t>(i)];
    double const d = y[i] - std::clamp(y[i], iv.lo, iv.hi);
    s += d * d;
  }
  return std::sqrt(s);
}

ProxFunction::ProxFunction(std::string name, double rho, EvalFn eval, ProxFn prox, SubdiffFn subdiff)
  : name_(std::move(name))
  , rho_(rho)
  , eval_(std::move(eval))
  , prox_(std::move(prox))
  , subdiff_(std::move(subdiff))
{
  if (!(rho >= 0.0) || !std::isfinite(rho)) { throw std::invalid_argument(name_ + ": rho must be finite and >= 0"); }
  if (!eval_) { throw std::invalid_argument(name_ + ": evaluator required"); }
}

Vec ProxFunction::prox(double gamma, Vec const &v) const
{
  if (!prox_) { throw OracleUnavailable("prox of " + name_ + " is not available"); }
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw StepsizeViolation("prox of " + name_ + ": step must be positive, got " + std::to_string(gamma));
  }
  if (!(gamma * rho_ < 1.0)) {
    throw StepsizeViolation("prox of " + name_ + ": gamma*rho = " + std::to_string(gamma * rho_) + " >= 1");
  }
  return prox_(gamma, v);
}

double ProxFunction::prox(double gamma, double v) const
{
  Vec one(1);
  one[0] = v;
  return prox(gamma, one)[0];
}

SubdiffBox ProxFunction::subdiff(Vec const &x) const
{
  if (!subdiff_) { throw OracleUnavailable("subdifferential of " + name_ + " is not available"); }
  return subdiff_(x);
}

double ProxFunction::conjugate_eval(Vec const &y) const
{
  if (!conj_) { throw OracleUnavailable("conjugate of " + name_ + " is not available"); }
  return conj_(y);
}

ProxFunction ProxFunction::with_conjugate_eval(EvalFn conj) const
{
  ProxFunction copy = *this;
  copy.conj_ = std::move(conj);
  return copy;
}

double soft_threshold(double v, double t)
{
  if (v >= t) { return v - t; }
  if (v <= -t) { return v + t; }
  return 0.0;
}

ProxFunction zero_function()
{
  return ProxFunction(
           "zero", 0.0, [](Vec const &) { return 0.0; }, [](double, Vec const &v) { return v; },
           [](Vec const &x) { return SubdiffBox(static_cast<std::size_t>(x.size()), Interval{0.0, 0.0}); })
    .with_conjugate_eval([](Vec const &y) { return y.isZero(0.0) ? 0.0 : kInf; });
}

ProxFunction abs_value()
{
  return ProxFunction(
           "abs", 0.0,
           [](Vec const &x) {
             require_scalar(x, "abs");
             return std::abs(x[0]);
           },
           [](double gamma, Vec const &v) {
             require_scalar(v, "abs");
             Vec out(1);
             out[0] = soft_threshold(v[0], gamma);
             return out;
           },
           [](Vec const &x) {
             require_scalar(x, "abs");
             return abs_subdiff(x, 1.0);
           })
    .with_conjugate_eval([](Vec const &y) { return box_indicator(y, 1.0); });
}

ProxFunction l1_norm()
{
  return ProxFunction(
           "l1", 0.0, [](Vec const &x) { return x.lpNorm<1>(); },
           [](double gamma, Vec const &v) -> Vec {
             return v.unaryExpr([gamma](double t) { return soft_threshold(t, gamma); });
           },
           [](Vec const &x) { return abs_subdiff(x, 1.0); })
    .with_conjugate_eval([](Vec const &y) { return box_indicator(y, 1.0); });
}

ProxFunction quad_fit(Vec b, double weight)
{
  if (!(weight > 0.0)) { throw std::invalid_argument("quad_fit: weight must be positive"); }
  auto const pb = std::make_shared<Vec const>(std::move(b));
  return ProxFunction(
           "quad_fit", 0.0,
           [pb, weight](Vec const &x) {
             require_same_size(x, *pb, "quad_fit");
             return 0.5 * weight * (x - *pb).squaredNorm();
           },
           [pb, weight](double gamma, Vec const &v) -> Vec {
             require_same_size(v, *pb, "quad_fit");
             return (v + gamma * weight * (*pb)) / (1.0 + gamma * weight);
           },
           [pb, weight](Vec const &x) {
             require_same_size(x, *pb, "quad_fit");
             SubdiffBox box(static_cast<std::size_t>(x.size()));
             for (Index i = 0; i < x.size(); ++i) {
               double const s = weight * (x[i] - (*pb)[i]);
               box[static_cast<std::size_t>(i)] = {s, s};
             }
             return box;
           })
    .with_conjugate_eval([pb, weight](Vec const &y) {
      require_same_size(y, *pb, "quad_fit*");
      return pb->dot(y) + y.squaredNorm() / (2.0 * weight);
    });
}

ProxFunction abs_norm_sq_shift(double c)
{
  if (!(c > 0.0) || !std::isfinite(c)) { throw std::invalid_argument("abs_norm_sq_shift: c must be positive"); }
  return ProxFunction("abs_norm_sq_shift", 2.0, [c](Vec const &x) { return std::abs(x.squaredNorm() - c); },
                      [c](double gamma, Vec const &v) -> Vec {
                        double const r2 = v.squaredNorm();
                        double const up = (1.0 + 2.0 * gamma) * (1.0 + 2.0 * gamma) * c;
                        double const down = (1.0 - 2.0 * gamma) * (1.0 - 2.0 * gamma) * c;
                        if (r2 > up) { return v / (1.0 + 2.0 * gamma); }
                        if (r2 < down) { return v / (1.0 - 2.0 * gamma); }
                        if (r2 == 0.0) { return Vec::Zero(v.size()); }
                        return std::sqrt(c) * v / std::sqrt(r2);
                      });
}

double prox_abs_quadratic(double a, double b, double gamma, double v)
{
  if (!(a <= b)) { throw std::invalid_argument("prox_abs_quadratic: requires a <= b"); }
  if (!(gamma > 0.0) || !(2.0 * gamma < 1.0)) {
    throw StepsizeViolation("prox_abs_quadratic: requires 0 < 2*gamma < 1, got gamma = " + std::to_string(gamma));
  }
  auto const f = [a, b](double u) { return std::abs((u - a) * (u - b)); };
  double const inv = 1.0 / gamma;
  // Outer branches: f = (u-a)(u-b). Middle branch: f = -(u-a)(u-b).
  double const outer = (v * inv + (a + b)) / (2.0 + inv);
  double const middle = (v * inv - (a + b)) / (inv - 2.0);
  detail::CandidatePicker pick(v);
  for (double const u : {std::min(outer, a), std::clamp(middle, a, b), std::max(outer, b), a, b}) {
    pick.offer(u, detail::prox_objective(f, gamma, v, u));
  }
  return pick.best();
}

ProxFunction abs_quadratic(double a, double b)
{
  if (!(a < b)) { throw std::invalid_argument("abs_quadratic: requires a < b"); }
  return ProxFunction("abs_quadratic", 2.0,
                      [a, b](Vec const &x) {
                        require_scalar(x, "abs_quadratic");
                        return std::abs((x[0] - a) * (x[0] - b));
                      },
                      [a, b](double gamma, Vec const &v) {
                        require_scalar(v, "abs_quadratic");
                        Vec out(1);
                        out[0] = prox_abs_quadratic(a, b, gamma, v[0]);
                        return out;
                      });
}

namespace {

void require_pairs(Vec const &y, Index pairs, char const *who)
{
  if (y.size() != 2 * pairs) {
    throw std::invalid_argument(std::string(who) + ": expected " + std::to_string(2 * pairs) + " entries");
  }
}

} // namespace

ProxFunction linf_ball_indicator(Index pairs, double radius)
{
  if (pairs < 1 || !(radius > 0.0)) { throw std::invalid_argument("linf_ball_indicator: bad parameters"); }
  return ProxFunction(
           "linf_ball",
           0.0,
           [pairs, radius](Vec const &y) {
             require_pairs(y, pairs, "linf_ball");
             double const limit = radius * radius * (1.0 + 1e-12);
             for (Index k = 0; k < pairs; ++k) {
               if (y[k] * y[k] + y[k + pairs] * y[k + pairs] > limit) { return kInf; }
             }
             return 0.0;
           },
           [pairs, radius](double, Vec const &v) -> Vec {
             require_pairs(v, pairs, "linf_ball");
             Vec out = v;
             for (Index k = 0; k < pairs; ++k) {
               double const s = std::max(1.0, std::hypot(v[k], v[k + pairs]) / radius);
               out[k] = v[k] / s;
               out[k + pairs] = v[k + pairs] / s;
             }
             return out;
           })
    .with_conjugate_eval([pairs, radius](Vec const &w) {
      require_pairs(w, pairs, "linf_ball*");
      double s = 0.0;
      for (Index k = 0; k < pairs; ++k) { s += std::hypot(w[k], w[k + pairs]); }
      return radius * s;
    });
}

ProxFunction pairwise_l2_sum(Index pairs)
{
  if (pairs < 1) { throw std::invalid_argument("pairwise_l2_sum: pairs must be positive"); }
  return ProxFunction("pairwise_l2_sum", 0.0,
                      [pairs](Vec const &w) {
                        require_pairs(w, pairs, "pairwise_l2_sum");
                        double s = 0.0;
                        for (Index k = 0; k < pairs; ++k) { s += std::hypot(w[k], w[k + pairs]); }
                        return s;
                      },
                      [pairs](double gamma, Vec const &v) -> Vec {
                        require_pairs(v, pairs, "pairwise_l2_sum");
                        Vec out = v;
                        for (Index k = 0; k < pairs; ++k) {
                          double const r = std::hypot(v[k], v[k + pairs]);
                          double const s = r > gamma ? 1.0 - gamma / r : 0.0;
                          out[k] = s * v[k];
                          out[k + pairs] = s * v[k + pairs];
                        }
                        return out;
                      })
    .with_conjugate_eval([pairs](Vec const &y) {
      require_pairs(y, pairs, "pairwise_l2_sum*");
      for (Index k = 0; k < pairs; ++k) {
        if (y[k] * y[k] + y[k + pairs] * y[k + pairs] > 1.0 + 1e-12) { return kInf; }
      }
      return 0.0;
    });
}

ProxFunction shifted_l1(Vec x0, double weight)
{
  if (!(weight > 0.0)) { throw std::invalid_argument("shifted_l1: weight must be positive"); }
  auto const p0 = std::make_shared<Vec const>(std::move(x0));
  return ProxFunction(
    "shifted_l1", 0.0,
    [p0, weight](Vec const &x) {
      require_same_size(x, *p0, "shifted_l1");
      return weight * (x - *p0).lpNorm<1>();
    },
    [p0, weight](double gamma, Vec const &v) -> Vec {
      require_same_size(v, *p0, "shifted_l1");
      Vec out(v.size());
      for (Index i = 0; i < v.size(); ++i) { out[i] = (*p0)[i] + soft_threshold(v[i] - (*p0)[i], gamma * weight); }
      return out;
    },
    [p0, weight](Vec const &x) {
      require_same_size(x, *p0, "shifted_l1");
      return abs_subdiff(x - *p0, weight);
    });
}

ProxFunction elementwise_sq_l1(Vec x0, double weight)
{
  if (!(weight > 0.0)) { throw std::invalid_argument("elementwise_sq_l1: weight must be positive"); }
  auto const p0 = std::make_shared<Vec const>(x0.cwiseAbs());
  return ProxFunction("elementwise_sq_l1", 2.0 * weight,
                      [p0, weight](Vec const &x) {
                        require_same_size(x, *p0, "elementwise_sq_l1");
                        return weight * (x.array().square() - p0->array().square()).abs().sum();
                      },
                      [p0, weight](double gamma, Vec const &v) -> Vec {
                        require_same_size(v, *p0, "elementwise_sq_l1");
                        Vec out(v.size());
                        for (Index i = 0; i < v.size(); ++i) {
                          out[i] = prox_abs_quadratic(-(*p0)[i], (*p0)[i], gamma * weight, v[i]);
                        }
                        return out;
                      });
}

ProxFunction scaled(ProxFunction const &f, double w)
{
  if (!(w > 0.0) || !std::isfinite(w)) { throw std::invalid_argument("scaled: weight must be positive"); }
  ProxFunction::ProxFn prox;
  if (f.has_prox()) {
    prox = [f, w](double gamma, Vec const &v) { return f.prox(w * gamma, v); };
  }
  ProxFunction::SubdiffFn sub;
  if (f.has_subdiff()) {
    sub = [f, w](Vec const &x) {
      auto box = f.subdiff(x);
      for (auto &iv : box) { iv = {w * iv.lo, w * iv.hi}; }
      return box;
    };
  }
  ProxFunction out(std::to_string(w) + "*" + f.name(), w * f.rho(), [f, w](Vec const &x) { return w * f(x); },
                   std::move(prox), std::move(sub));
  if (f.has_conjugate_eval()) {
    out = out.with_conjugate_eval([f, w](Vec const &y) { return w * f.conjugate_eval(y / w); });
  }
  return out;
}

ProxFunction plus_quadratic(ProxFunction const &f, double lambda, Vec b)
{
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("plus_quadratic: lambda must be finite and >= 0");
  }
  auto const pb = std::make_shared<Vec const>(std::move(b));
  ProxFunction::ProxFn prox;
  if (f.has_prox()) {
    prox = [f, lambda, pb](double gamma, Vec const &v) {
      require_same_size(v, *pb, "plus_quadratic");
      double const lg = lambda * gamma;
      return f.prox(gamma / (1.0 + lg), Vec((v + lg * (*pb)) / (1.0 + lg)));
    };
  }
  ProxFunction::SubdiffFn sub;
  if (f.has_subdiff()) {
    sub = [f, lambda, pb](Vec const &x) {
      auto box = f.subdiff(x);
      for (Index i = 0; i < x.size(); ++i) {
        double const s = lambda * (x[i] - (*pb)[i]);
        auto &iv = box[static_cast<std::size_t>(i)];
        iv = {iv.lo + s, iv.hi + s};
      }
      return box;
    };
  }
  return ProxFunction(
    f.name() + "+quad", std::max(0.0, f.rho() - lambda),
    [f, lambda, pb](Vec const &x) {
      require_same_size(x, *pb, "plus_quadratic");
      return f(x) + 0.5 * lambda * (x - *pb).squaredNorm();
    },
    std::move(prox), std::move(sub));
}

Vec prox_conjugate(ProxFunction const &g, double gamma, Vec const &v)
{
  if (g.rho() > 0.0) {
    throw std::invalid_argument("prox_conjugate: " + g.name() + " is not convex (rho > 0)");
  }
  if (!(gamma > 0.0)) { throw StepsizeViolation("prox_conjugate: step must be positive"); }
  return v - gamma * g.prox(1.0 / gamma, Vec(v / gamma));
}

ProxFunction conjugate(ProxFunction const &g)
{
  if (g.rho() > 0.0) { throw std::invalid_argument("conjugate: " + g.name() + " is not convex (rho > 0)"); }
  ProxFunction::ProxFn prox;
  if (g.has_prox()) {
    prox = [g](double gamma, Vec const &v) { return prox_conjugate(g, gamma, v); };
  }
  return ProxFunction(g.name() + "*", 0.0, [g](Vec const &y) { return g.conjugate_eval(y); }, std::move(prox))
    .with_conjugate_eval([g](Vec const &x) { return g(x); });
}

namespace {

double golden_section(std::function<double(double)> const &obj, double a, double b, double tol)
{
  constexpr double kInvPhi = 0.6180339887498949;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = obj(c);
  double fd = obj(d);
  for (int it = 0; it < 400 && (b - a) > tol; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = obj(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = obj(d);
    }
  }
  return fc <= fd ? c : d;
}

} // namespace

double brute_force_prox(std::function<double(double)> const &f, double gamma, double v, double lo, double hi,
                        double tol)
{
  if (!(lo < hi)) { throw std::invalid_argument("brute_force_prox: requires lo < hi"); }
  if (!(gamma > 0.0)) { throw std::invalid_argument("brute_force_prox: gamma must be positive"); }
  auto const obj = [&](double u) { return detail::prox_objective(f, gamma, v, u); };

  constexpr int kCells = 4000;
  constexpr std::size_t kRestarts = 8;
  std::vector<double> xs(kCells + 1), fs(kCells + 1);
  for (int k = 0; k <= kCells; ++k) {
    xs[static_cast<std::size_t>(k)] = lo + (hi - lo) * static_cast<double>(k) / kCells;
    fs[static_cast<std::size_t>(k)] = obj(xs[static_cast<std::size_t>(k)]);
  }
  std::vector<int> minima;
  for (int k = 0; k <= kCells; ++k) {
    auto const s = static_cast<std::size_t>(k);
    bool const left = k == 0 || fs[s] <= fs[s - 1];
    bool const right = k == kCells || fs[s] <= fs[s + 1];
    if (left && right) { minima.push_back(k); }
  }
  std::sort(minima.begin(), minima.end(), [&](int i, int j) {
    return fs[static_cast<std::size_t>(i)] < fs[static_cast<std::size_t>(j)];
  });
  if (minima.size() > kRestarts) { minima.resize(kRestarts); }

  detail::CandidatePicker pick(v);
  for (int k : minima) {
    double const a = xs[static_cast<std::size_t>(std::max(k - 1, 0))];
    double const b = xs[static_cast<std::size_t>(std::min(k + 1, kCells))];
    double const u = golden_section(obj, a, b, tol);
    pick.offer(u, obj(u));
    pick.offer(xs[static_cast<std::size_t>(k)], fs[static_cast<std::size_t>(k)]);
  }
  return pick.best();
}

} // namespace wcpd
