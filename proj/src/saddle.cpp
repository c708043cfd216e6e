#include "wcpd/saddle.hpp"

#include "wcpd/errors.hpp"
#include "wcpd/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace wcpd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNegativeTol = 1e-12;

Vec scalar(double v)
{
  Vec out(1);
  out[0] = v;
  return out;
}

void require_scalar_problem(SaddleProblem const &p, char const *who)
{
  if (p.L.in_dim() != 1 || p.L.out_dim() != 1) {
    throw Unsupported(std::string(who) + ": only problems with scalar x and y are supported");
  }
}

void require_saddle_set(SaddleProblem const &p, char const *who)
{
  if (p.saddle_set.empty()) { throw std::invalid_argument(std::string(who) + ": saddle set is empty"); }
}

unsigned worker_count(unsigned requested, std::size_t work)
{
  unsigned n = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(1, work / 4096)));
}

} // namespace

void check_dims(SaddleProblem const &p, Vec const &x, Vec const &y)
{
  if (x.size() != p.L.in_dim() || y.size() != p.L.out_dim()) {
    throw std::invalid_argument("saddle problem: expected x in R^" + std::to_string(p.L.in_dim()) + " and y in R^" +
                                std::to_string(p.L.out_dim()));
  }
}

double lagrangian(SaddleProblem const &p, Vec const &x, Vec const &y)
{
  check_dims(p, x, y);
  double const fx = p.f(x);
  if (fx == kInf) { return kInf; }
  double const gy = p.gstar(y);
  if (gy == kInf) { return -kInf; }
  return fx + p.L.apply(x).dot(y) - gy;
}

double gap_H(SaddleProblem const &p, Vec const &x, Vec const &y, GapDiagnostics *diag)
{
  require_saddle_set(p, "gap_H");
  double best = kInf;
  for (auto const &s : p.saddle_set) { best = std::min(best, lagrangian(p, x, s.y) - lagrangian(p, s.x, y)); }
  if (best < -kNegativeTol) {
    if (diag != nullptr) { diag->negative_h.fetch_add(1, std::memory_order_relaxed); }
    return 0.0;
  }
  return std::max(best, 0.0);
}

std::vector<double> grid_axis(double lo, double hi, double step)
{
  if (!(lo < hi) || !(step > 0.0)) { throw std::invalid_argument("grid_axis: need lo < hi and step > 0"); }
  auto const cells = static_cast<std::size_t>(std::ceil((hi - lo) / step - 1e-9));
  std::vector<double> pts(cells + 1);
  for (std::size_t k = 0; k <= cells; ++k) {
    pts[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(cells);
  }
  return pts;
}

double gap_G(SaddleProblem const &p, double x, double y, Box2 const &box, double grid_step)
{
  require_scalar_problem(p, "gap_G");
  // The supremum splits: sup_yh K(x, yh) - inf_xh K(xh, y).
  double sup_y = -kInf;
  Vec const xv = scalar(x);
  for (double yh : grid_axis(box.y_lo, box.y_hi, grid_step)) { sup_y = std::max(sup_y, lagrangian(p, xv, scalar(yh))); }
  double inf_x = kInf;
  Vec const yv = scalar(y);
  for (double xh : grid_axis(box.x_lo, box.x_hi, grid_step)) { inf_x = std::min(inf_x, lagrangian(p, scalar(xh), yv)); }
  return sup_y - inf_x;
}

SharpnessReport verify_inf_sharpness(SaddleProblem const &p, double mu, Box2 const &box, double grid_step,
                                     bool keep_contour, unsigned threads)
{
  require_scalar_problem(p, "verify_inf_sharpness");
  require_saddle_set(p, "verify_inf_sharpness");
  auto const xs = grid_axis(box.x_lo, box.x_hi, grid_step);
  auto const ys = grid_axis(box.y_lo, box.y_hi, grid_step);
  std::size_t const total = xs.size() * ys.size();

  SharpnessReport report;
  report.grid_points = total;
  if (keep_contour) { report.contour.resize(total); }

  GapDiagnostics diag;
  struct Partial
  {
    double value = kInf;
    std::size_t index = 0;
  };
  unsigned const workers = worker_count(threads, total);
  std::vector<Partial> partial(workers);

  auto scan = [&](unsigned w) {
    std::size_t const begin = total * w / workers;
    std::size_t const end = total * (w + 1) / workers;
    Vec xv(1), yv(1);
    Partial best;
    for (std::size_t k = begin; k < end; ++k) {
      xv[0] = xs[k / ys.size()];
      yv[0] = ys[k % ys.size()];
      double const value = gap_H(p, xv, yv, &diag) - mu * dist_to_set(PrimalDual{xv, yv}, p.saddle_set);
      if (value < best.value || k == begin) { best = {value, k}; }
      if (keep_contour) { report.contour[k] = {xv[0], yv[0], value}; }
    }
    partial[w] = best;
  };

  if (workers == 1) {
    scan(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) { pool.emplace_back(scan, w); }
    for (auto &t : pool) { t.join(); }
  }

  Partial best = partial.front();
  for (auto const &part : partial) {
    if (part.value < best.value) { best = part; }
  }
  report.min_violation = best.value;
  report.witness_x = xs[best.index / ys.size()];
  report.witness_y = ys[best.index % ys.size()];
  report.negative_h_count = diag.negative_h.load();
  return report;
}

double dist_to_set(PrimalDual const &z, std::vector<PrimalDual> const &set)
{
  if (set.empty()) { throw std::invalid_argument("dist_to_set: empty set"); }
  double best = kInf;
  for (auto const &s : set) {
    if (s.x.size() != z.x.size() || s.y.size() != z.y.size()) {
      throw std::invalid_argument("dist_to_set: dimension mismatch");
    }
    best = std::min(best, (z.x - s.x).squaredNorm() + (z.y - s.y).squaredNorm());
  }
  return std::sqrt(best);
}

double dist_to_set(Vec const &x, std::vector<Vec> const &set)
{
  if (set.empty()) { throw std::invalid_argument("dist_to_set: empty set"); }
  double best = kInf;
  for (auto const &s : set) {
    if (s.size() != x.size()) { throw std::invalid_argument("dist_to_set: dimension mismatch"); }
    best = std::min(best, (x - s).squaredNorm());
  }
  return std::sqrt(best);
}

double saddle_violation(SaddleProblem const &p, int probes, double radius, std::uint64_t seed)
{
  Rng rng(seed);
  double worst = 0.0;
  for (auto const &s : p.saddle_set) {
    double const k0 = lagrangian(p, s.x, s.y);
    for (int i = 0; i < probes; ++i) {
      Vec x = s.x;
      Vec y = s.y;
      for (Index j = 0; j < x.size(); ++j) { x[j] += rng.uniform(-radius, radius); }
      for (Index j = 0; j < y.size(); ++j) { y[j] += rng.uniform(-radius, radius); }
      worst = std::max(worst, lagrangian(p, s.x, y) - k0);
      worst = std::max(worst, k0 - lagrangian(p, x, s.y));
    }
  }
  return worst;
}

RadiusReport radius_report(double rho, double mu, double norm_L, StepConfig const &cfg, Regime regime)
{
  require_valid_steps(cfg, rho, norm_L, regime);
  if (!(mu > 0.0)) { throw std::invalid_argument("radius_report: mu must be positive"); }
  double const s = cfg.sigma;
  double const t = cfg.tau;
  double const root = std::sqrt(s * t) * norm_L;

  RadiusReport r;
  r.regime = regime;
  r.A = std::min((1.0 - root) / (2.0 * t), (1.0 - s * rho - cfg.theta * root) / (2.0 * s));
  r.A1 = std::min((1.0 - cfg.theta * root) / (2.0 * t), (1.0 - s * rho - root) / (2.0 * s));
  double const a = r.A_regime();
  double const denom = std::max(1.0 / (2.0 * s), 1.0 / (2.0 * t)) - a;
  if (!(a > 0.0) || !(denom > 0.0)) {
    throw StepsizeViolation("radius_report: nonpositive contraction constant");
  }
  r.ball_radius = mu / denom;
  return r;
}

double rate_constant_B(RadiusReport const &report, double mu, double dist0, double sigma, double tau)
{
  if (!(dist0 < report.ball_radius)) {
    throw OutOfBall("rate_constant_B: dist0 = " + std::to_string(dist0) + " is not inside the ball of radius " +
                    std::to_string(report.ball_radius));
  }
  return std::max(1.0 / (2.0 * sigma), 1.0 / (2.0 * tau)) / (report.A_regime() + mu / dist0);
}

EpsilonBounds epsilon_bounds(double mu, double rho, double norm_L, double sigma, double tau, double eps_n)
{
  double const c = sigma * rho + std::sqrt(sigma * tau) * norm_L;
  double const eps2 = eps_n * eps_n;
  EpsilonBounds out;
  out.feasible = mu * mu * sigma * tau > c * eps2;
  if (!out.feasible) { return out; }
  double const disc = std::sqrt(std::max(0.0, mu * mu - eps2 * c / (sigma * tau)));
  out.E_plus = sigma * (mu + disc) / c;
  out.E_minus = sigma * (mu - disc) / c;
  return out;
}

std::optional<std::pair<double, double>> feasible_sigma_interval(double mu, double rho, double norm_L, double tau,
                                                                 double eps_n, double tol)
{
  auto const ok = [&](double sigma) {
    return epsilon_bounds(mu, rho, norm_L, sigma, tau, eps_n).feasible &&
           validate_steps({sigma, tau, 1.0}, rho, norm_L, Regime::PrimalFirst).ok;
  };
  double upper = kInf;
  if (rho > 0.0) { upper = 1.0 / rho; }
  if (norm_L > 0.0) { upper = std::min(upper, 1.0 / (tau * norm_L * norm_L)); }
  if (!std::isfinite(upper)) { upper = 1e6; }

  constexpr int kScan = 20000;
  int inside = -1;
  for (int k = 1; k < kScan; ++k) {
    if (ok(upper * k / kScan)) {
      inside = k;
      break;
    }
  }
  if (inside < 0) { return std::nullopt; }

  auto bisect = [&](double good, double bad) {
    while (std::abs(good - bad) > tol) {
      double const mid = 0.5 * (good + bad);
      (ok(mid) ? good : bad) = mid;
    }
    return 0.5 * (good + bad);
  };
  double const start = upper * inside / kScan;
  int last = inside;
  while (last + 1 < kScan && ok(upper * (last + 1) / kScan)) { ++last; }
  double const lo = bisect(start, upper * (inside - 1) / kScan);
  double const hi = bisect(upper * last / kScan, upper * (last + 1) / kScan);
  return std::make_pair(lo, hi);
}

std::pair<ProxFunction, ProxFunction> reduce_fully_weakly_convex(ProxFunction const &f, ProxFunction const &g,
                                                                 LinearMap const &L)
{
  double const rg = g.rho();
  if (rg == 0.0) { return {f, g}; }

  double const nl = L.norm_bound();
  ProxFunction::ProxFn fprox;
  if (auto const s = L.scalar_factor(); s && f.has_prox()) {
    double const kappa = rg * (*s) * (*s);
    fprox = [f, kappa](double gamma, Vec const &v) {
      double const shrink = 1.0 - kappa * gamma;
      if (!(shrink > 0.0)) { throw StepsizeViolation("reduced prox: step too large for the curvature shift"); }
      return f.prox(gamma / shrink, Vec(v / shrink));
    };
  }
  ProxFunction F(
    f.name() + "-shift", f.rho() + rg * nl * nl,
    [f, L, rg](Vec const &x) { return f(x) - 0.5 * rg * L.apply(x).squaredNorm(); }, std::move(fprox));
  ProxFunction G = plus_quadratic(g, rg, Vec::Zero(L.out_dim()));
  return {F, G};
}

double gap_weak_convexity_check(SaddleProblem const &p, double rho, int samples, std::uint64_t seed,
                                Box2 const &box, double grid_step)
{
  require_scalar_problem(p, "gap_weak_convexity_check");
  Rng rng(seed);
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    double const x1 = rng.uniform(box.x_lo, box.x_hi);
    double const y1 = rng.uniform(box.y_lo, box.y_hi);
    double const x2 = rng.uniform(box.x_lo, box.x_hi);
    double const y2 = rng.uniform(box.y_lo, box.y_hi);
    double const lambda = rng.uniform();
    double const xm = lambda * x1 + (1.0 - lambda) * x2;
    double const ym = lambda * y1 + (1.0 - lambda) * y2;
    double const lhs = gap_G(p, xm, ym, box, grid_step);
    double const dist2 = (x1 - x2) * (x1 - x2) + (y1 - y2) * (y1 - y2);
    double const rhs = lambda * gap_G(p, x1, y1, box, grid_step) + (1.0 - lambda) * gap_G(p, x2, y2, box, grid_step) +
                       lambda * (1.0 - lambda) * 0.5 * rho * dist2;
    worst = std::max(worst, lhs - rhs);
  }
  return worst;
}

} // namespace wcpd
