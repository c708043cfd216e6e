#include "wcpd/solver.hpp"

#include "wcpd/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace wcpd {

std::string to_string(Regime r) { return r == Regime::DualFirst ? "dual-first" : "primal-first"; }

Regime regime_from_string(std::string const &s)
{
  if (s == "dual-first" || s == "dual") { return Regime::DualFirst; }
  if (s == "primal-first" || s == "primal") { return Regime::PrimalFirst; }
  throw std::invalid_argument("unknown regime '" + s + "'");
}

std::string to_string(StopReason r)
{
  switch (r) {
  case StopReason::MaxIters: return "max_iters";
  case StopReason::Residual: return "residual";
  case StopReason::Distance: return "dist";
  }
  return "unknown";
}

StepCheck validate_steps(StepConfig const &cfg, double rho, double norm_L, Regime regime, bool regime_predicate)
{
  auto fail = [](std::string name, double lhs) { return StepCheck{false, std::move(name), lhs}; };
  if (!(cfg.sigma > 0.0) || !std::isfinite(cfg.sigma)) { return fail("sigma > 0", cfg.sigma); }
  if (!(cfg.tau > 0.0) || !std::isfinite(cfg.tau)) { return fail("tau > 0", cfg.tau); }
  if (!(cfg.theta >= 0.0 && cfg.theta <= 1.0)) { return fail("theta in [0,1]", cfg.theta); }

  double const sr = cfg.sigma * rho;
  double const root = std::sqrt(cfg.sigma * cfg.tau) * norm_L;
  if (!(sr < 1.0)) { return fail("sigma*rho < 1", sr); }
  if (!(root < 1.0)) { return fail("sqrt(sigma*tau)*|L| < 1", root); }
  if (regime_predicate) {
    if (regime == Regime::DualFirst) {
      double const lhs = sr + cfg.theta * root;
      if (!(lhs < 1.0)) { return fail("sigma*rho + theta*sqrt(sigma*tau)*|L| < 1", lhs); }
    } else {
      double const lhs = sr + root;
      if (!(lhs < 1.0)) { return fail("sigma*rho + sqrt(sigma*tau)*|L| < 1", lhs); }
    }
  }
  return {};
}

void require_valid_steps(StepConfig const &cfg, double rho, double norm_L, Regime regime, bool regime_predicate)
{
  auto const check = validate_steps(cfg, rho, norm_L, regime, regime_predicate);
  if (!check.ok) {
    throw StepsizeViolation("stepsize predicate '" + check.predicate + "' fails: lhs = " + std::to_string(check.lhs));
  }
}

std::optional<StopReason> stopping(TraceRow const &row, StopRules const &rules)
{
  if (rules.dist_tol && row.dist && *row.dist <= *rules.dist_tol) { return StopReason::Distance; }
  if (rules.residual_tol && row.residual && *row.residual <= *rules.residual_tol) { return StopReason::Residual; }
  if (row.n >= rules.max_iters) { return StopReason::MaxIters; }
  return std::nullopt;
}

double epsilon_monitor(ProxFunction const &g, Vec const &Lx_next, Vec const &y)
{
  return dist_to_box(y, g.subdiff(Lx_next));
}

namespace {

class Recorder
{
public:
  Recorder(SaddleProblem const &p, SolveOptions const &opts, IterateTrace &trace)
    : p_(p)
    , opts_(opts)
    , trace_(trace)
    , track_eps_(p.g && p.g->has_subdiff())
  {
  }

  bool track_eps() const { return track_eps_; }

  TraceRow make_row(int n, Vec const &x, Vec const &y) const
  {
    TraceRow row;
    row.n = n;
    if (!p_.saddle_set.empty()) {
      row.dist = dist_to_set(PrimalDual{x, y}, p_.saddle_set);
      row.H = gap_H(p_, x, y);
    } else if (!p_.primal_solutions.empty()) {
      row.dist = dist_to_set(x, p_.primal_solutions);
    }
    if (p_.g) {
      row.objective = p_.f(x) + (*p_.g)(p_.L.apply(x));
    } else if (p_.gstar.has_conjugate_eval()) {
      row.objective = p_.f(x) + p_.gstar.conjugate_eval(p_.L.apply(x));
    }
    if (opts_.store_iterates) {
      row.x = x;
      row.y = y;
    }
    return row;
  }

  /// Records the row; returns true when the run should stop.
  bool push(TraceRow row, Vec const &x, Vec const &y)
  {
    if (opts_.on_row) { opts_.on_row(row, x, y); }
    auto const reason = stopping(row, opts_.stop);
    if (opts_.keep_rows || reason) {
      trace_.rows.push_back(std::move(row));
    }
    if (reason) {
      trace_.stop_reason = *reason;
      return true;
    }
    return false;
  }

private:
  SaddleProblem const &p_;
  SolveOptions const &opts_;
  IterateTrace &trace_;
  bool track_eps_;
};

IterateTrace run(SaddleProblem const &p, Regime regime, StepConfig const &cfg, PrimalDual const &z0,
                 SolveOptions const &opts)
{
  check_dims(p, z0.x, z0.y);
  require_valid_steps(cfg, p.f.rho(), p.L.norm_bound(), regime, opts.enforce_regime);
  if (opts.stop.max_iters < 0) { throw std::invalid_argument("solve: max_iters must be >= 0"); }

  IterateTrace trace;
  trace.regime = regime;
  trace.steps = cfg;
  trace.seed = opts.seed;
  if (opts.keep_rows) { trace.rows.reserve(static_cast<std::size_t>(opts.stop.max_iters) + 1); }

  Recorder rec(p, opts, trace);
  Vec x = z0.x;
  Vec y = z0.y;
  double const sigma = cfg.sigma;
  double const tau = cfg.tau;
  double const theta = cfg.theta;

  bool done = rec.push(rec.make_row(0, x, y), x, y);
  int n = 0;
  while (!done) {
    Vec x_next, y_next, relaxed;
    std::optional<double> eps;
    if (regime == Regime::DualFirst) {
      y_next = p.gstar.prox(tau, Vec(y + tau * p.L.apply(x)));
      relaxed = y_next + theta * (y_next - y);
      x_next = p.f.prox(sigma, Vec(x - sigma * p.L.adjoint(relaxed)));
      if (rec.track_eps()) { eps = epsilon_monitor(*p.g, p.L.apply(x_next), y); }
    } else {
      x_next = p.f.prox(sigma, Vec(x - sigma * p.L.adjoint(y)));
      relaxed = x_next + theta * (x_next - x);
      if (rec.track_eps()) { eps = epsilon_monitor(*p.g, p.L.apply(x_next), y); }
      y_next = p.gstar.prox(tau, Vec(y + tau * p.L.apply(relaxed)));
    }
    ++n;
    double const residual = std::sqrt((x_next - x).squaredNorm() + (y_next - y).squaredNorm());
    x = std::move(x_next);
    y = std::move(y_next);

    TraceRow row = rec.make_row(n, x, y);
    row.residual = residual;
    row.eps = eps;
    if (opts.store_relaxation) { row.relaxed = std::move(relaxed); }
    done = rec.push(std::move(row), x, y);
  }
  trace.iterations = n;
  trace.x = std::move(x);
  trace.y = std::move(y);
  return trace;
}

} // namespace

IterateTrace solve_dual_first(SaddleProblem const &p, StepConfig const &cfg, PrimalDual const &z0,
                              SolveOptions const &opts)
{
  return run(p, Regime::DualFirst, cfg, z0, opts);
}

IterateTrace solve_primal_first(SaddleProblem const &p, StepConfig const &cfg, PrimalDual const &z0,
                                SolveOptions const &opts)
{
  return run(p, Regime::PrimalFirst, cfg, z0, opts);
}

IterateTrace solve(SaddleProblem const &p, Regime regime, StepConfig const &cfg, PrimalDual const &z0,
                   SolveOptions const &opts)
{
  return run(p, regime, cfg, z0, opts);
}

} // namespace wcpd
