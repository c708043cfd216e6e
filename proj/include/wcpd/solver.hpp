#pragma once

#include "wcpd/saddle.hpp"
#include "wcpd/steps.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace wcpd {

struct TraceRow
{
  int n = 0;
  std::optional<double> dist;      ///< to S, or to S_P when only that is known
  std::optional<double> H;         ///< needs S
  std::optional<double> eps;       ///< dist(y_{n-1}, dg(L x_n)), needs a subdifferential of g
  std::optional<double> objective; ///< f(x) + g(Lx)
  std::optional<double> residual;  ///< |z_n - z_{n-1}|, absent on row 0
  std::optional<Vec> x, y;         ///< stored with SolveOptions::store_iterates
  std::optional<Vec> relaxed;      ///< y-bar or x-bar, stored with SolveOptions::store_relaxation
};

enum class StopReason
{
  MaxIters,
  Residual,
  Distance,
};

std::string to_string(StopReason r);

struct StopRules
{
  int max_iters = 1000;
  std::optional<double> residual_tol;
  std::optional<double> dist_tol;
};

/// Row hook; receives the row and the current iterate.
using RowHook = std::function<void(TraceRow const &, Vec const &x, Vec const &y)>;

struct SolveOptions
{
  StopRules stop;
  bool enforce_regime = true; ///< check the regime predicate, not just the base ones
  bool store_iterates = false;
  bool store_relaxation = false;
  bool keep_rows = true; ///< false keeps only the last row in memory
  std::optional<std::uint64_t> seed; ///< recorded in the trace metadata only
  RowHook on_row;
};

struct IterateTrace
{
  Regime regime = Regime::DualFirst;
  StepConfig steps;
  std::optional<std::uint64_t> seed;
  int iterations = 0;
  StopReason stop_reason = StopReason::MaxIters;
  std::vector<TraceRow> rows;
  Vec x, y; ///< final iterate
};

/// Decides whether to stop after `row`; returns the reason when it does.
std::optional<StopReason> stopping(TraceRow const &row, StopRules const &rules);

/// dist(y, dg(w)) with the subdifferential of g as a box.
double epsilon_monitor(ProxFunction const &g, Vec const &Lx_next, Vec const &y);

/// y+ = prox_{tau g*}(y + tau L x), y-bar = y+ + theta (y+ - y),
/// x+ = prox_{sigma f}(x - sigma L* y-bar).
IterateTrace solve_dual_first(SaddleProblem const &p, StepConfig const &cfg, PrimalDual const &z0,
                              SolveOptions const &opts = {});

/// x+ = prox_{sigma f}(x - sigma L* y), x-bar = x+ + theta (x+ - x),
/// y+ = prox_{tau g*}(y + tau L x-bar).
IterateTrace solve_primal_first(SaddleProblem const &p, StepConfig const &cfg, PrimalDual const &z0,
                                SolveOptions const &opts = {});

IterateTrace solve(SaddleProblem const &p, Regime regime, StepConfig const &cfg, PrimalDual const &z0,
                   SolveOptions const &opts = {});

} // namespace wcpd
