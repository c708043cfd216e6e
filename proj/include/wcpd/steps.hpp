#pragma once

#include <string>

namespace wcpd {

enum class Regime
{
  DualFirst,
  PrimalFirst,
};

std::string to_string(Regime r);
Regime regime_from_string(std::string const &s);

/// Primal step sigma, dual step tau and relaxation theta in [0, 1].
struct StepConfig
{
  double sigma = 0.0;
  double tau = 0.0;
  double theta = 1.0;
};

struct StepCheck
{
  bool ok = true;
  std::string predicate; ///< name of the first failing predicate
  double lhs = 0.0;      ///< its left-hand side; the bound is always 1
};

/// Checks the strict stepsize predicates: positivity, theta in [0,1],
/// sigma*rho < 1, sqrt(sigma*tau)*|L| < 1 and, when `regime_predicate` is
/// set, the regime condition
///   dual-first:   sigma*rho + theta*sqrt(sigma*tau)*|L| < 1
///   primal-first: sigma*rho +       sqrt(sigma*tau)*|L| < 1
StepCheck validate_steps(StepConfig const &cfg, double rho, double norm_L, Regime regime,
                         bool regime_predicate = true);

/// Throws StepsizeViolation describing the failure.
void require_valid_steps(StepConfig const &cfg, double rho, double norm_L, Regime regime,
                         bool regime_predicate = true);

} // namespace wcpd
