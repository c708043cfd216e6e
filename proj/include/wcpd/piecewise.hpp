#pragma once

#include "wcpd/prox.hpp"

#include <vector>

namespace wcpd {

/// a2 u^2 + a1 u + a0
struct Quadratic
{
  double a2 = 0.0;
  double a1 = 0.0;
  double a0 = 0.0;

  double operator()(double u) const { return (a2 * u + a1) * u + a0; }
};

/// Scalar function written as a sum of quadratics and absolute values of
/// quadratics. Between consecutive roots of the absolute terms it is a single
/// quadratic, so its prox is found exactly by enumerating the pieces.
class PiecewiseQuadratic
{
public:
  PiecewiseQuadratic &add(Quadratic q);
  PiecewiseQuadratic &add_abs(Quadratic q);

  double operator()(double u) const;

  /// Weak-convexity modulus: max(0, -2 a2) over the smooth pieces.
  double weak_convexity() const;

  double prox(double gamma, double v) const;

  std::vector<double> const &breakpoints() const { return breaks_; }

  struct Piece
  {
    double lo, hi;
    Quadratic q;
  };
  std::vector<Piece> const &pieces() const { return pieces_; }

private:
  void rebuild();

  std::vector<Quadratic> plain_;
  std::vector<Quadratic> abs_;
  std::vector<double> breaks_;
  std::vector<Piece> pieces_;
};

/// Wraps a scalar piecewise quadratic as a ProxFunction on R^1.
ProxFunction piecewise_function(std::string name, PiecewiseQuadratic pq);

} // namespace wcpd
