#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>

#include "pact/qos_model.hpp"

namespace pact {

struct CostParams {
  double flop_price = 1e-12;  // currency per FLOP
  double hw_fee = 0.01;
  double model_fee = 0.01;

  void validate() const;
};

struct CostBreakdown {
  double token_cost = 0.0;
  double hw_cost = 0.0;
  double model_cost = 0.0;
  double liability_cost = 0.0;
  double total = 0.0;
};

enum class CurveFamily {
  quadratic,    // a q^2 + b q + c0
  exponential,  // a exp(b q) + c0
};

std::string_view to_string(CurveFamily family);
CurveFamily parse_curve_family(std::string_view name);

/// Fitted cost curve C(q) on [0, 1]. Nondecreasing and nonnegative there by
/// construction; `fit_curve` refuses to return anything else.
struct CostCurve {
  CurveFamily family = CurveFamily::quadratic;
  double a = 0.0;
  double b = 0.0;
  double c0 = 0.0;
  double fit_residual = 0.0;  // RMS error over the fit points
  // True when the unrestricted least-squares fit left the admissible shape and
  // the coefficients were refit under a, b, c0 >= 0.
  bool shape_constrained = false;

  /// Evaluates the family without domain checks.
  double value(double q) const;
  double derivative(double q) const;
  /// Second derivative is nonnegative everywhere on [0, 1].
  bool convex() const;

  static CostCurve quadratic(double a, double b, double c0);
  static CostCurve exponential(double a, double b, double c0);
};

struct CostPoint {
  double q = 0.0;
  double cost = 0.0;
};

double token_cost(const ServiceConfig& cfg, const Environment& env, const CostParams& params);
CostBreakdown service_cost(const ServiceConfig& cfg, const Environment& env,
                           const CostParams& params);

/// Least-squares fit of the given family. For the quadratic family an
/// unrestricted fit that is not nondecreasing on [0, 1] is replaced by the
/// best fit with nonnegative coefficients, provided the points themselves are
/// nondecreasing in q. Throws FitError otherwise.
CostCurve fit_cost_curve(std::span<const CostPoint> points, CurveFamily family);

/// Checks nondecreasing and nonnegative on a 1e-3 grid over [0, 1].
bool admissible_on_unit_interval(const CostCurve& curve);

/// C(q) for q in [0, 1]; throws ValidationError outside.
double cost_at(const CostCurve& curve, double q);

}  // namespace pact
