#include "pact/cost_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "pact/error.hpp"
#include "pact/scalar_search.hpp"

namespace pact {

namespace {

constexpr double kGridStep = 1e-3;
constexpr int kGridPoints = 1001;

// Exponential rate search range for the profile scan.
constexpr double kRateMin = -40.0;
constexpr double kRateMax = 40.0;
constexpr double kRateScanStep = 0.1;

struct LinearFit {
  Eigen::VectorXd coef;
  double rss = 0.0;
};

LinearFit least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  LinearFit fit;
  fit.coef = x.colPivHouseholderQr().solve(y);
  fit.rss = (x * fit.coef - y).squaredNorm();
  return fit;
}

double rss_of(const CostCurve& curve, std::span<const CostPoint> points) {
  double rss = 0.0;
  for (const auto& p : points) {
    const double r = curve.value(p.q) - p.cost;
    rss += r * r;
  }
  return rss;
}

Eigen::VectorXd costs_of(std::span<const CostPoint> points) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) y(static_cast<Eigen::Index>(i)) = points[i].cost;
  return y;
}

CostCurve fit_quadratic(std::span<const CostPoint> points) {
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd x(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double q = points[static_cast<std::size_t>(i)].q;
    x(i, 0) = q * q;
    x(i, 1) = q;
    x(i, 2) = 1.0;
  }
  const auto fit = least_squares(x, costs_of(points));
  return CostCurve::quadratic(fit.coef(0), fit.coef(1), fit.coef(2));
}

// Least squares under a, b, c0 >= 0. With three coefficients the active-set
// enumeration is exhaustive: the constrained optimum is the unrestricted
// optimum on some face of the orthant, so the best feasible face solution wins.
CostCurve fit_quadratic_nonnegative(std::span<const CostPoint> points) {
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd full(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double q = points[static_cast<std::size_t>(i)].q;
    full(i, 0) = q * q;
    full(i, 1) = q;
    full(i, 2) = 1.0;
  }
  const Eigen::VectorXd y = costs_of(points);

  double best_rss = std::numeric_limits<double>::infinity();
  Eigen::Vector3d best = Eigen::Vector3d::Zero();
  for (int mask = 0; mask < 8; ++mask) {
    std::vector<int> free_cols;
    for (int c = 0; c < 3; ++c)
      if (mask & (1 << c)) free_cols.push_back(c);

    Eigen::Vector3d coef = Eigen::Vector3d::Zero();
    if (!free_cols.empty()) {
      Eigen::MatrixXd sub(n, static_cast<Eigen::Index>(free_cols.size()));
      for (std::size_t j = 0; j < free_cols.size(); ++j)
        sub.col(static_cast<Eigen::Index>(j)) = full.col(free_cols[j]);
      const auto fit = least_squares(sub, y);
      if ((fit.coef.array() < 0.0).any()) continue;
      for (std::size_t j = 0; j < free_cols.size(); ++j)
        coef(free_cols[j]) = fit.coef(static_cast<Eigen::Index>(j));
    }
    const double rss = (full * coef - y).squaredNorm();
    if (rss < best_rss) {
      best_rss = rss;
      best = coef;
    }
  }
  auto curve = CostCurve::quadratic(best(0), best(1), best(2));
  curve.shape_constrained = true;
  return curve;
}

// For a fixed rate the model is linear in (a, c0); profile the rate.
LinearFit exponential_profile(std::span<const CostPoint> points, double rate) {
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd x(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i, 0) = std::exp(rate * points[static_cast<std::size_t>(i)].q);
    x(i, 1) = 1.0;
  }
  return least_squares(x, costs_of(points));
}

CostCurve fit_exponential(std::span<const CostPoint> points) {
  const int steps = static_cast<int>(std::lround((kRateMax - kRateMin) / kRateScanStep));
  int best_step = 0;
  double best_rss = std::numeric_limits<double>::infinity();
  for (int s = 0; s <= steps; ++s) {
    const double rss = exponential_profile(points, kRateMin + s * kRateScanStep).rss;
    if (rss < best_rss) {
      best_rss = rss;
      best_step = s;
    }
  }
  const double lo = kRateMin + std::max(best_step - 1, 0) * kRateScanStep;
  const double hi = kRateMin + std::min(best_step + 1, steps) * kRateScanStep;
  const auto refined = golden_section_maximize(
      [&](double rate) { return -exponential_profile(points, rate).rss; }, lo, hi, 1e-13);

  const auto lin = exponential_profile(points, refined.x);
  auto curve = CostCurve::exponential(lin.coef(0), refined.x, lin.coef(1));
  double rss = rss_of(curve, points);

  // Gauss-Newton polish on all three coefficients; the profile search leaves
  // the rate accurate only to about sqrt(machine epsilon).
  const auto n = static_cast<Eigen::Index>(points.size());
  const Eigen::VectorXd y = costs_of(points);
  for (int iter = 0; iter < 50; ++iter) {
    Eigen::MatrixXd jac(n, 3);
    Eigen::VectorXd resid(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double q = points[static_cast<std::size_t>(i)].q;
      const double e = std::exp(curve.b * q);
      jac(i, 0) = e;
      jac(i, 1) = curve.a * q * e;
      jac(i, 2) = 1.0;
      resid(i) = y(i) - curve.value(q);
    }
    const Eigen::VectorXd step = jac.colPivHouseholderQr().solve(resid);
    auto trial = CostCurve::exponential(curve.a + step(0), curve.b + step(1), curve.c0 + step(2));
    const double trial_rss = rss_of(trial, points);
    if (!(trial_rss < rss)) break;
    curve = trial;
    rss = trial_rss;
  }
  return curve;
}

bool nondecreasing_in_q(std::span<const CostPoint> points) {
  std::vector<CostPoint> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const CostPoint& l, const CostPoint& r) { return l.q < r.q; });
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i].cost < sorted[i - 1].cost) return false;
  return true;
}

}  // namespace

void CostParams::validate() const {
  if (!(std::isfinite(flop_price) && flop_price >= 0.0))
    throw ValidationError("must be >= 0", "flop_price");
  if (!(std::isfinite(hw_fee) && hw_fee >= 0.0)) throw ValidationError("must be >= 0", "hw_fee");
  if (!(std::isfinite(model_fee) && model_fee >= 0.0))
    throw ValidationError("must be >= 0", "model_fee");
}

std::string_view to_string(CurveFamily family) {
  switch (family) {
    case CurveFamily::quadratic:
      return "quadratic";
    case CurveFamily::exponential:
      return "exponential";
  }
  return "unknown";
}

CurveFamily parse_curve_family(std::string_view name) {
  if (name == "quadratic") return CurveFamily::quadratic;
  if (name == "exponential") return CurveFamily::exponential;
  throw ValidationError("unknown cost curve family '" + std::string(name) + "'");
}

double CostCurve::value(double q) const {
  switch (family) {
    case CurveFamily::quadratic:
      return (a * q + b) * q + c0;
    case CurveFamily::exponential:
      return a * std::exp(b * q) + c0;
  }
  return 0.0;
}

double CostCurve::derivative(double q) const {
  switch (family) {
    case CurveFamily::quadratic:
      return 2.0 * a * q + b;
    case CurveFamily::exponential:
      return a * b * std::exp(b * q);
  }
  return 0.0;
}

bool CostCurve::convex() const {
  switch (family) {
    case CurveFamily::quadratic:
      return a >= 0.0;
    case CurveFamily::exponential:
      return a >= 0.0;  // a b^2 e^{bq}
  }
  return false;
}

CostCurve CostCurve::quadratic(double a, double b, double c0) {
  return CostCurve{CurveFamily::quadratic, a, b, c0, 0.0, false};
}

CostCurve CostCurve::exponential(double a, double b, double c0) {
  return CostCurve{CurveFamily::exponential, a, b, c0, 0.0, false};
}

double token_cost(const ServiceConfig& cfg, const Environment& env, const CostParams& params) {
  env.validate();
  params.validate();
  return params.flop_price * token_count(cfg, env) * flops_per_token(cfg);
}

CostBreakdown service_cost(const ServiceConfig& cfg, const Environment& env,
                           const CostParams& params) {
  CostBreakdown out;
  out.token_cost = token_cost(cfg, env, params);
  out.hw_cost = params.hw_fee;
  out.model_cost = params.model_fee;
  out.liability_cost = cfg.liability;
  out.total = out.token_cost + out.hw_cost + out.model_cost + out.liability_cost;
  return out;
}

bool admissible_on_unit_interval(const CostCurve& curve) {
  double prev = curve.value(0.0);
  if (!std::isfinite(prev) || prev < -1e-12) return false;
  for (int i = 1; i < kGridPoints; ++i) {
    const double v = curve.value(i * kGridStep);
    if (!std::isfinite(v) || v < -1e-12) return false;
    if (v < prev - 1e-12 * std::max(1.0, std::abs(prev))) return false;
    prev = v;
  }
  return true;
}

CostCurve fit_cost_curve(std::span<const CostPoint> points, CurveFamily family) {
  if (points.size() < 3) throw FitError("cost curve fit needs at least 3 points");
  for (const auto& p : points) {
    if (!(p.q >= 0.0 && p.q <= 1.0)) throw FitError("fit point q outside [0, 1]");
    if (!std::isfinite(p.cost)) throw FitError("fit point cost is not finite");
  }
  {
    std::vector<double> qs;
    for (const auto& p : points) qs.push_back(p.q);
    std::sort(qs.begin(), qs.end());
    if (std::adjacent_find(qs.begin(), qs.end()) != qs.end())
      throw FitError("fit points must have distinct q values");
  }

  CostCurve curve =
      family == CurveFamily::quadratic ? fit_quadratic(points) : fit_exponential(points);

  if (!admissible_on_unit_interval(curve)) {
    if (family != CurveFamily::quadratic || !nondecreasing_in_q(points))
      throw FitError("fitted cost curve is not nondecreasing and nonnegative on [0, 1]; "
                     "costs must rise with QoS for screening");
    curve = fit_quadratic_nonnegative(points);
  }
  curve.fit_residual = std::sqrt(rss_of(curve, points) / static_cast<double>(points.size()));
  return curve;
}

double cost_at(const CostCurve& curve, double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw ValidationError("q must lie in [0, 1]", "q");
  return curve.value(q);
}

}  // namespace pact
