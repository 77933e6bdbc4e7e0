#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "biodose/errors.hpp"

namespace biodose {

/// Default spontaneous aberration frequency (aberrations/cell) for dicentrics.
inline constexpr double kDefaultY0 = 0.0005;

enum class CurveKind {
  LinearNeutron,            // Y0 + alpha*D
  LinearQuadraticGamma,     // Y0 + beta*D + gamma*D^2
  CombinedMixed,            // Y0 + alpha*Dn + beta*Dg + gamma*Dg^2
  SaturatedLinear,          // Y0 + (Ymax-Y0)(1 - exp(-alpha*D))
  SaturatedSigmoid,         // Y0 + (Ymax-Y0)(1 - exp(-beta*D - gamma*D^2))
  AvramiSigmoid,            // Y0 + (Ymax-Y0)(1 - exp(-a*D^n))
  CriticalLinear,           // Y0 + (Ymax-Y0)*alpha*D*exp(-alpha*D)
  CriticalQuadratic,        // Y0 + (Ymax-Y0)*(beta*D+gamma*D^2)*exp(-beta*D-gamma*D^2)
  Polynomial,               // Y0 + sum_j lambda_j D^j
  MultiRadiationPolynomial, // Y0 + sum_i sum_j lambda_ij Di^j
  Generalized,              // see GeneralizedTerm
};

std::string to_string(CurveKind kind);
CurveKind curve_kind_from_string(const std::string& name);

/// One c*D^m entry inside a generalized-term exponent.
struct ExpTerm {
  double coeff = 0.0;  // c
  double power = 1.0;  // m
};

/// One term of the generalized curve:
///   offset + scale * D^degree * exp(-sum_k coeff_k * D^power_k)
/// The full curve is Y0 + (Ymax - Y0) * sum over radiations and terms.
struct GeneralizedTerm {
  double offset = 0.0;  // additive coefficient
  double scale = 0.0;   // coefficient of the D^degree exponential product
  int degree = 0;
  std::vector<ExpTerm> exp_terms;
};

/// An immutable calibration dose-response curve with analytic derivatives
/// with respect to each dose component and each parameter. Evaluation is
/// pure; instances are safe to share across threads.
class CurveModel {
 public:
  static CurveModel linear_neutron(double alpha, double y0 = kDefaultY0);
  static CurveModel linear_quadratic_gamma(double beta, double gamma, double y0 = kDefaultY0);
  static CurveModel combined_mixed(double alpha, double beta, double gamma,
                                   double y0 = kDefaultY0);
  static CurveModel saturated_linear(double alpha, double y0 = kDefaultY0, double ymax = 1.0);
  static CurveModel saturated_sigmoid(double beta, double gamma, double y0 = kDefaultY0,
                                      double ymax = 1.0);
  static CurveModel avrami_sigmoid(double a, double n, double y0 = kDefaultY0,
                                   double ymax = 1.0);
  static CurveModel critical_linear(double alpha, double y0 = kDefaultY0, double ymax = 1.0);
  static CurveModel critical_quadratic(double beta, double gamma, double y0 = kDefaultY0,
                                       double ymax = 1.0);
  static CurveModel polynomial(std::vector<double> coeffs, double y0 = kDefaultY0);
  static CurveModel multi_polynomial(std::vector<std::vector<double>> coeffs_per_radiation,
                                     double y0 = kDefaultY0);
  static CurveModel generalized(std::vector<std::vector<GeneralizedTerm>> terms_per_radiation,
                                double y0 = kDefaultY0, double ymax = 1.0);

  /// Same structure and (y0, ymax unless overridden) with a new parameter
  /// vector; used by the fitting engines.
  CurveModel with_params(std::span<const double> params) const;
  CurveModel with_params_and_y0(std::span<const double> params, double y0) const;

  CurveKind kind() const { return kind_; }
  const std::vector<double>& params() const { return params_; }
  double y0() const { return y0_; }
  double ymax() const { return ymax_; }
  bool uses_ymax() const;
  bool linear_in_params() const;

  /// Number of dose components the curve takes (1, or 2 for CombinedMixed,
  /// or R for the multi-radiation kinds).
  std::size_t dose_arity() const;

  /// radiation_count (R) for the multi-radiation kinds, 1 otherwise.
  std::size_t radiation_count() const;

  /// Per-radiation polynomial degrees (multi-radiation polynomial only).
  const std::vector<std::size_t>& degrees() const { return degrees_; }

  const std::vector<std::vector<GeneralizedTerm>>& generalized_terms() const { return terms_; }

  /// params().size() + 1; Y0 is addressable as the last parameter index.
  std::size_t param_count() const { return params_.size() + 1; }

  /// Y(D). Throws ValidationError on arity mismatch or negative dose.
  double evaluate(std::span<const double> dose) const;
  double evaluate(double dose) const;
  double evaluate(double dn, double dg) const;

  /// dY/dD_axis, analytic.
  double dose_derivative(std::span<const double> dose, std::size_t axis = 0) const;
  double dose_derivative(double dose) const;

  /// dY/dlambda_index, analytic; index == params().size() addresses Y0.
  double param_derivative(std::span<const double> dose, std::size_t index) const;
  double param_derivative(double dose, std::size_t index) const;

 private:
  CurveModel(CurveKind kind, std::vector<double> params, double y0, double ymax);
  void check_dose(std::span<const double> dose) const;
  double generalized_sum(std::span<const double> dose) const;

  CurveKind kind_;
  std::vector<double> params_;
  double y0_;
  double ymax_;
  std::vector<std::size_t> degrees_;                  // multi-radiation polynomial
  std::vector<std::vector<GeneralizedTerm>> terms_;   // generalized
};

}  // namespace biodose
