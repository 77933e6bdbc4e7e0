#include "biodose/weights.hpp"

#include <cmath>

#include "biodose/errors.hpp"

namespace biodose {
namespace {

constexpr double kSqrt2Pi = 2.5066282746310005024;

// t = R^2 / (2 sigma0^2), the argument shared by every kernel here.
double half_scaled_r2(double residual, double sigma0) {
  const double z = residual / sigma0;
  return 0.5 * z * z;
}

}  // namespace

double robust_weight(double residual, double sigma0) {
  if (!(sigma0 > 0.0)) throw ValidationError("robust_weight requires sigma0 > 0");
  const double s2 = sigma0 * sigma0;
  const double t = half_scaled_r2(residual, sigma0);
  if (t < 5e-9) return (1.0 - t / 6.0) / (2.0 * s2);  // series limit at small residual
  if (t > 700.0) return 2.0 / (residual * residual);  // exp overflow region: pure tail
  const double r2 = residual * residual;
  return (2.0 - (r2 / s2) / std::expm1(t)) / r2;
}

double mixture_weight(double residual, double sigma0, double phi) {
  if (!(sigma0 > 0.0)) throw ValidationError("mixture_weight requires sigma0 > 0");
  if (!(phi >= 0.0 && phi <= 1.0)) throw ValidationError("phi must lie in [0,1]");
  const double s2 = sigma0 * sigma0;
  if (phi == 0.0) return 1.0 / s2;  // pure Gaussian case
  const double t = half_scaled_r2(residual, sigma0);
  if (t < 5e-9) {
    // first-order expansion of Eq. (55) around R = 0
    const double num = (0.75 * phi - 1.0) + t * (1.0 - 5.0 * phi / 6.0);
    const double den = (0.5 * phi - 1.0) + t * (1.0 - 0.75 * phi);
    return num / den / s2;
  }
  if (t > 700.0) return 2.0 / (residual * residual);
  const double s = s2 / (residual * residual);  // sigma0^2 / R^2
  const double em = std::exp(-t);
  const double num = em * (phi * s * (2.0 * s + 1.0) - 1.0 + phi) - 2.0 * phi * s * s;
  const double den = em * (phi * s - 1.0 + phi) - phi * s;
  return num / den / s2;
}

double point_marginal(double residual, double sigma0) {
  if (!(sigma0 > 0.0)) throw ValidationError("point_marginal requires sigma0 > 0");
  const double t = half_scaled_r2(residual, sigma0);
  if (t < 1e-8) return (1.0 - 0.5 * t) / (2.0 * sigma0 * kSqrt2Pi);
  return sigma0 / (residual * residual * kSqrt2Pi) * (-std::expm1(-t));
}

double log_point_marginal(double residual, double sigma0) {
  return std::log(point_marginal(residual, sigma0));
}

double curvature_xi(double residual, double sigma0) {
  if (!(sigma0 > 0.0)) throw ValidationError("curvature_xi requires sigma0 > 0");
  const double s4 = sigma0 * sigma0 * sigma0 * sigma0;
  const double t = half_scaled_r2(residual, sigma0);
  if (t < 1e-3) return (1.0 / 12.0 - t * t / 240.0) / s4;
  if (t > 700.0) {
    const double r2 = residual * residual;
    return 4.0 / (r2 * r2);
  }
  const double em = -std::expm1(-t);  // 1 - exp(-t)
  const double r2 = residual * residual;
  return 4.0 / (r2 * r2) - std::exp(-t) / (s4 * em * em);
}

double log_mixture_marginal(double residual, double sigma0, double phi) {
  if (!(sigma0 > 0.0)) throw ValidationError("log_mixture_marginal requires sigma0 > 0");
  const double t = half_scaled_r2(residual, sigma0);
  // bracket of Eq. (54): phi*(sigma0^2/R^2)(1-e^-t) + (1-phi)e^-t
  double bracket;
  if (t < 1e-8) {
    bracket = phi * 0.5 * (1.0 - 0.5 * t) + (1.0 - phi) * std::exp(-t);
  } else if (t > 700.0) {
    bracket = phi * 0.5 * (-std::expm1(-t)) / t;
  } else {
    bracket = phi * 0.5 * (-std::expm1(-t)) / t + (1.0 - phi) * std::exp(-t);
  }
  return -std::log(sigma0 * kSqrt2Pi) + std::log(bracket);
}

double evidence_bracket(double residual, double sigma0) {
  if (!(sigma0 > 0.0)) throw ValidationError("evidence_bracket requires sigma0 > 0");
  const double t = half_scaled_r2(residual, sigma0);
  if (t < 1e-8) return (1.0 - 0.5 * t) / (2.0 * sigma0 * sigma0);
  return (-std::expm1(-t)) / (residual * residual);
}

}  // namespace biodose
