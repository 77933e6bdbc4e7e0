#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "biodose/fitting.hpp"

namespace biodose {

using ParamRange = std::pair<double, double>;  // (lambda_min, lambda_max)

/// Bayesian reliability of one fitted model (Eq. 27), up to the constant
/// shared by all models fitted to the same data.
struct ModelEvidence {
  CurveModel model;
  double reliability = 0.0;  // sum-of-brackets times the Ockham product
  double ockham = 1.0;       // product of sigma_lambda sqrt(2pi) / range width
  std::vector<ParamRange> lambda_ranges;
  std::size_t n_params = 0;  // free fitted parameters
};

/// Computes Eq. (27) for a converged fit. When ranges are absent the
/// non-arbitrary rule lambda = lambda_hat +- k*sigma_chi is used with k = 2
/// and sigma_chi taken from a Gaussian least-squares fit of the same kind.
/// sigma_lambda comes from the fit's Hessian, falling back to Cramer-Rao.
ModelEvidence evidence(const std::vector<DataPoint>& data, const FitResult& fit,
                       const std::optional<std::vector<ParamRange>>& ranges = std::nullopt,
                       double k = 2.0);

/// Preference ratio W_M = P(A|D)/P(B|D); > 1 means A wins.
double compare_models(const ModelEvidence& a, const ModelEvidence& b);

/// Arbitrary range rule: per free parameter, the widest span around the
/// fitted value such that the endpoint curves leave at most three points
/// outside their own sigma0 tolerance. Both sides are searched separately
/// by geometric expansion plus bisection. Requires N >= 4.
std::vector<ParamRange> arbitrary_ranges(const std::vector<DataPoint>& data,
                                         const CurveModel& prototype,
                                         const FitOptions& options = {});

}  // namespace biodose
