#pragma once

namespace biodose {

/// Robust regression weight g(R, sigma0):
///   (1/R^2) * [2 - (R^2/sigma0^2) / (exp(R^2/(2 sigma0^2)) - 1)]
/// with the series limit 1/(2 sigma0^2) * (1 - t/6), t = R^2/(2 sigma0^2),
/// for |R| < 1e-4 * sigma0. Positive for all finite R; decays like 2/R^2 so
/// an outlier's influence g*R vanishes.
double robust_weight(double residual, double sigma0);

/// Good-and-bad-data mixture weight g*(R, sigma0, phi). phi is the prior
/// outlier probability; g* reduces to 1/sigma0^2 at phi = 0 (Gaussian case)
/// and to robust_weight at phi = 1.
double mixture_weight(double residual, double sigma0, double phi);

/// Marginal per-point density of the robust model:
///   P(R) = sigma0 / (R^2 sqrt(2 pi)) * [1 - exp(-R^2/(2 sigma0^2))],
/// limit 1/(2 sigma0 sqrt(2 pi)) as R -> 0.
double point_marginal(double residual, double sigma0);
double log_point_marginal(double residual, double sigma0);

/// Per-point curvature factor xi for the Cramer-Rao bound. Implemented in
/// the closed form xi = 4/R^4 - exp(-t)/(sigma0^4 (1-exp(-t))^2), which is
/// the exact second derivative of log P with the weight term split off
/// (omega_n = -sum [xi R^2 - g] (dY/dlambda_n)^2).
double curvature_xi(double residual, double sigma0);

/// Log of the mixture per-point density (the argument of the sum in the
/// mixture log-posterior).
double log_mixture_marginal(double residual, double sigma0, double phi);

/// Model-selection bracket (1/R^2)(1 - exp(-R^2/(2 sigma0^2))), the
/// reliability contribution of a single point; limit 1/(2 sigma0^2).
double evidence_bracket(double residual, double sigma0);

}  // namespace biodose
