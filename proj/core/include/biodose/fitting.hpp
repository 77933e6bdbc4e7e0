#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "biodose/curve.hpp"
#include "biodose/data.hpp"

namespace biodose {

enum class FitEngine { LeastSquares, PoissonMle, RobustBayesian, Mixture };

std::string to_string(FitEngine engine);
FitEngine fit_engine_from_string(const std::string& name);

struct FitOptions {
  double tol = 1e-8;      // relative parameter change for the fixed point
  int max_iter = 1000;
  bool fix_y0 = false;    // hold Y0 at the prototype's value
  double sigma_x = 0.0;   // least squares only: common horizontal uncertainty
};

/// Result of a fit. sigmas are ordered [params..., Y0]; a fixed Y0 gets
/// sigma 0. A non-converged result carries the last iterate.
struct FitResult {
  CurveModel model;
  std::vector<double> sigmas;
  double log_posterior = 0.0;
  std::vector<double> weights;
  FitEngine engine = FitEngine::LeastSquares;
  double phi = 0.0;  // mixture only
  int iterations = 0;
  bool converged = false;
  bool y0_free = true;
};

/// Chi-square minimiser (Eq. 11 weighting). Linear-in-parameter kinds are
/// solved exactly through the weighted normal equations; nonlinear kinds by
/// damped Gauss-Newton. sigma_x > 0 switches to the effective-variance
/// denominator sigma_y^2 + (dY/dD)^2 sigma_x^2.
FitResult fit_least_squares(const std::vector<DataPoint>& data, const CurveModel& prototype,
                            const FitOptions& options = {});

/// Poisson maximum likelihood for the background-free linear neutron curve.
/// Every point must carry counts and a positive dose. Closed form
/// alpha = sum(u) / sum(w*D).
FitResult fit_poisson_mle(const std::vector<DataPoint>& data);

/// Robust Bayesian fit: fixed-point iteration on the weights g_i, solving
/// the frozen-weight normal equations each round (CombinedMixed goes
/// through the 4x4 determinant ratios; nonlinear kinds use damped Newton).
FitResult fit_robust_bayesian(const std::vector<DataPoint>& data, const CurveModel& prototype,
                              const FitOptions& options = {});

/// Good-and-bad-data mixture fit with outlier probability phi in [0,1].
/// phi = 0 reproduces least squares, phi = 1 the robust fit.
FitResult fit_mixture(const std::vector<DataPoint>& data, const CurveModel& prototype,
                      double phi, const FitOptions& options = {});

/// Log-posterior S of the engine's objective for the given model.
double fit_objective(const std::vector<DataPoint>& data, const CurveModel& model,
                     FitEngine engine, double phi = 0.0);

/// Parameter uncertainties from the central-finite-difference Hessian of S
/// at the optimum (Eq. 19 route). Throws SingularMatrixError when the
/// Hessian cannot be inverted.
std::vector<double> uncertainties_hessian(const std::vector<DataPoint>& data,
                                          const FitResult& result);

/// Cramer-Rao lower bounds 1/sqrt(omega_n) from the per-parameter curvature
/// (Eq. 20-23 for the robust engine, the analogous analytic curvature for
/// the Gaussian and Poisson engines, finite differences for the mixture).
/// Throws NumericError when omega_n <= 0.
std::vector<double> uncertainties_cramer_rao(const std::vector<DataPoint>& data,
                                             const FitResult& result);

/// The Eq. (18) determinant-ratio solution of the CombinedMixed system for
/// frozen weights; exposed so it can be cross-checked against a generic
/// solve of the same normal equations.
struct CramerSolution {
  double y0, alpha, beta, gamma;
  double det_w0;
  std::array<double, 4> det_wk;  // W_Y0, W_alpha, W_beta, W_gamma
};
CramerSolution combined_mixed_cramer(const std::vector<DataPoint>& data,
                                     const std::vector<double>& weights);

/// Generic route: QR solve of the same weighted normal equations,
/// ordered [Y0, alpha, beta, gamma].
std::array<double, 4> combined_mixed_normal_solve(const std::vector<DataPoint>& data,
                                                  const std::vector<double>& weights);

}  // namespace biodose
