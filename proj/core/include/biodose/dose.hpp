#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "biodose/curve.hpp"
#include "biodose/priors.hpp"

namespace biodose {

/// Observed casework counts: w scored cells with u aberrations.
struct Casework {
  double cells = 0.0;        // w
  double aberrations = 0.0;  // u
  double y_f = 0.0;          // u/w
  std::optional<double> sigma_yf;

  static Casework from_counts(double w, double u);
  void validate() const;
};

enum class DoseMethod { Classical, QuasiBayesian, SimplifiedBayesian, FullBayesian, GeneralizedBayesian };
std::string to_string(DoseMethod method);
DoseMethod dose_method_from_string(const std::string& name);

struct DoseGridSpec {
  double d_max = 0.0;         // <= 0: auto (dose where the curve reaches min(Ymax, 3*y_f))
  std::size_t n_points = 2000;
};

/// Sampled posterior density over one dose component. density is stored
/// normalized (trapezoid integral 1); normalization keeps the raw integral.
struct DosePosterior {
  std::vector<double> dose;
  std::vector<double> density;
  double peak = 0.0;
  double sigma = 0.0;              // Eq. 42 value; NaN when not computable
  double normalization = 0.0;
  bool peak_at_boundary = false;
  DoseMethod method = DoseMethod::Classical;
};

/// Curvature-based uncertainty at the posterior peak (Eq. 42):
/// 1/sqrt(|d^2 ln P / d D^2|) by central differences on the grid.
/// Throws NumericError for a boundary peak or non-negative curvature.
double posterior_sigma(const DosePosterior& posterior);

struct DoseSplit {
  double dg = 0.0;
  double dn = 0.0;
};

/// Closed-form split of y_f into (D_g, D_n) for an exactly known theta
/// (Eq. 36), including the theta = 0 / theta = 1 special cases and the
/// gamma = 0 linear fallback. Requires y_f >= Y0.
DoseSplit classical_split(const CurveModel& combined, double y_f, double theta);

struct ClassicalUncertaintyInput {
  double sigma_alpha = 0.0;
  double sigma_beta = 0.0;
  double sigma_gamma = 0.0;
  double sigma_yf = 0.0;
  double sigma_y0 = 0.0;
  double sigma_theta = 0.0;
};

/// Sum-of-independent-finite-increments uncertainty (Eq. 37):
/// sigma_Dx = sum_j |dDx/de_j| * delta_e_j with central-difference partials.
/// Always >= the root-sum-square combination of the same terms.
DoseSplit classical_uncertainty(const CurveModel& combined, double y_f, double theta,
                                const ClassicalUncertaintyInput& sigmas);

struct DosePair {
  DosePosterior gamma;
  DosePosterior neutron;
};

struct QuasiOptions {
  /// Paper Eq. (40): P(D) follows the prior composed with theta_x(D).
  /// When true, the change-of-variables Jacobian |theta_x'(D)| multiplies
  /// the composed prior instead (Eq. 39 read literally).
  bool apply_jacobian = false;
};

/// Quasi-Bayesian (enhanced classical) estimate: transforms a theta prior
/// through the exact dose relations theta_g(D_g), theta_n(D_n) of Eq. (38).
DosePair quasi_bayesian(const CurveModel& combined, double y_f, const ThetaPrior& prior,
                        const DoseGridSpec& grid = {}, const QuasiOptions& options = {});

struct QuadratureSpec {
  double rel_tol = 1e-8;
  int max_depth = 32;
  std::size_t mc_samples = 0;   // > 0 switches the theta integral to Monte Carlo
  std::uint64_t seed = 1;
};

/// Simplified Bayesian estimate: P(D_x) = integral over theta of the Poisson
/// likelihood (Eq. 45, evaluated in log space) times the prior (Eq. 46).
DosePair simplified_bayesian(const CurveModel& combined, const Casework& casework,
                             const ThetaPrior& prior, const DoseGridSpec& grid = {},
                             const QuadratureSpec& quadrature = {});

struct McSpec {
  std::size_t n_samples = 100000;
  std::uint64_t seed = 1;
};

/// Priors over the CombinedMixed parameters for the full Bayesian method.
struct CurveParamPriors {
  ParamPrior alpha = ParamPrior::point_mass(0.0);
  ParamPrior beta = ParamPrior::point_mass(0.0);
  ParamPrior gamma = ParamPrior::point_mass(0.0);
  ParamPrior y0 = ParamPrior::point_mass(kDefaultY0);
};

/// Full Bayesian estimate (Eq. 48): Monte Carlo over (alpha, beta, gamma,
/// Y0, theta) drawn from their priors, one counter-based stream per sample.
DosePair full_bayesian(const CurveModel& combined, const CurveParamPriors& param_priors,
                       const Casework& casework, const ThetaPrior& theta_prior,
                       const McSpec& mc = {}, const DoseGridSpec& grid = {});

/// Generalized Bayesian estimate (Eq. 59) for a multi-radiation polynomial
/// curve: one theta prior per radiation type, joint samples kept when
/// |sum theta_i - 1| < 0.01 and then renormalized onto the simplex exactly.
/// param_priors are ordered like the curve's parameter vector plus Y0 last.
/// Throws NumericError when the simplex rejection rate exceeds 99%.
std::vector<DosePosterior> generalized_bayesian(const CurveModel& multi,
                                                const Casework& casework,
                                                const std::vector<ThetaPrior>& theta_priors,
                                                const std::vector<ParamPrior>& param_priors,
                                                const McSpec& mc = {},
                                                const DoseGridSpec& grid = {});

/// theta_g(D_g) and theta_n(D_n) of Eq. (38) plus analytic derivatives;
/// exposed for tests and the quasi-Bayesian density.
double theta_of_dg(const CurveModel& combined, double y_f, double dg);
double theta_of_dn(const CurveModel& combined, double y_f, double dn);
double dtheta_ddg(const CurveModel& combined, double y_f, double dg);
double dtheta_ddn(const CurveModel& combined, double y_f, double dn);

/// Default grid upper end: dose where the curve section reaches
/// min(Ymax-ish ceiling, 3*y_f).
double default_grid_max(const CurveModel& combined, double y_f, bool gamma_axis);

}  // namespace biodose
