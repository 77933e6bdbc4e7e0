#pragma once

#include <string>

#include "biodose/rng.hpp"

namespace biodose {

/// theta = D_g/(D_g + D_n) = 1/(rho + 1); maps [0, inf) onto (0, 1].
double theta_from_rho(double rho);

enum class ThetaPriorKind { GaussianTheta, GaussianRhoTransformed, BetaUninformative, Uniform };

/// Prior density over the gamma-dose fraction theta in (0,1). All densities
/// are stored normalized on (0,1); Gaussians are truncated-renormalized.
/// A zero-width Uniform acts as a point mass (Kronecker-delta limit) and is
/// accepted by every dose method as a degenerate prior.
class ThetaPrior {
 public:
  static ThetaPrior gaussian_theta(double theta_hat, double sigma);
  static ThetaPrior gaussian_rho(double rho_hat, double sigma_rho);
  static ThetaPrior beta_uninformative();
  static ThetaPrior uniform(double lo, double hi);
  static ThetaPrior point_mass(double theta);

  ThetaPriorKind kind() const { return kind_; }
  bool is_point_mass() const;
  double point_value() const;  // valid only for point masses

  /// Normalized density; requires 0 < theta < 1 and a non-degenerate prior.
  double density(double theta) const;

  /// Maximum of the density (p_max), used by rejection sampling.
  double max_density() const { return p_max_; }

  /// Rejection sample against p_max as in the Monte Carlo method.
  double sample(CounterRng& rng) const;

  double theta_hat() const { return theta_hat_; }
  double sigma_theta() const { return sigma_theta_; }
  double rho_hat() const { return rho_hat_; }
  double sigma_rho() const { return sigma_rho_; }
  double range_lo() const { return lo_; }
  double range_hi() const { return hi_; }

 private:
  explicit ThetaPrior(ThetaPriorKind kind) : kind_(kind) {}
  void finalize();  // normalization constant and p_max

  ThetaPriorKind kind_;
  double theta_hat_ = 0.5, sigma_theta_ = 0.0;
  double rho_hat_ = 0.0, sigma_rho_ = 0.0;
  double lo_ = 0.0, hi_ = 1.0;
  double norm_ = 1.0;   // divides the raw kernel
  double p_max_ = 1.0;
};

enum class ParamPriorKind { Gamma, Gaussian, PointMass };

/// Prior over one calibration-curve parameter, for the full Bayesian method.
class ParamPrior {
 public:
  static ParamPrior gamma(double k, double z);        // mean k/z
  static ParamPrior gaussian(double mean, double sd);
  static ParamPrior point_mass(double value);

  ParamPriorKind kind() const { return kind_; }
  double sample(CounterRng& rng) const;
  double mean() const;

  double shape() const { return k_; }
  double rate() const { return z_; }
  double gauss_mean() const { return mean_; }
  double gauss_sd() const { return sd_; }
  double value() const { return value_; }

 private:
  explicit ParamPrior(ParamPriorKind kind) : kind_(kind) {}
  ParamPriorKind kind_;
  double k_ = 0.0, z_ = 0.0;
  double mean_ = 0.0, sd_ = 0.0;
  double value_ = 0.0;
};

}  // namespace biodose
