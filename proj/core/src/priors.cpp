#include "biodose/priors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "biodose/errors.hpp"
#include "biodose/numerics.hpp"

namespace biodose {
namespace {

constexpr double kSqrt2Pi = 2.5066282746310005024;

double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

double theta_from_rho(double rho) {
  if (!(rho >= 0.0)) throw ValidationError("rho must be >= 0");
  return 1.0 / (rho + 1.0);
}

ThetaPrior ThetaPrior::gaussian_theta(double theta_hat, double sigma) {
  if (!(sigma > 0.0)) throw ValidationError("gaussian theta prior requires sigma > 0");
  ThetaPrior p(ThetaPriorKind::GaussianTheta);
  p.theta_hat_ = theta_hat;
  p.sigma_theta_ = sigma;
  p.finalize();
  return p;
}

ThetaPrior ThetaPrior::gaussian_rho(double rho_hat, double sigma_rho) {
  if (!(sigma_rho > 0.0)) throw ValidationError("gaussian rho prior requires sigma_rho > 0");
  if (!(rho_hat >= 0.0)) throw ValidationError("rho_hat must be >= 0");
  ThetaPrior p(ThetaPriorKind::GaussianRhoTransformed);
  p.rho_hat_ = rho_hat;
  p.sigma_rho_ = sigma_rho;
  p.finalize();
  return p;
}

ThetaPrior ThetaPrior::beta_uninformative() {
  ThetaPrior p(ThetaPriorKind::BetaUninformative);
  p.finalize();
  return p;
}

ThetaPrior ThetaPrior::uniform(double lo, double hi) {
  if (!(lo >= 0.0 && hi <= 1.0 && lo <= hi))
    throw ValidationError("uniform theta prior requires 0 <= lo <= hi <= 1");
  ThetaPrior p(ThetaPriorKind::Uniform);
  p.lo_ = lo;
  p.hi_ = hi;
  p.finalize();
  return p;
}

ThetaPrior ThetaPrior::point_mass(double theta) {
  if (!(theta >= 0.0 && theta <= 1.0))
    throw ValidationError("point mass theta must lie in [0,1]");
  return uniform(theta, theta);
}

bool ThetaPrior::is_point_mass() const {
  return kind_ == ThetaPriorKind::Uniform && lo_ == hi_;
}

double ThetaPrior::point_value() const {
  if (!is_point_mass()) throw ValidationError("not a point-mass prior");
  return lo_;
}

void ThetaPrior::finalize() {
  switch (kind_) {
    case ThetaPriorKind::GaussianTheta: {
      // truncated-renormalized on (0,1)
      norm_ = norm_cdf((1.0 - theta_hat_) / sigma_theta_) - norm_cdf(-theta_hat_ / sigma_theta_);
      if (!(norm_ > 1e-300))
        throw ValidationError("gaussian theta prior has no mass on (0,1)");
      const double mode = std::clamp(theta_hat_, 1e-12, 1.0 - 1e-12);
      p_max_ = density(mode);
      break;
    }
    case ThetaPriorKind::GaussianRhoTransformed: {
      // the theta kernel is the push-forward of a Gaussian in rho restricted
      // to rho > 0, so the mass on (0,1) is Phi(rho_hat/sigma_rho)
      norm_ = norm_cdf(rho_hat_ / sigma_rho_);
      if (!(norm_ > 1e-300))
        throw ValidationError("gaussian rho prior has no mass on (0,1)");
      double best_x = 0.5, best = 0.0;
      for (int i = 1; i < 4096; ++i) {
        const double x = static_cast<double>(i) / 4096.0;
        const double d = density(x);
        if (d > best) {
          best = d;
          best_x = x;
        }
      }
      const double lo = std::max(1e-12, best_x - 1.0 / 4096.0);
      const double hi = std::min(1.0 - 1e-12, best_x + 1.0 / 4096.0);
      const double refined =
          golden_section_max([this](double t) { return density(t); }, lo, hi, 1e-12);
      p_max_ = std::max(best, density(refined));
      break;
    }
    case ThetaPriorKind::BetaUninformative:
      norm_ = 1.0;  // stored normalized: 6 theta (1 - theta)
      p_max_ = 1.5;
      break;
    case ThetaPriorKind::Uniform:
      norm_ = 1.0;
      p_max_ = lo_ == hi_ ? std::numeric_limits<double>::infinity() : 1.0 / (hi_ - lo_);
      break;
  }
}

double ThetaPrior::density(double theta) const {
  if (!(theta > 0.0 && theta < 1.0))
    throw ValidationError("theta prior density is defined on (0,1) only");
  switch (kind_) {
    case ThetaPriorKind::GaussianTheta: {
      const double z = (theta - theta_hat_) / sigma_theta_;
      return std::exp(-0.5 * z * z) / (sigma_theta_ * kSqrt2Pi) / norm_;
    }
    case ThetaPriorKind::GaussianRhoTransformed: {
      const double z = (1.0 / theta - 1.0 - rho_hat_) / sigma_rho_;
      return std::exp(-0.5 * z * z) / (kSqrt2Pi * sigma_rho_ * theta * theta) / norm_;
    }
    case ThetaPriorKind::BetaUninformative:
      return 6.0 * theta * (1.0 - theta);
    case ThetaPriorKind::Uniform:
      if (is_point_mass())
        throw ValidationError("point-mass prior has no density; use point_value()");
      return (theta >= lo_ && theta <= hi_) ? 1.0 / (hi_ - lo_) : 0.0;
  }
  throw ValidationError("unknown theta prior kind");
}

double ThetaPrior::sample(CounterRng& rng) const {
  if (is_point_mass()) return lo_;
  if (kind_ == ThetaPriorKind::Uniform) return rng.uniform(lo_, hi_);
  // classical rejection against p_max
  for (long i = 0; i < 100000000L; ++i) {
    const double cand = rng.uniform01();
    if (cand <= 0.0 || cand >= 1.0) continue;
    const double height = rng.uniform01() * p_max_;
    if (height < density(cand)) return cand;
  }
  throw NumericError("theta prior rejection sampling failed to accept");
}

ParamPrior ParamPrior::gamma(double k, double z) {
  if (!(k > 0.0 && z > 0.0)) throw ValidationError("gamma prior requires k > 0 and z > 0");
  ParamPrior p(ParamPriorKind::Gamma);
  p.k_ = k;
  p.z_ = z;
  return p;
}

ParamPrior ParamPrior::gaussian(double mean, double sd) {
  if (!(sd > 0.0)) throw ValidationError("gaussian prior requires sd > 0");
  ParamPrior p(ParamPriorKind::Gaussian);
  p.mean_ = mean;
  p.sd_ = sd;
  return p;
}

ParamPrior ParamPrior::point_mass(double value) {
  ParamPrior p(ParamPriorKind::PointMass);
  p.value_ = value;
  return p;
}

double ParamPrior::sample(CounterRng& rng) const {
  switch (kind_) {
    case ParamPriorKind::Gamma: return rng.gamma(k_, z_);
    case ParamPriorKind::Gaussian: return rng.gaussian(mean_, sd_);
    case ParamPriorKind::PointMass: return value_;
  }
  throw ValidationError("unknown parameter prior kind");
}

double ParamPrior::mean() const {
  switch (kind_) {
    case ParamPriorKind::Gamma: return k_ / z_;
    case ParamPriorKind::Gaussian: return mean_;
    case ParamPriorKind::PointMass: return value_;
  }
  throw ValidationError("unknown parameter prior kind");
}

}  // namespace biodose
