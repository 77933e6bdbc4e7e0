#include "biodose/dose.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "biodose/accum.hpp"
#include "biodose/numerics.hpp"

namespace biodose {
namespace {

constexpr double kThetaEps = 1e-6;  // integration margin at the theta poles

struct CombinedParams {
  double alpha, beta, gamma, y0;
};

CombinedParams unpack_combined(const CurveModel& curve) {
  if (curve.kind() != CurveKind::CombinedMixed)
    throw ValidationError("this dose method requires a combined_mixed curve");
  return {curve.params()[0], curve.params()[1], curve.params()[2], curve.y0()};
}

/// y_f(D_g | theta) of Eq. (45), first line. theta = 0 admits no gamma dose:
/// the frequency is infinite for any dg > 0.
double y_of_dg(const CombinedParams& c, double dg, double theta) {
  if (theta <= 0.0) return dg == 0.0 ? c.y0 : std::numeric_limits<double>::infinity();
  const double neutron = theta < 1.0 ? c.alpha * (1.0 - theta) / theta * dg : 0.0;
  return c.y0 + neutron + c.beta * dg + c.gamma * dg * dg;
}

/// y_f(D_n | theta) of Eq. (45), second line.
double y_of_dn(const CombinedParams& c, double dn, double theta) {
  if (theta >= 1.0) return dn == 0.0 ? c.y0 : std::numeric_limits<double>::infinity();
  const double r = theta > 0.0 ? theta / (1.0 - theta) : 0.0;
  const double dg = r * dn;
  return c.y0 + c.alpha * dn + c.beta * dg + c.gamma * dg * dg;
}

double log_poisson_likelihood(double w, double u, double y) {
  if (!(y > 0.0) || !std::isfinite(y)) return -std::numeric_limits<double>::infinity();
  const double mu = w * y;
  if (u > 0.0) return u * std::log(mu) - mu - std::lgamma(u + 1.0);
  return -mu;
}

std::size_t argmax_index(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

/// Assembles a DosePosterior from log-density values on the grid plus a
/// continuous log-density for golden-section peak refinement.
DosePosterior assemble_posterior(std::vector<double> grid, const std::vector<double>& logval,
                                 const std::function<double(double)>& log_density,
                                 DoseMethod method) {
  DosePosterior post;
  post.method = method;
  post.dose = std::move(grid);
  const std::size_t n = post.dose.size();
  const double lmax = *std::max_element(logval.begin(), logval.end());
  if (!std::isfinite(lmax))
    throw NumericError("posterior vanishes on the entire dose grid");
  std::vector<double> raw(n);
  for (std::size_t i = 0; i < n; ++i) raw[i] = std::exp(logval[i] - lmax);
  const double integral = trapezoid(post.dose, raw);
  if (!(integral > 0.0)) throw NumericError("posterior has zero mass on the dose grid");
  post.density.resize(n);
  for (std::size_t i = 0; i < n; ++i) post.density[i] = raw[i] / integral;
  post.normalization = std::exp(lmax) * integral;

  const std::size_t k = argmax_index(raw);
  post.peak_at_boundary = (k == 0 || k + 1 == n);
  if (post.peak_at_boundary) {
    post.peak = post.dose[k];
  } else {
    const double step = post.dose[k + 1] - post.dose[k];
    post.peak = golden_section_max(log_density, post.dose[k - 1], post.dose[k + 1],
                                   1e-6 * step);
  }
  try {
    post.sigma = posterior_sigma(post);
  } catch (const NumericError&) {
    post.sigma = std::numeric_limits<double>::quiet_NaN();
  }
  return post;
}

DosePosterior point_mass_spike(std::vector<double> grid, double location, DoseMethod method) {
  DosePosterior post;
  post.method = method;
  post.dose = std::move(grid);
  post.density.assign(post.dose.size(), 0.0);
  std::size_t k = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < post.dose.size(); ++i) {
    const double d = std::abs(post.dose[i] - location);
    if (d < best) {
      best = d;
      k = i;
    }
  }
  const double h = post.dose.size() > 1 ? post.dose[1] - post.dose[0] : 1.0;
  post.density[k] = 1.0 / h;
  post.peak = location;
  post.sigma = 0.0;
  post.normalization = 1.0;
  post.peak_at_boundary = (k == 0 || k + 1 == post.dose.size());
  return post;
}

double solve_section_dose(const std::function<double(double)>& y_of_d, double target) {
  // geometric bracket then bisection on y(D) = target (y increasing near 0)
  double hi = 1.0;
  for (int i = 0; i < 200 && y_of_d(hi) < target; ++i) hi *= 1.5;
  if (y_of_d(hi) < target)
    throw NumericError("cannot bracket the default grid upper end");
  return bisect_root([&](double d) { return y_of_d(d) - target; }, 0.0, hi, 1e-9 * hi);
}

}  // namespace

std::string to_string(DoseMethod method) {
  switch (method) {
    case DoseMethod::Classical: return "classical";
    case DoseMethod::QuasiBayesian: return "quasi";
    case DoseMethod::SimplifiedBayesian: return "simplified";
    case DoseMethod::FullBayesian: return "full";
    case DoseMethod::GeneralizedBayesian: return "generalized";
  }
  throw ValidationError("unknown dose method");
}

DoseMethod dose_method_from_string(const std::string& name) {
  if (name == "classical") return DoseMethod::Classical;
  if (name == "quasi") return DoseMethod::QuasiBayesian;
  if (name == "simplified") return DoseMethod::SimplifiedBayesian;
  if (name == "full") return DoseMethod::FullBayesian;
  if (name == "generalized") return DoseMethod::GeneralizedBayesian;
  throw ValidationError("unknown dose method: " + name);
}

Casework Casework::from_counts(double w, double u) {
  Casework c;
  c.cells = w;
  c.aberrations = u;
  c.y_f = u / w;
  c.validate();
  return c;
}

void Casework::validate() const {
  if (!(cells >= 1.0)) throw ValidationError("casework needs w >= 1 cells");
  if (!(aberrations >= 0.0)) throw ValidationError("casework needs u >= 0");
  if (std::abs(y_f - aberrations / cells) > 1e-12)
    throw ValidationError("y_f must equal u/w");
}

double posterior_sigma(const DosePosterior& posterior) {
  const auto& x = posterior.dose;
  const auto& p = posterior.density;
  if (x.size() < 3) throw NumericError("posterior grid too small for a curvature estimate");
  const std::size_t k = argmax_index(p);
  if (k == 0 || k + 1 == x.size())
    throw NumericError("posterior peak sits on the grid boundary");
  if (!(p[k - 1] > 0.0 && p[k] > 0.0 && p[k + 1] > 0.0))
    throw NumericError("posterior density vanishes next to the peak");
  const double hm = x[k] - x[k - 1];
  const double hp = x[k + 1] - x[k];
  const double fm = std::log(p[k - 1]), f0 = std::log(p[k]), fp = std::log(p[k + 1]);
  // three-point second derivative on a possibly non-uniform grid
  const double d2 = 2.0 * (fm * hp - f0 * (hp + hm) + fp * hm) / (hm * hp * (hm + hp));
  if (!(d2 < 0.0)) throw NumericError("non-negative curvature at the posterior peak");
  return 1.0 / std::sqrt(-d2);
}

DoseSplit classical_split(const CurveModel& combined, double y_f, double theta) {
  const CombinedParams c = unpack_combined(combined);
  if (!(theta >= 0.0 && theta <= 1.0)) throw ValidationError("theta must lie in [0,1]");
  if (y_f < c.y0)
    throw ValidationError("observed frequency lies below the background Y0");
  const double excess = y_f - c.y0;
  if (excess == 0.0) return {0.0, 0.0};
  if (theta == 0.0) {
    if (!(c.alpha > 0.0))
      throw NumericError("pure neutron case needs alpha > 0");
    return {0.0, excess / c.alpha};
  }
  const double a_term = theta < 1.0 ? c.alpha * (1.0 - theta) / theta : 0.0;
  const double lin = a_term + c.beta;
  const double disc = lin * lin + 4.0 * c.gamma * excess;
  const double denom = std::sqrt(disc) + lin;
  if (!(denom > 0.0))
    throw NumericError("degenerate curve coefficients in the closed-form split");
  DoseSplit split;
  split.dg = 2.0 * excess / denom;  // stable form of Eq. (36)
  split.dn = theta < 1.0 ? split.dg * (1.0 - theta) / theta : 0.0;
  return split;
}

DoseSplit classical_uncertainty(const CurveModel& combined, double y_f, double theta,
                                const ClassicalUncertaintyInput& sigmas) {
  const CombinedParams c = unpack_combined(combined);
  const double deltas[6] = {sigmas.sigma_alpha, sigmas.sigma_beta, sigmas.sigma_gamma,
                            sigmas.sigma_yf,    sigmas.sigma_y0,   sigmas.sigma_theta};

  auto split_at = [&](int which, double value) {
    double a = c.alpha, b = c.beta, g = c.gamma, yf = y_f, y0 = c.y0, th = theta;
    switch (which) {
      case 0: a = value; break;
      case 1: b = value; break;
      case 2: g = value; break;
      case 3: yf = value; break;
      case 4: y0 = value; break;
      case 5: th = value; break;
    }
    return classical_split(CurveModel::combined_mixed(a, b, g, y0), yf, th);
  };
  const double centers[6] = {c.alpha, c.beta, c.gamma, y_f, c.y0, theta};

  KahanSum sum_dg, sum_dn;
  for (int j = 0; j < 6; ++j) {
    if (deltas[j] == 0.0) continue;
    if (!(deltas[j] > 0.0)) throw ValidationError("uncertainties must be >= 0");
    double h = 1e-6 * std::max(1.0, std::abs(centers[j]));
    if (j == 5) {
      if (theta - h <= 0.0 || theta + h >= 1.0)
        throw NumericError("theta partial diverges at the boundary of (0,1)");
    }
    if (j == 3 || j == 4) {
      const double margin = 0.5 * (y_f - c.y0);
      if (margin <= 0.0)
        throw NumericError("cannot form a central difference at y_f = Y0");
      h = std::min(h, margin);
    }
    const DoseSplit plus = split_at(j, centers[j] + h);
    const DoseSplit minus = split_at(j, centers[j] - h);
    sum_dg.add(std::abs(plus.dg - minus.dg) / (2.0 * h) * deltas[j]);
    sum_dn.add(std::abs(plus.dn - minus.dn) / (2.0 * h) * deltas[j]);
  }
  return {sum_dg.value(), sum_dn.value()};
}

double theta_of_dg(const CurveModel& combined, double y_f, double dg) {
  const CombinedParams c = unpack_combined(combined);
  const double remainder = y_f - c.y0 - c.beta * dg - c.gamma * dg * dg;
  if (remainder < 0.0) return std::numeric_limits<double>::quiet_NaN();
  const double num = c.alpha * dg;
  return num / (num + remainder);
}

double theta_of_dn(const CurveModel& combined, double y_f, double dn) {
  const CombinedParams c = unpack_combined(combined);
  const double remainder = y_f - c.y0 - c.alpha * dn;
  if (remainder < 0.0) return std::numeric_limits<double>::quiet_NaN();
  if (remainder == 0.0) return 0.0;
  const double disc = c.beta * c.beta + 4.0 * c.gamma * remainder;
  const double dg = 2.0 * remainder / (std::sqrt(disc) + c.beta);
  return dg / (dg + dn);
}

double dtheta_ddg(const CurveModel& combined, double y_f, double dg) {
  const CombinedParams c = unpack_combined(combined);
  const double remainder = y_f - c.y0 - c.beta * dg - c.gamma * dg * dg;
  if (remainder < 0.0) return std::numeric_limits<double>::quiet_NaN();
  const double m = c.alpha * dg + remainder;
  const double mprime = c.alpha - c.beta - 2.0 * c.gamma * dg;
  return (c.alpha * m - c.alpha * dg * mprime) / (m * m);
}

double dtheta_ddn(const CurveModel& combined, double y_f, double dn) {
  const CombinedParams c = unpack_combined(combined);
  const double remainder = y_f - c.y0 - c.alpha * dn;
  if (remainder < 0.0) return std::numeric_limits<double>::quiet_NaN();
  if (c.gamma == 0.0) {
    const double dg = remainder / c.beta;
    const double dgp = -c.alpha / c.beta;
    const double den = dg + dn;
    return (dgp * dn - dg) / (den * den);
  }
  const double q = std::sqrt(c.beta * c.beta + 4.0 * c.gamma * remainder);
  const double t = q - c.beta;
  const double den = t + 2.0 * c.gamma * dn;
  const double tprime = -2.0 * c.gamma * c.alpha / q;
  return 2.0 * c.gamma * (tprime * dn - t) / (den * den);
}

double default_grid_max(const CurveModel& combined, double y_f, bool gamma_axis) {
  const double target_y =
      combined.uses_ymax()
          ? std::min(combined.y0() + 0.999 * (combined.ymax() - combined.y0()), 3.0 * y_f)
          : 3.0 * y_f;
  if (combined.kind() == CurveKind::CombinedMixed) {
    const CombinedParams c = unpack_combined(combined);
    const double excess = target_y - c.y0;
    if (excess <= 0.0) throw NumericError("grid target below background");
    if (gamma_axis) {
      if (c.gamma > 0.0)
        return 2.0 * excess / (c.beta + std::sqrt(c.beta * c.beta + 4.0 * c.gamma * excess));
      if (c.beta > 0.0) return excess / c.beta;
      throw NumericError("gamma section is flat: supply an explicit grid");
    }
    if (c.alpha > 0.0) return excess / c.alpha;
    throw NumericError("neutron section is flat: supply an explicit grid");
  }
  throw ValidationError("default grid rule applies to combined_mixed curves");
}

DosePair quasi_bayesian(const CurveModel& combined, double y_f, const ThetaPrior& prior,
                        const DoseGridSpec& grid, const QuasiOptions& options) {
  const CombinedParams c = unpack_combined(combined);
  if (y_f < c.y0) throw ValidationError("observed frequency lies below the background Y0");

  const double dg_max = grid.d_max > 0.0 ? grid.d_max : default_grid_max(combined, y_f, true);
  const double dn_max = grid.d_max > 0.0 ? grid.d_max : default_grid_max(combined, y_f, false);
  std::vector<double> grid_g = linspace(0.0, dg_max, grid.n_points);
  std::vector<double> grid_n = linspace(0.0, dn_max, grid.n_points);

  if (prior.is_point_mass()) {
    const DoseSplit split = classical_split(combined, y_f, prior.point_value());
    DosePair out{point_mass_spike(std::move(grid_g), split.dg, DoseMethod::QuasiBayesian),
                 point_mass_spike(std::move(grid_n), split.dn, DoseMethod::QuasiBayesian)};
    return out;
  }

  auto density_for = [&](bool gamma_axis) {
    return [&, gamma_axis](double d) -> double {
      const double theta = gamma_axis ? theta_of_dg(combined, y_f, d)
                                      : theta_of_dn(combined, y_f, d);
      if (!(theta > 0.0 && theta < 1.0)) return -std::numeric_limits<double>::infinity();
      double p = prior.density(theta);
      if (options.apply_jacobian) {
        const double jac = gamma_axis ? dtheta_ddg(combined, y_f, d)
                                      : dtheta_ddn(combined, y_f, d);
        p *= std::abs(jac);
      }
      return p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
    };
  };

  auto make = [&](std::vector<double> g, bool gamma_axis) {
    auto logp = density_for(gamma_axis);
    std::vector<double> logval(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) logval[i] = logp(g[i]);
    return assemble_posterior(std::move(g), logval, logp, DoseMethod::QuasiBayesian);
  };
  return {make(std::move(grid_g), true), make(std::move(grid_n), false)};
}

DosePair simplified_bayesian(const CurveModel& combined, const Casework& casework,
                             const ThetaPrior& prior, const DoseGridSpec& grid,
                             const QuadratureSpec& quadrature) {
  const CombinedParams c = unpack_combined(combined);
  casework.validate();
  const double w = casework.cells, u = casework.aberrations, y_f = casework.y_f;

  const double dg_max = grid.d_max > 0.0 ? grid.d_max : default_grid_max(combined, y_f, true);
  const double dn_max = grid.d_max > 0.0 ? grid.d_max : default_grid_max(combined, y_f, false);

  // theta samples for the optional Monte Carlo integration mode, shared
  // across the whole grid so the density stays smooth in D
  std::vector<double> theta_samples;
  if (quadrature.mc_samples > 0 && !prior.is_point_mass()) {
    theta_samples.resize(quadrature.mc_samples);
    for (std::size_t s = 0; s < quadrature.mc_samples; ++s) {
      CounterRng rng = CounterRng::substream(quadrature.seed, s);
      theta_samples[s] = prior.sample(rng);
    }
  }

  auto log_posterior_at = [&](bool gamma_axis) {
    return [&, gamma_axis](double d) -> double {
      auto log_like = [&](double theta) {
        const double y = gamma_axis ? y_of_dg(c, d, theta) : y_of_dn(c, d, theta);
        return log_poisson_likelihood(w, u, y);
      };
      if (prior.is_point_mass()) return log_like(prior.point_value());
      if (!theta_samples.empty()) {
        OnlineLogSum acc;
        for (double t : theta_samples) acc.add(log_like(t));
        return acc.value() - std::log(static_cast<double>(theta_samples.size()));
      }
      // scale by the integrand's maximum on a coarse scan, then integrate
      double peak = -std::numeric_limits<double>::infinity();
      constexpr int kScan = 64;
      for (int i = 0; i <= kScan; ++i) {
        const double t = kThetaEps + (1.0 - 2.0 * kThetaEps) * i / kScan;
        peak = std::max(peak, log_like(t) + std::log(prior.density(t)));
      }
      if (!std::isfinite(peak)) return -std::numeric_limits<double>::infinity();
      const double integral = adaptive_simpson(
          [&](double t) {
            const double v = log_like(t) + std::log(prior.density(t)) - peak;
            return v > -700.0 ? std::exp(v) : 0.0;
          },
          kThetaEps, 1.0 - kThetaEps, quadrature.rel_tol, quadrature.max_depth);
      return integral > 0.0 ? peak + std::log(integral)
                            : -std::numeric_limits<double>::infinity();
    };
  };

  auto make = [&](double dmax, bool gamma_axis) {
    std::vector<double> g = linspace(0.0, dmax, grid.n_points);
    auto logp = log_posterior_at(gamma_axis);
    std::vector<double> logval(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) logval[i] = logp(g[i]);
    return assemble_posterior(std::move(g), logval, logp, DoseMethod::SimplifiedBayesian);
  };
  return {make(dg_max, true), make(dn_max, false)};
}

DosePair full_bayesian(const CurveModel& combined, const CurveParamPriors& param_priors,
                       const Casework& casework, const ThetaPrior& theta_prior,
                       const McSpec& mc, const DoseGridSpec& grid) {
  unpack_combined(combined);
  casework.validate();
  if (mc.n_samples < 10000)
    throw ValidationError("full bayesian estimation needs n_samples >= 10000");
  const double w = casework.cells, u = casework.aberrations, y_f = casework.y_f;

  // grid rule evaluated at the prior means
  const CurveModel mean_curve = CurveModel::combined_mixed(
      param_priors.alpha.mean(), param_priors.beta.mean(), param_priors.gamma.mean(),
      std::max(0.0, param_priors.y0.mean()));
  const double dg_max = grid.d_max > 0.0 ? grid.d_max : default_grid_max(mean_curve, y_f, true);
  const double dn_max = grid.d_max > 0.0 ? grid.d_max : default_grid_max(mean_curve, y_f, false);

  struct Sample {
    CombinedParams c;
    double theta;
  };
  std::vector<Sample> samples(mc.n_samples);
  for (std::size_t s = 0; s < mc.n_samples; ++s) {
    CounterRng rng = CounterRng::substream(mc.seed, s);
    Sample& smp = samples[s];
    smp.c.alpha = param_priors.alpha.sample(rng);
    smp.c.beta = param_priors.beta.sample(rng);
    smp.c.gamma = param_priors.gamma.sample(rng);
    smp.c.y0 = param_priors.y0.sample(rng);
    smp.theta = theta_prior.is_point_mass() ? theta_prior.point_value()
                                            : theta_prior.sample(rng);
  }

  auto log_posterior_at = [&](bool gamma_axis) {
    return [&, gamma_axis](double d) -> double {
      OnlineLogSum acc;
      for (const Sample& smp : samples) {
        const double y = gamma_axis ? y_of_dg(smp.c, d, smp.theta)
                                    : y_of_dn(smp.c, d, smp.theta);
        acc.add(log_poisson_likelihood(w, u, y));
      }
      return acc.value() - std::log(static_cast<double>(samples.size()));
    };
  };

  auto make = [&](double dmax, bool gamma_axis) {
    std::vector<double> g = linspace(0.0, dmax, grid.n_points);
    auto logp = log_posterior_at(gamma_axis);
    std::vector<double> logval(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) logval[i] = logp(g[i]);
    bool any = false;
    for (double v : logval)
      if (std::isfinite(v)) any = true;
    if (!any)
      throw NumericError("degenerate priors: every Monte Carlo sample is infeasible");
    return assemble_posterior(std::move(g), logval, logp, DoseMethod::FullBayesian);
  };
  return {make(dg_max, true), make(dn_max, false)};
}

std::vector<DosePosterior> generalized_bayesian(const CurveModel& multi,
                                                const Casework& casework,
                                                const std::vector<ThetaPrior>& theta_priors,
                                                const std::vector<ParamPrior>& param_priors,
                                                const McSpec& mc, const DoseGridSpec& grid) {
  if (multi.kind() != CurveKind::MultiRadiationPolynomial)
    throw ValidationError("generalized estimation requires a multi_polynomial curve");
  const std::size_t r = multi.radiation_count();
  if (r < 2) throw ValidationError("generalized estimation needs R >= 2 radiation types");
  if (theta_priors.size() != r)
    throw ValidationError("need one theta prior per radiation type");
  if (param_priors.size() != multi.params().size() + 1)
    throw ValidationError("need one parameter prior per curve parameter plus Y0");
  casework.validate();
  if (mc.n_samples < 10000)
    throw ValidationError("generalized bayesian estimation needs n_samples >= 10000");
  const double w = casework.cells, u = casework.aberrations, y_f = casework.y_f;
  const auto& degrees = multi.degrees();

  // radiation types pinned to theta = 0 contribute a spike at zero dose and
  // are excluded from the simplex sampling
  std::vector<bool> active(r, true);
  for (std::size_t i = 0; i < r; ++i)
    if (theta_priors[i].is_point_mass() && theta_priors[i].point_value() == 0.0)
      active[i] = false;

  struct Sample {
    std::vector<double> theta;   // length R, renormalized onto the simplex
    std::vector<double> params;  // curve params flat
    double y0;
  };
  std::vector<Sample> samples;
  samples.reserve(mc.n_samples);
  std::uint64_t proposals = 0;
  std::uint64_t stream = 0;
  while (samples.size() < mc.n_samples) {
    CounterRng rng = CounterRng::substream(mc.seed, stream++);
    ++proposals;
    if (proposals > 10000 && samples.size() * 100 < proposals)
      throw NumericError("theta simplex rejection rate exceeds 99%: priors are "
                         "inconsistent with sum(theta) = 1");
    std::vector<double> theta(r, 0.0);
    double sum = 0.0;
    for (std::size_t i = 0; i < r; ++i) {
      if (!active[i]) continue;
      theta[i] = theta_priors[i].is_point_mass() ? theta_priors[i].point_value()
                                                 : theta_priors[i].sample(rng);
      sum += theta[i];
    }
    if (std::abs(sum - 1.0) >= 0.01) continue;
    for (std::size_t i = 0; i < r; ++i) theta[i] /= sum;  // exact renormalization
    Sample smp;
    smp.theta = std::move(theta);
    smp.params.resize(multi.params().size());
    for (std::size_t j = 0; j < smp.params.size(); ++j)
      smp.params[j] = param_priors[j].sample(rng);
    smp.y0 = param_priors.back().sample(rng);
    samples.push_back(std::move(smp));
  }

  // y_f(D_i) of Eq. (57): every other dose expressed through theta ratios
  auto y_general = [&](const Sample& smp, std::size_t target, double d) {
    double y = smp.y0;
    std::size_t k = 0;
    for (std::size_t i = 0; i < r; ++i) {
      const double ratio = i == target
                               ? 1.0
                               : (smp.theta[target] > 0.0
                                      ? smp.theta[i] / smp.theta[target]
                                      : 0.0);
      const double di = ratio * d;
      double p = di;
      for (std::size_t j = 0; j < degrees[i]; ++j) {
        y += smp.params[k++] * p;
        p *= di;
      }
    }
    return y;
  };

  // default grid per radiation from the prior-mean polynomial section
  auto grid_max_for = [&](std::size_t i) {
    if (grid.d_max > 0.0) return grid.d_max;
    std::size_t k = 0;
    for (std::size_t q = 0; q < i; ++q) k += degrees[q];
    std::vector<double> mean_coeffs(degrees[i]);
    for (std::size_t j = 0; j < degrees[i]; ++j) mean_coeffs[j] = param_priors[k + j].mean();
    const double y0_mean = param_priors.back().mean();
    const double target = 3.0 * y_f;
    return solve_section_dose(
        [&](double d) {
          double y = y0_mean, p = d;
          for (std::size_t j = 0; j < degrees[i]; ++j) {
            y += mean_coeffs[j] * p;
            p *= d;
          }
          return y;
        },
        target);
  };

  std::vector<DosePosterior> out;
  for (std::size_t i = 0; i < r; ++i) {
    if (!active[i]) {
      std::vector<double> g = linspace(0.0, grid_max_for(i), grid.n_points);
      out.push_back(point_mass_spike(std::move(g), 0.0, DoseMethod::GeneralizedBayesian));
      continue;
    }
    auto logp = [&, i](double d) -> double {
      OnlineLogSum acc;
      for (const Sample& smp : samples)
        acc.add(log_poisson_likelihood(w, u, y_general(smp, i, d)));
      return acc.value() - std::log(static_cast<double>(samples.size()));
    };
    std::vector<double> g = linspace(0.0, grid_max_for(i), grid.n_points);
    std::vector<double> logval(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) logval[j] = logp(g[j]);
    out.push_back(
        assemble_posterior(std::move(g), logval, logp, DoseMethod::GeneralizedBayesian));
  }
  return out;
}

}  // namespace biodose
