#include "biodose/selection.hpp"

#include <cmath>

#include "biodose/accum.hpp"
#include "biodose/weights.hpp"

namespace biodose {
namespace {

constexpr double kSqrt2Pi = 2.5066282746310005024;

std::vector<double> point_dose(const DataPoint& p, const CurveModel& model) {
  if (model.dose_arity() == 2) return {p.dn, p.dg};
  return {p.scalar_dose()};
}

double bracket_sum(const std::vector<DataPoint>& data, const CurveModel& model) {
  KahanSum s;
  for (const auto& p : data) {
    const auto dose = point_dose(p, model);
    s.add(evidence_bracket(model.evaluate(std::span(dose)) - p.e, p.sigma0));
  }
  return s.value();
}

std::size_t free_param_count(const FitResult& fit) {
  return fit.model.params().size() + (fit.y0_free ? 1 : 0);
}

/// Free-parameter value by slot ([params..., y0]).
double free_value(const FitResult& fit, std::size_t j) {
  return j < fit.model.params().size() ? fit.model.params()[j] : fit.model.y0();
}

CurveModel shifted_model(const CurveModel& m, std::size_t j, double value) {
  if (j < m.params().size()) {
    std::vector<double> p = m.params();
    p[j] = value;
    return m.with_params(std::span(p));
  }
  return m.with_params_and_y0(std::span(m.params()), value);
}

}  // namespace

ModelEvidence evidence(const std::vector<DataPoint>& data, const FitResult& fit,
                       const std::optional<std::vector<ParamRange>>& ranges, double k) {
  if (!fit.converged) throw ValidationError("evidence requires a converged fit");
  validate_points(data);

  ModelEvidence ev{fit.model};
  ev.n_params = free_param_count(fit);
  ev.reliability = bracket_sum(data, fit.model);
  ev.ockham = 1.0;
  if (ev.n_params == 0) {
    ev.reliability *= ev.ockham;
    return ev;
  }

  std::vector<ParamRange> r;
  if (ranges) {
    r = *ranges;
    if (r.size() != ev.n_params)
      throw ValidationError("ranges size must match the number of free parameters");
  } else {
    // non-arbitrary rule: lambda_hat +- k * sigma_chi with sigma_chi from a
    // Gaussian least-squares fit of the same curve kind
    FitOptions opt;
    opt.fix_y0 = !fit.y0_free;
    const FitResult ls = fit_least_squares(data, fit.model, opt);
    for (std::size_t j = 0; j < ev.n_params; ++j) {
      const std::size_t slot =
          (fit.y0_free && j == ev.n_params - 1) ? ls.sigmas.size() - 1 : j;
      const double sigma_chi = ls.sigmas[slot];
      if (!(sigma_chi > 0.0))
        throw NumericError("least-squares sigma unavailable for the k-sigma range rule");
      const double center = free_value(fit, j);
      r.emplace_back(center - k * sigma_chi, center + k * sigma_chi);
    }
  }

  for (std::size_t j = 0; j < ev.n_params; ++j) {
    const double width = r[j].second - r[j].first;
    if (!(width > 0.0)) throw ValidationError("zero-width parameter range");
    const double center = free_value(fit, j);
    if (!(r[j].first < center && center < r[j].second))
      throw ValidationError("fitted parameter lies outside its range");
    const std::size_t slot =
        (fit.y0_free && j == ev.n_params - 1) ? fit.sigmas.size() - 1 : j;
    const double sigma_lambda = fit.sigmas[slot];
    if (!(sigma_lambda > 0.0))
      throw NumericError("fit carries no usable sigma for the Ockham factor");
    ev.ockham *= sigma_lambda * kSqrt2Pi / width;
  }
  ev.lambda_ranges = std::move(r);
  ev.reliability *= ev.ockham;
  return ev;
}

double compare_models(const ModelEvidence& a, const ModelEvidence& b) {
  if (b.reliability == 0.0) throw NumericError("cannot compare against zero reliability");
  return a.reliability / b.reliability;
}

std::vector<ParamRange> arbitrary_ranges(const std::vector<DataPoint>& data,
                                         const CurveModel& prototype,
                                         const FitOptions& options) {
  validate_points(data);
  if (data.size() <= 3)
    throw ValidationError("arbitrary ranges are under-determined for N <= 3 points");
  const FitResult fit = fit_robust_bayesian(data, prototype, options);
  if (!fit.converged) throw NumericError("robust fit did not converge");
  const std::size_t n = free_param_count(fit);

  auto count_outside = [&](const CurveModel& m) {
    int count = 0;
    for (const auto& p : data) {
      const auto dose = point_dose(p, m);
      if (std::abs(m.evaluate(std::span(dose)) - p.e) > p.sigma0) ++count;
    }
    return count;
  };

  std::vector<ParamRange> out;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t slot = (fit.y0_free && j == n - 1) ? fit.model.params().size() : j;
    const double center = free_value(fit, j);
    if (count_outside(fit.model) > 3)
      throw NumericError("more than three points lie outside the fitted curve tolerance");
    double edges[2];
    for (int side = 0; side < 2; ++side) {
      const double sign = side == 0 ? -1.0 : 1.0;
      const double cap = 1e6 * (1.0 + std::abs(center));
      double lo = 0.0;
      double hi = 1e-3 * (1.0 + std::abs(center));
      // geometric expansion to bracket the first violation
      while (count_outside(shifted_model(fit.model, slot, center + sign * hi)) <= 3) {
        lo = hi;
        hi *= 2.0;
        if (hi > cap)
          throw NumericError("parameter span is unbounded: the data never rejects the endpoint");
      }
      while (hi - lo > 1e-6 * (1.0 + hi)) {
        const double mid = 0.5 * (lo + hi);
        if (count_outside(shifted_model(fit.model, slot, center + sign * mid)) <= 3)
          lo = mid;
        else
          hi = mid;
      }
      edges[side] = center + sign * lo;
    }
    out.emplace_back(edges[0], edges[1]);
  }
  return out;
}

}  // namespace biodose
