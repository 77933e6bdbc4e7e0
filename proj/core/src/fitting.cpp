#include "biodose/fitting.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "biodose/accum.hpp"
#include "biodose/numerics.hpp"
#include "biodose/weights.hpp"

namespace biodose {
namespace {

constexpr double kSqrt2Pi = 2.5066282746310005024;

std::vector<double> point_dose(const DataPoint& p, const CurveModel& model) {
  if (model.dose_arity() == 2) return {p.dn, p.dg};
  if (model.dose_arity() == 1) return {p.scalar_dose()};
  throw ValidationError("fitting supports curves with dose arity 1 or 2 only");
}

/// Mapping between the engine's free-parameter vector and the model.
/// Layout: [model params..., Y0 if free].
struct FreeMap {
  bool y0_free;
  std::size_t n_model;

  std::size_t size() const { return n_model + (y0_free ? 1 : 0); }

  std::vector<double> pack(const CurveModel& m) const {
    std::vector<double> v(m.params().begin(), m.params().end());
    if (y0_free) v.push_back(m.y0());
    return v;
  }

  CurveModel unpack(const CurveModel& proto, std::span<const double> v) const {
    const std::span<const double> params(v.data(), n_model);
    const double y0 = y0_free ? v[n_model] : proto.y0();
    return proto.with_params_and_y0(params, y0);
  }

  /// dY/d(free j) at a point; Y0 is the model's last parameter index.
  double basis(const CurveModel& m, std::span<const double> dose, std::size_t j) const {
    return m.param_derivative(dose, j);  // j == n_model addresses Y0
  }
};

FreeMap make_free_map(const CurveModel& proto, bool fix_y0) {
  return FreeMap{!fix_y0, proto.params().size()};
}

double residual_at(const CurveModel& m, const DataPoint& p) {
  const auto dose = point_dose(p, m);
  return m.evaluate(std::span(dose)) - p.e;
}

/// Weighted linear solve of the frozen-weight normal equations for
/// linear-in-parameter kinds. Throws SingularMatrixError on rank deficiency.
std::vector<double> weighted_linear_solve(const std::vector<DataPoint>& data,
                                          const CurveModel& proto, const FreeMap& fm,
                                          const std::vector<double>& weights) {
  const std::size_t p = fm.size();
  Eigen::MatrixXd a(p, p);
  Eigen::VectorXd b(p);
  std::vector<KahanSum> asum(p * p);
  std::vector<KahanSum> bsum(p);
  const double offset = fm.y0_free ? 0.0 : proto.y0();
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto dose = point_dose(data[i], proto);
    const double w = weights[i];
    std::vector<double> phi(p);
    for (std::size_t j = 0; j < p; ++j) phi[j] = fm.basis(proto, std::span(dose), j);
    const double target = data[i].e - offset;
    for (std::size_t j = 0; j < p; ++j) {
      bsum[j].add(w * phi[j] * target);
      for (std::size_t k = 0; k < p; ++k) asum[j * p + k].add(w * phi[j] * phi[k]);
    }
  }
  for (std::size_t j = 0; j < p; ++j) {
    b(static_cast<Eigen::Index>(j)) = bsum[j].value();
    for (std::size_t k = 0; k < p; ++k)
      a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = asum[j * p + k].value();
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  qr.setThreshold(1e-12);
  if (qr.rank() < static_cast<Eigen::Index>(p)) {
    const double cond = std::abs(qr.maxPivot()) /
                        std::max(std::numeric_limits<double>::min(),
                                 std::abs(qr.matrixR()
                                              .diagonal()
                                              .cwiseAbs()
                                              .minCoeff()));
    throw SingularMatrixError("rank-deficient design: the normal equations are singular", cond);
  }
  Eigen::VectorXd x = qr.solve(b);
  return std::vector<double>(x.data(), x.data() + p);
}

double det4(const double m[4][4]) {
  double det = 0.0;
  for (int c = 0; c < 4; ++c) {
    double sub[3][3];
    for (int r = 1; r < 4; ++r) {
      int cc = 0;
      for (int k = 0; k < 4; ++k) {
        if (k == c) continue;
        sub[r - 1][cc++] = m[r][k];
      }
    }
    const double minor = sub[0][0] * (sub[1][1] * sub[2][2] - sub[1][2] * sub[2][1]) -
                         sub[0][1] * (sub[1][0] * sub[2][2] - sub[1][2] * sub[2][0]) +
                         sub[0][2] * (sub[1][0] * sub[2][1] - sub[1][1] * sub[2][0]);
    det += (c % 2 == 0 ? 1.0 : -1.0) * m[0][c] * minor;
  }
  return det;
}

/// Damped Newton on the frozen-weight stationarity equations
/// F_j(lambda) = sum_i g_i R_i dY_i/dlambda_j = 0 (nonlinear kinds).
std::vector<double> frozen_weight_newton(const std::vector<DataPoint>& data,
                                         const CurveModel& proto, const FreeMap& fm,
                                         const std::vector<double>& weights,
                                         std::vector<double> x, double tol) {
  const std::size_t p = fm.size();
  auto eval_f = [&](const std::vector<double>& v) {
    const CurveModel m = fm.unpack(proto, std::span(v));
    std::vector<KahanSum> f(p);
    for (const auto& pt : data) {
      const auto dose = point_dose(pt, m);
      const double r = m.evaluate(std::span(dose)) - pt.e;
      const double w = weights[&pt - data.data()];
      for (std::size_t j = 0; j < p; ++j)
        f[j].add(w * r * fm.basis(m, std::span(dose), j));
    }
    std::vector<double> out(p);
    for (std::size_t j = 0; j < p; ++j) out[j] = f[j].value();
    return out;
  };
  auto norm2 = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
  };

  std::vector<double> f = eval_f(x);
  for (int it = 0; it < 60; ++it) {
    if (norm2(f) < tol) break;
    Eigen::MatrixXd jac(p, p);
    for (std::size_t j = 0; j < p; ++j) {
      const double h = 1e-7 * std::max(1.0, std::abs(x[j]));
      auto xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      const auto fp = eval_f(xp), fmv = eval_f(xm);
      for (std::size_t k = 0; k < p; ++k)
        jac(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) =
            (fp[k] - fmv[k]) / (2.0 * h);
    }
    Eigen::Map<const Eigen::VectorXd> fv(f.data(), static_cast<Eigen::Index>(p));
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
    if (!lu.isInvertible())
      throw SingularMatrixError("singular Jacobian in the frozen-weight Newton solve", 0.0);
    Eigen::VectorXd step = lu.solve(-fv);
    double scale = 1.0;
    const double f0 = norm2(f);
    for (int half = 0; half < 40; ++half) {
      std::vector<double> xn(p);
      for (std::size_t j = 0; j < p; ++j) xn[j] = x[j] + scale * step(static_cast<Eigen::Index>(j));
      auto fn = eval_f(xn);
      if (norm2(fn) < f0 || scale < 1e-10) {
        x = std::move(xn);
        f = std::move(fn);
        break;
      }
      scale *= 0.5;
    }
  }
  return x;
}

/// Heuristic starting parameters for the nonlinear kinds (saturation
/// transforms, then refined by Gauss-Newton).
std::vector<double> initial_guess(const std::vector<DataPoint>& data, const CurveModel& proto) {
  for (double v : proto.params())
    if (v != 0.0) return proto.params();  // caller-supplied start
  const double y0 = proto.y0();
  const double delta = proto.ymax() - y0;
  std::vector<double> d, z;
  for (const auto& pt : data) {
    const double dd = pt.scalar_dose();
    if (dd <= 0.0) continue;
    const double frac = (pt.e - y0) / delta;
    if (frac <= 0.0 || frac >= 0.999) continue;
    d.push_back(dd);
    z.push_back(-std::log1p(-frac));
  }
  auto slope_through_origin = [&]() {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      num += z[i] * d[i];
      den += d[i] * d[i];
    }
    return den > 0.0 ? num / den : 0.1;
  };
  switch (proto.kind()) {
    case CurveKind::SaturatedLinear:
    case CurveKind::CriticalLinear:
      return {std::max(1e-6, slope_through_origin())};
    case CurveKind::SaturatedSigmoid:
    case CurveKind::CriticalQuadratic: {
      double s11 = 0, s12 = 0, s22 = 0, b1 = 0, b2 = 0;
      for (std::size_t i = 0; i < d.size(); ++i) {
        s11 += d[i] * d[i];
        s12 += d[i] * d[i] * d[i];
        s22 += d[i] * d[i] * d[i] * d[i];
        b1 += z[i] * d[i];
        b2 += z[i] * d[i] * d[i];
      }
      const double det = s11 * s22 - s12 * s12;
      if (std::abs(det) < 1e-30) return {0.1, 0.01};
      return {(b1 * s22 - b2 * s12) / det, (s11 * b2 - s12 * b1) / det};
    }
    case CurveKind::AvramiSigmoid: {
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      std::size_t n = 0;
      for (std::size_t i = 0; i < d.size(); ++i) {
        if (z[i] <= 0.0) continue;
        const double lx = std::log(d[i]), ly = std::log(z[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
      }
      if (n < 2) return {0.1, 1.0};
      const double det = n * sxx - sx * sx;
      if (std::abs(det) < 1e-30) return {0.1, 1.0};
      const double slope = (n * sxy - sx * sy) / det;
      const double icept = (sy - slope * sx) / n;
      return {std::exp(icept), std::max(0.1, slope)};
    }
    default:
      return std::vector<double>(proto.params().size(), 0.1);
  }
}

double chi_square(const std::vector<DataPoint>& data, const CurveModel& m,
                  const std::vector<double>& weights) {
  KahanSum s;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double r = residual_at(m, data[i]);
    s.add(weights[i] * r * r);
  }
  return s.value();
}

/// Gauss-Newton minimiser of the weighted chi-square for nonlinear kinds.
std::vector<double> gauss_newton(const std::vector<DataPoint>& data, const CurveModel& proto,
                                 const FreeMap& fm, const std::vector<double>& weights,
                                 std::vector<double> x, const FitOptions& opt, int& iters,
                                 bool& converged) {
  const std::size_t p = fm.size();
  converged = false;
  for (iters = 1; iters <= opt.max_iter; ++iters) {
    const CurveModel m = fm.unpack(proto, std::span(x));
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p, p);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(p);
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto dose = point_dose(data[i], m);
      const double r = m.evaluate(std::span(dose)) - data[i].e;
      for (std::size_t j = 0; j < p; ++j) {
        const double pj = fm.basis(m, std::span(dose), j);
        b(static_cast<Eigen::Index>(j)) -= weights[i] * r * pj;
        for (std::size_t k = 0; k < p; ++k)
          a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) +=
              weights[i] * pj * fm.basis(m, std::span(dose), k);
      }
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    if (qr.rank() < static_cast<Eigen::Index>(p))
      throw SingularMatrixError("rank-deficient design in Gauss-Newton step", 0.0);
    Eigen::VectorXd step = qr.solve(b);
    const double chi0 = chi_square(data, m, weights);
    double scale = 1.0;
    std::vector<double> xn(p);
    for (int half = 0; half < 40; ++half) {
      for (std::size_t j = 0; j < p; ++j) xn[j] = x[j] + scale * step(static_cast<Eigen::Index>(j));
      if (chi_square(data, fm.unpack(proto, std::span(xn)), weights) <= chi0 || scale < 1e-12)
        break;
      scale *= 0.5;
    }
    double rel = 0.0;
    for (std::size_t j = 0; j < p; ++j)
      rel = std::max(rel, std::abs(xn[j] - x[j]) / std::max(1e-12, std::abs(xn[j])));
    x = xn;
    if (rel < opt.tol) {
      converged = true;
      break;
    }
  }
  return x;
}

std::vector<double> gaussian_weights(const std::vector<DataPoint>& data) {
  std::vector<double> w(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) w[i] = 1.0 / (data[i].sigma0 * data[i].sigma0);
  return w;
}

void fill_sigmas(const std::vector<DataPoint>& data, FitResult& result) {
  result.sigmas.assign(result.model.params().size() + 1, 0.0);
  if (!result.converged) return;
  try {
    result.sigmas = uncertainties_hessian(data, result);
  } catch (const NumericError&) {
    try {
      result.sigmas = uncertainties_cramer_rao(data, result);
    } catch (const NumericError&) {
      result.sigmas.assign(result.model.params().size() + 1, 0.0);
    }
  }
}

void require_enough_points(const std::vector<DataPoint>& data, std::size_t free_params) {
  if (data.size() < free_params)
    throw ValidationError("need at least " + std::to_string(free_params) +
                          " points for " + std::to_string(free_params) + " free parameters");
}

}  // namespace

std::string to_string(FitEngine engine) {
  switch (engine) {
    case FitEngine::LeastSquares: return "ls";
    case FitEngine::PoissonMle: return "poisson";
    case FitEngine::RobustBayesian: return "robust";
    case FitEngine::Mixture: return "mixture";
  }
  throw ValidationError("unknown fit engine");
}

FitEngine fit_engine_from_string(const std::string& name) {
  if (name == "ls" || name == "least_squares") return FitEngine::LeastSquares;
  if (name == "poisson") return FitEngine::PoissonMle;
  if (name == "robust") return FitEngine::RobustBayesian;
  if (name == "mixture") return FitEngine::Mixture;
  throw ValidationError("unknown fit engine: " + name);
}

double fit_objective(const std::vector<DataPoint>& data, const CurveModel& model,
                     FitEngine engine, double phi) {
  KahanSum s;
  switch (engine) {
    case FitEngine::LeastSquares:
      for (const auto& p : data) {
        const double r = residual_at(model, p);
        s.add(-std::log(p.sigma0 * kSqrt2Pi) - 0.5 * r * r / (p.sigma0 * p.sigma0));
      }
      return s.value();
    case FitEngine::RobustBayesian:
      for (const auto& p : data) s.add(log_point_marginal(residual_at(model, p), p.sigma0));
      return s.value();
    case FitEngine::Mixture:
      for (const auto& p : data)
        s.add(log_mixture_marginal(residual_at(model, p), p.sigma0, phi));
      return s.value();
    case FitEngine::PoissonMle: {
      const double alpha = model.params().at(0);
      for (const auto& p : data) {
        const double w = p.cells.value();
        const double u = p.aberrations.value();
        const double mu = w * alpha * p.scalar_dose();
        if (u > 0.0) {
          if (mu <= 0.0) return -std::numeric_limits<double>::infinity();
          s.add(u * std::log(mu) - mu - std::lgamma(u + 1.0));
        } else {
          s.add(-mu);
        }
      }
      return s.value();
    }
  }
  throw ValidationError("unknown fit engine");
}

CramerSolution combined_mixed_cramer(const std::vector<DataPoint>& data,
                                     const std::vector<double>& weights) {
  // basis [1, Dn, Dg, Dg^2] -> parameters {Y0, alpha, beta, gamma}
  KahanSum a[4][4], rhs[4];
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double g = weights[i];
    const double phi[4] = {1.0, data[i].dn, data[i].dg, data[i].dg * data[i].dg};
    for (int r = 0; r < 4; ++r) {
      rhs[r].add(g * phi[r] * data[i].e);
      for (int c = 0; c < 4; ++c) a[r][c].add(g * phi[r] * phi[c]);
    }
  }
  double m0[4][4], b[4];
  double hadamard = 1.0;
  for (int r = 0; r < 4; ++r) {
    b[r] = rhs[r].value();
    double rownorm = 0.0;
    for (int c = 0; c < 4; ++c) {
      m0[r][c] = a[r][c].value();
      rownorm += m0[r][c] * m0[r][c];
    }
    hadamard *= std::sqrt(rownorm);
  }
  CramerSolution sol{};
  sol.det_w0 = det4(m0);
  if (std::abs(sol.det_w0) <= 1e-14 * hadamard)
    throw SingularMatrixError("W0 = 0: degenerate design for the combined mixed curve",
                              hadamard / std::max(std::abs(sol.det_w0),
                                                  std::numeric_limits<double>::min()));
  double mk[4][4];
  for (int k = 0; k < 4; ++k) {
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) mk[r][c] = c == k ? b[r] : m0[r][c];
    sol.det_wk[static_cast<std::size_t>(k)] = det4(mk);
  }
  sol.y0 = sol.det_wk[0] / sol.det_w0;
  sol.alpha = sol.det_wk[1] / sol.det_w0;
  sol.beta = sol.det_wk[2] / sol.det_w0;
  sol.gamma = sol.det_wk[3] / sol.det_w0;
  return sol;
}

std::array<double, 4> combined_mixed_normal_solve(const std::vector<DataPoint>& data,
                                                  const std::vector<double>& weights) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4, 4);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(4);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double g = weights[i];
    Eigen::Vector4d phi(1.0, data[i].dn, data[i].dg, data[i].dg * data[i].dg);
    a += g * phi * phi.transpose();
    b += g * phi * data[i].e;
  }
  Eigen::ColPivHouseholderQR<Eigen::Matrix4d> qr(a);
  if (qr.rank() < 4)
    throw SingularMatrixError("degenerate design for the combined mixed curve", 0.0);
  Eigen::Vector4d x = qr.solve(b);
  return {x(0), x(1), x(2), x(3)};
}

FitResult fit_least_squares(const std::vector<DataPoint>& data, const CurveModel& prototype,
                            const FitOptions& options) {
  validate_points(data);
  const FreeMap fm = make_free_map(prototype, options.fix_y0);
  require_enough_points(data, fm.size());

  FitResult result{prototype};
  result.engine = FitEngine::LeastSquares;
  result.y0_free = fm.y0_free;

  std::vector<double> w = gaussian_weights(data);
  if (prototype.linear_in_params()) {
    std::vector<double> x = weighted_linear_solve(data, prototype, fm, w);
    result.iterations = 1;
    if (options.sigma_x > 0.0) {
      // effective-variance reweighting with the horizontal term
      for (int it = 0; it < options.max_iter; ++it) {
        const CurveModel m = fm.unpack(prototype, std::span(x));
        for (std::size_t i = 0; i < data.size(); ++i) {
          const auto dose = point_dose(data[i], m);
          double slope2 = 0.0;
          for (std::size_t ax = 0; ax < m.dose_arity(); ++ax) {
            const double dd = m.dose_derivative(std::span(dose), ax);
            slope2 += dd * dd;
          }
          w[i] = 1.0 / (data[i].sigma0 * data[i].sigma0 +
                        slope2 * options.sigma_x * options.sigma_x);
        }
        auto xn = weighted_linear_solve(data, prototype, fm, w);
        double rel = 0.0;
        for (std::size_t j = 0; j < fm.size(); ++j)
          rel = std::max(rel, std::abs(xn[j] - x[j]) / std::max(1e-12, std::abs(xn[j])));
        x = xn;
        result.iterations = it + 2;
        if (rel < options.tol) break;
      }
    }
    result.model = fm.unpack(prototype, std::span(x));
    result.converged = true;
  } else {
    auto x0 = initial_guess(data, prototype);
    std::vector<double> x(x0.begin(), x0.end());
    if (fm.y0_free) x.push_back(prototype.y0());
    x = gauss_newton(data, prototype, fm, w, std::move(x), options, result.iterations,
                     result.converged);
    result.model = fm.unpack(prototype, std::span(x));
  }
  result.weights = w;
  result.log_posterior = fit_objective(data, result.model, FitEngine::LeastSquares);
  fill_sigmas(data, result);
  return result;
}

FitResult fit_poisson_mle(const std::vector<DataPoint>& data) {
  validate_points(data);
  if (data.empty()) throw ValidationError("poisson fit needs at least one point");
  KahanSum su, swd;
  for (const auto& p : data) {
    if (!p.cells || !p.aberrations)
      throw ValidationError("poisson fit requires cells and aberrations on every point");
    if (!(p.scalar_dose() > 0.0))
      throw ValidationError("poisson fit requires a positive dose on every point");
    su.add(*p.aberrations);
    swd.add(*p.cells * p.scalar_dose());
  }
  const double exposure = swd.value();
  if (!(exposure > 0.0)) throw NumericError("sum of cells*dose is zero");
  const double total_u = su.value();
  const double alpha = total_u / exposure;

  FitResult result{CurveModel::linear_neutron(alpha, 0.0)};
  result.engine = FitEngine::PoissonMle;
  result.y0_free = false;
  result.converged = true;
  result.iterations = 1;
  result.log_posterior = fit_objective(data, result.model, FitEngine::PoissonMle);
  result.weights.resize(data.size());
  for (std::size_t i = 0; i < data.size(); ++i)
    result.weights[i] = *data[i].cells * data[i].scalar_dose();
  const double sigma_alpha = total_u > 0.0
                                 ? alpha / std::sqrt(total_u)
                                 : std::numeric_limits<double>::infinity();
  result.sigmas = {sigma_alpha, 0.0};
  return result;
}

namespace {

FitResult reweighted_fit(const std::vector<DataPoint>& data, const CurveModel& prototype,
                         const FitOptions& options, FitEngine engine, double phi) {
  validate_points(data);
  if (engine == FitEngine::Mixture && !(phi >= 0.0 && phi <= 1.0))
    throw ValidationError("phi must lie in [0,1]");
  const FreeMap fm = make_free_map(prototype, options.fix_y0);
  require_enough_points(data, fm.size());
  if (!(options.tol > 0.0)) throw ValidationError("options.tol must be > 0");

  // start from the least-squares solution
  FitOptions ls_options = options;
  ls_options.sigma_x = 0.0;
  FitResult seed = fit_least_squares(data, prototype, ls_options);
  std::vector<double> x = fm.pack(seed.model);

  FitResult result{seed.model};
  result.engine = engine;
  result.phi = phi;
  result.y0_free = fm.y0_free;

  std::vector<double> w(data.size());
  auto compute_weights = [&](const CurveModel& m) {
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double r = residual_at(m, data[i]);
      w[i] = engine == FitEngine::Mixture ? mixture_weight(r, data[i].sigma0, phi)
                                          : robust_weight(r, data[i].sigma0);
    }
  };

  const bool combined_cramer =
      prototype.kind() == CurveKind::CombinedMixed && fm.y0_free;
  bool converged = false;
  int it = 0;
  for (it = 1; it <= options.max_iter; ++it) {
    const CurveModel current = fm.unpack(prototype, std::span(x));
    compute_weights(current);
    std::vector<double> xn;
    if (combined_cramer) {
      // the paper's determinant-ratio route for the 4x4 system
      const CramerSolution sol = combined_mixed_cramer(data, w);
      xn = {sol.alpha, sol.beta, sol.gamma, sol.y0};
    } else if (prototype.linear_in_params()) {
      xn = weighted_linear_solve(data, prototype, fm, w);
    } else {
      xn = frozen_weight_newton(data, prototype, fm, w, x, options.tol * 1e-2);
    }
    double rel = 0.0;
    for (std::size_t j = 0; j < fm.size(); ++j)
      rel = std::max(rel, std::abs(xn[j] - x[j]) / std::max(1e-12, std::abs(xn[j])));
    x = std::move(xn);
    if (rel < options.tol) {
      converged = true;
      break;
    }
  }
  result.iterations = std::min(it, options.max_iter);
  result.converged = converged;
  result.model = fm.unpack(prototype, std::span(x));
  compute_weights(result.model);
  result.weights = w;
  result.log_posterior = fit_objective(data, result.model, engine, phi);
  fill_sigmas(data, result);
  return result;
}

}  // namespace

FitResult fit_robust_bayesian(const std::vector<DataPoint>& data, const CurveModel& prototype,
                              const FitOptions& options) {
  return reweighted_fit(data, prototype, options, FitEngine::RobustBayesian, 1.0);
}

FitResult fit_mixture(const std::vector<DataPoint>& data, const CurveModel& prototype,
                      double phi, const FitOptions& options) {
  return reweighted_fit(data, prototype, options, FitEngine::Mixture, phi);
}

std::vector<double> uncertainties_hessian(const std::vector<DataPoint>& data,
                                          const FitResult& result) {
  if (!result.converged) throw ValidationError("uncertainties require a converged fit");
  const FreeMap fm{result.y0_free, result.model.params().size()};
  const std::size_t p = fm.size();
  std::vector<double> x = fm.pack(result.model);
  auto s_of = [&](const std::vector<double>& v) {
    return fit_objective(data, fm.unpack(result.model, std::span(v)), result.engine, result.phi);
  };

  Eigen::MatrixXd h(p, p);
  const double eps4 = 1.2e-4;  // ~ eps^(1/4)
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i; j < p; ++j) {
      const double hi = eps4 * std::max(1.0, std::abs(x[i]));
      const double hj = eps4 * std::max(1.0, std::abs(x[j]));
      auto v = x;
      double val;
      if (i == j) {
        const double s0 = s_of(x);
        v[i] = x[i] + hi;
        const double sp = s_of(v);
        v[i] = x[i] - hi;
        const double sm = s_of(v);
        val = (sp - 2.0 * s0 + sm) / (hi * hi);
      } else {
        v[i] = x[i] + hi;
        v[j] = x[j] + hj;
        const double spp = s_of(v);
        v[j] = x[j] - hj;
        const double spm = s_of(v);
        v[i] = x[i] - hi;
        const double smm = s_of(v);
        v[j] = x[j] + hj;
        const double smp = s_of(v);
        val = (spp - spm - smp + smm) / (4.0 * hi * hj);
      }
      h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = val;
      h(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = val;
    }
  }
  Eigen::MatrixXd neg = -h;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(neg);
  const double cond = lu.rcond() > 0 ? 1.0 / lu.rcond() : std::numeric_limits<double>::infinity();
  if (!lu.isInvertible())
    throw SingularMatrixError("singular Hessian at the reported optimum", cond);
  Eigen::MatrixXd cov = lu.inverse();
  std::vector<double> out(result.model.params().size() + 1, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    const double v = cov(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j));
    if (!(v > 0.0))
      throw SingularMatrixError("Hessian is not negative definite at the reported optimum", cond);
    const std::size_t slot = (fm.y0_free && j == p - 1) ? out.size() - 1 : j;
    out[slot] = std::sqrt(v);
  }
  return out;
}

std::vector<double> uncertainties_cramer_rao(const std::vector<DataPoint>& data,
                                             const FitResult& result) {
  if (!result.converged) throw ValidationError("uncertainties require a converged fit");
  const FreeMap fm{result.y0_free, result.model.params().size()};
  const std::size_t p = fm.size();
  const CurveModel& m = result.model;
  std::vector<double> omega(p, 0.0);

  switch (result.engine) {
    case FitEngine::RobustBayesian: {
      for (std::size_t j = 0; j < p; ++j) {
        KahanSum s;
        for (const auto& pt : data) {
          const auto dose = point_dose(pt, m);
          const double r = m.evaluate(std::span(dose)) - pt.e;
          const double dy = fm.basis(m, std::span(dose), j);
          const double xi = curvature_xi(r, pt.sigma0);
          const double g = robust_weight(r, pt.sigma0);
          s.add(-(xi * r * r - g) * dy * dy);
        }
        omega[j] = s.value();
      }
      break;
    }
    case FitEngine::LeastSquares: {
      for (std::size_t j = 0; j < p; ++j) {
        KahanSum s;
        for (const auto& pt : data) {
          const auto dose = point_dose(pt, m);
          const double dy = fm.basis(m, std::span(dose), j);
          s.add(dy * dy / (pt.sigma0 * pt.sigma0));
        }
        omega[j] = s.value();
      }
      break;
    }
    case FitEngine::PoissonMle: {
      KahanSum su;
      for (const auto& pt : data) su.add(pt.aberrations.value_or(0.0));
      const double alpha = m.params().at(0);
      omega[0] = alpha > 0.0 ? su.value() / (alpha * alpha) : 0.0;
      break;
    }
    case FitEngine::Mixture: {
      // diagonal curvature of the mixture log-posterior by central differences
      std::vector<double> x = fm.pack(m);
      for (std::size_t j = 0; j < p; ++j) {
        const double h = 1.2e-4 * std::max(1.0, std::abs(x[j]));
        auto v = x;
        const double s0 = fit_objective(data, m, result.engine, result.phi);
        v[j] = x[j] + h;
        const double sp =
            fit_objective(data, fm.unpack(m, std::span(v)), result.engine, result.phi);
        v[j] = x[j] - h;
        const double sm =
            fit_objective(data, fm.unpack(m, std::span(v)), result.engine, result.phi);
        omega[j] = -(sp - 2.0 * s0 + sm) / (h * h);
      }
      break;
    }
  }

  std::vector<double> out(m.params().size() + 1, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    if (!(omega[j] > 0.0))
      throw NumericError("omega_" + std::to_string(j) +
                         " <= 0: invalid curvature at the reported optimum");
    const std::size_t slot = (fm.y0_free && j == p - 1) ? out.size() - 1 : j;
    out[slot] = 1.0 / std::sqrt(omega[j]);
  }
  return out;
}

}  // namespace biodose
