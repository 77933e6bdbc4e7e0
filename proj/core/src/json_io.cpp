#include "biodose/json_io.hpp"

#include <cmath>

namespace biodose {
namespace {

json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

json curve_to_json(const CurveModel& model) {
  json j;
  j["kind"] = to_string(model.kind());
  j["y0"] = model.y0();
  if (model.uses_ymax()) j["ymax"] = model.ymax();
  if (model.kind() == CurveKind::Generalized) {
    json rads = json::array();
    for (const auto& rad : model.generalized_terms()) {
      json terms = json::array();
      for (const auto& t : rad) {
        json e = json::array();
        for (const auto& et : t.exp_terms) e.push_back({{"c", et.coeff}, {"m", et.power}});
        terms.push_back(
            {{"a", t.offset}, {"b", t.scale}, {"degree", t.degree}, {"exp_terms", e}});
      }
      rads.push_back(terms);
    }
    j["terms"] = rads;
    return j;
  }
  j["params"] = model.params();
  if (model.kind() == CurveKind::MultiRadiationPolynomial) {
    j["radiation_count"] = model.radiation_count();
    j["degrees"] = model.degrees();
  }
  return j;
}

CurveModel curve_from_json(const json& j) {
  const CurveKind kind = curve_kind_from_string(j.at("kind").get<std::string>());
  const double y0 = j.value("y0", kDefaultY0);
  const double ymax = j.value("ymax", 1.0);
  if (kind == CurveKind::Generalized) {
    std::vector<std::vector<GeneralizedTerm>> rads;
    for (const auto& rad : j.at("terms")) {
      std::vector<GeneralizedTerm> terms;
      for (const auto& t : rad) {
        GeneralizedTerm gt;
        gt.offset = t.at("a").get<double>();
        gt.scale = t.at("b").get<double>();
        gt.degree = t.at("degree").get<int>();
        for (const auto& e : t.at("exp_terms"))
          gt.exp_terms.push_back({e.at("c").get<double>(), e.at("m").get<double>()});
        terms.push_back(std::move(gt));
      }
      rads.push_back(std::move(terms));
    }
    return CurveModel::generalized(std::move(rads), y0, ymax);
  }
  const auto params = j.at("params").get<std::vector<double>>();
  auto need = [&](std::size_t n, const char* what) {
    if (params.size() != n)
      throw ValidationError(std::string("curve '") + j.at("kind").get<std::string>() +
                            "' needs " + what);
  };
  switch (kind) {
    case CurveKind::LinearNeutron:
      need(1, "params [alpha]");
      return CurveModel::linear_neutron(params[0], y0);
    case CurveKind::LinearQuadraticGamma:
      need(2, "params [beta, gamma]");
      return CurveModel::linear_quadratic_gamma(params[0], params[1], y0);
    case CurveKind::CombinedMixed:
      need(3, "params [alpha, beta, gamma]");
      return CurveModel::combined_mixed(params[0], params[1], params[2], y0);
    case CurveKind::SaturatedLinear:
      need(1, "params [alpha]");
      return CurveModel::saturated_linear(params[0], y0, ymax);
    case CurveKind::SaturatedSigmoid:
      need(2, "params [beta, gamma]");
      return CurveModel::saturated_sigmoid(params[0], params[1], y0, ymax);
    case CurveKind::AvramiSigmoid:
      need(2, "params [a, n]");
      return CurveModel::avrami_sigmoid(params[0], params[1], y0, ymax);
    case CurveKind::CriticalLinear:
      need(1, "params [alpha]");
      return CurveModel::critical_linear(params[0], y0, ymax);
    case CurveKind::CriticalQuadratic:
      need(2, "params [beta, gamma]");
      return CurveModel::critical_quadratic(params[0], params[1], y0, ymax);
    case CurveKind::Polynomial:
      return CurveModel::polynomial(params, y0);
    case CurveKind::MultiRadiationPolynomial: {
      const auto degrees = j.at("degrees").get<std::vector<std::size_t>>();
      std::vector<std::vector<double>> per_rad;
      std::size_t k = 0;
      for (std::size_t d : degrees) {
        if (k + d > params.size())
          throw ValidationError("multi_polynomial params shorter than its degrees");
        per_rad.emplace_back(params.begin() + static_cast<long>(k),
                             params.begin() + static_cast<long>(k + d));
        k += d;
      }
      if (k != params.size())
        throw ValidationError("multi_polynomial params longer than its degrees");
      return CurveModel::multi_polynomial(std::move(per_rad), y0);
    }
    default:
      throw ValidationError("unhandled curve kind");
  }
}

json theta_prior_to_json(const ThetaPrior& prior) {
  json j;
  if (prior.is_point_mass()) {
    j["kind"] = "point";
    j["theta"] = prior.point_value();
    return j;
  }
  switch (prior.kind()) {
    case ThetaPriorKind::GaussianTheta:
      j["kind"] = "gauss_theta";
      j["theta_hat"] = prior.theta_hat();
      j["sigma"] = prior.sigma_theta();
      break;
    case ThetaPriorKind::GaussianRhoTransformed:
      j["kind"] = "gauss_rho";
      j["rho_hat"] = prior.rho_hat();
      j["sigma_rho"] = prior.sigma_rho();
      break;
    case ThetaPriorKind::BetaUninformative:
      j["kind"] = "beta";
      break;
    case ThetaPriorKind::Uniform:
      j["kind"] = "uniform";
      j["min"] = prior.range_lo();
      j["max"] = prior.range_hi();
      break;
  }
  return j;
}

ThetaPrior theta_prior_from_json(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "gauss_theta")
    return ThetaPrior::gaussian_theta(j.at("theta_hat").get<double>(),
                                      j.at("sigma").get<double>());
  if (kind == "gauss_rho") {
    if (j.contains("theta_hat") && !j.contains("rho_hat")) {
      // convenience: theta_hat specifies the rho Gaussian's centre
      const double th = j.at("theta_hat").get<double>();
      if (!(th > 0.0 && th <= 1.0)) throw ValidationError("theta_hat must lie in (0,1]");
      return ThetaPrior::gaussian_rho(1.0 / th - 1.0, j.at("sigma_rho").get<double>());
    }
    return ThetaPrior::gaussian_rho(j.at("rho_hat").get<double>(),
                                    j.at("sigma_rho").get<double>());
  }
  if (kind == "beta") return ThetaPrior::beta_uninformative();
  if (kind == "uniform")
    return ThetaPrior::uniform(j.value("min", 0.0), j.value("max", 1.0));
  if (kind == "point") return ThetaPrior::point_mass(j.at("theta").get<double>());
  throw ValidationError("unknown theta prior kind: " + kind);
}

json param_prior_to_json(const ParamPrior& prior) {
  switch (prior.kind()) {
    case ParamPriorKind::Gamma:
      return {{"kind", "gamma"}, {"k", prior.shape()}, {"z", prior.rate()}};
    case ParamPriorKind::Gaussian:
      return {{"kind", "gauss"}, {"mean", prior.gauss_mean()}, {"sd", prior.gauss_sd()}};
    case ParamPriorKind::PointMass:
      return {{"kind", "point"}, {"value", prior.value()}};
  }
  throw ValidationError("unknown parameter prior kind");
}

ParamPrior param_prior_from_json(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "gamma")
    return ParamPrior::gamma(j.at("k").get<double>(), j.at("z").get<double>());
  if (kind == "gauss")
    return ParamPrior::gaussian(j.at("mean").get<double>(), j.at("sd").get<double>());
  if (kind == "point") return ParamPrior::point_mass(j.at("value").get<double>());
  throw ValidationError("unknown parameter prior kind: " + kind);
}

json fit_result_to_json(const FitResult& result) {
  json j;
  j["model"] = curve_to_json(result.model);
  j["engine"] = to_string(result.engine);
  if (result.engine == FitEngine::Mixture) j["phi"] = result.phi;
  j["converged"] = result.converged;
  j["iterations"] = result.iterations;
  j["log_posterior"] = finite_or_null(result.log_posterior);
  j["y0_free"] = result.y0_free;
  json sig = json::array();
  for (double s : result.sigmas) sig.push_back(finite_or_null(s));
  j["sigmas"] = sig;
  j["weights"] = result.weights;
  return j;
}

json posterior_to_json(const DosePosterior& posterior) {
  json j;
  j["method"] = to_string(posterior.method);
  j["peak"] = posterior.peak;
  j["sigma"] = finite_or_null(posterior.sigma);
  j["normalization"] = finite_or_null(posterior.normalization);
  j["peak_at_boundary"] = posterior.peak_at_boundary;
  j["n_grid"] = posterior.dose.size();
  return j;
}

json evidence_to_json(const ModelEvidence& evidence) {
  json j;
  j["kind"] = to_string(evidence.model.kind());
  j["model"] = curve_to_json(evidence.model);
  j["reliability"] = evidence.reliability;
  j["ockham"] = evidence.ockham;
  j["n_params"] = evidence.n_params;
  json ranges = json::array();
  for (const auto& [lo, hi] : evidence.lambda_ranges) ranges.push_back({lo, hi});
  j["ranges"] = ranges;
  return j;
}

json sim_result_to_json(const SimResult& result) {
  json j;
  j["mean_dn"] = result.mean_dn;
  j["mean_dg"] = result.mean_dg;
  j["sd_dn"] = result.sd_dn;
  j["sd_dg"] = result.sd_dg;
  json hist = json::object();
  for (const auto& [total, count] : result.damage_histogram)
    hist[std::to_string(total)] = count;
  j["damage_histogram"] = hist;
  j["cells"] = result.damage_table.size();
  return j;
}

json sim_config_to_json(const SimConfig& config) {
  json j;
  j["cells"] = config.cells;
  j["target_yf"] = config.target_yf;
  j["repetitions"] = config.repetitions;
  j["theta"] = theta_prior_to_json(config.theta);
  json dm;
  switch (config.dose_map.kind) {
    case DoseMap::Kind::Linear: dm["kind"] = "linear"; break;
    case DoseMap::Kind::Polynomial: dm["kind"] = "polynomial"; break;
    case DoseMap::Kind::Saturated: dm["kind"] = "saturated"; break;
  }
  dm["coeffs"] = config.dose_map.coeffs;
  j["dose_map"] = dm;
  j["curve_n"] = curve_to_json(config.curve_n);
  j["curve_g"] = curve_to_json(config.curve_g);
  j["seed"] = config.seed;
  return j;
}

SimConfig sim_config_from_json(const json& j) {
  SimConfig config;
  config.cells = j.at("cells").get<std::int64_t>();
  config.target_yf = j.at("target_yf").get<double>();
  config.repetitions = j.at("repetitions").get<int>();
  if (j.contains("theta")) config.theta = theta_prior_from_json(j.at("theta"));
  if (j.contains("dose_map")) {
    const auto& dm = j.at("dose_map");
    const auto kind = dm.at("kind").get<std::string>();
    if (kind == "linear") config.dose_map.kind = DoseMap::Kind::Linear;
    else if (kind == "polynomial") config.dose_map.kind = DoseMap::Kind::Polynomial;
    else if (kind == "saturated") config.dose_map.kind = DoseMap::Kind::Saturated;
    else throw ValidationError("unknown dose map kind: " + kind);
    if (dm.contains("coeffs")) config.dose_map.coeffs = dm.at("coeffs").get<std::vector<double>>();
    else if (dm.contains("const")) config.dose_map.coeffs = {dm.at("const").get<double>()};
  }
  if (j.contains("curve_n")) config.curve_n = curve_from_json(j.at("curve_n"));
  if (j.contains("curve_g")) config.curve_g = curve_from_json(j.at("curve_g"));
  if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("damage_ceiling"))
    config.damage_ceiling = j.at("damage_ceiling").get<std::int64_t>();
  config.validate();
  return config;
}

}  // namespace biodose
