#include "biodose/curve.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace biodose {
namespace {

// d(D^p)/dD with the p = 0 case handled explicitly.
double dpow(double d, double p) {
  if (p == 0.0) return 0.0;
  return p * std::pow(d, p - 1.0);
}

double ipow(double d, int p) {
  double out = 1.0;
  for (int i = 0; i < p; ++i) out *= d;
  return out;
}

}  // namespace

std::string to_string(CurveKind kind) {
  switch (kind) {
    case CurveKind::LinearNeutron: return "linear_neutron";
    case CurveKind::LinearQuadraticGamma: return "linear_quadratic_gamma";
    case CurveKind::CombinedMixed: return "combined_mixed";
    case CurveKind::SaturatedLinear: return "saturated_linear";
    case CurveKind::SaturatedSigmoid: return "saturated_sigmoid";
    case CurveKind::AvramiSigmoid: return "avrami_sigmoid";
    case CurveKind::CriticalLinear: return "critical_linear";
    case CurveKind::CriticalQuadratic: return "critical_quadratic";
    case CurveKind::Polynomial: return "polynomial";
    case CurveKind::MultiRadiationPolynomial: return "multi_polynomial";
    case CurveKind::Generalized: return "generalized";
  }
  throw ValidationError("unknown curve kind");
}

CurveKind curve_kind_from_string(const std::string& name) {
  if (name == "linear_neutron") return CurveKind::LinearNeutron;
  if (name == "linear_quadratic_gamma") return CurveKind::LinearQuadraticGamma;
  if (name == "combined_mixed") return CurveKind::CombinedMixed;
  if (name == "saturated_linear") return CurveKind::SaturatedLinear;
  if (name == "saturated_sigmoid") return CurveKind::SaturatedSigmoid;
  if (name == "avrami_sigmoid") return CurveKind::AvramiSigmoid;
  if (name == "critical_linear") return CurveKind::CriticalLinear;
  if (name == "critical_quadratic") return CurveKind::CriticalQuadratic;
  if (name == "polynomial") return CurveKind::Polynomial;
  if (name == "multi_polynomial") return CurveKind::MultiRadiationPolynomial;
  if (name == "generalized") return CurveKind::Generalized;
  throw ValidationError("unknown curve kind: " + name);
}

CurveModel::CurveModel(CurveKind kind, std::vector<double> params, double y0, double ymax)
    : kind_(kind), params_(std::move(params)), y0_(y0), ymax_(ymax) {
  if (!(y0_ >= 0.0)) throw ValidationError("Y0 must be >= 0");
  if (uses_ymax() && !(ymax_ > y0_)) throw ValidationError("Ymax must exceed Y0");
  for (double p : params_) {
    if (!std::isfinite(p)) throw ValidationError("curve parameters must be finite");
  }
}

CurveModel CurveModel::linear_neutron(double alpha, double y0) {
  return CurveModel(CurveKind::LinearNeutron, {alpha}, y0, 1.0);
}

CurveModel CurveModel::linear_quadratic_gamma(double beta, double gamma, double y0) {
  return CurveModel(CurveKind::LinearQuadraticGamma, {beta, gamma}, y0, 1.0);
}

CurveModel CurveModel::combined_mixed(double alpha, double beta, double gamma, double y0) {
  return CurveModel(CurveKind::CombinedMixed, {alpha, beta, gamma}, y0, 1.0);
}

CurveModel CurveModel::saturated_linear(double alpha, double y0, double ymax) {
  return CurveModel(CurveKind::SaturatedLinear, {alpha}, y0, ymax);
}

CurveModel CurveModel::saturated_sigmoid(double beta, double gamma, double y0, double ymax) {
  return CurveModel(CurveKind::SaturatedSigmoid, {beta, gamma}, y0, ymax);
}

CurveModel CurveModel::avrami_sigmoid(double a, double n, double y0, double ymax) {
  return CurveModel(CurveKind::AvramiSigmoid, {a, n}, y0, ymax);
}

CurveModel CurveModel::critical_linear(double alpha, double y0, double ymax) {
  return CurveModel(CurveKind::CriticalLinear, {alpha}, y0, ymax);
}

CurveModel CurveModel::critical_quadratic(double beta, double gamma, double y0, double ymax) {
  return CurveModel(CurveKind::CriticalQuadratic, {beta, gamma}, y0, ymax);
}

CurveModel CurveModel::polynomial(std::vector<double> coeffs, double y0) {
  return CurveModel(CurveKind::Polynomial, std::move(coeffs), y0, 1.0);
}

CurveModel CurveModel::multi_polynomial(std::vector<std::vector<double>> coeffs_per_radiation,
                                        double y0) {
  if (coeffs_per_radiation.empty())
    throw ValidationError("multi_polynomial needs at least one radiation type");
  std::vector<double> flat;
  std::vector<std::size_t> degrees;
  for (const auto& c : coeffs_per_radiation) {
    degrees.push_back(c.size());
    flat.insert(flat.end(), c.begin(), c.end());
  }
  CurveModel m(CurveKind::MultiRadiationPolynomial, std::move(flat), y0, 1.0);
  m.degrees_ = std::move(degrees);
  return m;
}

CurveModel CurveModel::generalized(std::vector<std::vector<GeneralizedTerm>> terms_per_radiation,
                                   double y0, double ymax) {
  if (terms_per_radiation.empty())
    throw ValidationError("generalized curve needs at least one radiation type");
  std::vector<double> flat;
  std::vector<std::size_t> degrees;
  double zero_dose_sum = 0.0;
  for (const auto& rad : terms_per_radiation) {
    degrees.push_back(rad.size());
    for (const auto& t : rad) {
      if (t.degree < 0) throw ValidationError("generalized term degree must be >= 0");
      flat.push_back(t.offset);
      flat.push_back(t.scale);
      for (const auto& e : t.exp_terms) flat.push_back(e.coeff);
      // term value at D = 0: offset + scale*[degree==0]*exp(-sum over m==0 coeffs)
      double expo = 0.0;
      for (const auto& e : t.exp_terms)
        if (e.power == 0.0) expo += e.coeff;
      zero_dose_sum += t.offset + (t.degree == 0 ? t.scale * std::exp(-expo) : 0.0);
    }
  }
  if (zero_dose_sum != 0.0)
    throw ValidationError("generalized terms must vanish at zero dose so Y(0) = Y0");
  CurveModel m(CurveKind::Generalized, std::move(flat), y0, ymax);
  m.degrees_ = std::move(degrees);
  m.terms_ = std::move(terms_per_radiation);
  return m;
}

CurveModel CurveModel::with_params(std::span<const double> params) const {
  return with_params_and_y0(params, y0_);
}

CurveModel CurveModel::with_params_and_y0(std::span<const double> params, double y0) const {
  if (params.size() != params_.size())
    throw ValidationError("with_params: parameter count mismatch");
  CurveModel out = *this;
  out.params_.assign(params.begin(), params.end());
  out.y0_ = y0;
  if (kind_ == CurveKind::Generalized) {
    // keep the structured terms in sync with the flat vector
    std::size_t k = 0;
    for (auto& rad : out.terms_) {
      for (auto& t : rad) {
        t.offset = out.params_[k++];
        t.scale = out.params_[k++];
        for (auto& e : t.exp_terms) e.coeff = out.params_[k++];
      }
    }
  }
  return out;
}

bool CurveModel::uses_ymax() const {
  switch (kind_) {
    case CurveKind::SaturatedLinear:
    case CurveKind::SaturatedSigmoid:
    case CurveKind::AvramiSigmoid:
    case CurveKind::CriticalLinear:
    case CurveKind::CriticalQuadratic:
    case CurveKind::Generalized:
      return true;
    default:
      return false;
  }
}

bool CurveModel::linear_in_params() const {
  switch (kind_) {
    case CurveKind::LinearNeutron:
    case CurveKind::LinearQuadraticGamma:
    case CurveKind::CombinedMixed:
    case CurveKind::Polynomial:
    case CurveKind::MultiRadiationPolynomial:
      return true;
    default:
      return false;
  }
}

std::size_t CurveModel::dose_arity() const {
  switch (kind_) {
    case CurveKind::CombinedMixed:
      return 2;
    case CurveKind::MultiRadiationPolynomial:
    case CurveKind::Generalized:
      return degrees_.size();
    default:
      return 1;
  }
}

std::size_t CurveModel::radiation_count() const { return dose_arity(); }

void CurveModel::check_dose(std::span<const double> dose) const {
  if (dose.size() != dose_arity())
    throw ValidationError("dose vector arity mismatch: expected " +
                          std::to_string(dose_arity()) + ", got " +
                          std::to_string(dose.size()));
  for (double d : dose) {
    if (!(d >= 0.0)) throw ValidationError("negative dose has no physical meaning here");
  }
}

double CurveModel::generalized_sum(std::span<const double> dose) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const double d = dose[i];
    for (const auto& t : terms_[i]) {
      double expo = 0.0;
      for (const auto& e : t.exp_terms) expo += e.coeff * std::pow(d, e.power);
      sum += t.offset + t.scale * ipow(d, t.degree) * std::exp(-expo);
    }
  }
  return sum;
}

double CurveModel::evaluate(std::span<const double> dose) const {
  check_dose(dose);
  const double delta = ymax_ - y0_;
  switch (kind_) {
    case CurveKind::LinearNeutron:
      return y0_ + params_[0] * dose[0];
    case CurveKind::LinearQuadraticGamma:
      return y0_ + params_[0] * dose[0] + params_[1] * dose[0] * dose[0];
    case CurveKind::CombinedMixed:
      return y0_ + params_[0] * dose[0] + params_[1] * dose[1] + params_[2] * dose[1] * dose[1];
    case CurveKind::SaturatedLinear:
      return y0_ + delta * (-std::expm1(-params_[0] * dose[0]));
    case CurveKind::SaturatedSigmoid:
      return y0_ + delta * (-std::expm1(-params_[0] * dose[0] - params_[1] * dose[0] * dose[0]));
    case CurveKind::AvramiSigmoid: {
      const double u = params_[0] * std::pow(dose[0], params_[1]);
      return y0_ + delta * (-std::expm1(-u));
    }
    case CurveKind::CriticalLinear: {
      const double u = params_[0] * dose[0];
      return y0_ + delta * u * std::exp(-u);
    }
    case CurveKind::CriticalQuadratic: {
      const double u = params_[0] * dose[0] + params_[1] * dose[0] * dose[0];
      return y0_ + delta * u * std::exp(-u);
    }
    case CurveKind::Polynomial: {
      double acc = 0.0;
      for (std::size_t j = params_.size(); j > 0; --j) acc = (acc + params_[j - 1]) * dose[0];
      return y0_ + acc;
    }
    case CurveKind::MultiRadiationPolynomial: {
      double acc = 0.0;
      std::size_t k = 0;
      for (std::size_t i = 0; i < degrees_.size(); ++i) {
        double p = dose[i];
        for (std::size_t j = 0; j < degrees_[i]; ++j) {
          acc += params_[k++] * p;
          p *= dose[i];
        }
      }
      return y0_ + acc;
    }
    case CurveKind::Generalized:
      return y0_ + delta * generalized_sum(dose);
  }
  throw ValidationError("unknown curve kind");
}

double CurveModel::evaluate(double dose) const { return evaluate(std::span(&dose, 1)); }

double CurveModel::evaluate(double dn, double dg) const {
  const double d[2] = {dn, dg};
  return evaluate(std::span(d, 2));
}

double CurveModel::dose_derivative(std::span<const double> dose, std::size_t axis) const {
  check_dose(dose);
  if (axis >= dose_arity()) throw ValidationError("dose axis out of range");
  const double delta = ymax_ - y0_;
  switch (kind_) {
    case CurveKind::LinearNeutron:
      return params_[0];
    case CurveKind::LinearQuadraticGamma:
      return params_[0] + 2.0 * params_[1] * dose[0];
    case CurveKind::CombinedMixed:
      return axis == 0 ? params_[0] : params_[1] + 2.0 * params_[2] * dose[1];
    case CurveKind::SaturatedLinear:
      return delta * params_[0] * std::exp(-params_[0] * dose[0]);
    case CurveKind::SaturatedSigmoid: {
      const double u = params_[0] * dose[0] + params_[1] * dose[0] * dose[0];
      return delta * (params_[0] + 2.0 * params_[1] * dose[0]) * std::exp(-u);
    }
    case CurveKind::AvramiSigmoid: {
      const double a = params_[0], n = params_[1];
      if (dose[0] == 0.0) return n == 1.0 ? delta * a : (n > 1.0 ? 0.0 : std::numeric_limits<double>::infinity());
      const double u = a * std::pow(dose[0], n);
      return delta * a * n * std::pow(dose[0], n - 1.0) * std::exp(-u);
    }
    case CurveKind::CriticalLinear: {
      const double u = params_[0] * dose[0];
      return delta * params_[0] * (1.0 - u) * std::exp(-u);
    }
    case CurveKind::CriticalQuadratic: {
      const double u = params_[0] * dose[0] + params_[1] * dose[0] * dose[0];
      return delta * (params_[0] + 2.0 * params_[1] * dose[0]) * (1.0 - u) * std::exp(-u);
    }
    case CurveKind::Polynomial: {
      double p = 1.0;
      double out = 0.0;
      for (std::size_t j = 0; j < params_.size(); ++j) {
        out += params_[j] * static_cast<double>(j + 1) * p;
        p *= dose[0];
      }
      return out;
    }
    case CurveKind::MultiRadiationPolynomial: {
      std::size_t k = 0;
      for (std::size_t i = 0; i < axis; ++i) k += degrees_[i];
      double p = 1.0;
      double out = 0.0;
      for (std::size_t j = 0; j < degrees_[axis]; ++j) {
        out += params_[k + j] * static_cast<double>(j + 1) * p;
        p *= dose[axis];
      }
      return out;
    }
    case CurveKind::Generalized: {
      const double d = dose[axis];
      double out = 0.0;
      for (const auto& t : terms_[axis]) {
        double expo = 0.0, dexpo = 0.0;
        for (const auto& e : t.exp_terms) {
          expo += e.coeff * std::pow(d, e.power);
          dexpo += e.coeff * dpow(d, e.power);
        }
        const double core = std::exp(-expo);
        out += t.scale * core * (dpow(d, static_cast<double>(t.degree)) -
                                 ipow(d, t.degree) * dexpo);
      }
      return delta * out;
    }
  }
  throw ValidationError("unknown curve kind");
}

double CurveModel::dose_derivative(double dose) const {
  return dose_derivative(std::span(&dose, 1), 0);
}

double CurveModel::param_derivative(std::span<const double> dose, std::size_t index) const {
  check_dose(dose);
  if (index >= param_count()) throw ValidationError("parameter index out of range");
  const double delta = ymax_ - y0_;
  const bool wrt_y0 = index == params_.size();
  switch (kind_) {
    case CurveKind::LinearNeutron:
      return wrt_y0 ? 1.0 : dose[0];
    case CurveKind::LinearQuadraticGamma:
      if (wrt_y0) return 1.0;
      return index == 0 ? dose[0] : dose[0] * dose[0];
    case CurveKind::CombinedMixed:
      if (wrt_y0) return 1.0;
      if (index == 0) return dose[0];
      return index == 1 ? dose[1] : dose[1] * dose[1];
    case CurveKind::SaturatedLinear: {
      const double core = std::exp(-params_[0] * dose[0]);
      return wrt_y0 ? core : delta * dose[0] * core;
    }
    case CurveKind::SaturatedSigmoid: {
      const double core = std::exp(-params_[0] * dose[0] - params_[1] * dose[0] * dose[0]);
      if (wrt_y0) return core;
      return index == 0 ? delta * dose[0] * core : delta * dose[0] * dose[0] * core;
    }
    case CurveKind::AvramiSigmoid: {
      const double a = params_[0], n = params_[1];
      const double dn = std::pow(dose[0], n);
      const double core = std::exp(-a * dn);
      if (wrt_y0) return core;
      if (index == 0) return delta * dn * core;
      if (dose[0] == 0.0) return 0.0;
      return delta * a * dn * std::log(dose[0]) * core;
    }
    case CurveKind::CriticalLinear: {
      const double u = params_[0] * dose[0];
      const double core = std::exp(-u);
      if (wrt_y0) return 1.0 - u * core;
      return delta * dose[0] * (1.0 - u) * core;
    }
    case CurveKind::CriticalQuadratic: {
      const double u = params_[0] * dose[0] + params_[1] * dose[0] * dose[0];
      const double core = std::exp(-u);
      if (wrt_y0) return 1.0 - u * core;
      const double dd = index == 0 ? dose[0] : dose[0] * dose[0];
      return delta * dd * (1.0 - u) * core;
    }
    case CurveKind::Polynomial:
      if (wrt_y0) return 1.0;
      return std::pow(dose[0], static_cast<double>(index + 1));
    case CurveKind::MultiRadiationPolynomial: {
      if (wrt_y0) return 1.0;
      std::size_t k = index;
      for (std::size_t i = 0; i < degrees_.size(); ++i) {
        if (k < degrees_[i]) return std::pow(dose[i], static_cast<double>(k + 1));
        k -= degrees_[i];
      }
      throw ValidationError("parameter index out of range");
    }
    case CurveKind::Generalized: {
      if (wrt_y0) return 1.0 - generalized_sum(dose);
      std::size_t k = index;
      for (std::size_t i = 0; i < terms_.size(); ++i) {
        const double d = dose[i];
        for (const auto& t : terms_[i]) {
          const std::size_t block = 2 + t.exp_terms.size();
          if (k >= block) {
            k -= block;
            continue;
          }
          double expo = 0.0;
          for (const auto& e : t.exp_terms) expo += e.coeff * std::pow(d, e.power);
          const double core = std::exp(-expo);
          const double dpow_term = ipow(d, t.degree);
          if (k == 0) return delta;                       // d/d offset
          if (k == 1) return delta * dpow_term * core;    // d/d scale
          const auto& e = t.exp_terms[k - 2];             // d/d exp coefficient
          return -delta * t.scale * dpow_term * std::pow(d, e.power) * core;
        }
      }
      throw ValidationError("parameter index out of range");
    }
  }
  throw ValidationError("unknown curve kind");
}

double CurveModel::param_derivative(double dose, std::size_t index) const {
  return param_derivative(std::span(&dose, 1), index);
}

}  // namespace biodose
