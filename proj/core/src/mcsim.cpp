#include "biodose/mcsim.hpp"

#include <algorithm>
#include <cmath>

#include "biodose/accum.hpp"
#include "biodose/errors.hpp"

namespace biodose {

double DoseMap::operator()(double damages) const {
  switch (kind) {
    case Kind::Linear:
      return coeffs[0] * damages;
    case Kind::Polynomial: {
      double out = 0.0, p = damages;
      for (double c : coeffs) {
        out += c * p;
        p *= damages;
      }
      return out;
    }
    case Kind::Saturated:
      return coeffs[0] * (-std::expm1(-coeffs[1] * damages));
  }
  throw ValidationError("unknown dose map kind");
}

void DoseMap::validate() const {
  switch (kind) {
    case Kind::Linear:
      if (coeffs.size() != 1 || !(coeffs[0] > 0.0))
        throw ValidationError("linear dose map needs one positive slope");
      break;
    case Kind::Polynomial:
      if (coeffs.empty()) throw ValidationError("polynomial dose map needs coefficients");
      break;
    case Kind::Saturated:
      if (coeffs.size() != 2 || !(coeffs[0] > 0.0) || !(coeffs[1] > 0.0))
        throw ValidationError("saturated dose map needs positive {d_inf, k}");
      break;
  }
}

void SimConfig::validate() const {
  if (cells < 1) throw ValidationError("need at least one cell");
  if (repetitions < 1) throw ValidationError("need at least one repetition");
  if (!(target_yf > curve_n.y0()) || !(target_yf > curve_g.y0()))
    throw ValidationError("target frequency must exceed the background Y0");
  dose_map.validate();
  if (curve_n.dose_arity() != 1 || curve_g.dose_arity() != 1)
    throw ValidationError("simulator curves must be single-radiation kinds");
}

SimResult simulate(const SimConfig& config) {
  config.validate();
  const auto w = static_cast<std::uint64_t>(config.cells);
  const bool exact_theta = config.theta.is_point_mass();
  const double theta0 = exact_theta ? config.theta.point_value() : 0.0;

  SimResult result;
  result.rep_dn.resize(config.repetitions);
  result.rep_dg.resize(config.repetitions);

  std::vector<std::pair<std::int64_t, std::int64_t>> table(w);

  for (int rep = 0; rep < config.repetitions; ++rep) {
    // one independent stream per repetition: scheduling cannot change results
    CounterRng rng = CounterRng::substream(config.seed, static_cast<std::uint64_t>(rep));
    std::fill(table.begin(), table.end(), std::pair<std::int64_t, std::int64_t>{0, 0});
    std::int64_t u_n = 0, u_g = 0;
    double dn = 0.0, dg = 0.0;

    while (config.curve_n.evaluate(dn) + config.curve_g.evaluate(dg) < config.target_yf) {
      if (u_n + u_g >= config.damage_ceiling)
        throw NumericError("damage ceiling reached: the target frequency is unreachable "
                           "for these curves");
      const auto cell = static_cast<std::size_t>(rng.uniform01() * static_cast<double>(w));
      const std::size_t idx = cell < w ? cell : w - 1;
      const double theta = exact_theta ? theta0 : config.theta.sample(rng);
      const bool gamma_hit = rng.uniform01() < theta;
      if (gamma_hit) {
        ++u_g;
        ++table[idx].second;
      } else {
        ++u_n;
        ++table[idx].first;
      }
      dn = config.dose_map(static_cast<double>(u_n));
      dg = config.dose_map(static_cast<double>(u_g));
    }
    result.rep_dn[rep] = dn;
    result.rep_dg[rep] = dg;
    if (rep + 1 == config.repetitions) result.damage_table = table;
  }

  KahanSum sn, sg;
  for (int rep = 0; rep < config.repetitions; ++rep) {
    sn.add(result.rep_dn[rep]);
    sg.add(result.rep_dg[rep]);
  }
  const double k = static_cast<double>(config.repetitions);
  result.mean_dn = sn.value() / k;
  result.mean_dg = sg.value() / k;
  KahanSum vn, vg;
  for (int rep = 0; rep < config.repetitions; ++rep) {
    vn.add((result.rep_dn[rep] - result.mean_dn) * (result.rep_dn[rep] - result.mean_dn));
    vg.add((result.rep_dg[rep] - result.mean_dg) * (result.rep_dg[rep] - result.mean_dg));
  }
  result.sd_dn = k > 1 ? std::sqrt(vn.value() / (k - 1.0)) : 0.0;
  result.sd_dg = k > 1 ? std::sqrt(vg.value() / (k - 1.0)) : 0.0;

  for (const auto& [un, ug] : result.damage_table) ++result.damage_histogram[un + ug];
  return result;
}

DamageStats damage_statistics(const SimResult& result) {
  if (result.damage_table.empty()) throw ValidationError("empty damage table");
  DamageStats stats;
  const double n = static_cast<double>(result.damage_table.size());
  KahanSum sum;
  for (const auto& [un, ug] : result.damage_table) sum.add(static_cast<double>(un + ug));
  stats.mean = sum.value() / n;
  KahanSum var;
  for (const auto& [un, ug] : result.damage_table) {
    const double d = static_cast<double>(un + ug) - stats.mean;
    var.add(d * d);
  }
  stats.variance = n > 1 ? var.value() / (n - 1.0) : 0.0;
  if (n > 1 && stats.mean > 0.0) stats.dispersion = stats.variance / stats.mean;
  return stats;
}

}  // namespace biodose
