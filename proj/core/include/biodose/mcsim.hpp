#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "biodose/curve.hpp"
#include "biodose/priors.hpp"

namespace biodose {

/// Damage-to-dose map D = f(u) of Eq. (49).
struct DoseMap {
  enum class Kind { Linear, Polynomial, Saturated };
  Kind kind = Kind::Linear;
  /// Linear: {c} with D = c*u (default c = 0.012 Gy/damage).
  /// Polynomial: {c1..cn} with D = sum_j c_j u^j.
  /// Saturated: {d_inf, k} with D = d_inf (1 - exp(-k u)).
  std::vector<double> coeffs = {0.012};

  double operator()(double damages) const;
  void validate() const;
};

/// Configuration of the virtual cell-irradiation experiment.
struct SimConfig {
  std::int64_t cells = 1000;                         // w
  double target_yf = 0.0;                            // stop when Yn+Yg >= target
  int repetitions = 100;                             // K
  ThetaPrior theta = ThetaPrior::point_mass(0.5);    // exact theta0 or a prior
  DoseMap dose_map;
  CurveModel curve_n = CurveModel::linear_neutron(0.832);
  CurveModel curve_g = CurveModel::linear_quadratic_gamma(0.0164, 0.0492);
  std::uint64_t seed = 1;
  std::int64_t damage_ceiling = 100000000;  // guards non-terminating configs

  void validate() const;
};

struct SimResult {
  double mean_dn = 0.0, mean_dg = 0.0;   // averages over K repetitions (Gy)
  double sd_dn = 0.0, sd_dg = 0.0;       // standard deviations across repetitions
  std::vector<double> rep_dn, rep_dg;    // per-repetition doses
  /// Per-cell damage counts (u_n, u_g) of the last repetition.
  std::vector<std::pair<std::int64_t, std::int64_t>> damage_table;
  /// Distribution of per-cell total damages (last repetition): total -> cells.
  std::map<std::int64_t, std::int64_t> damage_histogram;
};

/// Runs the two-loop Monte Carlo algorithm: K independent repetitions, each
/// dealing damages to randomly chosen cells under the theta lottery until
/// Yn(Dn) + Yg(Dg) reaches the target frequency. Each repetition draws from
/// its own (seed, repetition)-indexed stream, so results are bit-identical
/// regardless of scheduling.
SimResult simulate(const SimConfig& config);

struct DamageStats {
  double mean = 0.0;
  double variance = 0.0;
  /// variance/mean; absent when undefined (w < 2 or zero mean damage).
  std::optional<double> dispersion;
};

/// Per-cell damage statistics of the last repetition; dispersion near 1
/// is the Poisson-like signature of the uniform cell lottery.
DamageStats damage_statistics(const SimResult& result);

}  // namespace biodose
