#pragma once

#include <json.hpp>

#include "biodose/curve.hpp"
#include "biodose/dose.hpp"
#include "biodose/fitting.hpp"
#include "biodose/mcsim.hpp"
#include "biodose/priors.hpp"
#include "biodose/selection.hpp"

namespace biodose {

using json = nlohmann::json;

// Curve models round-trip bit-exactly for finite doubles.
json curve_to_json(const CurveModel& model);
CurveModel curve_from_json(const json& j);

json theta_prior_to_json(const ThetaPrior& prior);
ThetaPrior theta_prior_from_json(const json& j);

json param_prior_to_json(const ParamPrior& prior);
ParamPrior param_prior_from_json(const json& j);

json fit_result_to_json(const FitResult& result);

json posterior_to_json(const DosePosterior& posterior);

json evidence_to_json(const ModelEvidence& evidence);

json sim_result_to_json(const SimResult& result);

SimConfig sim_config_from_json(const json& j);
json sim_config_to_json(const SimConfig& config);

}  // namespace biodose
