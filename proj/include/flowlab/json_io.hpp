#pragma once

#include <nlohmann/json.hpp>

#include "flowlab/certificate.hpp"
#include "flowlab/measure.hpp"
#include "flowlab/metrics.hpp"
#include "flowlab/pipelines.hpp"

namespace flowlab {

using Json = nlohmann::ordered_json;

// {"atoms":[[pos,mass],...],"defect":d}, atoms sorted by position.
Json to_json(const DiscreteMeasure& mu);
DiscreteMeasure measure_from_json(const Json& j);

Json to_json(const CouplingPlan& plan);
Json to_json(const TermEnvelope& env);
TermEnvelope envelope_from_json(const Json& j);

// {name, indices, terms, partial, tail_bound, total_upper, verdict, witness}
Json to_json(const CertificateSeries& s);
CertificateSeries series_from_json(const Json& j);

// Arrays of pairs: [[lambda,b],...] and [[b,M],...].
Json to_json(const PoissonFlowSpec& spec);
PoissonFlowSpec flow_spec_from_json(const Json& j);
Json to_json(const ITPFI2Spec& spec);
ITPFI2Spec itpfi2_spec_from_json(const Json& j);

// Finite doubles pass through; infinities and NaN become strings so output stays valid JSON.
Json number(double x);

}  // namespace flowlab
