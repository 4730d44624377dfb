#pragma once

#include "json.hpp"

#include "acl/bench_metrics.hpp"
#include "acl/diagnostics.hpp"
#include "acl/pipeline.hpp"
#include "acl/screening.hpp"
#include "acl/simgen.hpp"

// JSON views of the result types. Variable and group indices are 1-based
// in every external artifact.

namespace acl {

nlohmann::json to_json(const ScreenResult& r);
nlohmann::json to_json(const FitResult& r);
nlohmann::json to_json(const IrReport& r);
nlohmann::json to_json(const GirReport& r);
nlohmann::json to_json(const ScenarioConfig& c);
nlohmann::json to_json(const PipelineConfig& c);
nlohmann::json to_json(const AggregateRow& r);

std::vector<int> one_based(const std::vector<int>& zero_based);

} // namespace acl
