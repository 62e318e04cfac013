#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "ktg/analysis.hpp"
#include "ktg/engine.hpp"

namespace ktg {

inline constexpr int kSchemaVersion = 1;

nlohmann::json config_to_json(const ExtractConfig& config);
nlohmann::json rule_to_json(const RuleLibrary& grammar, RuleId id);
/// Used rules (frequency > 0) in library order.
nlohmann::json grammar_to_json(const RuleLibrary& grammar);
nlohmann::json account_to_json(const BitAccount& account);
nlohmann::json record_to_json(const ApplicationRecord& record);
nlohmann::json kl_to_json(const KlResult& kl, const std::vector<KlTerm>& ranked);

/// Full run artifact: manifest echo, grammar, records, residual, bits, stats.
nlohmann::json run_to_json(const ExtractionResult& result, const nlohmann::json& manifest);

/// Rebuilds what decode needs from a run artifact. Rule ids are renumbered
/// densely. Throws CorruptRecord on malformed input.
ExtractionResult load_run(const nlohmann::json& artifact);

/// One digraph; boundary edges come from / go to phantom nodes.
std::string rule_to_dot(const KTRule& rule, std::string_view name);

}  // namespace ktg
