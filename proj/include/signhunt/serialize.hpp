#pragma once

#include <string>

#include <json.hpp>

#include "signhunt/attack.hpp"

namespace signhunt {

nlohmann::json to_json(const DEParams& p);
nlohmann::json to_json(const FitnessSpec& s);
nlohmann::json to_json(const AttackConfig& c);
nlohmann::json to_json(const IterationRecord& r);

// result.json body: config echo, metrics, per-iteration trace. Wall time is
// kept under "timing" so callers comparing runs can drop one key.
nlohmann::json attack_result_json(const AttackResult& result, const nlohmann::json& config_echo);

// CSV rows "iteration,true_label_confidence,best_temp_fitness", one per
// completed outer iteration.
std::string confidence_trace_csv(const AttackResult& result);

const char* fitness_mode_name(FitnessSpec::Mode mode);

}  // namespace signhunt
