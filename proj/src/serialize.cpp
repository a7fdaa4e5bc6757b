#include "signhunt/serialize.hpp"

#include <sstream>

namespace signhunt {

using nlohmann::json;

const char* fitness_mode_name(FitnessSpec::Mode mode) {
  switch (mode) {
    case FitnessSpec::Mode::kUntargeted: return "untargeted";
    case FitnessSpec::Mode::kTargeted: return "targeted";
    case FitnessSpec::Mode::kLabelScore: return "label_score";
  }
  return "?";
}

json to_json(const DEParams& p) {
  return {{"N", p.population},
          {"G", p.generations},
          {"DR", p.scale},
          {"CR", p.crossover},
          {"force_jrand", p.force_jrand}};
}

json to_json(const FitnessSpec& s) {
  json j = {{"mode", fitness_mode_name(s.mode)}, {"true_label", s.true_label}};
  if (s.mode == FitnessSpec::Mode::kTargeted) j["target_label"] = s.target_label;
  return j;
}

json to_json(const AttackConfig& c) {
  return {{"epsilon", c.epsilon},
          {"T", c.iterations},
          {"KR", c.keep_rate},
          {"de", to_json(c.de)},
          {"spec", to_json(c.spec)},
          {"success_rule", success_rule_name(c.rule)},
          {"early_return", c.early_return},
          {"double_step", c.double_step}};
}

json to_json(const IterationRecord& r) {
  return {{"iteration", r.iteration},
          {"alpha", r.alpha},
          {"beta", r.beta},
          {"best_temp_fitness", r.best_temp_fitness},
          {"step_fitness", r.step_fitness},
          {"true_label_confidence", r.true_label_confidence},
          {"label", r.label},
          {"adversarial", r.adversarial},
          {"de_best_fitness", r.de_trace}};
}

json attack_result_json(const AttackResult& result, const json& config_echo) {
  json trace = json::array();
  for (const auto& r : result.trace) trace.push_back(to_json(r));
  return {{"config", config_echo},
          {"success", result.success},
          {"status", attack_status_name(result.status)},
          {"final_label", result.final_label},
          {"queries", result.queries},
          {"linf_distance", result.linf},
          {"partial", result.partial},
          {"first_valid_iteration",
           result.first_valid_iteration ? json(*result.first_valid_iteration) : json(nullptr)},
          {"iterations_completed", result.trace.size()},
          {"trace", std::move(trace)},
          {"timing", {{"wall_time_s", result.wall_time_s}}}};
}

std::string confidence_trace_csv(const AttackResult& result) {
  std::ostringstream os;
  os.precision(17);
  os << "iteration,true_label_confidence,best_temp_fitness\n";
  for (const auto& r : result.trace) {
    os << r.iteration << ',' << r.true_label_confidence << ',' << r.best_temp_fitness << '\n';
  }
  return os.str();
}

}  // namespace signhunt
