#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "signhunt/attack.hpp"
#include "signhunt/dataset.hpp"
#include "signhunt/model.hpp"

namespace signhunt {

enum class Arm { kFull, kNoDoubleStep, kNoCandidateReuse, kRandomBaseline, kMiFgsmReference };

const char* arm_name(Arm arm);
Arm parse_arm(const std::string& name);

// How the target label q is chosen for targeted campaigns.
enum class TargetChoice { kNone, kNext, kFixed };

struct Campaign {
  Dataset dataset;
  std::shared_ptr<const Model> model;
  std::string model_name = "model";
  // Evaluated against every successful sample of the first arm.
  std::vector<std::pair<std::string, std::shared_ptr<const Model>>> transfer_models;

  // Shared by every arm; spec labels are filled per item.
  AttackConfig attack;
  TargetChoice target = TargetChoice::kNone;
  int fixed_target = -1;
  std::uint64_t budget_limit = 0;  // per attack; 0 = unlimited
  std::vector<Arm> arms{Arm::kFull};
  std::vector<std::uint64_t> seeds{1};
  int random_tries = 100;
  double mi_decay = 1.0;
  std::size_t max_items = 0;  // 0 = whole dataset
  int workers = 1;            // items in flight
  std::filesystem::path out_dir;  // empty: nothing written
};

// Effective attack configuration of `arm` relative to the campaign baseline.
AttackConfig arm_attack_config(const Campaign& c, Arm arm);
nlohmann::json arm_config_json(const Campaign& c, Arm arm);

struct ItemRecord {
  std::string item_id;
  std::uint64_t seed = 0;
  std::uint64_t item_seed = 0;
  Arm arm = Arm::kFull;
  int true_label = 0;
  int target_label = -1;
  std::string status;  // success | failed | budget_exhausted | skipped | error
  bool success = false;
  double linf = 0.0;
  std::uint64_t queries = 0;
  double wall_time_s = 0.0;
  std::optional<int> first_valid_iteration;
  int final_label = -1;
  double final_true_confidence = 0.0;
  std::string error;
  std::string artifact_dir;  // relative to the campaign output directory
  AttackResult result;
};

struct ArmSummary {
  Arm arm = Arm::kFull;
  std::size_t attempted = 0;
  std::size_t skipped = 0;
  std::size_t successes = 0;
  std::size_t errors = 0;
  std::optional<double> success_rate;  // percent; empty when nothing was attempted
  std::optional<double> mean_linf;     // over successes
  std::optional<double> mean_queries;  // over attempted
  std::optional<double> mean_final_true_confidence;
  double mean_wall_time_s = 0.0;
  std::map<int, std::size_t> first_valid_histogram;
};

struct TransferRow {
  std::string model_name;
  std::size_t total = 0;  // successful source samples considered
  std::size_t fooled = 0;
  std::optional<double> rate;  // percent
  std::string warning;
};

struct CampaignReport {
  std::vector<ArmSummary> arms;
  std::vector<ItemRecord> items;  // item-major, then seed, then arm order
  std::vector<TransferRow> transfer;
  nlohmann::json config_echo;
  nlohmann::json arm_audit;
};

// Recomputes one arm's aggregates from item records, in record order.
ArmSummary summarize(const std::vector<ItemRecord>& items, Arm arm);

// Attacks every (item, seed, arm) independently; per-item randomness comes
// from hash(seed, item id). Item failures are recorded; more than half
// failing raises CampaignAborted. Writes report.json, summary.csv and per-item
// artifacts under out_dir when it is set.
CampaignReport run_campaign(const Campaign& campaign);

std::uint64_t item_seed(std::uint64_t campaign_seed, const std::string& item_id);

nlohmann::json report_json(const CampaignReport& report);
std::string summary_csv(const CampaignReport& report);
void write_campaign_outputs(const CampaignReport& report, const std::filesystem::path& out_dir);
// Copy of a report.json document without wall-clock fields.
nlohmann::json strip_timing(nlohmann::json report);

// Loads a campaign from its JSON config. Relative paths resolve against the
// config file's directory.
Campaign load_campaign(const std::filesystem::path& config_path);
Campaign campaign_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);

struct TransferSample {
  std::string id;
  ImageTensor image;
  FitnessSpec spec;
  SuccessRule rule = SuccessRule::kTop1;
};

// Fraction of samples that are still adversarial (same spec and rule) on each
// model. Only successful source samples belong in `samples`. Models whose
// input shape differs are skipped with a warning.
std::vector<TransferRow> transfer_eval(
    const std::vector<TransferSample>& samples,
    const std::vector<std::pair<std::string, const Classifier*>>& models);

std::vector<TransferSample> successful_samples(const CampaignReport& report, Arm arm,
                                               SuccessRule rule);
// Reads the artifacts a campaign wrote for one arm.
std::vector<TransferSample> load_transfer_samples(const std::filesystem::path& campaign_out,
                                                  Arm arm);

}  // namespace signhunt
