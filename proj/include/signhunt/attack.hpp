#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "signhunt/de.hpp"
#include "signhunt/model.hpp"
#include "signhunt/tensor.hpp"

namespace signhunt {

enum class SuccessRule { kTop1, kTop5 };

const char* success_rule_name(SuccessRule rule);
SuccessRule parse_success_rule(const std::string& name);

// untargeted/top1: top label != y; untargeted/top5: y outside the five best
// (all labels when fewer than five exist); targeted: top label == q. The
// label-score mode succeeds when the original top label is no longer first.
bool is_adversarial(const PredictionVector& pred, const FitnessSpec& spec, SuccessRule rule);

struct AttackConfig {
  double epsilon = 0.0;  // L-infinity bound, unit pixel scale
  int iterations = 1;    // T
  double keep_rate = 0.2;
  DEParams de;
  FitnessSpec spec;
  SuccessRule rule = SuccessRule::kTop1;
  bool early_return = true;
  // When false the exploration step stays equal to the permanent step.
  bool double_step = true;
  int workers = 1;

  void validate() const;
  double permanent_step() const { return epsilon / iterations; }
};

// Step sizes at an iteration boundary: alpha explores inside the DE search,
// beta is committed to the iterate. With double steps, alpha + t*beta = eps.
struct StepState {
  double alpha = 0.0;
  double beta = 0.0;
  int t = 0;
};

struct IterationRecord {
  int iteration = 0;  // 1-based: the iterate I_t this record describes
  double alpha = 0.0;
  double beta = 0.0;
  double best_temp_fitness = 0.0;  // best DE fitness at step alpha
  double step_fitness = 0.0;       // fitness of the committed iterate
  double true_label_confidence = 0.0;
  int label = -1;
  bool adversarial = false;
  std::vector<double> de_trace;  // best fitness per DE generation
};

enum class AttackStatus { kSuccess, kFailed, kBudgetExhausted };
const char* attack_status_name(AttackStatus status);

struct AttackResult {
  ImageTensor adversarial;
  bool success = false;
  AttackStatus status = AttackStatus::kFailed;
  int final_label = -1;
  std::uint64_t queries = 0;
  double linf = 0.0;
  std::vector<IterationRecord> trace;
  std::optional<int> first_valid_iteration;
  bool partial = false;  // stopped by the query budget
  double wall_time_s = 0.0;
};

struct AttackHooks {
  CandidateObserver on_candidate;
  std::function<void(const StepState&)> on_step;
};

// Keeps the ceil(KR*N) fittest members (ties to the lower index) in place and
// redraws the rest uniformly. The cache is always invalidated.
Population reuse_candidates(Population pop, double keep_rate, RngStream& rng,
                            const CandidateObserver& observer = {});
std::size_t kept_count(double keep_rate, std::size_t population);

// Black-box momentum iterative sign attack. Per outer iteration: DE search
// for sign candidates around I_t at exploration step alpha, commit the
// candidate whose I_t + beta*x has the lowest fitness, carry the best KR
// fraction of the population forward, shrink alpha by beta. Costs
// N*(G+2) queries per full iteration.
AttackResult bmi_fgsm(const ImageTensor& original, const AttackConfig& config,
                      const Classifier& classifier, QueryBudget& budget, RngStream& rng,
                      const AttackHooks& hooks = {});

// White-box reference: momentum iterative FGSM with L1-normalised
// finite-difference gradients of cross-entropy. Targeted specs descend the
// loss of the target label.
struct MIFGSMConfig {
  double epsilon = 0.0;
  int iterations = 1;
  double decay = 1.0;  // mu
  double fd_step = 1e-4;
  bool early_return = true;
  SuccessRule rule = SuccessRule::kTop1;
};
AttackResult mi_fgsm_reference(const ImageTensor& original, const MIFGSMConfig& config,
                               const Model& model, const FitnessSpec& spec, QueryBudget& budget);

// Uniform random corners of the epsilon box; first hit wins.
AttackResult random_sign_attack(const ImageTensor& original, double epsilon, int tries,
                                const Classifier& classifier, const FitnessSpec& spec,
                                SuccessRule rule, QueryBudget& budget, RngStream& rng);

}  // namespace signhunt
