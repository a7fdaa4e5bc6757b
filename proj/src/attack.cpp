#include "signhunt/attack.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "signhunt/errors.hpp"
#include "signhunt/gradient.hpp"
#include "signhunt/parallel.hpp"

namespace signhunt {

const char* success_rule_name(SuccessRule rule) {
  return rule == SuccessRule::kTop5 ? "top5" : "top1";
}

SuccessRule parse_success_rule(const std::string& name) {
  if (name == "top1") return SuccessRule::kTop1;
  if (name == "top5") return SuccessRule::kTop5;
  throw ContractViolation("unknown success rule '" + name + "' (expected top1 or top5)");
}

const char* attack_status_name(AttackStatus status) {
  switch (status) {
    case AttackStatus::kSuccess: return "success";
    case AttackStatus::kFailed: return "failed";
    case AttackStatus::kBudgetExhausted: return "budget_exhausted";
  }
  return "?";
}

bool is_adversarial(const PredictionVector& pred, const FitnessSpec& spec, SuccessRule rule) {
  if (pred.scores.empty()) return false;
  const int n = static_cast<int>(pred.scores.size());
  switch (spec.mode) {
    case FitnessSpec::Mode::kTargeted:
      return top_label(pred) == spec.target_label;
    case FitnessSpec::Mode::kLabelScore:
      return top_label(pred) != spec.true_label;
    case FitnessSpec::Mode::kUntargeted:
      if (rule == SuccessRule::kTop1) return top_label(pred) != spec.true_label;
      if (spec.true_label >= n) return true;
      return !in_top_k(pred, spec.true_label, std::min(5, n));
  }
  return false;
}

void AttackConfig::validate() const {
  SIGNHUNT_REQUIRE(epsilon > 0.0 && std::isfinite(epsilon), "attack: epsilon must be > 0");
  SIGNHUNT_REQUIRE(iterations >= 1, "attack: T must be >= 1");
  SIGNHUNT_REQUIRE(keep_rate >= 0.0 && keep_rate <= 1.0, "attack: KR must be in [0,1]");
  SIGNHUNT_REQUIRE(workers >= 1, "attack: workers must be >= 1");
  de.validate();
}

std::size_t kept_count(double keep_rate, std::size_t population) {
  // The 1e-9 slack absorbs products like 0.2 * 100 landing a hair above 20.
  const double raw = keep_rate * static_cast<double>(population);
  return std::min(population, static_cast<std::size_t>(std::ceil(raw - 1e-9)));
}

Population reuse_candidates(Population pop, double keep_rate, RngStream& rng,
                            const CandidateObserver& observer) {
  SIGNHUNT_REQUIRE(keep_rate >= 0.0 && keep_rate <= 1.0, "reuse_candidates: KR must be in [0,1]");
  const std::size_t n = pop.size();
  const std::size_t keep = kept_count(keep_rate, n);
  if (keep < n) {
    SIGNHUNT_REQUIRE(pop.cache.has_value() && pop.fitness.size() == n,
                     "reuse_candidates: population fitness cache is not valid");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return pop.fitness[a] < pop.fitness[b]; });
    std::vector<bool> kept(n, false);
    for (std::size_t k = 0; k < keep; ++k) kept[order[k]] = true;
    const Shape shape = pop.members.front().shape();
    for (std::size_t i = 0; i < n; ++i) {
      if (kept[i]) continue;
      pop.members[i] = random_sign_tensor(shape, rng);
      if (observer) observer(pop.members[i]);
    }
  }
  pop.invalidate();
  return pop;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Committed {
  ImageTensor image;
  PredictionVector prediction;
  double fitness = 0.0;
};

void finish(AttackResult& r, const ImageTensor& original, const QueryBudget& budget,
            std::uint64_t used_at_start, Clock::time_point start) {
  r.queries = budget.used() - used_at_start;
  r.linf = linf_distance(r.adversarial, original);
  r.wall_time_s = seconds_since(start);
}

}  // namespace

AttackResult bmi_fgsm(const ImageTensor& original, const AttackConfig& config,
                      const Classifier& classifier, QueryBudget& budget, RngStream& rng,
                      const AttackHooks& hooks) {
  config.validate();
  SIGNHUNT_REQUIRE(original.in_unit_range(), "bmi_fgsm: original image outside [0,1]");
  const auto start = Clock::now();
  const std::uint64_t used_at_start = budget.used();
  const Shape shape = original.shape();
  const DEParams& de = config.de;

  Evaluator eval{classifier, budget, config.spec, config.workers, hooks.on_candidate};

  Population pop = init_population(shape, de, rng);
  if (hooks.on_candidate) {
    for (const auto& c : pop.members) hooks.on_candidate(c);
  }

  const double beta = config.permanent_step();
  double alpha = config.double_step ? config.epsilon : beta;

  AttackResult result;
  result.adversarial = original;
  ImageTensor current = original;
  std::optional<Committed> first_valid;

  auto report_step = [&](int t) {
    if (hooks.on_step) hooks.on_step(StepState{alpha, beta, t});
  };

  report_step(0);
  for (int t = 0; t < config.iterations; ++t) {
    GradientSignSearch search = approx_gradient_signs(current, std::move(pop), alpha, de, eval, rng);
    pop = std::move(search.population);
    if (search.partial) {
      result.partial = true;
      break;
    }

    // Commit: I_t + beta * x for every candidate, keep the fittest.
    std::vector<Committed> committed(pop.size());
    try {
      parallel_for(pop.size(), config.workers, [&](std::size_t i) {
        Committed& c = committed[i];
        c.image = project_linf(perturb(current, pop.members[i], beta), original, config.epsilon);
        c.prediction = classify(classifier, c.image, budget);
        c.fitness = fitness(c.prediction, config.spec);
      });
    } catch (const BudgetExceeded&) {
      result.partial = true;
      break;
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < committed.size(); ++i) {
      if (committed[i].fitness < committed[best].fitness) best = i;
    }
    Committed& next = committed[best];

    IterationRecord rec;
    rec.iteration = t + 1;
    rec.alpha = alpha;
    rec.beta = beta;
    rec.best_temp_fitness = search.best_trace.back();
    rec.step_fitness = next.fitness;
    rec.true_label_confidence = next.prediction.score(config.spec.true_label);
    rec.label = top_label(next.prediction);
    rec.adversarial = is_adversarial(next.prediction, config.spec, config.rule);
    rec.de_trace = std::move(search.best_trace);
    result.trace.push_back(std::move(rec));

    current = next.image;
    result.adversarial = current;
    result.final_label = result.trace.back().label;
    result.success = result.trace.back().adversarial;
    if (result.success && !first_valid) {
      first_valid = next;
      result.first_valid_iteration = t + 1;
    }

    pop = reuse_candidates(std::move(pop), config.keep_rate, rng, hooks.on_candidate);
    if (config.double_step) alpha = std::max(0.0, alpha - beta);
    report_step(t + 1);
    if (config.early_return && result.success) break;
  }

  if (result.partial && !result.success && first_valid) {
    result.adversarial = first_valid->image;
    result.final_label = top_label(first_valid->prediction);
    result.success = true;
  }
  if (result.success) {
    result.status = AttackStatus::kSuccess;
  } else {
    result.status = result.partial ? AttackStatus::kBudgetExhausted : AttackStatus::kFailed;
  }
  finish(result, original, budget, used_at_start, start);
  return result;
}

namespace {

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

AttackResult mi_fgsm_reference(const ImageTensor& original, const MIFGSMConfig& config,
                               const Model& model, const FitnessSpec& spec, QueryBudget& budget) {
  SIGNHUNT_REQUIRE(config.epsilon > 0.0 && config.iterations >= 1 && config.decay >= 0.0,
                   "mi_fgsm: invalid configuration");
  const auto start = Clock::now();
  const std::uint64_t used_at_start = budget.used();
  const bool targeted = spec.mode == FitnessSpec::Mode::kTargeted;
  const int loss_label = targeted ? spec.target_label : spec.true_label;
  const double step = config.epsilon / config.iterations;
  LocalClassifier view(std::shared_ptr<const Model>(&model, [](const Model*) {}));

  AttackResult result;
  result.adversarial = original;
  ImageTensor current = original;
  std::vector<double> momentum(original.size(), 0.0);
  try {
    for (int t = 0; t < config.iterations; ++t) {
      const std::vector<double> grad =
          numeric_gradient(model, current, loss_label, config.fd_step, budget);
      double l1 = 0.0;
      for (double g : grad) l1 += std::abs(g);
      for (std::size_t j = 0; j < grad.size(); ++j) {
        momentum[j] = config.decay * momentum[j] + (l1 > 0.0 ? grad[j] / l1 : 0.0);
      }
      ImageTensor next = current;
      auto d = next.mutable_data();
      for (std::size_t j = 0; j < d.size(); ++j) {
        const double dir = targeted ? -sign_of(momentum[j]) : sign_of(momentum[j]);
        d[j] = static_cast<float>(std::clamp(static_cast<double>(d[j]) + step * dir, 0.0, 1.0));
      }
      current = project_linf(std::move(next), original, config.epsilon);
      const PredictionVector pred = classify(view, current, budget);

      IterationRecord rec;
      rec.iteration = t + 1;
      rec.alpha = step;
      rec.beta = step;
      rec.step_fitness = fitness(pred, spec);
      rec.best_temp_fitness = rec.step_fitness;
      rec.true_label_confidence = pred.score(spec.true_label);
      rec.label = top_label(pred);
      rec.adversarial = is_adversarial(pred, spec, config.rule);
      result.trace.push_back(rec);

      result.adversarial = current;
      result.final_label = rec.label;
      result.success = rec.adversarial;
      if (result.success && !result.first_valid_iteration) result.first_valid_iteration = t + 1;
      if (config.early_return && result.success) break;
    }
  } catch (const BudgetExceeded&) {
    result.partial = true;
  }
  result.status = result.success ? AttackStatus::kSuccess
                                 : (result.partial ? AttackStatus::kBudgetExhausted
                                                   : AttackStatus::kFailed);
  finish(result, original, budget, used_at_start, start);
  return result;
}

AttackResult random_sign_attack(const ImageTensor& original, double epsilon, int tries,
                                const Classifier& classifier, const FitnessSpec& spec,
                                SuccessRule rule, QueryBudget& budget, RngStream& rng) {
  SIGNHUNT_REQUIRE(tries >= 1, "random_sign_attack: tries must be >= 1");
  SIGNHUNT_REQUIRE(epsilon > 0.0, "random_sign_attack: epsilon must be > 0");
  const auto start = Clock::now();
  const std::uint64_t used_at_start = budget.used();
  AttackResult result;
  result.adversarial = original;
  try {
    for (int i = 0; i < tries; ++i) {
      const ImageTensor probe = perturb(original, random_sign_tensor(original.shape(), rng), epsilon);
      const PredictionVector pred = classify(classifier, probe, budget);
      if (is_adversarial(pred, spec, rule)) {
        result.adversarial = probe;
        result.success = true;
        result.final_label = top_label(pred);
        result.first_valid_iteration = i + 1;
        break;
      }
    }
  } catch (const BudgetExceeded&) {
    result.partial = true;
  }
  result.status = result.success ? AttackStatus::kSuccess
                                 : (result.partial ? AttackStatus::kBudgetExhausted
                                                   : AttackStatus::kFailed);
  finish(result, original, budget, used_at_start, start);
  return result;
}

}  // namespace signhunt
