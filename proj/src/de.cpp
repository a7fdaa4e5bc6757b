#include "signhunt/de.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "signhunt/errors.hpp"
#include "signhunt/parallel.hpp"

namespace signhunt {

void DEParams::validate() const {
  SIGNHUNT_REQUIRE(population >= 4, "DE: population must be >= 4 (mutation needs 4 distinct)");
  SIGNHUNT_REQUIRE(generations >= 0, "DE: generations must be >= 0");
  SIGNHUNT_REQUIRE(crossover >= 0.0 && crossover <= 1.0, "DE: crossover rate must be in [0,1]");
  SIGNHUNT_REQUIRE(std::isfinite(scale), "DE: scale must be finite");
}

FitnessSpec FitnessSpec::targeted(int y, int q) {
  SIGNHUNT_REQUIRE(q != y, "targeted fitness requires target != true label");
  SIGNHUNT_REQUIRE(q >= 0, "targeted fitness requires a target label");
  return {Mode::kTargeted, y, q};
}

namespace {

// Largest score over labels other than `skip`; labels the vector does not
// cover score 0, which is also the value when nothing else is present.
double max_other(const PredictionVector& pred, int skip) {
  bool any = false;
  double best = 0.0;
  for (std::size_t i = 0; i < pred.scores.size(); ++i) {
    if (static_cast<int>(i) == skip) continue;
    const double v = pred.scores[i];
    if (!any || v > best) best = v;
    any = true;
  }
  return best;
}

}  // namespace

double fitness(const PredictionVector& pred, const FitnessSpec& spec) {
  switch (spec.mode) {
    case FitnessSpec::Mode::kUntargeted:
      return pred.score(spec.true_label) - max_other(pred, spec.true_label);
    case FitnessSpec::Mode::kTargeted:
      return max_other(pred, spec.target_label) - pred.score(spec.target_label);
    case FitnessSpec::Mode::kLabelScore:
      return pred.score(spec.true_label);
  }
  return 0.0;
}

std::size_t Population::best_index() const {
  SIGNHUNT_REQUIRE(!fitness.empty(), "population has no fitness values");
  std::size_t best = 0;
  for (std::size_t i = 1; i < fitness.size(); ++i) {
    if (fitness[i] < fitness[best]) best = i;
  }
  return best;
}

Population init_population(Shape shape, const DEParams& params, RngStream& rng) {
  params.validate();
  Population pop;
  pop.members.reserve(static_cast<std::size_t>(params.population));
  for (int i = 0; i < params.population; ++i) pop.members.push_back(random_sign_tensor(shape, rng));
  return pop;
}

std::array<std::size_t, 3> draw_donors(std::size_t n, std::size_t i, RngStream& rng) {
  SIGNHUNT_REQUIRE(n >= 4 && i < n, "draw_donors: need n >= 4 and i < n");
  // Partial Fisher-Yates over {0..n-1} \ {i}.
  std::vector<std::size_t> pool;
  pool.reserve(n - 1);
  for (std::size_t k = 0; k < n; ++k) {
    if (k != i) pool.push_back(k);
  }
  std::array<std::size_t, 3> out{};
  for (std::size_t k = 0; k < 3; ++k) {
    const std::size_t j = k + rng.below(pool.size() - k);
    std::swap(pool[k], pool[j]);
    out[k] = pool[k];
  }
  return out;
}

SignCandidate mutate_from(const SignCandidate& r1, const SignCandidate& r2,
                          const SignCandidate& r3, double scale) {
  SIGNHUNT_REQUIRE(r1.shape() == r2.shape() && r2.shape() == r3.shape(), "mutate: shape mismatch");
  std::vector<float> donor(r1.size());
  for (std::size_t j = 0; j < donor.size(); ++j) {
    const double v = static_cast<double>(r1[j]) +
                     scale * (static_cast<double>(r2[j]) - static_cast<double>(r3[j]));
    donor[j] = v < 0.0 ? -1.0F : 1.0F;
  }
  return SignCandidate(r1.shape(), std::move(donor));
}

SignCandidate mutate(const Population& pop, std::size_t i, const DEParams& params,
                     RngStream& rng) {
  SIGNHUNT_REQUIRE(pop.size() >= 4, "mutate: population must have at least 4 members");
  const auto r = draw_donors(pop.size(), i, rng);
  return mutate_from(pop.members[r[0]], pop.members[r[1]], pop.members[r[2]], params.scale);
}

SignCandidate crossover(const SignCandidate& parent, const SignCandidate& mutant,
                        const DEParams& params, RngStream& rng) {
  SIGNHUNT_REQUIRE(parent.shape() == mutant.shape(), "crossover: shape mismatch");
  const std::size_t m = parent.size();
  std::vector<float> child(m);
  for (std::size_t j = 0; j < m; ++j) {
    child[j] = rng.uniform() < params.crossover ? mutant[j] : parent[j];
  }
  if (params.force_jrand && m > 0) {
    const std::size_t j = rng.below(m);
    child[j] = mutant[j];
  }
  return SignCandidate(parent.shape(), std::move(child));
}

std::vector<Evaluation> evaluate_detailed(std::span<const SignCandidate> candidates,
                                          const ImageTensor& base, double step,
                                          const Evaluator& eval) {
  SIGNHUNT_REQUIRE(step >= 0.0, "evaluate: negative step");
  std::vector<Evaluation> out(candidates.size());
  parallel_for(candidates.size(), eval.workers, [&](std::size_t i) {
    const ImageTensor probe = perturb(base, candidates[i], step);
    out[i].prediction = classify(eval.classifier, probe, eval.budget);
    out[i].fitness = fitness(out[i].prediction, eval.spec);
  });
  return out;
}

std::vector<double> evaluate(std::span<const SignCandidate> candidates, const ImageTensor& base,
                             double step, const Evaluator& eval) {
  const auto detailed = evaluate_detailed(candidates, base, step, eval);
  std::vector<double> out(detailed.size());
  for (std::size_t i = 0; i < detailed.size(); ++i) out[i] = detailed[i].fitness;
  return out;
}

Population select(const Population& parents, std::vector<SignCandidate> children,
                  const std::vector<double>& child_fitness) {
  SIGNHUNT_REQUIRE(parents.cache.has_value(), "select: parent fitness cache is stale");
  SIGNHUNT_REQUIRE(children.size() == parents.size() && child_fitness.size() == parents.size() &&
                       parents.fitness.size() == parents.size(),
                   "select: size mismatch");
  Population next;
  next.cache = parents.cache;
  next.members.reserve(parents.size());
  next.fitness.reserve(parents.size());
  for (std::size_t i = 0; i < parents.size(); ++i) {
    if (child_fitness[i] <= parents.fitness[i]) {
      next.members.push_back(std::move(children[i]));
      next.fitness.push_back(child_fitness[i]);
    } else {
      next.members.push_back(parents.members[i]);
      next.fitness.push_back(parents.fitness[i]);
    }
  }
  return next;
}

GradientSignSearch approx_gradient_signs(const ImageTensor& base, Population pop, double step,
                                         const DEParams& params, const Evaluator& eval,
                                         RngStream& rng) {
  params.validate();
  SIGNHUNT_REQUIRE(pop.size() == static_cast<std::size_t>(params.population),
                   "approx_gradient_signs: population size differs from params");
  SIGNHUNT_REQUIRE(step >= 0.0, "approx_gradient_signs: negative step");
  const FitnessKey key{base.digest(), step};

  GradientSignSearch out;
  if (!pop.cache_valid_for(key)) {
    try {
      pop.fitness = evaluate(pop.members, base, step, eval);
    } catch (const BudgetExceeded&) {
      pop.invalidate();
      out.population = std::move(pop);
      out.partial = true;
      return out;
    }
    pop.cache = key;
  }
  out.best_trace.push_back(pop.fitness[pop.best_index()]);

  for (int g = 0; g < params.generations; ++g) {
    // Serial phase: every draw for this generation.
    std::vector<SignCandidate> children;
    children.reserve(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) {
      SignCandidate donor = mutate(pop, i, params, rng);
      if (eval.observer) eval.observer(donor);
      children.push_back(crossover(pop.members[i], donor, params, rng));
      if (eval.observer) eval.observer(children.back());
    }
    std::vector<double> child_fitness;
    try {
      child_fitness = evaluate(children, base, step, eval);
    } catch (const BudgetExceeded&) {
      out.partial = true;
      break;
    }
    pop = select(pop, std::move(children), child_fitness);
    out.best_trace.push_back(pop.fitness[pop.best_index()]);
  }
  out.population = std::move(pop);
  return out;
}

}  // namespace signhunt
