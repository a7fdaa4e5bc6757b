#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "signhunt/model.hpp"
#include "signhunt/rng.hpp"
#include "signhunt/tensor.hpp"

namespace signhunt {

struct DEParams {
  int population = 100;       // N
  int generations = 50;       // G
  double scale = 1.0;         // DR, differential scaling factor
  double crossover = 0.9;     // CR
  bool force_jrand = false;   // classic DE/rand/1/bin: one position always from the mutant

  void validate() const;
};

// What the attack is trying to achieve, expressed as a fitness to minimize.
//   untargeted:   F_y - max_{i != y} F_i
//   targeted:     max_{i != q} F_i - F_q
//   label score:  F_y (used against services that report only a few labels)
struct FitnessSpec {
  enum class Mode { kUntargeted, kTargeted, kLabelScore };

  Mode mode = Mode::kUntargeted;
  int true_label = 0;
  int target_label = -1;

  static FitnessSpec untargeted(int y) { return {Mode::kUntargeted, y, -1}; }
  static FitnessSpec targeted(int y, int q);
  static FitnessSpec label_score(int y) { return {Mode::kLabelScore, y, -1}; }
};

double fitness(const PredictionVector& pred, const FitnessSpec& spec);

// Identifies the (base image, exploration step) pair a fitness cache belongs to.
struct FitnessKey {
  std::uint64_t base_digest = 0;
  double step = 0.0;
  friend bool operator==(const FitnessKey&, const FitnessKey&) = default;
};

struct Population {
  std::vector<SignCandidate> members;
  std::vector<double> fitness;
  std::optional<FitnessKey> cache;  // empty: fitness must be recomputed

  std::size_t size() const { return members.size(); }
  bool cache_valid_for(const FitnessKey& key) const { return cache && *cache == key; }
  void invalidate() { cache.reset(); }
  // Index of the lowest cached fitness; ties go to the lowest index.
  std::size_t best_index() const;
};

using CandidateObserver = std::function<void(const SignCandidate&)>;

// Everything needed to turn candidates into fitness values.
struct Evaluator {
  const Classifier& classifier;
  QueryBudget& budget;
  FitnessSpec spec;
  int workers = 1;
  // Called (serially) on every candidate produced by init/mutation/crossover.
  CandidateObserver observer;
};

struct Evaluation {
  double fitness = 0.0;
  PredictionVector prediction;
};

Population init_population(Shape shape, const DEParams& params, RngStream& rng);

// Donor sign(x_r1 + DR * (x_r2 - x_r3)) with i, r1, r2, r3 pairwise distinct;
// sign(0) is +1.
SignCandidate mutate(const Population& pop, std::size_t i, const DEParams& params,
                     RngStream& rng);
// Same arithmetic with explicit donors, for callers that drew indices already.
SignCandidate mutate_from(const SignCandidate& r1, const SignCandidate& r2,
                          const SignCandidate& r3, double scale);
// Draws r1, r2, r3 uniformly without replacement from {0..n-1} \ {i}.
std::array<std::size_t, 3> draw_donors(std::size_t n, std::size_t i, RngStream& rng);

// Binomial crossover: position j takes the mutant value when a fresh uniform
// draw is below CR.
SignCandidate crossover(const SignCandidate& parent, const SignCandidate& mutant,
                        const DEParams& params, RngStream& rng);

// Fitness of clip(base + step * c) for every candidate; one query each.
// Results are independent of worker count. BudgetExceeded propagates and the
// partial batch is discarded.
std::vector<Evaluation> evaluate_detailed(std::span<const SignCandidate> candidates,
                                          const ImageTensor& base, double step,
                                          const Evaluator& eval);
std::vector<double> evaluate(std::span<const SignCandidate> candidates, const ImageTensor& base,
                             double step, const Evaluator& eval);

// Per-position greedy replacement; a child wins ties.
Population select(const Population& parents, std::vector<SignCandidate> children,
                  const std::vector<double>& child_fitness);

struct GradientSignSearch {
  Population population;
  // Best fitness after initial evaluation, then after every generation.
  std::vector<double> best_trace;
  bool partial = false;  // stopped early on BudgetExceeded
};

// Runs G rounds of mutate -> crossover -> evaluate -> select around a fixed
// base image at exploration step `step`. The initial population is evaluated
// only when its cache does not match (base, step). All random draws for a
// generation happen before its evaluations start.
GradientSignSearch approx_gradient_signs(const ImageTensor& base, Population pop, double step,
                                         const DEParams& params, const Evaluator& eval,
                                         RngStream& rng);

}  // namespace signhunt
