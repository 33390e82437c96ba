#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nurse_boa/bayes_network.hpp"
#include "nurse_boa/coverage.hpp"
#include "nurse_boa/instance.hpp"
#include "nurse_boa/rules.hpp"

namespace nurse_boa {

struct BoaConfig {
  std::size_t population_size = 140;
  std::size_t keep_count = 40;
  std::size_t max_generations = 200;
  std::vector<RuleId> rule_set = default_rule_set();
  RuleParams rule_params;
  long long w_demand = 200;
  std::uint64_t seed = 0;
  std::optional<long long> target_fitness;  // stop once best fitness <= target
};

// Throws std::invalid_argument.
void validate(const BoaConfig& cfg);

struct Individual {
  RuleString rule_string;
  Schedule schedule;
  FitnessBreakdown breakdown;

  friend bool operator==(const Individual&, const Individual&) = default;
};

struct GenerationStats {
  long long best = 0;
  double mean = 0;
  std::size_t feasible = 0;

  friend bool operator==(const GenerationStats&, const GenerationStats&) = default;
};

struct RunResult {
  Individual best;
  std::vector<GenerationStats> per_generation;  // entry 0 is the initial population
  std::size_t generations_run = 0;
  std::size_t evaluations = 0;
  std::chrono::nanoseconds wall_time{0};

  // Everything except wall_time.
  bool same_outcome(const RunResult& other) const;
};

// Called once per generation with the model learned from that generation's promising set.
using ModelObserver = std::function<void(std::size_t generation, const ProbabilityModel& model)>;

/// Roulette weights for minimisation: worst - fitness + 1 within the population.
std::vector<std::uint64_t> selection_weights(std::span<const Individual> population);

/// `count` fitness-proportional draws with replacement.
std::vector<const Individual*> select_promising(std::span<const Individual> population,
                                                std::size_t count, Rng& rng);

/// The BOA: roulette-select promising rule strings, learn the chain network from them,
/// sample offspring, keep the best keep_count of parents and offspring and fill the
/// rest of the population with offspring.
RunResult run_boa(const SchedulingInstance& inst, const BoaConfig& cfg,
                  const ModelObserver& observer = {});

/// Random search with the same budget and replacement: every rule is Random.
RunResult run_rd1(const SchedulingInstance& inst, const BoaConfig& cfg);

/// Same budget and replacement, rules drawn uniformly from the rule set without learning.
RunResult run_rd2(const SchedulingInstance& inst, const BoaConfig& cfg);

class SearchSpaceTooLarge : public std::runtime_error {
 public:
  SearchSpaceTooLarge(double size, double limit);
  double size() const { return size_; }

 private:
  double size_;
};

struct OptimumResult {
  Schedule schedule;
  FitnessBreakdown breakdown;
};

/// Exhaustive minimum over all assignments (ties -> lexicographically smallest).
OptimumResult brute_force_optimum(const SchedulingInstance& inst, long long w_demand,
                                  double limit = 1e7);

struct RuleStringOptimum {
  RuleString rules;
  Schedule schedule;
  FitnessBreakdown breakdown;
};

/// Decodes every rule string over cfg.rule_set. Stochastic rules draw from a stream
/// reseeded with cfg.seed for each string.
RuleStringOptimum brute_force_rule_strings(const SchedulingInstance& inst, const BoaConfig& cfg,
                                           double limit = 1e6);

/// `instance,seed,best,mean_final,feasible,generations,millis`
std::string result_csv_header();
std::string result_csv_row(const std::string& instance, std::uint64_t seed,
                           const RunResult& result, bool with_timing = true);

/// Runs fn(0..jobs-1) on up to `threads` workers (0 = hardware concurrency).
void parallel_for(std::size_t jobs, std::size_t threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace nurse_boa
