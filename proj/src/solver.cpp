#include "nurse_boa/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

namespace nurse_boa {

void validate(const BoaConfig& cfg) {
  if (cfg.population_size < 2) throw std::invalid_argument("population size must be >= 2");
  if (cfg.keep_count == 0 || cfg.keep_count >= cfg.population_size) {
    throw std::invalid_argument("keep count must satisfy 0 < keep < population size");
  }
  if (cfg.max_generations < 1) throw std::invalid_argument("max generations must be >= 1");
  if (cfg.rule_set.empty()) throw std::invalid_argument("rule set is empty");
  for (std::size_t a = 0; a < cfg.rule_set.size(); ++a) {
    for (std::size_t b = a + 1; b < cfg.rule_set.size(); ++b) {
      if (cfg.rule_set[a] == cfg.rule_set[b]) throw std::invalid_argument("duplicate rule");
    }
  }
  if (cfg.w_demand < 0) throw std::invalid_argument("w_demand must be non-negative");
  validate(cfg.rule_params);
}

bool RunResult::same_outcome(const RunResult& other) const {
  return best == other.best && per_generation == other.per_generation &&
         generations_run == other.generations_run && evaluations == other.evaluations;
}

std::vector<std::uint64_t> selection_weights(std::span<const Individual> population) {
  long long worst = population.front().breakdown.fitness;
  for (const auto& ind : population) worst = std::max(worst, ind.breakdown.fitness);
  std::vector<std::uint64_t> w;
  w.reserve(population.size());
  for (const auto& ind : population) {
    w.push_back(static_cast<std::uint64_t>(worst - ind.breakdown.fitness) + 1);
  }
  return w;
}

std::vector<const Individual*> select_promising(std::span<const Individual> population,
                                                std::size_t count, Rng& rng) {
  if (population.empty()) throw std::invalid_argument("cannot select from an empty population");
  const auto weights = selection_weights(population);
  std::vector<std::uint64_t> cumulative(weights.size());
  std::partial_sum(weights.begin(), weights.end(), cumulative.begin());
  std::vector<const Individual*> out;
  out.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    const std::uint64_t ticket = uniform_below(rng, cumulative.back());
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), ticket);
    out.push_back(&population[static_cast<std::size_t>(it - cumulative.begin())]);
  }
  return out;
}

namespace {

enum class Search { Learning, Unguided };

class Evaluator {
 public:
  Evaluator(const SchedulingInstance& inst, const BoaConfig& cfg)
      : inst_(inst), cfg_(cfg), rule_rng_(make_stream(cfg.seed, Stream::kRules)) {}

  Individual operator()(RuleString rules) {
    ++evaluations_;
    Individual ind;
    ind.schedule = decode(inst_, rules, cfg_.rule_params, rule_rng_);
    ind.breakdown = evaluate(inst_, ind.schedule, cfg_.w_demand);
    ind.rule_string = std::move(rules);
    return ind;
  }

  std::size_t evaluations() const { return evaluations_; }

 private:
  const SchedulingInstance& inst_;
  const BoaConfig& cfg_;
  Rng rule_rng_;
  std::size_t evaluations_ = 0;
};

RuleString uniform_string(const std::vector<RuleId>& rule_set, std::size_t length, Rng& rng) {
  RuleString s(length);
  for (auto& r : s) r = rule_set[uniform_index(rng, rule_set.size())];
  return s;
}

GenerationStats summarize(std::span<const Individual> population) {
  GenerationStats st;
  st.best = population.front().breakdown.fitness;
  double sum = 0;
  for (const auto& ind : population) {
    st.best = std::min(st.best, ind.breakdown.fitness);
    sum += static_cast<double>(ind.breakdown.fitness);
    if (ind.breakdown.feasible()) ++st.feasible;
  }
  st.mean = sum / static_cast<double>(population.size());
  return st;
}

// Keep the keep_count best of parents and offspring (ties favour parents, then
// earlier entries), then the remaining offspring, then the next best parents.
std::vector<Individual> replace(std::vector<Individual> parents, std::vector<Individual> offspring,
                                std::size_t keep_count, std::size_t population_size) {
  const std::size_t np = parents.size();
  std::vector<std::size_t> order(np + offspring.size());
  std::iota(order.begin(), order.end(), 0);
  auto fitness = [&](std::size_t x) {
    return x < np ? parents[x].breakdown.fitness : offspring[x - np].breakdown.fitness;
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return fitness(a) < fitness(b); });
  std::vector<bool> taken(order.size(), false);
  std::vector<Individual> next;
  next.reserve(population_size);
  auto take = [&](std::size_t x) {
    taken[x] = true;
    next.push_back(x < np ? std::move(parents[x]) : std::move(offspring[x - np]));
  };
  for (std::size_t r = 0; r < keep_count; ++r) take(order[r]);
  for (std::size_t x = np; x < order.size() && next.size() < population_size; ++x) {
    if (!taken[x]) take(x);
  }
  for (std::size_t r = 0; r < order.size() && next.size() < population_size; ++r) {
    if (!taken[order[r]]) take(order[r]);
  }
  return next;
}

RunResult run_generational(const SchedulingInstance& inst, const BoaConfig& cfg, Search search,
                           const ModelObserver& observer) {
  validate(cfg);
  const auto started = std::chrono::steady_clock::now();
  const std::size_t length = inst.nurses.size();
  Rng init_rng = make_stream(cfg.seed, Stream::kInitialization);
  Rng select_rng = make_stream(cfg.seed, Stream::kSelection);
  Rng sample_rng = make_stream(cfg.seed, Stream::kSampling);
  Evaluator eval(inst, cfg);

  RunResult result;
  std::vector<Individual> population;
  population.reserve(cfg.population_size);
  for (std::size_t n = 0; n < cfg.population_size; ++n) {
    population.push_back(eval(uniform_string(cfg.rule_set, length, init_rng)));
  }
  auto track_best = [&](std::span<const Individual> batch) {
    for (const auto& ind : batch) {
      if (result.best.rule_string.empty() ||
          ind.breakdown.fitness < result.best.breakdown.fitness) {
        result.best = ind;
      }
    }
  };
  track_best(population);
  result.per_generation.push_back(summarize(population));

  const std::size_t offspring_count = cfg.population_size - cfg.keep_count;
  for (std::size_t gen = 0; gen < cfg.max_generations; ++gen) {
    if (cfg.target_fitness && result.best.breakdown.fitness <= *cfg.target_fitness) break;
    std::vector<Individual> offspring;
    offspring.reserve(offspring_count);
    if (search == Search::Learning) {
      const auto promising = select_promising(population, cfg.keep_count, select_rng);
      CountModel counts(cfg.rule_set, length);
      for (const Individual* ind : promising) counts.add(ind->rule_string);
      const ProbabilityModel model = normalize(std::move(counts));
      if (observer) observer(gen, model);
      for (std::size_t n = 0; n < offspring_count; ++n) {
        offspring.push_back(eval(sample(model, sample_rng)));
      }
    } else {
      for (std::size_t n = 0; n < offspring_count; ++n) {
        offspring.push_back(eval(uniform_string(cfg.rule_set, length, sample_rng)));
      }
    }
    track_best(offspring);
    population = replace(std::move(population), std::move(offspring), cfg.keep_count,
                         cfg.population_size);
    result.per_generation.push_back(summarize(population));
    ++result.generations_run;
  }
  result.evaluations = eval.evaluations();
  result.wall_time = std::chrono::duration_cast<std::chrono::nanoseconds>(
      std::chrono::steady_clock::now() - started);
  return result;
}

}  // namespace

RunResult run_boa(const SchedulingInstance& inst, const BoaConfig& cfg,
                  const ModelObserver& observer) {
  return run_generational(inst, cfg, Search::Learning, observer);
}

RunResult run_rd1(const SchedulingInstance& inst, const BoaConfig& cfg) {
  BoaConfig random_only = cfg;
  random_only.rule_set = {RuleId::Random};
  return run_generational(inst, random_only, Search::Unguided, {});
}

RunResult run_rd2(const SchedulingInstance& inst, const BoaConfig& cfg) {
  return run_generational(inst, cfg, Search::Unguided, {});
}

SearchSpaceTooLarge::SearchSpaceTooLarge(double size, double limit)
    : std::runtime_error("search space of " + std::to_string(size) +
                         " candidates exceeds the limit of " + std::to_string(limit)),
      size_(size) {}

namespace {

struct OptimumSearch {
  const SchedulingInstance& inst;
  long long w_demand;
  CoverageState state;
  std::vector<PatternIndex> current;
  long long cost = 0;
  bool found = false;
  long long best_fitness = 0;
  std::vector<PatternIndex> best;

  void visit(std::size_t i) {
    if (i == inst.nurses.size()) {
      const long long f = cost + w_demand * state.undercover();
      if (!found || f < best_fitness || (f == best_fitness && current < best)) {
        found = true;
        best_fitness = f;
        best = current;
      }
      return;
    }
    const Nurse& nurse = inst.nurses[i];
    for (const auto& opt : nurse.options) {
      const ShiftPattern& p = inst.patterns[opt.pattern];
      state.add(p, nurse.grade);
      cost += opt.cost;
      current[i] = opt.pattern;
      visit(i + 1);
      cost -= opt.cost;
      state.remove(p, nurse.grade);
    }
  }
};

}  // namespace

OptimumResult brute_force_optimum(const SchedulingInstance& inst, long long w_demand,
                                  double limit) {
  double size = 1;
  for (const auto& nurse : inst.nurses) size *= static_cast<double>(nurse.options.size());
  if (size > limit) throw SearchSpaceTooLarge(size, limit);
  if (size == 0) throw std::invalid_argument("a nurse has an empty feasible set");
  OptimumSearch search{inst, w_demand, empty_state(inst),
                       std::vector<PatternIndex>(inst.nurses.size()), 0, false, 0, {}};
  search.visit(0);
  OptimumResult out;
  out.schedule.assignment = std::move(search.best);
  out.breakdown = evaluate(inst, out.schedule, w_demand);
  return out;
}

RuleStringOptimum brute_force_rule_strings(const SchedulingInstance& inst, const BoaConfig& cfg,
                                           double limit) {
  if (cfg.rule_set.empty()) throw std::invalid_argument("rule set is empty");
  const std::size_t n = inst.nurses.size();
  const double size = std::pow(static_cast<double>(cfg.rule_set.size()), static_cast<double>(n));
  if (size > limit) throw SearchSpaceTooLarge(size, limit);

  std::vector<std::size_t> digits(n, 0);
  RuleStringOptimum best;
  bool found = false;
  while (true) {
    RuleString rules(n);
    for (std::size_t i = 0; i < n; ++i) rules[i] = cfg.rule_set[digits[i]];
    Rng rng = make_stream(cfg.seed, Stream::kRules);
    Schedule sched = decode(inst, rules, cfg.rule_params, rng);
    const FitnessBreakdown fb = evaluate(inst, sched, cfg.w_demand);
    if (!found || fb.fitness < best.breakdown.fitness) {
      found = true;
      best = {std::move(rules), std::move(sched), fb};
    }
    std::size_t pos = n;
    while (pos > 0 && ++digits[pos - 1] == cfg.rule_set.size()) digits[--pos] = 0;
    if (pos == 0) break;
  }
  return best;
}

std::string result_csv_header() { return "instance,seed,best,mean_final,feasible,generations,millis"; }

std::string result_csv_row(const std::string& instance, std::uint64_t seed,
                           const RunResult& result, bool with_timing) {
  char mean[32];
  std::snprintf(mean, sizeof mean, "%.2f",
                result.per_generation.empty() ? 0.0 : result.per_generation.back().mean);
  const long long millis =
      with_timing
          ? std::chrono::duration_cast<std::chrono::milliseconds>(result.wall_time).count()
          : 0;
  return instance + ',' + std::to_string(seed) + ',' +
         std::to_string(result.best.breakdown.fitness) + ',' + mean + ',' +
         (result.best.breakdown.feasible() ? "1" : "0") + ',' +
         std::to_string(result.generations_run) + ',' + std::to_string(millis);
}

void parallel_for(std::size_t jobs, std::size_t threads,
                  const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = std::min(threads, jobs);
  if (threads <= 1) {
    for (std::size_t j = 0; j < jobs; ++j) fn(j);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> workers;
    for (std::size_t t = 0; t < threads; ++t) {
      workers.emplace_back([&] {
        for (std::size_t j = next++; j < jobs; j = next++) {
          try {
            fn(j);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace nurse_boa
