#pragma once

// Fixtures and brute-force oracles shared by the test binaries. The oracles here
// recompute quantities slot by slot from the raw instance data and never call into
// the incremental coverage code they check.

#include <array>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "nurse_boa/bayes_network.hpp"
#include "nurse_boa/coverage.hpp"
#include "nurse_boa/instance.hpp"
#include "nurse_boa/rng.hpp"
#include "nurse_boa/rules.hpp"

namespace nurse_boa::testing {

inline long long binomial(int n, int k) {
  long long num = 1, den = 1;
  for (int x = 0; x < k; ++x) {
    num *= n - x;
    den *= x + 1;
  }
  return num / den;
}

// Three-rule chain over three nurses. Rule r (1-based) is index r-1.
inline std::vector<RuleId> chain_rules() {
  return {RuleId::Random, RuleId::KCheapest, RuleId::OverallCover};
}

// Edge labels as used by the worked arithmetic: nurse1->nurse2 rows
// (10,2,3) (5,11,4) (7,5,3) and nurse2->nurse3 rows (7,9,3) (11,1,5) (10,4,0).
inline constexpr std::array<std::array<std::uint64_t, 3>, 3> kChainFirstEdges{
    {{10, 2, 3}, {5, 11, 4}, {7, 5, 3}}};
inline constexpr std::array<std::array<std::uint64_t, 3>, 3> kChainSecondEdges{
    {{7, 9, 3}, {11, 1, 5}, {10, 4, 0}}};

inline CountModel chain_edge_counts() {
  std::vector<std::uint64_t> first(3, 0);
  std::vector<std::uint64_t> e1, e2;
  for (int j = 0; j < 3; ++j) {
    for (int c = 0; c < 3; ++c) {
      first[j] += kChainFirstEdges[j][c];
      e1.push_back(kChainFirstEdges[j][c]);
      e2.push_back(kChainSecondEdges[j][c]);
    }
  }
  return CountModel::from_counts(chain_rules(), first, {e1, e2});
}

// 50 complete rule strings. Every path enters and leaves a nurse-2 node the same
// number of times, while these counts have 22/18/10 strings entering the nurse-2 nodes
// and 19/17/14 leaving them, so no 50 paths match both edge layers. This
// reconstruction reproduces the first layer exactly, keeps the third-nurse rule
// totals (28, 14, 8) and the zero edge N23->N33, and moves the 4 surplus nurse-2/rule-3
// paths' successors onto N21/N22.
inline std::vector<RuleString> chain_strings() {
  const auto rules = chain_rules();
  const std::array<std::array<int, 3>, 3> second{{{10, 9, 3}, {12, 1, 5}, {6, 4, 0}}};
  std::array<std::vector<int>, 3> successors;
  for (int j = 0; j < 3; ++j) {
    for (int c = 0; c < 3; ++c) {
      for (int n = 0; n < second[j][c]; ++n) successors[j].push_back(c);
    }
  }
  std::array<std::size_t, 3> used{};
  std::vector<RuleString> out;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      for (std::uint64_t n = 0; n < kChainFirstEdges[a][b]; ++n) {
        out.push_back({rules[a], rules[b], rules[successors[b][used[b]++]]});
      }
    }
  }
  return out;
}

inline Nurse make_nurse(int grade, std::vector<PatternOption> options) {
  Nurse n;
  n.grade = grade;
  n.options = std::move(options);
  return n;
}

// Slot-by-slot evaluation of the penalised objective.
struct NaiveFitness {
  long long preference_cost = 0;
  long long undercover = 0;
  long long fitness = 0;
};

inline NaiveFitness naive_fitness(const SchedulingInstance& inst,
                                  const std::vector<PatternIndex>& assignment, long long w) {
  NaiveFitness out;
  for (std::size_t i = 0; i < inst.nurses.size(); ++i) {
    for (const auto& opt : inst.nurses[i].options) {
      if (opt.pattern == assignment[i]) out.preference_cost += opt.cost;
    }
  }
  for (int k = 0; k < kSlots; ++k) {
    for (int s = 1; s <= kGrades; ++s) {
      long long cover = 0;
      for (std::size_t i = 0; i < inst.nurses.size(); ++i) {
        const long long q = inst.nurses[i].grade <= s ? 1 : 0;
        const long long a = inst.patterns[assignment[i]].works(k) ? 1 : 0;
        cover += q * a;
      }
      const long long shortfall = inst.demand[k][s - 1] - cover;
      if (shortfall > 0) out.undercover += shortfall;
    }
  }
  out.fitness = out.preference_cost + w * out.undercover;
  return out;
}

// Surplus table recomputed from scratch for a partial assignment of the first nurses.
inline GradeTable naive_surplus(const SchedulingInstance& inst,
                                const std::vector<PatternIndex>& partial) {
  GradeTable t{};
  for (int k = 0; k < kSlots; ++k) {
    for (int s = 1; s <= kGrades; ++s) {
      int cover = 0;
      for (std::size_t i = 0; i < partial.size(); ++i) {
        if (inst.nurses[i].grade <= s && inst.patterns[partial[i]].works(k)) ++cover;
      }
      t[k][s - 1] = cover - inst.demand[k][s - 1];
    }
  }
  return t;
}

// Contribution score written out term by term over s = 1..3 and k = 1..14.
inline long long naive_contribution(const ShiftPattern& p, int cost, int grade,
                                    const GradeTable& surplus, const RuleParams& params,
                                    bool magnitudes) {
  long long score = static_cast<long long>(params.w_p) * (100 - cost);
  for (int s = 1; s <= 3; ++s) {
    const long long q = grade <= s ? 1 : 0;
    long long inner = 0;
    for (int k = 0; k < 14; ++k) {
      const long long a = p.works(k) ? 1 : 0;
      const int sur = surplus[k][s - 1];
      const long long d = magnitudes ? (sur < 0 ? -sur : 0) : (sur < 0 ? 1 : 0);
      inner += a * d;
    }
    score += params.w_grade[s - 1] * q * inner;
  }
  return score;
}

// A random small instance: `nurses` nurses with up to `max_patterns` feasible
// patterns each over a pool of arbitrary 14-slot patterns, random demand.
inline SchedulingInstance random_small_instance(Rng& rng, int nurses, int max_patterns,
                                                int max_demand) {
  SchedulingInstance inst;
  const int pool = 4 + static_cast<int>(uniform_index(rng, 12));
  for (int j = 0; j < pool; ++j) {
    inst.patterns.emplace_back(static_cast<std::uint16_t>(uniform_below(rng, 1U << kSlots)));
  }
  for (int i = 0; i < nurses; ++i) {
    Nurse n;
    n.grade = 1 + static_cast<int>(uniform_index(rng, 3));
    const int count = 1 + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(
                                                                   std::min(max_patterns, pool))));
    std::vector<PatternIndex> ids(static_cast<std::size_t>(pool));
    for (int j = 0; j < pool; ++j) ids[j] = static_cast<PatternIndex>(j);
    for (int x = 0; x < count; ++x) {
      std::swap(ids[x], ids[x + uniform_index(rng, ids.size() - x)]);
      n.options.push_back({ids[x], static_cast<int>(uniform_index(rng, 101))});
    }
    inst.nurses.push_back(std::move(n));
  }
  for (int k = 0; k < kSlots; ++k) {
    int level = 0;
    for (int s = 0; s < kGrades; ++s) {
      level += static_cast<int>(uniform_index(rng, static_cast<std::size_t>(max_demand) + 1));
      inst.demand[k][s] = level / 2;
    }
  }
  return inst;
}

}  // namespace nurse_boa::testing
