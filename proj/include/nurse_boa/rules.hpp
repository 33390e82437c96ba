#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nurse_boa/coverage.hpp"
#include "nurse_boa/instance.hpp"
#include "nurse_boa/rng.hpp"

namespace nurse_boa {

enum class RuleId : std::uint8_t {
  Random,
  KCheapest,
  OverallCover,
  Contribution,
  HighestCover,
  EnhancedContribution,
};

inline constexpr std::array kAllRules{RuleId::Random,       RuleId::KCheapest,
                                      RuleId::OverallCover, RuleId::Contribution,
                                      RuleId::HighestCover, RuleId::EnhancedContribution};

std::string_view rule_name(RuleId rule);
std::optional<RuleId> parse_rule(std::string_view name);
// Comma-separated rule names; throws std::invalid_argument on unknown or repeated names.
std::vector<RuleId> parse_rule_set(std::string_view list);

// Random, KCheapest, OverallCover, Contribution.
std::vector<RuleId> default_rule_set();

// Whether the rule draws from the rng.
constexpr bool is_stochastic(RuleId rule) {
  return rule == RuleId::Random || rule == RuleId::KCheapest;
}

struct RuleParams {
  int k_cheapest = 5;
  int w_p = 1;                          // weight of (100 - preference cost)
  std::array<int, kGrades> w_grade{8, 2, 1};  // weight of covering a grade-s shortfall

  friend bool operator==(const RuleParams&, const RuleParams&) = default;
};

void validate(const RuleParams& params);

using RuleString = std::vector<RuleId>;

PatternIndex rule_random(const Nurse& nurse, Rng& rng);

// Uniform over the k cheapest options (cost ties -> lower pattern index).
PatternIndex rule_k_cheapest(const Nurse& nurse, const RuleParams& params, Rng& rng);

// Grade band whose shortfalls a nurse of this grade should fill: the nurse's own
// band if any slot is short there, else the next lower band, and so on.
std::optional<int> cover_grade(const Nurse& nurse, const CoverageState& state);

// Sum of shortfall magnitudes on the worked slots at cover_grade.
int cover_value(const ShiftPattern& pattern, const Nurse& nurse, const CoverageState& state);

// Largest single-slot shortfall on the worked slots at cover_grade.
int peak_cover_value(const ShiftPattern& pattern, const Nurse& nurse, const CoverageState& state);

PatternIndex rule_overall_cover(const SchedulingInstance& inst, const Nurse& nurse,
                                const CoverageState& state);

int contribution_score(const ShiftPattern& pattern, int cost, const Nurse& nurse,
                       const CoverageState& state, const RuleParams& params);

// Same weighting with shortfall magnitudes in place of 0/1 shortfall indicators.
int enhanced_contribution_score(const ShiftPattern& pattern, int cost, const Nurse& nurse,
                                const CoverageState& state, const RuleParams& params);

PatternIndex rule_contribution(const SchedulingInstance& inst, const Nurse& nurse,
                               const CoverageState& state, const RuleParams& params);

PatternIndex rule_highest_cover(const SchedulingInstance& inst, const Nurse& nurse,
                                const CoverageState& state);

PatternIndex rule_enhanced_contribution(const SchedulingInstance& inst, const Nurse& nurse,
                                        const CoverageState& state, const RuleParams& params);

PatternIndex apply_rule(RuleId rule, const SchedulingInstance& inst, const Nurse& nurse,
                        const CoverageState& state, const RuleParams& params, Rng& rng);

/// Builds a schedule nurse by nurse in instance order, each rule seeing the
/// coverage left by the nurses before it.
Schedule decode(const SchedulingInstance& inst, const RuleString& rules, const RuleParams& params,
                Rng& rng);

}  // namespace nurse_boa
