#include "nurse_boa/rules.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace nurse_boa {

std::string_view rule_name(RuleId rule) {
  switch (rule) {
    case RuleId::Random: return "random";
    case RuleId::KCheapest: return "kcheapest";
    case RuleId::OverallCover: return "cover";
    case RuleId::Contribution: return "contribution";
    case RuleId::HighestCover: return "highest";
    case RuleId::EnhancedContribution: return "enhanced";
  }
  return "?";
}

std::optional<RuleId> parse_rule(std::string_view name) {
  for (RuleId r : kAllRules) {
    if (rule_name(r) == name) return r;
  }
  return std::nullopt;
}

std::vector<RuleId> parse_rule_set(std::string_view list) {
  std::vector<RuleId> out;
  while (!list.empty()) {
    const auto comma = list.find(',');
    const auto token = list.substr(0, comma);
    const auto rule = parse_rule(token);
    if (!rule) throw std::invalid_argument("unknown rule '" + std::string(token) + "'");
    if (std::find(out.begin(), out.end(), *rule) != out.end()) {
      throw std::invalid_argument("rule '" + std::string(token) + "' listed twice");
    }
    out.push_back(*rule);
    if (comma == std::string_view::npos) break;
    list.remove_prefix(comma + 1);
  }
  if (out.empty()) throw std::invalid_argument("rule set is empty");
  return out;
}

std::vector<RuleId> default_rule_set() {
  return {RuleId::Random, RuleId::KCheapest, RuleId::OverallCover, RuleId::Contribution};
}

void validate(const RuleParams& params) {
  if (params.k_cheapest < 1) throw std::invalid_argument("k_cheapest must be at least 1");
  if (params.w_p < 0) throw std::invalid_argument("w_p must be non-negative");
  for (int w : params.w_grade) {
    if (w < 0) throw std::invalid_argument("grade weights must be non-negative");
  }
}

PatternIndex rule_random(const Nurse& nurse, Rng& rng) {
  return nurse.options[uniform_index(rng, nurse.options.size())].pattern;
}

PatternIndex rule_k_cheapest(const Nurse& nurse, const RuleParams& params, Rng& rng) {
  std::vector<PatternOption> pool = nurse.options;
  const auto k = std::min(pool.size(), static_cast<std::size_t>(params.k_cheapest));
  std::partial_sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k), pool.end(),
                    [](const PatternOption& a, const PatternOption& b) {
                      return a.cost != b.cost ? a.cost < b.cost : a.pattern < b.pattern;
                    });
  return pool[uniform_index(rng, k)].pattern;
}

std::optional<int> cover_grade(const Nurse& nurse, const CoverageState& state) {
  for (int s = nurse.grade; s <= kGrades; ++s) {
    if (state.short_at(s)) return s;
  }
  return std::nullopt;
}

namespace {

int cover_sum_at(const ShiftPattern& pattern, const CoverageState& state, int grade) {
  int total = 0;
  for (unsigned m = pattern.mask() & state.deficit_mask(grade); m != 0; m &= m - 1) {
    total += state.deficit(std::countr_zero(m), grade);
  }
  return total;
}

int cover_peak_at(const ShiftPattern& pattern, const CoverageState& state, int grade) {
  int peak = 0;
  for (unsigned m = pattern.mask() & state.deficit_mask(grade); m != 0; m &= m - 1) {
    peak = std::max(peak, state.deficit(std::countr_zero(m), grade));
  }
  return peak;
}

}  // namespace

int cover_value(const ShiftPattern& pattern, const Nurse& nurse, const CoverageState& state) {
  const auto grade = cover_grade(nurse, state);
  return grade ? cover_sum_at(pattern, state, *grade) : 0;
}

int peak_cover_value(const ShiftPattern& pattern, const Nurse& nurse, const CoverageState& state) {
  const auto grade = cover_grade(nurse, state);
  return grade ? cover_peak_at(pattern, state, *grade) : 0;
}

PatternIndex rule_overall_cover(const SchedulingInstance& inst, const Nurse& nurse,
                                const CoverageState& state) {
  const auto grade = cover_grade(nurse, state);
  PatternIndex best = nurse.options.front().pattern;
  int best_value = -1;
  for (const auto& opt : nurse.options) {
    const int v = grade ? cover_sum_at(inst.patterns[opt.pattern], state, *grade) : 0;
    if (v > best_value || (v == best_value && opt.pattern < best)) {
      best = opt.pattern;
      best_value = v;
    }
  }
  return best;
}

PatternIndex rule_highest_cover(const SchedulingInstance& inst, const Nurse& nurse,
                                const CoverageState& state) {
  const auto grade = cover_grade(nurse, state);
  PatternIndex best = nurse.options.front().pattern;
  int best_peak = -1;
  int best_sum = -1;
  for (const auto& opt : nurse.options) {
    const ShiftPattern& p = inst.patterns[opt.pattern];
    const int peak = grade ? cover_peak_at(p, state, *grade) : 0;
    const int sum = grade ? cover_sum_at(p, state, *grade) : 0;
    if (peak > best_peak || (peak == best_peak && sum > best_sum) ||
        (peak == best_peak && sum == best_sum && opt.pattern < best)) {
      best = opt.pattern;
      best_peak = peak;
      best_sum = sum;
    }
  }
  return best;
}

int contribution_score(const ShiftPattern& pattern, int cost, const Nurse& nurse,
                       const CoverageState& state, const RuleParams& params) {
  int score = params.w_p * (100 - cost);
  for (int s = nurse.grade; s <= kGrades; ++s) {
    score += params.w_grade[s - 1] * std::popcount(static_cast<unsigned>(
                                         pattern.mask() & state.deficit_mask(s)));
  }
  return score;
}

int enhanced_contribution_score(const ShiftPattern& pattern, int cost, const Nurse& nurse,
                                const CoverageState& state, const RuleParams& params) {
  int score = params.w_p * (100 - cost);
  for (int s = nurse.grade; s <= kGrades; ++s) {
    score += params.w_grade[s - 1] * cover_sum_at(pattern, state, s);
  }
  return score;
}

namespace {

template <typename Score>
PatternIndex first_best(const Nurse& nurse, Score&& score) {
  PatternIndex best = nurse.options.front().pattern;
  int best_score = score(nurse.options.front());
  for (std::size_t x = 1; x < nurse.options.size(); ++x) {
    const int v = score(nurse.options[x]);
    if (v > best_score) {
      best = nurse.options[x].pattern;
      best_score = v;
    }
  }
  return best;
}

}  // namespace

PatternIndex rule_contribution(const SchedulingInstance& inst, const Nurse& nurse,
                               const CoverageState& state, const RuleParams& params) {
  return first_best(nurse, [&](const PatternOption& opt) {
    return contribution_score(inst.patterns[opt.pattern], opt.cost, nurse, state, params);
  });
}

PatternIndex rule_enhanced_contribution(const SchedulingInstance& inst, const Nurse& nurse,
                                        const CoverageState& state, const RuleParams& params) {
  return first_best(nurse, [&](const PatternOption& opt) {
    return enhanced_contribution_score(inst.patterns[opt.pattern], opt.cost, nurse, state,
                                       params);
  });
}

PatternIndex apply_rule(RuleId rule, const SchedulingInstance& inst, const Nurse& nurse,
                        const CoverageState& state, const RuleParams& params, Rng& rng) {
  switch (rule) {
    case RuleId::Random: return rule_random(nurse, rng);
    case RuleId::KCheapest: return rule_k_cheapest(nurse, params, rng);
    case RuleId::OverallCover: return rule_overall_cover(inst, nurse, state);
    case RuleId::Contribution: return rule_contribution(inst, nurse, state, params);
    case RuleId::HighestCover: return rule_highest_cover(inst, nurse, state);
    case RuleId::EnhancedContribution:
      return rule_enhanced_contribution(inst, nurse, state, params);
  }
  throw std::logic_error("unknown rule id");
}

Schedule decode(const SchedulingInstance& inst, const RuleString& rules, const RuleParams& params,
                Rng& rng) {
  if (rules.size() != inst.nurses.size()) {
    throw std::invalid_argument("rule string length " + std::to_string(rules.size()) +
                                " does not match nurse count " +
                                std::to_string(inst.nurses.size()));
  }
  Schedule sched;
  sched.assignment.reserve(rules.size());
  CoverageState state = empty_state(inst);
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const Nurse& nurse = inst.nurses[i];
    const PatternIndex j = apply_rule(rules[i], inst, nurse, state, params, rng);
    state.add(inst.patterns[j], nurse.grade);
    sched.assignment.push_back(j);
  }
  return sched;
}

}  // namespace nurse_boa
