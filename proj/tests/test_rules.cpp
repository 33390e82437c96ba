#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "nurse_boa/rules.hpp"
#include "support.hpp"

using namespace nurse_boa;
using nurse_boa::testing::make_nurse;

namespace {

// Night surpluses Mon..Sun at grade 3 only.
CoverageState night_state(const std::array<int, 7>& nights, int grade = 3) {
  GradeTable demand{};
  for (int d = 0; d < 7; ++d) demand[7 + d][grade - 1] = -nights[d];
  return CoverageState(demand);
}

const ShiftPattern kMonFriNights = ShiftPattern::from_string("00000001111100");
const ShiftPattern kTueSatNights = ShiftPattern::from_string("00000000111110");

// Exhaustive argmax with explicit tie policy.
template <typename Score>
PatternIndex oracle_argmax(const Nurse& nurse, Score score, bool by_pattern_index) {
  std::vector<PatternOption> opts = nurse.options;
  if (by_pattern_index) {
    std::sort(opts.begin(), opts.end(),
              [](const auto& a, const auto& b) { return a.pattern < b.pattern; });
  }
  long long best = score(opts[0]);
  PatternIndex arg = opts[0].pattern;
  for (const auto& o : opts) {
    if (score(o) > best) {
      best = score(o);
      arg = o.pattern;
    }
  }
  return arg;
}

// Cover grade recomputed from a surplus table.
int naive_cover_value(const ShiftPattern& p, int grade, const GradeTable& t) {
  for (int s = grade; s <= 3; ++s) {
    bool any = false;
    for (int k = 0; k < 14; ++k) any = any || t[k][s - 1] < 0;
    if (!any) continue;
    int v = 0;
    for (int k = 0; k < 14; ++k) {
      if (p.works(k) && t[k][s - 1] < 0) v += -t[k][s - 1];
    }
    return v;
  }
  return 0;
}

}  // namespace

TEST_CASE("rule names round-trip and rule sets parse") {
  for (RuleId r : kAllRules) CHECK(parse_rule(rule_name(r)) == r);
  CHECK_FALSE(parse_rule("nope").has_value());
  CHECK(parse_rule_set("random,cover") == std::vector{RuleId::Random, RuleId::OverallCover});
  CHECK_THROWS(parse_rule_set("random,random"));
  CHECK_THROWS(parse_rule_set("random,bogus"));
  CHECK(default_rule_set().size() == 4);
}

TEST_CASE("rule_random") {
  Rng rng{5};
  CHECK(rule_random(make_nurse(1, {{7, 50}}), rng) == 7);

  Nurse wide = make_nurse(1, {});
  for (PatternIndex j = 0; j < 56; ++j) wide.options.push_back({j, 0});
  const int draws = 10000;
  std::vector<int> hits(56, 0);
  for (int n = 0; n < draws; ++n) ++hits[rule_random(wide, rng)];
  const double p = 1.0 / 56;
  const double sigma = std::sqrt(draws * p * (1 - p));
  for (int h : hits) CHECK(std::abs(h - draws * p) < 5 * sigma);

  Rng a{99}, b{99};
  for (int n = 0; n < 20; ++n) CHECK(rule_random(wide, a) == rule_random(wide, b));
}

TEST_CASE("rule_k_cheapest") {
  Rng rng{1};
  RuleParams params;

  SUBCASE("k = 1 picks the unique minimum") {
    params.k_cheapest = 1;
    const Nurse n = make_nurse(2, {{0, 40}, {1, 3}, {2, 12}});
    for (int t = 0; t < 10; ++t) CHECK(rule_k_cheapest(n, params, rng) == 1);
  }
  SUBCASE("k beyond the feasible set uses the whole set") {
    params.k_cheapest = 10;
    const Nurse n = make_nurse(2, {{0, 40}, {1, 3}, {2, 12}});
    std::map<PatternIndex, int> hits;
    for (int t = 0; t < 3000; ++t) ++hits[rule_k_cheapest(n, params, rng)];
    CHECK(hits.size() == 3);
    for (auto [j, h] : hits) CHECK(std::abs(h - 1000) < 5 * std::sqrt(3000.0 * 2 / 9));
  }
  SUBCASE("costs {5,3,9,3,7} with k = 2 pool the two cost-3 patterns") {
    params.k_cheapest = 2;
    const Nurse n = make_nurse(1, {{0, 5}, {1, 3}, {2, 9}, {3, 3}, {4, 7}});
    // Sort-and-truncate oracle.
    auto opts = n.options;
    std::stable_sort(opts.begin(), opts.end(), [](auto& a, auto& b) {
      return a.cost != b.cost ? a.cost < b.cost : a.pattern < b.pattern;
    });
    const std::set<PatternIndex> pool{opts[0].pattern, opts[1].pattern};
    CHECK(pool == std::set<PatternIndex>{1, 3});
    std::set<PatternIndex> seen;
    for (int t = 0; t < 200; ++t) seen.insert(rule_k_cheapest(n, params, rng));
    CHECK(seen == pool);
  }
  SUBCASE("cost ties at the cut favour lower pattern indices") {
    params.k_cheapest = 2;
    const Nurse n = make_nurse(1, {{8, 1}, {5, 4}, {2, 4}, {9, 4}});
    std::set<PatternIndex> seen;
    for (int t = 0; t < 200; ++t) seen.insert(rule_k_cheapest(n, params, rng));
    CHECK(seen == std::set<PatternIndex>{8, 2});
  }
}

TEST_CASE("cover_value on the night-shortfall example") {
  const auto st = night_state({-4, 0, +1, -3, -1, -2, 0});
  const Nurse nurse = make_nurse(3, {});
  CHECK(cover_value(kMonFriNights, nurse, st) == 8);
  CHECK(cover_value(kTueSatNights, nurse, st) == 6);
  CHECK(cover_value(kMonFriNights, nurse, CoverageState{}) == 0);
}

TEST_CASE("cover_value grade cascade") {
  // Own-grade shortfall exists: lower-grade shortfalls are ignored.
  GradeTable a{}, b{};
  a[7][0] = 1;  // grade-1 demand on Monday night
  b[7][0] = 1;
  b[8][1] = 5;  // extra grade-2 and grade-3 demand only in b
  b[9][2] = 5;
  const Nurse g1 = make_nurse(1, {});
  CHECK(cover_value(kMonFriNights, g1, CoverageState(a)) ==
        cover_value(kMonFriNights, g1, CoverageState(b)));
  CHECK(cover_value(kMonFriNights, g1, CoverageState(b)) == 1);
  CHECK(cover_grade(g1, CoverageState(b)) == 1);

  // Once grade 1 is covered the next lower band counts.
  GradeTable c{};
  c[8][1] = 2;
  c[9][2] = 7;
  CHECK(cover_grade(g1, CoverageState(c)) == 2);
  CHECK(cover_value(kMonFriNights, g1, CoverageState(c)) == 2);
  // A grade-3 nurse never looks at grade-1 or grade-2 shortfalls.
  CHECK(cover_value(kMonFriNights, make_nurse(3, {}), CoverageState(c)) == 7);
  CHECK_FALSE(cover_grade(make_nurse(3, {}), CoverageState{}).has_value());
}

TEST_CASE("rule_overall_cover") {
  SchedulingInstance inst;
  inst.patterns = {kTueSatNights, kMonFriNights};
  const Nurse nurse = make_nurse(3, {{0, 0}, {1, 100}});
  CHECK(rule_overall_cover(inst, nurse, night_state({-4, 0, +1, -3, -1, -2, 0})) == 1);
  const Nurse flipped = make_nurse(3, {{1, 0}, {0, 0}});
  CHECK(rule_overall_cover(inst, flipped, CoverageState{}) == 0);  // all zero -> lowest index
}

TEST_CASE("rule_overall_cover matches an exhaustive argmax on random states") {
  Rng rng{42};
  for (int trial = 0; trial < 300; ++trial) {
    auto inst = nurse_boa::testing::random_small_instance(rng, 4, 8, 3);
    std::vector<PatternIndex> partial;
    CoverageState st = empty_state(inst);
    for (std::size_t i = 0; i + 1 < inst.nurses.size(); ++i) {
      const auto j = inst.nurses[i].options[0].pattern;
      partial.push_back(j);
      st.add(inst.patterns[j], inst.nurses[i].grade);
    }
    const auto table = nurse_boa::testing::naive_surplus(inst, partial);
    REQUIRE(table == st.table());
    const Nurse& last = inst.nurses.back();
    const auto want = oracle_argmax(
        last,
        [&](const PatternOption& o) {
          return naive_cover_value(inst.patterns[o.pattern], last.grade, table);
        },
        true);
    CHECK(rule_overall_cover(inst, last, st) == want);
  }
}

TEST_CASE("contribution_score") {
  RuleParams params;
  const Nurse g1 = make_nurse(1, {});
  const auto p = ShiftPattern::from_string("11000000000000");
  CHECK(contribution_score(p, 100, g1, CoverageState{}, params) == 0);

  GradeTable demand{};
  demand[0][0] = 1;
  demand[1][0] = 1;
  // Only the grade-1 column is short; grade-2/3 columns carry no shortfall.
  CHECK(contribution_score(p, 0, g1, CoverageState(demand), params) == 1 * 100 + 8 * 2);
}

TEST_CASE("contribution scores match term-by-term recomputation") {
  Rng rng{7};
  for (int trial = 0; trial < 300; ++trial) {
    auto inst = nurse_boa::testing::random_small_instance(rng, 3, 8, 4);
    RuleParams params;
    params.w_p = static_cast<int>(uniform_index(rng, 3));
    for (auto& w : params.w_grade) w = static_cast<int>(uniform_index(rng, 10));
    std::vector<PatternIndex> partial{inst.nurses[0].options.back().pattern};
    CoverageState st = empty_state(inst);
    st.add(inst.patterns[partial[0]], inst.nurses[0].grade);
    const auto table = nurse_boa::testing::naive_surplus(inst, partial);
    for (std::size_t i = 1; i < inst.nurses.size(); ++i) {
      const Nurse& n = inst.nurses[i];
      for (const auto& o : n.options) {
        const auto& pat = inst.patterns[o.pattern];
        CHECK(contribution_score(pat, o.cost, n, st, params) ==
              nurse_boa::testing::naive_contribution(pat, o.cost, n.grade, table, params, false));
        CHECK(enhanced_contribution_score(pat, o.cost, n, st, params) ==
              nurse_boa::testing::naive_contribution(pat, o.cost, n.grade, table, params, true));
      }
      const auto want = oracle_argmax(
          n,
          [&](const PatternOption& o) {
            return nurse_boa::testing::naive_contribution(inst.patterns[o.pattern], o.cost,
                                                          n.grade, table, params, false);
          },
          false);
      CHECK(rule_contribution(inst, n, st, params) == want);
    }
  }
}

TEST_CASE("rule_contribution tie-break is the first feasible pattern") {
  SchedulingInstance inst;
  inst.patterns = {ShiftPattern::from_string("10000000000000"),
                   ShiftPattern::from_string("01000000000000"),
                   ShiftPattern::from_string("00100000000000")};
  RuleParams params;
  // Feasible-set order 2, 0, 1, all equal scores.
  const Nurse n = make_nurse(2, {{2, 30}, {0, 30}, {1, 30}});
  CHECK(rule_contribution(inst, n, CoverageState{}, params) == 2);
  const Nurse unique = make_nurse(2, {{2, 30}, {0, 10}, {1, 30}});
  CHECK(rule_contribution(inst, unique, CoverageState{}, params) == 0);
}

TEST_CASE("rule_highest_cover") {
  SchedulingInstance inst;
  inst.patterns = {ShiftPattern::from_string("00000000001010"),   // Thu, Sat nights: 3 + 2
                   ShiftPattern::from_string("00000001000000")};  // Mon night: 4
  const auto st = night_state({-4, 0, +1, -3, -1, -2, 0});
  const Nurse n = make_nurse(3, {{0, 0}, {1, 0}});
  CHECK(rule_highest_cover(inst, n, st) == 1);
  CHECK(rule_overall_cover(inst, n, st) == 0);

  // Equal shortfalls: falls back to the larger total, then the lower index.
  const auto flat = night_state({-1, -1, -1, -1, -1, -1, -1});
  CHECK(rule_highest_cover(inst, n, flat) == 0);
  CHECK(rule_highest_cover(inst, make_nurse(3, {{1, 0}, {0, 0}}), CoverageState{}) == 0);
}

TEST_CASE("rule_enhanced_contribution") {
  RuleParams params;
  SchedulingInstance inst;
  inst.patterns = {ShiftPattern::from_string("00000001000000"),   // Mon night
                   ShiftPattern::from_string("00000000111000")};  // Tue-Thu nights
  const Nurse n = make_nurse(3, {{0, 20}, {1, 20}});

  // Shortfall 1 everywhere: identical to the 0/1 version.
  const auto ones = night_state({-1, -1, -1, -1, 0, 0, 0});
  CHECK(rule_enhanced_contribution(inst, n, ones, params) ==
        rule_contribution(inst, n, ones, params));

  // One slot short by 4 against three slots short by 1.
  const auto peaked = night_state({-4, -1, -1, -1, 0, 0, 0});
  CHECK(enhanced_contribution_score(inst.patterns[0], 20, n, peaked, params) == 80 + 4);
  CHECK(enhanced_contribution_score(inst.patterns[1], 20, n, peaked, params) == 80 + 3);
  CHECK(rule_enhanced_contribution(inst, n, peaked, params) == 0);
  CHECK(rule_contribution(inst, n, peaked, params) == 1);

  const Nurse costs = make_nurse(3, {{0, 60}, {1, 10}});
  CHECK(rule_enhanced_contribution(inst, costs, CoverageState{}, params) == 1);
}

TEST_CASE("decode") {
  SchedulingInstance inst;
  inst.patterns = {ShiftPattern::from_string("11100000000000"),   // P0 Mon-Wed days
                   ShiftPattern::from_string("00011100000000"),   // P1 Thu-Sat days
                   ShiftPattern::from_string("00000001100000"),   // P2 Mon-Tue nights
                   ShiftPattern::from_string("00000010000001")};  // P3 Sun day + Sun night
  inst.nurses = {make_nurse(1, {{0, 40}, {1, 10}, {2, 0}}),
                 make_nurse(2, {{0, 5}, {1, 5}, {3, 90}}),
                 make_nurse(3, {{2, 20}, {3, 1}})};
  inst.demand[0] = {1, 1, 1};
  inst.demand[1] = {0, 1, 1};
  inst.demand[4] = {0, 0, 2};
  inst.demand[13] = {0, 0, 1};
  inst.demand[7] = {0, 1, 1};
  RuleParams params;
  params.k_cheapest = 1;

  SUBCASE("hand trace of a mixed string") {
    // Nurse 0, cover: grade-1 short only on Monday day -> P0.
    // Nurse 1, contribution: P0 95, P1 95 + 1 (Fri day grade 3), P3 10 + 1 -> P1.
    // Nurse 2, 1-cheapest -> P3.
    Rng rng{0};
    const auto sched =
        decode(inst, {RuleId::OverallCover, RuleId::Contribution, RuleId::KCheapest}, params, rng);
    CHECK(sched.assignment == std::vector<PatternIndex>{0, 1, 3});
  }
  SUBCASE("1-cheapest everywhere gives each nurse its cheapest pattern") {
    Rng rng{3};
    const auto sched =
        decode(inst, RuleString(3, RuleId::KCheapest), params, rng);
    CHECK(sched.assignment == std::vector<PatternIndex>{2, 0, 3});
  }
  SUBCASE("all-random decoding replays under a fixed seed") {
    Rng a{17}, b{17};
    const RuleString rules(3, RuleId::Random);
    for (int t = 0; t < 10; ++t) CHECK(decode(inst, rules, params, a) == decode(inst, rules, params, b));
  }
  SUBCASE("deterministic strings ignore the seed and leave the rng untouched") {
    const RuleString rules{RuleId::Contribution, RuleId::OverallCover, RuleId::HighestCover};
    Rng a{1}, b{2};
    CHECK(decode(inst, rules, params, a) == decode(inst, rules, params, b));
    CHECK((a == Rng{1}));
  }
  SUBCASE("length mismatch is rejected") {
    Rng rng{0};
    CHECK_THROWS_AS(decode(inst, RuleString(2, RuleId::Random), params, rng),
                    std::invalid_argument);
  }
}

TEST_CASE("rule params validation") {
  RuleParams p;
  CHECK_NOTHROW(validate(p));
  p.k_cheapest = 0;
  CHECK_THROWS(validate(p));
  p = {};
  p.w_grade[1] = -1;
  CHECK_THROWS(validate(p));
}
