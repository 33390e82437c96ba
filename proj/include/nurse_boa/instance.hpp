#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nurse_boa {

inline constexpr int kDaysPerWeek = 7;
inline constexpr int kSlots = 14;  // Mon..Sun days, then Mon..Sun nights
inline constexpr int kGrades = 3;  // grade 1 is the most qualified band

using PatternIndex = std::size_t;

// Coverage-style table indexed [slot][grade - 1].
using GradeTable = std::array<std::array<int, kGrades>, kSlots>;

/// A weekly shift pattern: which of the 14 day/night slots are worked.
class ShiftPattern {
 public:
  constexpr ShiftPattern() = default;
  constexpr explicit ShiftPattern(std::uint16_t mask) : mask_(mask & kFullMask) {}

  /// Parses 14 characters of '0'/'1'. Throws std::invalid_argument otherwise.
  static ShiftPattern from_string(std::string_view bits);

  constexpr bool works(int slot) const { return (mask_ >> slot) & 1U; }
  constexpr std::uint16_t mask() const { return mask_; }
  int shift_count() const;
  bool day_only() const { return (mask_ >> kDaysPerWeek) == 0; }
  bool night_only() const { return (mask_ & kDayMask) == 0; }
  std::string to_string() const;

  friend constexpr bool operator==(ShiftPattern, ShiftPattern) = default;

  static constexpr std::uint16_t kDayMask = (1U << kDaysPerWeek) - 1;
  static constexpr std::uint16_t kFullMask = (1U << kSlots) - 1;

 private:
  std::uint16_t mask_ = 0;
};

struct ContractType {
  int days_on = 5;
  int nights_on = 4;
  bool mixed_allowed = false;

  friend bool operator==(const ContractType&, const ContractType&) = default;
};

struct PatternOption {
  PatternIndex pattern = 0;
  int cost = 0;  // preference cost, 0 (perfect) .. 100 (unacceptable)

  friend bool operator==(const PatternOption&, const PatternOption&) = default;
};

/// A nurse; its position in SchedulingInstance::nurses is its id and decoding order.
/// `options` is the feasible set F(i) with a preference cost per member.
struct Nurse {
  int grade = 3;
  ContractType contract;
  std::vector<PatternOption> options;

  // Whether this nurse counts toward demand of grade band `s`.
  bool qualifies_for(int s) const { return grade <= s; }
  std::optional<int> cost_of(PatternIndex pattern) const;

  friend bool operator==(const Nurse&, const Nurse&) = default;
};

struct SchedulingInstance {
  std::vector<ShiftPattern> patterns;
  std::vector<Nurse> nurses;
  GradeTable demand{};  // R[k][s-1]: grade-s-or-better nurses required on slot k

  std::size_t nurse_count() const { return nurses.size(); }
  int demand_at(int slot, int grade) const { return demand[slot][grade - 1]; }

  friend bool operator==(const SchedulingInstance&, const SchedulingInstance&) = default;
};

class InvalidContract : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct ValidationReport {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(ValidationReport report);
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

/// All-day patterns with exactly `days_on` worked days, then all-night patterns with
/// exactly `nights_on` worked nights, each half in lexicographic order of the worked
/// slot indices. A zero count contributes no patterns.
std::vector<ShiftPattern> enumerate_patterns(int days_on, int nights_on);

/// Feasible patterns for a contract. Mixed contracts work `days_on` days and
/// `nights_on` nights in the same week (cross product of the two halves).
std::vector<ShiftPattern> enumerate_patterns(const ContractType& contract);

ValidationReport validate_instance(const SchedulingInstance& inst);

void save_instance(const SchedulingInstance& inst, std::ostream& out);
std::string save_instance(const SchedulingInstance& inst);

/// Throws ParseError on malformed input and ValidationError when the parsed
/// instance breaks an invariant.
SchedulingInstance load_instance(std::istream& in);
SchedulingInstance load_instance_file(const std::string& path);

struct ContractShare {
  ContractType contract;
  double weight = 1.0;
};

struct GeneratorSpec {
  int nurses = 25;
  std::array<double, kGrades> grade_mix{0.25, 0.35, 0.40};
  std::vector<ContractShare> contract_mix{
      {{5, 4, false}, 0.6}, {{4, 3, false}, 0.15}, {{3, 3, false}, 0.15}, {{3, 2, false}, 0.1}};
  double tightness = 0.8;  // demanded shifts as a fraction of shift supply
  std::optional<int> max_patterns_per_nurse;
};

struct GeneratedInstance {
  SchedulingInstance instance;
  std::vector<PatternIndex> planted;  // an assignment covering all demand
};

/// Synthetic ward. Demand is carved out of a randomly planted assignment, so
/// every generated instance admits at least one feasible schedule.
GeneratedInstance generate_planted_instance(const GeneratorSpec& spec, std::uint64_t seed);
SchedulingInstance generate_instance(const GeneratorSpec& spec, std::uint64_t seed);

/// Sum over nurses of the smallest shift count among their feasible patterns.
long long shift_supply(const SchedulingInstance& inst);

/// Sum over slots of the all-grades demand column.
long long total_demand(const SchedulingInstance& inst);

}  // namespace nurse_boa
