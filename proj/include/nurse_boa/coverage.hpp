#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "nurse_boa/instance.hpp"

namespace nurse_boa {

/// One pattern per nurse, indices into SchedulingInstance::patterns.
struct Schedule {
  std::vector<PatternIndex> assignment;

  friend bool operator==(const Schedule&, const Schedule&) = default;
};

/// Running cover minus demand per (slot, grade band) while a schedule is built.
/// Column s counts every assigned nurse of grade s or better, mirroring q_is.
class CoverageState {
 public:
  CoverageState() = default;
  explicit CoverageState(const GradeTable& demand);

  int surplus(int slot, int grade) const { return surplus_[slot][grade - 1]; }
  int deficit(int slot, int grade) const {
    const int v = surplus_[slot][grade - 1];
    return v < 0 ? -v : 0;
  }
  // Bit k set iff slot k is still short at this grade band.
  std::uint16_t deficit_mask(int grade) const { return deficit_mask_[grade - 1]; }
  bool short_at(int grade) const { return deficit_mask_[grade - 1] != 0; }
  const GradeTable& table() const { return surplus_; }

  void add(const ShiftPattern& pattern, int nurse_grade);
  void remove(const ShiftPattern& pattern, int nurse_grade);

  // Sum of deficits over all slots and grade bands.
  long long undercover() const;

  friend bool operator==(const CoverageState&, const CoverageState&) = default;

 private:
  void shift(const ShiftPattern& pattern, int nurse_grade, int delta);

  GradeTable surplus_{};
  std::array<std::uint16_t, kGrades> deficit_mask_{};
};

struct FitnessBreakdown {
  long long preference_cost = 0;
  long long undercover = 0;
  long long fitness = 0;

  bool feasible() const { return undercover == 0; }
  friend bool operator==(const FitnessBreakdown&, const FitnessBreakdown&) = default;
};

class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

CoverageState empty_state(const SchedulingInstance& inst);

CoverageState apply_assignment(CoverageState state, const Nurse& nurse,
                               const ShiftPattern& pattern);

/// Preference cost plus w_demand times total undercover; overcover is free.
/// Throws ContractViolation when a nurse is assigned outside its feasible set.
FitnessBreakdown evaluate(const SchedulingInstance& inst, const Schedule& sched,
                          long long w_demand);

bool is_feasible(const SchedulingInstance& inst, const Schedule& sched);

}  // namespace nurse_boa
