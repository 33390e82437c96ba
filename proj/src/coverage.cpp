#include "nurse_boa/coverage.hpp"

#include <string>

namespace nurse_boa {

CoverageState::CoverageState(const GradeTable& demand) {
  for (int k = 0; k < kSlots; ++k) {
    for (int s = 0; s < kGrades; ++s) {
      surplus_[k][s] = -demand[k][s];
      if (surplus_[k][s] < 0) deficit_mask_[s] |= static_cast<std::uint16_t>(1U << k);
    }
  }
}

void CoverageState::shift(const ShiftPattern& pattern, int nurse_grade, int delta) {
  for (int k = 0; k < kSlots; ++k) {
    if (!pattern.works(k)) continue;
    const auto bit = static_cast<std::uint16_t>(1U << k);
    for (int s = nurse_grade - 1; s < kGrades; ++s) {
      int& v = surplus_[k][s];
      v += delta;
      if (v < 0) {
        deficit_mask_[s] |= bit;
      } else {
        deficit_mask_[s] &= static_cast<std::uint16_t>(~bit);
      }
    }
  }
}

void CoverageState::add(const ShiftPattern& pattern, int nurse_grade) {
  shift(pattern, nurse_grade, +1);
}

void CoverageState::remove(const ShiftPattern& pattern, int nurse_grade) {
  shift(pattern, nurse_grade, -1);
}

long long CoverageState::undercover() const {
  long long total = 0;
  for (const auto& row : surplus_) {
    for (int v : row) {
      if (v < 0) total -= v;
    }
  }
  return total;
}

CoverageState empty_state(const SchedulingInstance& inst) { return CoverageState(inst.demand); }

CoverageState apply_assignment(CoverageState state, const Nurse& nurse,
                               const ShiftPattern& pattern) {
  state.add(pattern, nurse.grade);
  return state;
}

FitnessBreakdown evaluate(const SchedulingInstance& inst, const Schedule& sched,
                          long long w_demand) {
  if (sched.assignment.size() != inst.nurses.size()) {
    throw ContractViolation("schedule covers " + std::to_string(sched.assignment.size()) +
                            " nurses, instance has " + std::to_string(inst.nurses.size()));
  }
  FitnessBreakdown out;
  GradeTable cover{};
  for (std::size_t i = 0; i < inst.nurses.size(); ++i) {
    const Nurse& nurse = inst.nurses[i];
    const PatternIndex j = sched.assignment[i];
    const auto cost = nurse.cost_of(j);
    if (!cost) {
      throw ContractViolation("nurse " + std::to_string(i) + " assigned pattern " +
                              std::to_string(j) + " outside its feasible set");
    }
    out.preference_cost += *cost;
    const ShiftPattern& p = inst.patterns[j];
    for (int k = 0; k < kSlots; ++k) {
      if (!p.works(k)) continue;
      for (int s = nurse.grade; s <= kGrades; ++s) ++cover[k][s - 1];
    }
  }
  for (int k = 0; k < kSlots; ++k) {
    for (int s = 0; s < kGrades; ++s) {
      if (inst.demand[k][s] > cover[k][s]) out.undercover += inst.demand[k][s] - cover[k][s];
    }
  }
  out.fitness = out.preference_cost + w_demand * out.undercover;
  return out;
}

bool is_feasible(const SchedulingInstance& inst, const Schedule& sched) {
  return evaluate(inst, sched, 0).undercover == 0;
}

}  // namespace nurse_boa
