#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "nurse_boa/rng.hpp"
#include "nurse_boa/rules.hpp"

namespace nurse_boa {

/// Unreduced count ratio. Equality compares values, so 0/14 == 0/1.
struct Fraction {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Fraction& a, const Fraction& b) {
    const std::uint64_t ga = std::gcd(a.num, a.den);
    const std::uint64_t gb = std::gcd(b.num, b.den);
    return a.num / ga == b.num / gb && a.den / ga == b.den / gb;
  }
};

class ModelInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Edge tallies of the chain network over nurse positions. Rules are referred to by
/// their index in `rule_set()`.
class CountModel {
 public:
  CountModel(std::vector<RuleId> rule_set, std::size_t length);

  const std::vector<RuleId>& rule_set() const { return rule_set_; }
  std::size_t rule_count() const { return rule_set_.size(); }
  std::size_t length() const { return length_; }
  std::size_t training_size() const { return training_size_; }

  std::uint64_t first_count(std::size_t rule) const { return first_[rule]; }
  // Strings with `parent` at `position` and `child` at `position + 1`.
  std::uint64_t transition_count(std::size_t position, std::size_t parent,
                                 std::size_t child) const {
    return trans_[(position * rule_count() + parent) * rule_count() + child];
  }

  void add(const RuleString& rules);

  // Direct construction from tallies; first has one entry per rule, transitions
  // one rules x rules row-major block per position. Both must total the same count.
  static CountModel from_counts(std::vector<RuleId> rule_set, std::vector<std::uint64_t> first,
                                std::vector<std::vector<std::uint64_t>> transitions);

 private:
  std::size_t index_of(RuleId rule) const;

  std::vector<RuleId> rule_set_;
  std::size_t length_;
  std::size_t training_size_ = 0;
  std::vector<std::uint64_t> first_;
  std::vector<std::uint64_t> trans_;
};

/// Tallies the first rule and every consecutive rule pair of each string.
/// Throws ModelInputError on an empty list, ragged lengths or rules outside the set.
CountModel count(std::span<const RuleString> strings, std::vector<RuleId> rule_set);

/// First-position marginals and position-wise conditionals. Parents never observed at
/// a position get a flagged uniform fallback row.
class ProbabilityModel {
 public:
  explicit ProbabilityModel(CountModel counts);

  const std::vector<RuleId>& rule_set() const { return counts_.rule_set(); }
  std::size_t rule_count() const { return counts_.rule_count(); }
  std::size_t length() const { return counts_.length(); }
  const CountModel& counts() const { return counts_; }

  Fraction first(std::size_t rule) const;
  Fraction transition(std::size_t position, std::size_t parent, std::size_t child) const;
  bool is_fallback(std::size_t position, std::size_t parent) const {
    return row_totals_[position * rule_count() + parent] == 0;
  }

 private:
  CountModel counts_;
  std::vector<std::uint64_t> row_totals_;
};

ProbabilityModel normalize(CountModel counts);

/// Roulette-wheel draw of one rule per position, one rng draw each.
RuleString sample(const ProbabilityModel& model, Rng& rng);

struct ProbabilityEntry {
  std::size_t position = 0;  // nurse position of the chosen node
  int parent = -1;           // rule index at position - 1, -1 for the first nurse
  std::size_t rule = 0;
  Fraction probability;
  int gray = 0;
};

// round(255 * p), halves rounded up.
int gray_level(const Fraction& p);

/// First-position entries followed by every (position, parent, child) edge.
std::vector<ProbabilityEntry> export_probabilities(const ProbabilityModel& model);

void write_probability_csv_header(std::ostream& out);
void write_probability_csv(std::ostream& out, std::size_t generation,
                           std::span<const ProbabilityEntry> entries);

/// Plain (P2) PGM: one row per entry, one column per generation, value = gray level.
void write_probability_pgm(std::ostream& out,
                           std::span<const std::vector<ProbabilityEntry>> generations);

}  // namespace nurse_boa
