#include "nurse_boa/bayes_network.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <string>

namespace nurse_boa {

CountModel::CountModel(std::vector<RuleId> rule_set, std::size_t length)
    : rule_set_(std::move(rule_set)), length_(length) {
  if (rule_set_.empty()) throw ModelInputError("rule set is empty");
  if (length_ == 0) throw ModelInputError("rule strings must have length >= 1");
  first_.assign(rule_count(), 0);
  trans_.assign((length_ - 1) * rule_count() * rule_count(), 0);
}

std::size_t CountModel::index_of(RuleId rule) const {
  const auto it = std::find(rule_set_.begin(), rule_set_.end(), rule);
  if (it == rule_set_.end()) {
    throw ModelInputError("rule '" + std::string(rule_name(rule)) + "' is not in the rule set");
  }
  return static_cast<std::size_t>(it - rule_set_.begin());
}

void CountModel::add(const RuleString& rules) {
  if (rules.size() != length_) {
    throw ModelInputError("rule string of length " + std::to_string(rules.size()) +
                          ", expected " + std::to_string(length_));
  }
  std::size_t prev = index_of(rules[0]);
  ++first_[prev];
  for (std::size_t i = 1; i < rules.size(); ++i) {
    const std::size_t cur = index_of(rules[i]);
    ++trans_[((i - 1) * rule_count() + prev) * rule_count() + cur];
    prev = cur;
  }
  ++training_size_;
}

CountModel CountModel::from_counts(std::vector<RuleId> rule_set, std::vector<std::uint64_t> first,
                                   std::vector<std::vector<std::uint64_t>> transitions) {
  CountModel m(std::move(rule_set), transitions.size() + 1);
  const std::size_t r = m.rule_count();
  if (first.size() != r) throw ModelInputError("first counts need one entry per rule");
  std::uint64_t total = 0;
  for (auto c : first) total += c;
  if (total == 0) throw ModelInputError("counts describe no training strings");
  m.first_ = std::move(first);
  for (std::size_t i = 0; i < transitions.size(); ++i) {
    if (transitions[i].size() != r * r) {
      throw ModelInputError("transition block needs rules x rules entries");
    }
    std::uint64_t block = 0;
    for (auto c : transitions[i]) block += c;
    if (block != total) {
      throw ModelInputError("transition counts at position " + std::to_string(i) + " total " +
                            std::to_string(block) + ", first counts total " +
                            std::to_string(total));
    }
    std::copy(transitions[i].begin(), transitions[i].end(),
              m.trans_.begin() + static_cast<std::ptrdiff_t>(i * r * r));
  }
  m.training_size_ = total;
  return m;
}

CountModel count(std::span<const RuleString> strings, std::vector<RuleId> rule_set) {
  if (strings.empty()) throw ModelInputError("no training strings");
  CountModel m(std::move(rule_set), strings.front().size());
  for (const auto& s : strings) m.add(s);
  return m;
}

ProbabilityModel::ProbabilityModel(CountModel counts) : counts_(std::move(counts)) {
  const std::size_t r = rule_count();
  row_totals_.assign((length() - 1) * r, 0);
  for (std::size_t i = 0; i + 1 < length(); ++i) {
    for (std::size_t j = 0; j < r; ++j) {
      std::uint64_t total = 0;
      for (std::size_t c = 0; c < r; ++c) total += counts_.transition_count(i, j, c);
      row_totals_[i * r + j] = total;
    }
  }
}

Fraction ProbabilityModel::first(std::size_t rule) const {
  return {counts_.first_count(rule), counts_.training_size()};
}

Fraction ProbabilityModel::transition(std::size_t position, std::size_t parent,
                                      std::size_t child) const {
  const std::uint64_t total = row_totals_[position * rule_count() + parent];
  if (total == 0) return {1, rule_count()};
  return {counts_.transition_count(position, parent, child), total};
}

ProbabilityModel normalize(CountModel counts) { return ProbabilityModel(std::move(counts)); }

namespace {

template <typename Weight>
std::size_t spin(Rng& rng, std::uint64_t total, std::size_t n, Weight&& weight) {
  std::uint64_t ticket = uniform_below(rng, total);
  for (std::size_t j = 0; j < n; ++j) {
    const std::uint64_t w = weight(j);
    if (ticket < w) return j;
    ticket -= w;
  }
  return n - 1;  // unreachable: weights sum to total
}

}  // namespace

RuleString sample(const ProbabilityModel& model, Rng& rng) {
  const std::size_t r = model.rule_count();
  const CountModel& counts = model.counts();
  RuleString out;
  out.reserve(model.length());
  std::size_t prev = spin(rng, counts.training_size(), r,
                          [&](std::size_t j) { return counts.first_count(j); });
  out.push_back(model.rule_set()[prev]);
  for (std::size_t i = 0; i + 1 < model.length(); ++i) {
    std::size_t next = 0;
    if (model.is_fallback(i, prev)) {
      next = uniform_index(rng, r);
    } else {
      const std::uint64_t total = model.transition(i, prev, 0).den;
      next = spin(rng, total, r,
                  [&](std::size_t c) { return counts.transition_count(i, prev, c); });
    }
    out.push_back(model.rule_set()[next]);
    prev = next;
  }
  return out;
}

int gray_level(const Fraction& p) {
  return static_cast<int>((510 * p.num + p.den) / (2 * p.den));
}

std::vector<ProbabilityEntry> export_probabilities(const ProbabilityModel& model) {
  const std::size_t r = model.rule_count();
  std::vector<ProbabilityEntry> out;
  out.reserve(r + (model.length() - 1) * r * r);
  for (std::size_t j = 0; j < r; ++j) {
    const Fraction p = model.first(j);
    out.push_back({0, -1, j, p, gray_level(p)});
  }
  for (std::size_t i = 0; i + 1 < model.length(); ++i) {
    for (std::size_t j = 0; j < r; ++j) {
      for (std::size_t c = 0; c < r; ++c) {
        const Fraction p = model.transition(i, j, c);
        out.push_back({i + 1, static_cast<int>(j), c, p, gray_level(p)});
      }
    }
  }
  return out;
}

void write_probability_csv_header(std::ostream& out) {
  out << "generation,position,parent_rule,rule,count_num,count_den,prob,gray\n";
}

void write_probability_csv(std::ostream& out, std::size_t generation,
                           std::span<const ProbabilityEntry> entries) {
  char prob[32];
  for (const auto& e : entries) {
    std::snprintf(prob, sizeof prob, "%.6f", e.probability.value());
    out << generation << ',' << e.position << ',' << e.parent << ',' << e.rule << ','
        << e.probability.num << ',' << e.probability.den << ',' << prob << ',' << e.gray << '\n';
  }
}

void write_probability_pgm(std::ostream& out,
                           std::span<const std::vector<ProbabilityEntry>> generations) {
  const std::size_t rows = generations.empty() ? 0 : generations.front().size();
  out << "P2\n" << generations.size() << ' ' << rows << "\n255\n";
  for (std::size_t row = 0; row < rows; ++row) {
    for (std::size_t g = 0; g < generations.size(); ++g) {
      if (g > 0) out << ' ';
      out << generations[g][row].gray;
    }
    out << '\n';
  }
}

}  // namespace nurse_boa
