#include "nurse_boa/instance.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "nurse_boa/rng.hpp"

namespace nurse_boa {

ShiftPattern ShiftPattern::from_string(std::string_view bits) {
  if (bits.size() != kSlots) {
    throw std::invalid_argument("shift pattern needs 14 slots, got " + std::string(bits));
  }
  std::uint16_t mask = 0;
  for (int k = 0; k < kSlots; ++k) {
    if (bits[k] == '1') {
      mask |= static_cast<std::uint16_t>(1U << k);
    } else if (bits[k] != '0') {
      throw std::invalid_argument("shift pattern slot must be 0 or 1: " + std::string(bits));
    }
  }
  return ShiftPattern{mask};
}

int ShiftPattern::shift_count() const { return std::popcount(mask_); }

std::string ShiftPattern::to_string() const {
  std::string s(kSlots, '0');
  for (int k = 0; k < kSlots; ++k) {
    if (works(k)) s[k] = '1';
  }
  return s;
}

std::optional<int> Nurse::cost_of(PatternIndex pattern) const {
  for (const auto& opt : options) {
    if (opt.pattern == pattern) return opt.cost;
  }
  return std::nullopt;
}

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

std::string ValidationReport::to_string() const {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    out += v;
  }
  return out.empty() ? "ok" : out;
}

ValidationError::ValidationError(ValidationReport report)
    : std::runtime_error("invalid instance: " + report.to_string()), report_(std::move(report)) {}

namespace {

// Masks with exactly `count` bits among the 7 positions, lexicographic in the
// ascending list of chosen positions.
std::vector<std::uint16_t> week_subsets(int count) {
  std::vector<std::uint16_t> out;
  std::vector<int> chosen(count);
  std::iota(chosen.begin(), chosen.end(), 0);
  while (true) {
    std::uint16_t mask = 0;
    for (int c : chosen) mask |= static_cast<std::uint16_t>(1U << c);
    out.push_back(mask);
    int i = count - 1;
    while (i >= 0 && chosen[i] == kDaysPerWeek - count + i) --i;
    if (i < 0) break;
    ++chosen[i];
    for (int j = i + 1; j < count; ++j) chosen[j] = chosen[j - 1] + 1;
  }
  return out;
}

void check_contract(int days_on, int nights_on) {
  if (days_on < 0 || days_on > kDaysPerWeek || nights_on < 0 || nights_on > kDaysPerWeek) {
    throw InvalidContract("contract counts must lie in 0..7");
  }
  if (days_on == 0 && nights_on == 0) {
    throw InvalidContract("contract must work at least one day or night");
  }
}

}  // namespace

std::vector<ShiftPattern> enumerate_patterns(int days_on, int nights_on) {
  check_contract(days_on, nights_on);
  std::vector<ShiftPattern> out;
  if (days_on > 0) {
    for (auto m : week_subsets(days_on)) out.emplace_back(m);
  }
  if (nights_on > 0) {
    for (auto m : week_subsets(nights_on)) {
      out.emplace_back(static_cast<std::uint16_t>(m << kDaysPerWeek));
    }
  }
  return out;
}

std::vector<ShiftPattern> enumerate_patterns(const ContractType& contract) {
  if (!contract.mixed_allowed) return enumerate_patterns(contract.days_on, contract.nights_on);
  check_contract(contract.days_on, contract.nights_on);
  if (contract.days_on == 0 || contract.nights_on == 0) {
    return enumerate_patterns(contract.days_on, contract.nights_on);
  }
  std::vector<ShiftPattern> out;
  for (auto d : week_subsets(contract.days_on)) {
    for (auto n : week_subsets(contract.nights_on)) {
      out.emplace_back(static_cast<std::uint16_t>(d | (n << kDaysPerWeek)));
    }
  }
  return out;
}

ValidationReport validate_instance(const SchedulingInstance& inst) {
  ValidationReport report;
  auto& v = report.violations;
  if (inst.nurses.empty()) v.push_back("instance has no nurses");
  for (std::size_t i = 0; i < inst.nurses.size(); ++i) {
    const Nurse& nurse = inst.nurses[i];
    const std::string who = "nurse " + std::to_string(i);
    if (nurse.grade < 1 || nurse.grade > kGrades) {
      v.push_back(who + ": grade " + std::to_string(nurse.grade) + " outside 1..3");
    }
    if (nurse.options.empty()) v.push_back(who + ": empty feasible set");
    std::vector<PatternIndex> seen;
    for (const auto& opt : nurse.options) {
      if (opt.pattern >= inst.patterns.size()) {
        v.push_back(who + ": pattern index " + std::to_string(opt.pattern) + " out of range");
      }
      if (opt.cost < 0 || opt.cost > 100) {
        v.push_back(who + ": cost " + std::to_string(opt.cost) + " for pattern " +
                    std::to_string(opt.pattern) + " outside 0..100");
      }
      if (std::find(seen.begin(), seen.end(), opt.pattern) != seen.end()) {
        v.push_back(who + ": pattern " + std::to_string(opt.pattern) + " listed twice");
      }
      seen.push_back(opt.pattern);
    }
  }
  for (int k = 0; k < kSlots; ++k) {
    for (int s = 1; s <= kGrades; ++s) {
      if (inst.demand_at(k, s) < 0) {
        v.push_back("demand at slot " + std::to_string(k) + " grade " + std::to_string(s) +
                    " is negative (" + std::to_string(inst.demand_at(k, s)) + ")");
      }
    }
  }
  return report;
}

void save_instance(const SchedulingInstance& inst, std::ostream& out) {
  out << "nurses=" << inst.nurses.size() << " patterns=" << inst.patterns.size()
      << " grades=" << kGrades << '\n';
  for (const auto& p : inst.patterns) out << "P " << p.to_string() << '\n';
  for (const auto& nurse : inst.nurses) {
    out << "N " << nurse.grade << ' ' << nurse.contract.days_on << ' '
        << nurse.contract.nights_on << ' ' << (nurse.contract.mixed_allowed ? 1 : 0) << '\n';
    out << 'F';
    for (const auto& opt : nurse.options) out << ' ' << opt.pattern << ':' << opt.cost;
    out << '\n';
  }
  for (int k = 0; k < kSlots; ++k) {
    out << "D " << k;
    for (int s = 1; s <= kGrades; ++s) out << ' ' << inst.demand_at(k, s);
    out << '\n';
  }
}

std::string save_instance(const SchedulingInstance& inst) {
  std::ostringstream os;
  save_instance(inst, os);
  return os.str();
}

namespace {

class FixtureReader {
 public:
  explicit FixtureReader(std::istream& in) : in_(in) {}

  // Next non-blank, comment-stripped line split into tokens; empty at EOF.
  std::vector<std::string> next() {
    std::string raw;
    while (std::getline(in_, raw)) {
      ++line_;
      if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
      std::istringstream ss(raw);
      std::vector<std::string> tokens;
      for (std::string t; ss >> t;) tokens.push_back(std::move(t));
      if (!tokens.empty()) return tokens;
    }
    return {};
  }

  std::vector<std::string> expect(std::string_view tag, std::size_t min_tokens,
                                  std::string_view what) {
    auto tokens = next();
    if (tokens.empty()) fail("unexpected end of file, expected " + std::string(what));
    if (tokens[0] != tag) fail("expected '" + std::string(tag) + "' line for " + std::string(what));
    if (tokens.size() < min_tokens) fail("too few fields in " + std::string(what));
    return tokens;
  }

  long long integer(std::string_view token, std::string_view field) const {
    long long value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
      fail("field " + std::string(field) + ": not an integer '" + std::string(token) + "'");
    }
    return value;
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(line_, what); }

  std::size_t line() const { return line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
};

long long header_value(FixtureReader& r, const std::string& token, std::string_view key) {
  const std::string prefix = std::string(key) + "=";
  if (token.rfind(prefix, 0) != 0) r.fail("header expects " + prefix);
  return r.integer(std::string_view(token).substr(prefix.size()), key);
}

}  // namespace

SchedulingInstance load_instance(std::istream& in) {
  FixtureReader r(in);
  auto header = r.next();
  if (header.size() != 3) r.fail("header must be 'nurses=<n> patterns=<m> grades=3'");
  const long long n = header_value(r, header[0], "nurses");
  const long long m = header_value(r, header[1], "patterns");
  if (header_value(r, header[2], "grades") != kGrades) r.fail("only grades=3 is supported");
  if (n < 0 || m < 0) r.fail("negative counts in header");

  SchedulingInstance inst;
  inst.patterns.reserve(static_cast<std::size_t>(m));
  for (long long j = 0; j < m; ++j) {
    auto t = r.expect("P", 2, "pattern " + std::to_string(j));
    try {
      inst.patterns.push_back(ShiftPattern::from_string(t[1]));
    } catch (const std::invalid_argument& e) {
      r.fail(e.what());
    }
  }
  for (long long i = 0; i < n; ++i) {
    const std::string who = "nurse " + std::to_string(i);
    auto t = r.expect("N", 5, who);
    Nurse nurse;
    nurse.grade = static_cast<int>(r.integer(t[1], "grade"));
    nurse.contract.days_on = static_cast<int>(r.integer(t[2], "contract-days"));
    nurse.contract.nights_on = static_cast<int>(r.integer(t[3], "contract-nights"));
    const auto mixed = r.integer(t[4], "mixed");
    if (mixed != 0 && mixed != 1) r.fail("field mixed must be 0 or 1");
    nurse.contract.mixed_allowed = mixed == 1;
    auto f = r.expect("F", 1, "feasible set of " + who);
    for (std::size_t x = 1; x < f.size(); ++x) {
      const auto colon = f[x].find(':');
      if (colon == std::string::npos) r.fail("feasible entry must be index:cost, got " + f[x]);
      const auto idx = r.integer(std::string_view(f[x]).substr(0, colon), "pattern-index");
      const auto cost = r.integer(std::string_view(f[x]).substr(colon + 1), "cost");
      if (idx < 0) r.fail("negative pattern index");
      nurse.options.push_back({static_cast<PatternIndex>(idx), static_cast<int>(cost)});
    }
    inst.nurses.push_back(std::move(nurse));
  }
  std::array<bool, kSlots> seen{};
  for (int d = 0; d < kSlots; ++d) {
    auto t = r.expect("D", 2 + kGrades, "demand row");
    const auto slot = r.integer(t[1], "slot");
    if (slot < 0 || slot >= kSlots) r.fail("demand slot out of range");
    if (seen[slot]) r.fail("duplicate demand slot " + std::to_string(slot));
    seen[slot] = true;
    for (int s = 0; s < kGrades; ++s) {
      inst.demand[slot][s] = static_cast<int>(r.integer(t[2 + s], "demand"));
    }
  }
  if (auto extra = r.next(); !extra.empty()) r.fail("trailing content after demand block");

  if (auto report = validate_instance(inst); !report.ok()) throw ValidationError(std::move(report));
  return inst;
}

SchedulingInstance load_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file " + path);
  return load_instance(in);
}

namespace {

template <typename Weights>
std::size_t weighted_pick(Rng& rng, const Weights& weights) {
  double total = 0;
  for (double w : weights) total += w;
  double u = uniform_unit(rng) * total;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0) continue;
    last_positive = i;
    if (u < weights[i]) return i;
    u -= weights[i];
  }
  return last_positive;
}

void check_spec(const GeneratorSpec& spec) {
  if (!(spec.tightness >= 0.0 && spec.tightness <= 1.0)) {
    throw ParameterError("tightness must lie in [0, 1]");
  }
  if (spec.nurses < 1) throw ParameterError("generator needs at least one nurse");
  if (spec.contract_mix.empty()) throw ParameterError("contract mix is empty");
  double grade_total = 0;
  for (double w : spec.grade_mix) {
    if (w < 0) throw ParameterError("grade mix weights must be non-negative");
    grade_total += w;
  }
  if (grade_total <= 0) throw ParameterError("grade mix has no positive weight");
  double contract_total = 0;
  for (const auto& c : spec.contract_mix) {
    if (c.weight < 0) throw ParameterError("contract mix weights must be non-negative");
    contract_total += c.weight;
  }
  if (contract_total <= 0) throw ParameterError("contract mix has no positive weight");
  if (spec.max_patterns_per_nurse && *spec.max_patterns_per_nurse < 1) {
    throw ParameterError("max patterns per nurse must be at least 1");
  }
}

}  // namespace

GeneratedInstance generate_planted_instance(const GeneratorSpec& spec, std::uint64_t seed) {
  check_spec(spec);
  Rng rng = make_stream(seed, Stream::kGenerator);

  SchedulingInstance inst;
  std::map<std::uint16_t, PatternIndex> index_of;
  std::vector<std::vector<PatternIndex>> contract_patterns;
  for (const auto& share : spec.contract_mix) {
    std::vector<PatternIndex> ids;
    for (auto p : enumerate_patterns(share.contract)) {
      auto [it, inserted] = index_of.emplace(p.mask(), inst.patterns.size());
      if (inserted) inst.patterns.push_back(p);
      ids.push_back(it->second);
    }
    std::sort(ids.begin(), ids.end());
    contract_patterns.push_back(std::move(ids));
  }

  std::vector<double> contract_weights;
  for (const auto& share : spec.contract_mix) contract_weights.push_back(share.weight);

  std::vector<PatternIndex> planted;
  for (int i = 0; i < spec.nurses; ++i) {
    Nurse nurse;
    nurse.grade = static_cast<int>(weighted_pick(rng, spec.grade_mix)) + 1;
    const std::size_t c = weighted_pick(rng, contract_weights);
    nurse.contract = spec.contract_mix[c].contract;
    std::vector<PatternIndex> feasible = contract_patterns[c];
    if (spec.max_patterns_per_nurse &&
        feasible.size() > static_cast<std::size_t>(*spec.max_patterns_per_nurse)) {
      // Partial Fisher-Yates, then restore ascending order.
      const auto keep = static_cast<std::size_t>(*spec.max_patterns_per_nurse);
      for (std::size_t x = 0; x < keep; ++x) {
        std::swap(feasible[x], feasible[x + uniform_index(rng, feasible.size() - x)]);
      }
      feasible.resize(keep);
      std::sort(feasible.begin(), feasible.end());
    }
    for (PatternIndex j : feasible) {
      // Low-biased preference cost: floor(100 * U^2).
      const double u = uniform_unit(rng);
      nurse.options.push_back({j, static_cast<int>(100.0 * u * u)});
    }
    planted.push_back(feasible[uniform_index(rng, feasible.size())]);
    inst.nurses.push_back(std::move(nurse));
  }

  // Ward lists run from the most to the least qualified band.
  std::vector<std::size_t> order(inst.nurses.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return inst.nurses[a].grade < inst.nurses[b].grade;
  });
  std::vector<Nurse> sorted_nurses;
  std::vector<PatternIndex> sorted_plant;
  for (std::size_t i : order) {
    sorted_nurses.push_back(std::move(inst.nurses[i]));
    sorted_plant.push_back(planted[i]);
  }
  inst.nurses = std::move(sorted_nurses);
  planted = std::move(sorted_plant);

  // Cumulative cover of the planted assignment, then scale it down to the target.
  GradeTable cover{};
  long long planted_total = 0;
  for (std::size_t i = 0; i < inst.nurses.size(); ++i) {
    const ShiftPattern& p = inst.patterns[planted[i]];
    planted_total += p.shift_count();
    for (int k = 0; k < kSlots; ++k) {
      if (!p.works(k)) continue;
      for (int s = inst.nurses[i].grade; s <= kGrades; ++s) ++cover[k][s - 1];
    }
  }
  const auto target = static_cast<long long>(
      std::llround(spec.tightness * static_cast<double>(shift_supply(inst))));
  if (planted_total > 0) {
    std::array<long long, kSlots> remainder{};
    long long assigned = 0;
    for (int k = 0; k < kSlots; ++k) {
      for (int s = 0; s < kGrades; ++s) {
        const long long scaled = target * cover[k][s];
        inst.demand[k][s] = static_cast<int>(scaled / planted_total);
        if (s == kGrades - 1) {
          remainder[k] = scaled % planted_total;
          assigned += inst.demand[k][s];
        }
      }
    }
    // Largest remainder on the all-grades column so its total hits the target.
    std::vector<int> slots(kSlots);
    std::iota(slots.begin(), slots.end(), 0);
    std::stable_sort(slots.begin(), slots.end(),
                     [&](int a, int b) { return remainder[a] > remainder[b]; });
    for (int k : slots) {
      if (assigned >= target) break;
      if (remainder[k] == 0) break;
      ++inst.demand[k][kGrades - 1];
      ++assigned;
    }
  }
  return {std::move(inst), std::move(planted)};
}

SchedulingInstance generate_instance(const GeneratorSpec& spec, std::uint64_t seed) {
  return generate_planted_instance(spec, seed).instance;
}

long long shift_supply(const SchedulingInstance& inst) {
  long long supply = 0;
  for (const auto& nurse : inst.nurses) {
    int fewest = kSlots;
    for (const auto& opt : nurse.options) {
      fewest = std::min(fewest, inst.patterns[opt.pattern].shift_count());
    }
    if (!nurse.options.empty()) supply += fewest;
  }
  return supply;
}

long long total_demand(const SchedulingInstance& inst) {
  long long total = 0;
  for (int k = 0; k < kSlots; ++k) total += inst.demand[k][kGrades - 1];
  return total;
}

}  // namespace nurse_boa
