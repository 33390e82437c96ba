#include "nurse_boa/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "nurse_boa/bayes_network.hpp"
#include "nurse_boa/instance.hpp"
#include "nurse_boa/solver.hpp"

namespace nurse_boa::cli {
namespace fs = std::filesystem;

namespace {

struct Options {
  // instance sources
  std::vector<std::string> instance_paths;
  std::size_t generate_count = 0;
  int nurses = 25;
  double tightness = 0.8;
  std::uint64_t gen_seed = 1;
  std::optional<int> max_patterns;
  std::string grade_mix;

  // algorithm
  std::string algo = "boa";
  std::size_t runs = 20;
  std::uint64_t seed = 1;
  std::size_t pop = 140;
  std::size_t keep = 40;
  std::size_t gens = 200;
  int k = 5;
  long long wdemand = 200;
  std::string rules;
  std::optional<long long> target;
  std::size_t threads = 0;

  // output
  bool trace = false;
  bool no_timing = false;
  std::string out;
  std::string reference;
};

struct NamedInstance {
  std::string name;
  SchedulingInstance instance;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

GeneratorSpec generator_spec(const Options& o) {
  GeneratorSpec spec;
  spec.nurses = o.nurses;
  spec.tightness = o.tightness;
  spec.max_patterns_per_nurse = o.max_patterns;
  if (!o.grade_mix.empty()) {
    std::stringstream ss(o.grade_mix);
    std::string part;
    for (int g = 0; g < kGrades; ++g) {
      if (!std::getline(ss, part, ',')) throw UsageError("--grade-mix needs three weights");
      spec.grade_mix[g] = std::stod(part);
    }
  }
  return spec;
}

BoaConfig boa_config(const Options& o) {
  BoaConfig cfg;
  cfg.population_size = o.pop;
  cfg.keep_count = o.keep;
  cfg.max_generations = o.gens;
  cfg.rule_params.k_cheapest = o.k;
  cfg.w_demand = o.wdemand;
  cfg.target_fitness = o.target;
  if (!o.rules.empty()) {
    try {
      cfg.rule_set = parse_rule_set(o.rules);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  try {
    validate(cfg);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

std::string format_fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

// Loads every requested instance; failures are reported and counted.
std::vector<NamedInstance> collect_instances(const Options& o, std::ostream& err,
                                             std::size_t& failures) {
  std::vector<NamedInstance> out;
  for (const auto& path : o.instance_paths) {
    try {
      out.push_back({fs::path(path).stem().string(), load_instance_file(path)});
    } catch (const std::exception& e) {
      err << "warning: skipping " << path << ": " << e.what() << '\n';
      ++failures;
    }
  }
  if (o.generate_count > 0) {
    const GeneratorSpec spec = generator_spec(o);
    for (std::size_t g = 0; g < o.generate_count; ++g) {
      const std::uint64_t s = o.gen_seed + g;
      out.push_back({"gen-n" + std::to_string(o.nurses) + "-s" + std::to_string(s),
                     generate_instance(spec, s)});
    }
  }
  return out;
}

std::map<std::string, long long> read_reference(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open reference file " + path);
  std::map<std::string, long long> out;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      if (line.rfind("instance,", 0) == 0) continue;
    }
    std::stringstream ss(line);
    std::string name, value;
    if (!std::getline(ss, name, ',') || !std::getline(ss, value, ',')) {
      throw std::runtime_error("malformed reference line: " + line);
    }
    out[name] = std::stoll(value);
  }
  return out;
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory " + dir + ": " + ec.message());
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  return f;
}

RunResult oracle_as_result(const SchedulingInstance& inst, long long w_demand) {
  const auto started = std::chrono::steady_clock::now();
  const OptimumResult opt = brute_force_optimum(inst, w_demand);
  RunResult r;
  r.best.schedule = opt.schedule;
  r.best.breakdown = opt.breakdown;
  r.per_generation.push_back(
      {opt.breakdown.fitness, static_cast<double>(opt.breakdown.fitness),
       opt.breakdown.feasible() ? std::size_t{1} : std::size_t{0}});
  r.evaluations = 1;
  r.wall_time = std::chrono::duration_cast<std::chrono::nanoseconds>(
      std::chrono::steady_clock::now() - started);
  return r;
}

int cmd_generate(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.out.empty()) throw UsageError("generate needs --out <path>");
  const GeneratorSpec spec = generator_spec(o);
  SchedulingInstance inst;
  try {
    inst = generate_instance(spec, o.seed);
  } catch (const ParameterError& e) {
    throw UsageError(e.what());
  }
  std::ofstream f(o.out);
  if (!f) {
    err << "error: cannot write " << o.out << '\n';
    return kExitFailure;
  }
  save_instance(inst, f);
  f.flush();
  if (!f) {
    err << "error: write to " << o.out << " failed\n";
    return kExitFailure;
  }
  out << "wrote " << o.out << ": nurses=" << inst.nurses.size()
      << " patterns=" << inst.patterns.size() << " supply=" << shift_supply(inst)
      << " demand=" << total_demand(inst) << '\n';
  return kExitOk;
}

int cmd_solve(const Options& o, std::ostream& out, std::ostream& err) {
  static const std::vector<std::string> algos{"boa", "rd1", "rd2", "oracle"};
  if (std::find(algos.begin(), algos.end(), o.algo) == algos.end()) {
    throw UsageError("unknown --algo " + o.algo);
  }
  if (o.runs < 1) throw UsageError("--runs must be at least 1");
  const BoaConfig base = boa_config(o);
  std::size_t failures = 0;
  const auto instances = collect_instances(o, err, failures);
  if (instances.empty()) {
    err << "error: no instance could be loaded\n";
    return kExitFailure;
  }
  std::map<std::string, long long> reference;
  if (!o.reference.empty()) reference = read_reference(o.reference);

  const std::size_t runs = o.algo == "oracle" ? 1 : o.runs;
  const std::size_t jobs = instances.size() * runs;
  std::vector<std::optional<RunResult>> results(jobs);
  std::vector<std::string> job_errors(jobs);
  parallel_for(jobs, o.threads, [&](std::size_t job) {
    const auto& inst = instances[job / runs].instance;
    BoaConfig cfg = base;
    cfg.seed = o.seed + job % runs;
    try {
      if (o.algo == "boa") {
        results[job] = run_boa(inst, cfg);
      } else if (o.algo == "rd1") {
        results[job] = run_rd1(inst, cfg);
      } else if (o.algo == "rd2") {
        results[job] = run_rd2(inst, cfg);
      } else {
        results[job] = oracle_as_result(inst, cfg.w_demand);
      }
    } catch (const std::exception& e) {
      job_errors[job] = e.what();
    }
  });

  std::ostringstream rows;
  rows << result_csv_header() << '\n';
  std::ostringstream summary;
  summary << "instance,runs,Best,Mean,Fea,#,<=3\n";
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& name = instances[i].name;
    long long best = 0;
    double sum = 0;
    std::size_t done = 0, feasible = 0, hits = 0, near = 0;
    const auto ref = reference.find(name);
    for (std::size_t r = 0; r < runs; ++r) {
      const std::size_t job = i * runs + r;
      const std::uint64_t seed = o.seed + r;
      if (!results[job]) {
        err << "error: " << name << " seed " << seed << ": " << job_errors[job] << '\n';
        ++failures;
        continue;
      }
      const RunResult& res = *results[job];
      rows << result_csv_row(name, o.algo == "oracle" ? 0 : seed, res, !o.no_timing) << '\n';
      const long long f = res.best.breakdown.fitness;
      best = done == 0 ? f : std::min(best, f);
      sum += static_cast<double>(f);
      ++done;
      if (res.best.breakdown.feasible()) ++feasible;
      if (ref != reference.end()) {
        if (f == ref->second) ++hits;
        if (f <= ref->second + 3) ++near;
      }
      if (o.trace && !o.out.empty()) {
        ensure_directory((fs::path(o.out) / "trace").string());
        auto tf = open_output(fs::path(o.out) / "trace" /
                              (name + "_" + std::to_string(seed) + ".csv"));
        tf << "generation,best,mean,feasible\n";
        for (std::size_t g = 0; g < res.per_generation.size(); ++g) {
          const auto& st = res.per_generation[g];
          tf << g << ',' << st.best << ',' << format_fixed(st.mean) << ',' << st.feasible << '\n';
        }
      }
    }
    if (done == 0) continue;
    summary << name << ',' << done << ',' << best << ','
            << format_fixed(sum / static_cast<double>(done)) << ',' << feasible << ',';
    if (ref != reference.end()) summary << hits << ',' << near;
    else summary << ',';
    summary << '\n';
  }

  if (o.out.empty()) {
    out << rows.str();
    err << summary.str();
  } else {
    ensure_directory(o.out);
    open_output(fs::path(o.out) / "results.csv") << rows.str();
    open_output(fs::path(o.out) / "summary.csv") << summary.str();
    out << summary.str();
  }
  if (o.trace && o.out.empty()) err << "warning: --trace needs --out <dir>; no traces written\n";
  return failures == 0 ? kExitOk : kExitFailure;
}

int cmd_oracle(const Options& o, std::ostream& out, std::ostream& err) {
  std::size_t failures = 0;
  const auto instances = collect_instances(o, err, failures);
  if (instances.empty()) {
    err << "error: no instance could be loaded\n";
    return kExitFailure;
  }
  std::ostringstream csv;
  csv << "instance,optimum,preference_cost,undercover,feasible,assignment\n";
  for (const auto& [name, inst] : instances) {
    try {
      const OptimumResult opt = brute_force_optimum(inst, o.wdemand);
      csv << name << ',' << opt.breakdown.fitness << ',' << opt.breakdown.preference_cost << ','
          << opt.breakdown.undercover << ',' << (opt.breakdown.feasible() ? 1 : 0) << ',';
      for (std::size_t i = 0; i < opt.schedule.assignment.size(); ++i) {
        if (i > 0) csv << ' ';
        csv << opt.schedule.assignment[i];
      }
      csv << '\n';
    } catch (const std::exception& e) {
      err << "error: " << name << ": " << e.what() << '\n';
      ++failures;
    }
  }
  if (o.out.empty()) {
    out << csv.str();
  } else {
    open_output(o.out) << csv.str();
  }
  return failures == 0 ? kExitOk : kExitFailure;
}

int cmd_dump_probs(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.algo != "boa") throw UsageError("dump-probs requires --algo boa");
  BoaConfig cfg = boa_config(o);
  cfg.seed = o.seed;
  std::size_t failures = 0;
  const auto instances = collect_instances(o, err, failures);
  if (instances.empty()) {
    err << "error: no instance could be loaded\n";
    return kExitFailure;
  }
  const std::string dir = o.out.empty() ? std::string(".") : o.out;
  ensure_directory(dir);
  for (const auto& [name, inst] : instances) {
    std::vector<std::vector<ProbabilityEntry>> generations;
    const RunResult result = run_boa(inst, cfg, [&](std::size_t, const ProbabilityModel& model) {
      generations.push_back(export_probabilities(model));
    });
    auto csv = open_output(fs::path(dir) / (name + "_probs.csv"));
    write_probability_csv_header(csv);
    for (std::size_t g = 0; g < generations.size(); ++g) {
      write_probability_csv(csv, g, generations[g]);
    }
    auto pgm = open_output(fs::path(dir) / (name + "_probs.pgm"));
    write_probability_pgm(pgm, generations);
    out << name << ": generations=" << generations.size()
        << " best=" << result.best.breakdown.fitness
        << " feasible=" << (result.best.breakdown.feasible() ? 1 : 0) << '\n';
  }
  return failures == 0 ? kExitOk : kExitFailure;
}

// Splices `key = value` lines from --config files in front of the command-line flags,
// so explicit flags (parsed later, last one wins) override the file.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> cleaned;
  std::vector<std::string> from_file;
  for (std::size_t a = 0; a < args.size(); ++a) {
    std::string path;
    if (args[a] == "--config") {
      if (a + 1 >= args.size()) throw UsageError("--config needs a path");
      path = args[++a];
    } else if (args[a].rfind("--config=", 0) == 0) {
      path = args[a].substr(9);
    } else {
      cleaned.push_back(args[a]);
      continue;
    }
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file " + path);
    std::string line;
    while (std::getline(in, line)) {
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      const auto eq = line.find('=');
      auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
      };
      const std::string key = trim(eq == std::string::npos ? line : line.substr(0, eq));
      if (key.empty()) continue;
      const std::string value = eq == std::string::npos ? "" : trim(line.substr(eq + 1));
      if (key == "trace" || key == "no-timing") {
        if (value.empty() || value == "1" || value == "true") from_file.push_back("--" + key);
      } else {
        from_file.push_back("--" + key);
        from_file.push_back(value);
      }
    }
  }
  if (from_file.empty() || cleaned.empty()) return cleaned;
  std::vector<std::string> out{cleaned.front()};
  out.insert(out.end(), from_file.begin(), from_file.end());
  out.insert(out.end(), cleaned.begin() + 1, cleaned.end());
  return out;
}

void add_instance_sources(CLI::App* cmd, Options& o) {
  cmd->add_option("instances", o.instance_paths, "Instance fixture files");
  cmd->add_option("--generate", o.generate_count, "Also solve this many generated instances");
  cmd->add_option("--nurses", o.nurses, "Nurses per generated instance")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--tightness", o.tightness, "Demand as a fraction of shift supply")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--gen-seed", o.gen_seed, "Seed of the first generated instance");
  cmd->add_option("--max-patterns", o.max_patterns, "Cap on feasible patterns per nurse");
  cmd->add_option("--grade-mix", o.grade_mix, "Grade weights, e.g. 0.25,0.35,0.4");
}

void add_algorithm_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--algo", o.algo, "boa | rd1 | rd2 | oracle");
  cmd->add_option("--seed", o.seed, "Master seed (run r uses seed + r)");
  cmd->add_option("--pop", o.pop, "Population size");
  cmd->add_option("--keep", o.keep, "Solutions kept per generation");
  cmd->add_option("--gens", o.gens, "Maximum generations");
  cmd->add_option("--k", o.k, "Pool size of the k-cheapest rule");
  cmd->add_option("--wdemand", o.wdemand, "Penalty weight per uncovered shift");
  cmd->add_option("--rules", o.rules,
                  "Comma list from random,kcheapest,cover,contribution,highest,enhanced");
  cmd->add_option("--target", o.target, "Stop once best fitness <= target");
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Rule-string BOA for weekly nurse rostering"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("generate", "Write a synthetic instance fixture");
  gen->add_option("--nurses", o.nurses, "Number of nurses")->check(CLI::PositiveNumber);
  gen->add_option("--tightness", o.tightness, "Demand as a fraction of shift supply")
      ->check(CLI::Range(0.0, 1.0));
  gen->add_option("--seed", o.seed, "Generator seed");
  gen->add_option("--max-patterns", o.max_patterns, "Cap on feasible patterns per nurse");
  gen->add_option("--grade-mix", o.grade_mix, "Grade weights, e.g. 0.25,0.35,0.4");
  gen->add_option("--out", o.out, "Output fixture path")->required();

  auto* solve = app.add_subcommand("solve", "Run an algorithm over instances and seeds");
  add_instance_sources(solve, o);
  add_algorithm_options(solve, o);
  solve->add_option("--runs", o.runs, "Runs (seeds) per instance");
  solve->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
  solve->add_flag("--trace", o.trace, "Write per-generation traces under <out>/trace");
  solve->add_flag("--no-timing", o.no_timing, "Write 0 in the millis column");
  solve->add_option("--reference", o.reference, "CSV of instance,optimum for # and <=3");
  solve->add_option("--out", o.out, "Output directory");

  auto* dump = app.add_subcommand("dump-probs", "Export the learned network per generation");
  add_instance_sources(dump, o);
  add_algorithm_options(dump, o);
  dump->add_option("--out", o.out, "Output directory");

  auto* oracle = app.add_subcommand("oracle", "Exhaustive optimum of small instances");
  add_instance_sources(oracle, o);
  oracle->add_option("--wdemand", o.wdemand, "Penalty weight per uncovered shift");
  oracle->add_option("--out", o.out, "Output CSV path");

  try {
    std::vector<std::string> args = expand_config(raw_args);
    std::vector<char*> argv;
    std::string program = "nurse-boa";
    argv.push_back(program.data());
    for (auto& a : args) argv.push_back(a.data());
    app.parse(static_cast<int>(argv.size()), argv.data());

    if (*gen) return cmd_generate(o, out, err);
    if (*solve) return cmd_solve(o, out, err);
    if (*dump) return cmd_dump_probs(o, out, err);
    return cmd_oracle(o, out, err);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace nurse_boa::cli
