// tempolearn command-line tool: generate timed-action corpora from a ground
// truth domain, learn a durative domain back from them, and sweep the full
// experiment grid into CSV.

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "tempolearn/dfa.hpp"
#include "tempolearn/pipeline.hpp"
#include "tempolearn/trace_io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitParse = 2;
constexpr int kExitLearn = 3;

namespace fs = std::filesystem;
using namespace tempolearn;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path, 0, 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TemporalDomain load_domain(const std::string& path) { return parse_temporal_domain(slurp(path)); }

Problem load_problem(const std::string& path, const TemporalDomain& domain) {
  return parse_problem(slurp(path), domain);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

// Corpus file names inside a trace directory.
const char* kTrainPos = "train_pos.traces";
const char* kTrainNeg = "train_neg.traces";
const char* kTestPos = "test_pos.traces";
const char* kTestNeg = "test_neg.traces";

SampleSet load_samples(const std::string& dir, const char* pos_name, const char* neg_name,
                       const TemporalDomain& domain, const Problem& problem) {
  SampleSet s;
  TraceFile pos = read_traces((fs::path(dir) / pos_name).string());
  TraceFile neg = read_traces((fs::path(dir) / neg_name).string());
  resolve_actions(pos.traces, domain, problem.objects);
  resolve_actions(neg.traces, domain, problem.objects);
  s.positives = std::move(pos.traces);
  s.negatives = std::move(neg.traces);
  s.rng_seed = pos.seed;
  std::vector<TypedObject> all = problem.objects;
  all.insert(all.end(), domain.constants.begin(), domain.constants.end());
  s.universe = ground_atom_universe(domain.predicates, all, domain.types);
  s.init = problem.init;
  return s;
}

// ---------------------------------------------------------------------------
// Declarative experiment config: `key = value` lines, '#' comments,
// whitespace-separated list values. Flags override file entries.

std::map<std::string, std::vector<std::string>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path, 0, 0);
  std::map<std::string, std::vector<std::string>> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    std::string eq;
    if (!(ls >> eq) || eq != "=")
      throw ParseError("expected `key = value...` in config", lineno, 1);
    std::vector<std::string> values;
    std::string v;
    while (ls >> v) values.push_back(v);
    if (values.empty()) throw ParseError("config key `" + key + "` has no value", lineno, 1);
    kv[key] = values;
  }
  return kv;
}

struct GridSpec {
  std::string domain_file;
  std::vector<std::string> problem_files;
  std::vector<std::uint64_t> seeds{1};
  std::vector<double> observability{1.0};
  std::vector<std::string> variants{"base", "tr"};
  GeneratorConfig train_gen{30, 5, 15};
  GeneratorConfig test_gen{50, 1, 30};
  TabuConfig classical_tabu{10, 200};
  TabuConfig temporal_tabu{10, 500};
  bool negative_preconditions = false;
  std::string out_dir = "results";
  int jobs = 1;
};

void apply_config(GridSpec& spec, const std::map<std::string, std::vector<std::string>>& kv) {
  auto one = [&](const std::string& key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    if (it->second.size() != 1)
      throw std::runtime_error("config key `" + key + "` takes a single value");
    return it->second[0];
  };
  auto many = [&](const std::string& key) -> std::optional<std::vector<std::string>> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    return it->second;
  };
  for (const auto& [key, values] : kv) {
    (void)values;
    static const std::set<std::string> known = {
        "domain",     "problem",   "seed",        "observability", "variant",
        "traces",     "test_traces", "train_min", "train_max",     "test_min",
        "test_max",   "tabu_tenure", "tabu_iters", "tr_iters",     "out",
        "jobs",       "negative_preconditions"};
    if (known.count(key) == 0) throw std::runtime_error("unknown config key `" + key + "`");
  }
  if (auto v = one("domain")) spec.domain_file = *v;
  if (auto v = many("problem")) spec.problem_files = *v;
  if (auto v = many("seed")) {
    spec.seeds.clear();
    for (const auto& s : *v) spec.seeds.push_back(std::stoull(s));
  }
  if (auto v = many("observability")) {
    spec.observability.clear();
    for (const auto& s : *v) spec.observability.push_back(std::stod(s));
  }
  if (auto v = many("variant")) spec.variants = *v;
  if (auto v = one("traces")) spec.train_gen.count = std::stoi(*v);
  if (auto v = one("test_traces")) spec.test_gen.count = std::stoi(*v);
  if (auto v = one("train_min")) spec.train_gen.len_min = std::stoi(*v);
  if (auto v = one("train_max")) spec.train_gen.len_max = std::stoi(*v);
  if (auto v = one("test_min")) spec.test_gen.len_min = std::stoi(*v);
  if (auto v = one("test_max")) spec.test_gen.len_max = std::stoi(*v);
  if (auto v = one("tabu_tenure"))
    spec.classical_tabu.tenure = spec.temporal_tabu.tenure = std::stoi(*v);
  if (auto v = one("tabu_iters")) spec.classical_tabu.iterations = std::stoi(*v);
  if (auto v = one("tr_iters")) spec.temporal_tabu.iterations = std::stoi(*v);
  if (auto v = one("out")) spec.out_dir = *v;
  if (auto v = one("jobs")) spec.jobs = std::stoi(*v);
  if (auto v = one("negative_preconditions"))
    spec.negative_preconditions = (*v == "true" || *v == "1");
}

bool parse_variant(const std::string& name) {  // -> temporal refinement on?
  if (name == "tr") return true;
  if (name == "base") return false;
  throw std::runtime_error("unknown variant `" + name + "` (expected base or tr)");
}

// ---------------------------------------------------------------------------
// generate

int cmd_generate(const std::string& domain_file, const std::string& problem_file,
                 std::uint64_t seed, double obs, const GeneratorConfig& train_gen,
                 const GeneratorConfig& test_gen, const std::string& out_dir) {
  const TemporalDomain domain = load_domain(domain_file);
  const Problem problem = load_problem(problem_file, domain);
  fs::create_directories(out_dir);

  SampleSet train = generate_samples(domain, problem, seed, train_gen);
  SampleSet test = generate_samples(domain, problem, test_stream_seed(seed), test_gen);
  mask_observations(train, obs, mask_stream_seed(seed));

  write_traces((fs::path(out_dir) / kTrainPos).string(), train.positives, seed);
  write_traces((fs::path(out_dir) / kTrainNeg).string(), train.negatives, seed);
  write_traces((fs::path(out_dir) / kTestPos).string(), test.positives, test.rng_seed);
  write_traces((fs::path(out_dir) / kTestNeg).string(), test.negatives, test.rng_seed);
  std::cout << "wrote " << train.positives.size() << "+/" << train.negatives.size()
            << "- training and " << test.positives.size() << "+/" << test.negatives.size()
            << "- test traces to " << out_dir << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// learn

int cmd_learn(const std::string& domain_file, const std::string& problem_file,
              const std::string& trace_dir, const std::string& variant,
              std::optional<std::uint64_t> seed_flag, double obs, const TabuConfig& classical,
              const TabuConfig& temporal, bool negative_preconditions,
              const std::string& out_dir, const std::string& dump_dfa) {
  const TemporalDomain truth = load_domain(domain_file);
  const Problem problem = load_problem(problem_file, truth);
  SampleSet train = load_samples(trace_dir, kTrainPos, kTrainNeg, truth, problem);
  SampleSet test = load_samples(trace_dir, kTestPos, kTestNeg, truth, problem);
  const std::uint64_t seed = seed_flag.value_or(train.rng_seed);

  LearnOptions opt;
  opt.temporal_refinement = parse_variant(variant);
  opt.negative_preconditions = negative_preconditions;
  opt.classical_tabu = classical;
  opt.temporal_tabu_cfg = temporal;

  const auto t0 = std::chrono::steady_clock::now();
  LearnResult learned = learn_domain(strip_to_vocabulary(truth), train, opt);
  const auto t1 = std::chrono::steady_clock::now();

  MetricsReport metrics;
  metrics.runtime_seconds = std::chrono::duration<double>(t1 - t0).count();
  metrics.syntax = syntactic_error(learned.domain, truth);
  std::vector<EventSequence> test_pos, test_neg;
  for (const auto& t : test.positives) test_pos.push_back(convert_positive(t));
  for (const auto& t : test.negatives) test_neg.push_back(convert_negative(t));
  metrics.classical = fscore_classical(split_to_classical(learned.domain), test_pos, test_neg);
  metrics.temporal = fscore_temporal(learned.domain, test.positives, test.negatives);

  fs::create_directories(out_dir);
  write_file((fs::path(out_dir) / "learned.pddl").string(), print_temporal_domain(learned.domain));
  std::ofstream csv((fs::path(out_dir) / "metrics.csv").string());
  if (!csv) throw std::runtime_error("cannot write metrics.csv");
  write_csv_header(csv);
  write_csv_row(csv, truth.name, problem.name, variant, seed, obs, metrics);
  if (!dump_dfa.empty()) write_file(dump_dfa, to_dot(learned.dfa));

  std::cout << "learned domain written to " << out_dir << "/learned.pddl\n"
            << "e_sigma=" << csv_number(metrics.syntax.e_sigma)
            << " fscore_classical=" << csv_number(metrics.classical.fscore)
            << " fscore_temporal=" << csv_number(metrics.temporal.fscore)
            << " runtime=" << csv_number(metrics.runtime_seconds) << "s\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// experiment

struct GridRow {
  std::string problem, variant;
  std::uint64_t seed = 0;
  double observability = 1.0;
  bool ok = false;
  std::string error;
  MetricsReport metrics;
};

int cmd_experiment(const GridSpec& spec) {
  if (spec.domain_file.empty()) throw std::runtime_error("experiment needs a domain file");
  if (spec.problem_files.empty()) throw std::runtime_error("experiment needs problem files");
  const TemporalDomain truth = load_domain(spec.domain_file);
  std::vector<Problem> problems;
  for (const auto& f : spec.problem_files) problems.push_back(load_problem(f, truth));

  struct Cell {
    std::size_t problem;
    std::string variant;
    std::uint64_t seed;
    double obs;
  };
  std::vector<Cell> cells;
  for (std::size_t p = 0; p < problems.size(); ++p)
    for (const auto& variant : spec.variants)
      for (const auto seed : spec.seeds)
        for (const auto obs : spec.observability) cells.push_back({p, variant, seed, obs});

  std::vector<GridRow> rows(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < cells.size(); i = next.fetch_add(1)) {
      const Cell& c = cells[i];
      GridRow& row = rows[i];
      row.problem = problems[c.problem].name;
      row.variant = c.variant;
      row.seed = c.seed;
      row.observability = c.obs;
      try {
        RunConfig cfg;
        cfg.seed = c.seed;
        cfg.observability = c.obs;
        cfg.temporal_refinement = parse_variant(c.variant);
        cfg.train_gen = spec.train_gen;
        cfg.test_gen = spec.test_gen;
        cfg.learn.classical_tabu = spec.classical_tabu;
        cfg.learn.temporal_tabu_cfg = spec.temporal_tabu;
        cfg.learn.negative_preconditions = spec.negative_preconditions;
        RunResult run = run_experiment(truth, problems[c.problem], cfg);
        row.metrics = run.metrics;
        row.ok = true;
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      std::lock_guard<std::mutex> lock(log_mutex);
      std::cout << truth.name << " " << row.problem << " " << row.variant << " seed=" << row.seed
                << " obs=" << csv_number(row.observability) << " -> "
                << (row.ok ? "fscore_temporal=" + csv_number(row.metrics.temporal.fscore)
                           : "failed: " + row.error)
                << "\n";
    }
  };
  const int n_workers = std::max(1, std::min<int>(spec.jobs, static_cast<int>(cells.size())));
  std::vector<std::thread> threads;
  for (int i = 0; i < n_workers; ++i) threads.emplace_back(worker);
  for (auto& t : threads) t.join();

  fs::create_directories(spec.out_dir);
  std::ofstream detail((fs::path(spec.out_dir) / "results.csv").string());
  if (!detail) throw std::runtime_error("cannot write results.csv");
  write_csv_header(detail);
  int failures = 0;
  for (const auto& row : rows) {
    if (!row.ok) {
      ++failures;
      std::cerr << "run failed (" << row.problem << ", " << row.variant << ", seed " << row.seed
                << ", obs " << csv_number(row.observability) << "): " << row.error << "\n";
      continue;
    }
    write_csv_row(detail, truth.name, row.problem, row.variant, row.seed, row.observability,
                  row.metrics);
  }

  // Aggregate over initial states: one row per (variant, seed, observability).
  std::map<std::tuple<std::string, std::uint64_t, double>, std::vector<const GridRow*>> cellmap;
  for (const auto& row : rows)
    if (row.ok) cellmap[{row.variant, row.seed, row.observability}].push_back(&row);
  std::ofstream summary((fs::path(spec.out_dir) / "summary.csv").string());
  if (!summary) throw std::runtime_error("cannot write summary.csv");
  write_csv_header(summary);
  for (const auto& [key, group] : cellmap) {
    MetricsReport mean;
    for (const auto* r : group) {
      mean.syntax.e_sigma += r->metrics.syntax.e_sigma;
      mean.classical.fscore += r->metrics.classical.fscore;
      mean.temporal.fscore += r->metrics.temporal.fscore;
      mean.runtime_seconds += r->metrics.runtime_seconds;
    }
    const double n = static_cast<double>(group.size());
    mean.syntax.e_sigma /= n;
    mean.classical.fscore /= n;
    mean.temporal.fscore /= n;
    mean.runtime_seconds /= n;
    write_csv_row(summary, truth.name, "all", std::get<0>(key), std::get<1>(key),
                  std::get<2>(key), mean);
  }
  std::cout << "wrote " << spec.out_dir << "/results.csv and summary.csv ("
            << rows.size() - failures << "/" << rows.size() << " runs ok)\n";
  return failures == static_cast<int>(rows.size()) && !rows.empty() ? kExitLearn : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learns durative-action planning domains from timed action traces"};
  app.require_subcommand(1);

  // --- generate ---
  auto* gen = app.add_subcommand("generate", "Sample training/test corpora from a ground truth");
  std::string g_domain, g_problem, g_out = "traces";
  std::uint64_t g_seed = 1;
  double g_obs = 1.0;
  GeneratorConfig g_train{30, 5, 15}, g_test{50, 1, 30};
  gen->add_option("--domain", g_domain, "ground-truth durative domain file")->required();
  gen->add_option("--problem", g_problem, "problem file (objects + initial state)")->required();
  gen->add_option("--seed", g_seed, "generator seed");
  gen->add_option("--obs", g_obs, "observability of intermediate states")
      ->check(CLI::Range(0.0, 1.0));
  gen->add_option("--traces", g_train.count, "number of training walks");
  gen->add_option("--test-traces", g_test.count, "number of test walks");
  gen->add_option("--train-min", g_train.len_min, "min training walk length");
  gen->add_option("--train-max", g_train.len_max, "max training walk length");
  gen->add_option("--test-min", g_test.len_min, "min test walk length");
  gen->add_option("--test-max", g_test.len_max, "max test walk length");
  gen->add_option("--out", g_out, "output directory");

  // --- learn ---
  auto* lrn = app.add_subcommand("learn", "Learn a durative domain from trace files");
  std::string l_domain, l_problem, l_traces = "traces", l_variant = "tr", l_out = "learned";
  std::string l_dump_dfa;
  std::optional<std::uint64_t> l_seed;
  double l_obs = 1.0;
  TabuConfig l_classical{10, 200}, l_temporal{10, 500};
  bool l_negpre = false;
  lrn->add_option("--domain", l_domain, "ground-truth domain (vocabulary + evaluation reference)")
      ->required();
  lrn->add_option("--problem", l_problem, "problem file matching the traces")->required();
  lrn->add_option("--traces", l_traces, "directory with the four corpus files");
  lrn->add_option("--variant", l_variant, "base (no temporal refinement) or tr");
  lrn->add_option("--seed", l_seed, "seed recorded in the metrics row (default: from traces)");
  lrn->add_option("--obs", l_obs, "observability recorded in the metrics row");
  lrn->add_option("--tabu-tenure", l_classical.tenure, "tabu tenure (both searches)");
  lrn->add_option("--tabu-iters", l_classical.iterations, "classical tabu iterations");
  lrn->add_option("--tr-iters", l_temporal.iterations, "temporal tabu iterations");
  lrn->add_flag("--negative-preconditions", l_negpre, "learn negative preconditions");
  lrn->add_option("--out", l_out, "output directory");
  lrn->add_option("--dump-dfa", l_dump_dfa, "write the merged automaton as DOT");

  // --- experiment ---
  auto* exp = app.add_subcommand("experiment", "Run the full grid and write CSV reports");
  std::string e_config;
  GridSpec e_spec;
  std::vector<std::string> e_problems, e_variants;
  std::vector<std::uint64_t> e_seeds;
  std::vector<double> e_obs;
  exp->add_option("--config", e_config, "key = value config file");
  exp->add_option("--problem", e_problems, "problem files (repeatable)");
  exp->add_option("--seed", e_seeds, "seeds (repeatable)");
  exp->add_option("--obs", e_obs, "observability levels (repeatable)");
  exp->add_option("--variant", e_variants, "variants: base, tr (repeatable)");
  int e_traces = 0, e_test_traces = 0, e_tenure = 0, e_iters = 0, e_tr_iters = 0, e_jobs = 0;
  std::string e_domain, e_out;
  exp->add_option("--domain", e_domain, "ground-truth domain file");
  exp->add_option("--traces", e_traces, "training walks per run");
  exp->add_option("--test-traces", e_test_traces, "test walks per run");
  exp->add_option("--tabu-tenure", e_tenure, "tabu tenure (both searches)");
  exp->add_option("--tabu-iters", e_iters, "classical tabu iterations");
  exp->add_option("--tr-iters", e_tr_iters, "temporal tabu iterations");
  exp->add_option("--out", e_out, "output directory");
  exp->add_option("--jobs", e_jobs, "parallel workers")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed())
      return cmd_generate(g_domain, g_problem, g_seed, g_obs, g_train, g_test, g_out);
    if (lrn->parsed()) {
      l_temporal.tenure = l_classical.tenure;
      return cmd_learn(l_domain, l_problem, l_traces, l_variant, l_seed, l_obs, l_classical,
                       l_temporal, l_negpre, l_out, l_dump_dfa);
    }
    if (exp->parsed()) {
      if (!e_config.empty()) apply_config(e_spec, read_config(e_config));
      // Flags passed explicitly override the config file.
      if (exp->count("--domain") > 0) e_spec.domain_file = e_domain;
      if (!e_problems.empty()) e_spec.problem_files = e_problems;
      if (!e_seeds.empty()) e_spec.seeds = e_seeds;
      if (!e_obs.empty()) e_spec.observability = e_obs;
      if (!e_variants.empty()) e_spec.variants = e_variants;
      if (exp->count("--traces") > 0) e_spec.train_gen.count = e_traces;
      if (exp->count("--test-traces") > 0) e_spec.test_gen.count = e_test_traces;
      if (exp->count("--tabu-tenure") > 0)
        e_spec.classical_tabu.tenure = e_spec.temporal_tabu.tenure = e_tenure;
      if (exp->count("--tabu-iters") > 0) e_spec.classical_tabu.iterations = e_iters;
      if (exp->count("--tr-iters") > 0) e_spec.temporal_tabu.iterations = e_tr_iters;
      if (exp->count("--out") > 0) e_spec.out_dir = e_out;
      if (exp->count("--jobs") > 0) e_spec.jobs = e_jobs;
      return cmd_experiment(e_spec);
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitLearn;
  }
  return kExitUsage;
}
