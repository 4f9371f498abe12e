#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "heurlab/ascii.hpp"
#include "heurlab/common.hpp"
#include "heurlab/dataset.hpp"
#include "heurlab/experiment.hpp"
#include "heurlab/generation.hpp"
#include "heurlab/instance_io.hpp"
#include "heurlab/metrics.hpp"
#include "heurlab/model.hpp"
#include "heurlab/oracle_noise.hpp"

namespace heurlab::cli {

namespace fs = std::filesystem;

namespace {

/// Tests of the command as a whole (ordering checks) failed.
class AssertionFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Global {
  std::uint64_t seed = 0;
  int jobs = 0;
  bool force = false;
};

struct GenerateOpts {
  std::string domain = "maze";
  std::vector<std::string> splits{"all"};
  double scale = 0.1;
  std::optional<int> count, size, boxes, o_l;
  std::optional<double> alpha;
  std::optional<std::int64_t> beta_min, beta_max;
  std::string boxoban;
  std::string out = "instances";
};

struct SolveOpts {
  std::string instances;
  std::string out;
  std::optional<std::int64_t> max_iterations;
};

struct OracleOpts {
  std::string instances;
  double scale = 0.4;
  std::vector<double> sigmas{2, 4, 6};
  std::vector<std::uint64_t> noise_seeds{0, 1, 2};
  bool no_clamp = false;
  bool per_query = false;
  bool assert_ordering = false;
  double margin = 0.05;
  std::string out;
  std::optional<std::int64_t> max_iterations;
};

struct ExtractOpts {
  std::string instances;
  std::string out = "pool.jsonl";
  std::optional<std::int64_t> max_iterations;
};

struct SamplingOpts {
  std::string strategy = "planner_aware";
  std::optional<double> tau;
  std::string c_variant = "log_ratio";
  std::optional<std::size_t> budget;
  std::optional<std::size_t> m;
  std::optional<int> clusters;
  double threshold = 0.95;
  std::string section = "all";
};

struct SampleOpts {
  std::string pool;
  std::string out = "selection.jsonl";
  SamplingOpts sampling;
};

struct ModelOpts {
  std::string kind = "knn";
  int k = 8;
  double ridge = 1e-6;
  double validation_fraction = 0.1;
};

struct TrainOpts {
  std::string examples;
  std::string out = "model.json";
  ModelOpts model;
};

struct HeuristicOpts {
  std::size_t cache_size = 1 << 16;
  bool no_residual_floor = false;
  bool round_residual = false;
};

struct EvalOpts {
  std::string instances;
  std::string references;
  std::string heuristic = "quick";
  std::string model;
  HeuristicOpts h;
  std::vector<std::uint64_t> seeds{0};
  std::optional<std::int64_t> max_iterations;
  std::optional<double> max_time;
  bool with_timing = false;
  std::string out = "eval";
};

struct ExportOpts {
  std::string examples;
  std::string out = "prompts.jsonl";
  std::string format = "prompts";
  std::optional<std::uint64_t> symbol_seed;
};

struct PipelineOpts {
  std::string domain = "maze";
  double scale = 0.1;
  std::vector<std::string> strategies{"full", "uniform", "planner_aware", "semdedup", "combined"};
  std::optional<std::size_t> budget;
  std::optional<double> tau;
  std::optional<double> combined_tau;
  std::string c_variant = "log_ratio";
  std::optional<int> clusters;
  double threshold = 0.95;
  ModelOpts model;
  HeuristicOpts h;
  std::vector<std::uint64_t> seeds{0};
  std::int64_t max_iterations = 200000;
  std::string boxoban;
  std::string out = "pipeline";
};

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

// Rewrites CLI11's config dump into a stable form that also reads back as a
// --config file. Worker count and overwrite permission never change results,
// so they are left out; unset optional values are dropped; list values are
// spelled the same whether they came from a default, a flag or a file.
std::string canonical_config(const std::string& dump) {
  static const std::set<std::string> lists{"split", "sigmas", "noise-seeds", "seeds", "strategies"};
  std::istringstream lines(dump);
  std::string line, text;
  while (std::getline(lines, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      text += line + '\n';
      continue;
    }
    const std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    if (key == "jobs" || key == "force" || value == "\"\"") continue;
    const std::string leaf = key.substr(key.rfind('.') == std::string::npos ? 0 : key.rfind('.') + 1);
    if (lists.count(leaf)) {
      std::vector<std::string> items;
      std::string item;
      std::istringstream parts(value);
      while (std::getline(parts, item, ',')) {
        std::erase_if(item, [](char c) { return c == '"' || c == '[' || c == ']' || c == ' '; });
        if (!item.empty()) items.push_back(item);
      }
      value = "[" + join(items, ", ") + "]";
    }
    text += key + '=' + value + '\n';
  }
  return text;
}

SearchLimits limits_of(std::optional<std::int64_t> max_iterations, std::optional<double> max_time = {}) {
  SearchLimits l;
  l.max_iterations = max_iterations;
  l.max_wall_time = max_time;
  return l;
}

double default_tau(Domain d) {
  switch (d) {
    case Domain::Maze: return 2.0;
    case Domain::Sokoban: return 0.8;
    case Domain::Stp: return 5.0;
  }
  return 1.0;
}

double default_combined_tau(Domain d) { return d == Domain::Maze ? 2.0 : 5.0; }

std::size_t default_budget(Domain d, double scale) {
  const double full = d == Domain::Maze ? 12000.0 : 8000.0;
  return static_cast<std::size_t>(std::max(1.0, std::ceil(full * scale - 1e-9)));
}

std::vector<SplitSpec> chosen_splits(const GenerateOpts& o, Domain domain) {
  auto all = default_splits(domain);
  std::vector<SplitSpec> picked;
  const bool every = std::find(o.splits.begin(), o.splits.end(), "all") != o.splits.end();
  for (auto& s : all) {
    if (every || std::find(o.splits.begin(), o.splits.end(), s.name) != o.splits.end()) picked.push_back(s);
  }
  if (picked.empty()) throw InputError("no known split among: " + join(o.splits, ", "));
  for (auto& s : picked) {
    s = scale_split(s, o.scale);
    for (auto& p : s.parts) {
      if (o.count) p.count = *o.count;
      if (o.size) p.size = *o.size;
      if (o.boxes) p.boxes = *o.boxes;
      if (o.o_l) p.filter.min_plan_length = *o.o_l;
      if (o.alpha) p.filter.alpha = *o.alpha;
      if (o.beta_min) p.filter.beta_min = *o.beta_min;
      if (o.beta_max) p.filter.beta_max = *o.beta_max;
    }
    s.validate();
  }
  return picked;
}

nlohmann::json split_json(const SplitSpec& s, std::uint64_t seed, double scale) {
  nlohmann::json parts = nlohmann::json::array();
  for (const auto& p : s.parts) {
    nlohmann::json f{{"o_l", p.filter.min_plan_length}, {"alpha", p.filter.alpha}, {"retries", p.filter.retries}};
    if (p.filter.beta_min) f["beta_min"] = *p.filter.beta_min;
    if (p.filter.beta_max) f["beta_max"] = *p.filter.beta_max;
    parts.push_back({{"count", p.count}, {"size", p.size}, {"boxes", p.boxes}, {"filter", f}});
  }
  return {{"master_seed", seed}, {"scale", scale}, {"parts", parts}};
}

// Generates and writes each split; returns the written directories.
std::vector<fs::path> generate_to(const std::vector<SplitSpec>& splits, Domain domain, const fs::path& out_dir,
                                  const std::string& boxoban_path, const Global& g, double scale, std::ostream& out) {
  std::vector<PuzzleInstance> boxoban;
  if (!boxoban_path.empty()) boxoban = load_boxoban(boxoban_path);
  std::vector<fs::path> written;
  for (const auto& spec : splits) {
    const fs::path dir = out_dir / spec.name;
    if (fs::exists(dir / "manifest.jsonl") && !g.force) {
      throw InputError(dir.string() + " already holds instances; pass --force to overwrite");
    }
    const auto started = std::chrono::steady_clock::now();
    std::vector<PuzzleInstance> instances;
    try {
      instances = generate_split(spec, g.seed, g.jobs, boxoban);
    } catch (const GenerationExhausted& e) {
      std::string note = e.what();
      note += written.empty() ? " (no split was written)" : " (partial output: splits already written: ";
      if (!written.empty()) {
        std::vector<std::string> names;
        for (const auto& w : written) names.push_back(w.string());
        note += join(names, ", ") + ")";
      }
      throw GenerationExhausted(note);
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    write_instance_set(dir, {domain, spec.name, instances}, g.force, split_json(spec, g.seed, scale).dump());
    write_timing(dir / "timing.jsonl", {{spec.name, seconds}});
    out << "wrote " << instances.size() << ' ' << domain_name(domain) << " instances to " << dir.string() << '\n';
    written.push_back(dir);
  }
  return written;
}

int cmd_generate(const GenerateOpts& o, const Global& g, std::ostream& out) {
  const Domain domain = parse_domain(o.domain);
  generate_to(chosen_splits(o, domain), domain, fs::path(o.out) / domain_name(domain), o.boxoban, g, o.scale, out);
  return kExitOk;
}

fs::path references_path_for(const std::string& instances_dir, const std::string& explicit_path) {
  return explicit_path.empty() ? fs::path(instances_dir) / "references.jsonl" : fs::path(explicit_path);
}

int cmd_solve(const SolveOpts& o, const Global& g, std::ostream& out) {
  const auto set = read_instance_set(o.instances);
  const auto refs = compute_references(set.instances, limits_of(o.max_iterations), g.jobs);
  const fs::path path = references_path_for(o.instances, o.out);
  if (fs::exists(path) && !g.force) throw InputError(path.string() + " exists; pass --force to overwrite");
  write_references(path, refs);
  int solved = 0;
  for (const auto& r : refs) solved += r.solved ? 1 : 0;
  out << "solved " << solved << '/' << refs.size() << " instances; references in " << path.string() << '\n';
  return kExitOk;
}

std::vector<ReferenceSolution> load_or_compute_references(const std::string& instances_dir,
                                                          const std::string& explicit_path,
                                                          std::span<const PuzzleInstance> instances,
                                                          const SearchLimits& limits, int jobs) {
  const fs::path path = references_path_for(instances_dir, explicit_path);
  if (fs::exists(path)) return read_references(path);
  if (!explicit_path.empty()) throw InputError("references file " + path.string() + " does not exist");
  return compute_references(instances, limits, jobs);
}

int cmd_oracle_study(const OracleOpts& o, const Global& g, std::ostream& out) {
  std::vector<PuzzleInstance> instances;
  if (!o.instances.empty()) {
    auto set = read_instance_set(o.instances);
    if (set.domain != Domain::Maze) throw UnsupportedDomain("the oracle study needs maze instances");
    instances = std::move(set.instances);
  } else {
    auto spec = default_splits(Domain::Maze)[1];  // val
    instances = generate_split(scale_split(spec, o.scale), g.seed, g.jobs);
  }
  const auto refs = load_or_compute_references(o.instances, {}, instances, limits_of(o.max_iterations), g.jobs);
  OracleStudyOptions opts;
  opts.clamp_at_zero = !o.no_clamp;
  opts.mode = o.per_query ? NoiseMode::PerQuery : NoiseMode::PerState;
  opts.limits = limits_of(o.max_iterations);
  opts.jobs = g.jobs;
  const auto rows = run_oracle_experiment(instances, refs, o.sigmas, o.noise_seeds, opts);
  const std::string table = format_oracle_table(rows);
  out << table;
  if (!o.out.empty()) write_text(o.out, table);
  if (o.assert_ordering) {
    const auto problems = check_section_ordering(rows, o.margin);
    if (!problems.empty()) throw AssertionFailed("section ordering violated: " + join(problems, "; "));
    out << "ordering End > Middle > Initial holds at every sigma (margin " << format_number(o.margin, 2) << ")\n";
  }
  return kExitOk;
}

int cmd_extract(const ExtractOpts& o, const Global& g, std::ostream& out) {
  const auto set = read_instance_set(o.instances);
  const auto pool = solve_and_extract(set.instances, limits_of(o.max_iterations), g.jobs);
  if (fs::exists(o.out) && !g.force) throw InputError(o.out + " exists; pass --force to overwrite");
  export_corpus(pool.examples, ExportFormat::Records, o.out);
  out << "extracted " << pool.examples.size() << " examples from " << pool.instances_used << " instances ("
      << pool.skipped_unsolved << " unsolved skipped) into " << o.out << '\n';
  return kExitOk;
}

SamplingSpec sampling_spec(const SamplingOpts& o, Domain domain, std::size_t pool_size, std::uint64_t seed) {
  SamplingSpec s;
  s.strategy = parse_strategy(o.strategy);
  s.tau = o.tau.value_or(s.strategy == Strategy::Combined ? default_combined_tau(domain) : default_tau(domain));
  s.c_variant = parse_utility(o.c_variant);
  s.budget = o.budget.value_or(std::min(pool_size, default_budget(domain, 1.0)));
  s.per_problem_m = o.m;
  s.clusters = o.clusters;
  s.threshold = o.threshold;
  s.section = parse_section_split(o.section);
  s.seed = seed;
  return s;
}

int cmd_sample(const SampleOpts& o, const Global& g, std::ostream& out, std::ostream& err) {
  const auto pool = read_records(o.pool);
  if (pool.empty()) throw InputError(o.pool + " holds no examples");
  const auto spec = sampling_spec(o.sampling, pool.front().domain, pool.size(), derive_seed(g.seed, "sample"));
  const auto sel = select_examples(pool, spec, g.jobs);
  for (const auto& note : sel.notes) err << "warning: " << note << '\n';
  std::vector<TrainingExample> chosen;
  for (std::size_t i : sel.indices) chosen.push_back(pool[i]);
  if (fs::exists(o.out) && !g.force) throw InputError(o.out + " exists; pass --force to overwrite");
  export_corpus(chosen, ExportFormat::Records, o.out);
  out << "selected " << chosen.size() << " of " << pool.size() << " examples with " << strategy_name(spec.strategy)
      << " into " << o.out << '\n';
  return kExitOk;
}

TrainOptions train_options(const ModelOpts& m, std::uint64_t seed, const std::string& strategy, std::size_t budget) {
  TrainOptions t;
  t.kind = parse_model_kind(m.kind);
  t.k = m.k;
  t.ridge = m.ridge;
  t.validation_fraction = m.validation_fraction;
  t.seed = seed;
  t.strategy = strategy;
  t.budget = budget;
  return t;
}

int cmd_train(const TrainOpts& o, const Global& g, std::ostream& out) {
  const auto examples = read_records(o.examples);
  const auto model = train_residual_model(examples, train_options(o.model, derive_seed(g.seed, "train"),
                                                                  fs::path(o.examples).stem().string(),
                                                                  examples.size()));
  if (fs::exists(o.out) && !g.force) throw InputError(o.out + " exists; pass --force to overwrite");
  model.save(o.out);
  const auto& m = model.manifest();
  out << model_kind_name(model.kind()) << " model on " << m.n_train << " examples: train MAE "
      << format_number(m.train_mae) << ", validation MAE " << format_number(m.validation_mae)
      << " (zero predictor " << format_number(m.zero_predictor_validation_mae) << "); saved to " << o.out << '\n';
  return kExitOk;
}

LearnedHeuristicOptions heuristic_options(const HeuristicOpts& h) {
  LearnedHeuristicOptions o;
  o.cache_capacity = h.cache_size;
  o.floor_residual = !h.no_residual_floor;
  o.round_residual = h.round_residual;
  return o;
}

void write_eval_outputs(const fs::path& dir, const ExperimentReport& report, const std::string& config_text,
                        bool with_timing) {
  fs::create_directories(dir);
  write_report_csv(dir / "report.csv", report, false);
  write_manifest(dir / "manifest.jsonl", report, config_text);
  if (with_timing) write_report_csv(dir / "report.timing.csv", report, true);
}

void print_report(std::ostream& out, const ExperimentReport& r) {
  out << r.label << ": ilr_on_solved " << format_number(r.ilr_on_solved.mean) << ", ilr_on_optimal "
      << format_number(r.ilr_on_optimal.mean) << ", swc " << format_number(r.swc.mean) << ", optimal% "
      << format_number(r.optimal_pct.mean, 2) << ", itr_on_solved " << format_number(r.itr_on_solved.mean) << '\n';
}

int cmd_eval(const EvalOpts& o, const Global& g, const std::string& config_text, std::ostream& out) {
  const auto set = read_instance_set(o.instances);
  const auto limits = limits_of(o.max_iterations, o.max_time);
  const auto refs = load_or_compute_references(o.instances, o.references, set.instances, limits, g.jobs);

  ExperimentConfig config;
  config.label = o.heuristic;
  config.instances = set.instances;
  config.seeds = o.seeds;
  config.limits = limits;
  config.jobs = g.jobs;
  if (o.heuristic == "quick") {
    auto quick = std::make_shared<const QuickHeuristic>();
    config.make_evaluator = [quick](const PuzzleInstance&, std::uint64_t) { return quick; };
  } else if (o.heuristic == "zero") {
    auto zero = std::make_shared<const ZeroHeuristic>();
    config.make_evaluator = [zero](const PuzzleInstance&, std::uint64_t) { return zero; };
  } else if (o.heuristic == "oracle") {
    config.make_evaluator = [](const PuzzleInstance& inst, std::uint64_t) {
      return std::make_shared<const NoisyOracle>(oracle_distances(inst), NoiseSpec{});
    };
  } else if (o.heuristic == "model") {
    if (o.model.empty()) throw InputError("--heuristic model needs --model FILE");
    auto model = std::make_shared<const ResidualModel>(ResidualModel::load(o.model));
    const auto opts = heuristic_options(o.h);
    const Domain domain = set.domain;
    config.label = "model:" + fs::path(o.model).filename().string();
    config.make_evaluator = [model, opts, domain](const PuzzleInstance&, std::uint64_t) {
      return std::make_shared<const LearnedHeuristic>(model, domain, opts);
    };
  } else {
    throw InputError("unknown heuristic '" + o.heuristic + "' (expected quick, zero, oracle or model)");
  }
  const auto report = run_experiment(config, refs);
  if (fs::exists(fs::path(o.out) / "report.csv") && !g.force) {
    throw InputError(o.out + " already holds a report; pass --force to overwrite");
  }
  write_eval_outputs(o.out, report, config_text, o.with_timing);
  print_report(out, report);
  return kExitOk;
}

int cmd_export(const ExportOpts& o, const Global& g, std::ostream& out) {
  const auto examples = read_records(o.examples);
  ExportFormat format;
  if (o.format == "prompts") {
    format = ExportFormat::Prompts;
  } else if (o.format == "records") {
    format = ExportFormat::Records;
  } else {
    throw InputError("unknown export format '" + o.format + "' (expected prompts or records)");
  }
  if (fs::exists(o.out) && !g.force) throw InputError(o.out + " exists; pass --force to overwrite");
  export_corpus(examples, format, o.out, o.symbol_seed.value_or(derive_seed(g.seed, "symbols")));
  out << "exported " << examples.size() << ' ' << o.format << " to " << o.out << '\n';
  return kExitOk;
}

// ---- pipeline --------------------------------------------------------------

/// Stage bookkeeping: a stage is skipped when its marker holds the same key.
class Stages {
 public:
  Stages(fs::path dir, bool force) : dir_(std::move(dir)), force_(force) { fs::create_directories(dir_); }

  bool done(const std::string& stage, const std::string& key) const {
    if (force_) return false;
    const fs::path marker = dir_ / (stage + ".done");
    return fs::exists(marker) && read_text(marker) == key;
  }
  void mark(const std::string& stage, const std::string& key) const { write_text(dir_ / (stage + ".done"), key); }

 private:
  fs::path dir_;
  bool force_;
};

std::string table_row(const std::string& label, const ExperimentReport& iid, const ExperimentReport& ood) {
  std::string row = label;
  for (const auto* r : {&iid, &ood}) {
    row += ',' + format_number(r->ilr_on_solved.mean) + ',' + format_number(r->ilr_on_optimal.mean) + ',' +
           format_number(r->swc.mean) + ',' + format_number(r->optimal_pct.mean, 2);
  }
  return row + '\n';
}

ExperimentReport read_report_summary(const fs::path& csv, const std::string& label) {
  // Reads the aggregate block written by write_report_csv.
  ExperimentReport r;
  r.label = label;
  std::istringstream in(read_text(csv));
  std::string line;
  while (std::getline(in, line)) {
    const auto c1 = line.find(',');
    if (c1 == std::string::npos) continue;
    const auto c2 = line.find(',', c1 + 1);
    if (c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos) continue;
    const std::string name = line.substr(0, c1);
    const std::string mean_text = line.substr(c1 + 1, c2 - c1 - 1);
    const double mean = mean_text == "nan" ? std::nan("") : std::stod(mean_text);
    if (name == "ilr_on_solved") r.ilr_on_solved.mean = mean;
    if (name == "ilr_on_optimal") r.ilr_on_optimal.mean = mean;
    if (name == "swc") r.swc.mean = mean;
    if (name == "optimal_pct") r.optimal_pct.mean = mean;
  }
  return r;
}

int cmd_pipeline(const PipelineOpts& o, const Global& g, const std::string& config_text, std::ostream& out) {
  const Domain domain = parse_domain(o.domain);
  const fs::path root = o.out;
  fs::create_directories(root);
  write_text(root / "config.ini", config_text);
  // --force means "recompute everything"; --jobs never changes outputs.
  Stages stages(root / "stages", g.force);
  Global regen = g;
  regen.force = true;

  const std::string base_key = git_blob_sha1(nlohmann::json{{"domain", o.domain},
                                                           {"scale", o.scale},
                                                           {"seed", g.seed},
                                                           {"boxoban", o.boxoban}}
                                                 .dump());
  // 1. instances
  const std::vector<std::string> split_names{"train", "test-iid", "test-ood"};
  const fs::path inst_root = root / "instances";
  if (!stages.done("generate", base_key)) {
    GenerateOpts gen;
    gen.domain = o.domain;
    gen.splits = split_names;
    gen.scale = o.scale;
    generate_to(chosen_splits(gen, domain), domain, inst_root, o.boxoban, regen, o.scale, out);
    stages.mark("generate", base_key);
  } else {
    out << "generate: up to date\n";
  }
  std::map<std::string, InstanceSet> sets;
  for (const auto& s : split_names) sets[s] = read_instance_set(inst_root / s);

  // 2. references for every split; 3. training pool
  const SearchLimits limits = limits_of(o.max_iterations);
  const std::string ref_key = git_blob_sha1(base_key + "|refs|" + std::to_string(o.max_iterations));
  if (!stages.done("references", ref_key)) {
    for (const auto& s : split_names) {
      write_references(inst_root / s / "references.jsonl", compute_references(sets[s].instances, limits, g.jobs));
    }
    stages.mark("references", ref_key);
  } else {
    out << "references: up to date\n";
  }
  const fs::path pool_path = root / "pool.jsonl";
  if (!stages.done("pool", ref_key)) {
    const auto pool = solve_and_extract(sets["train"].instances, limits, g.jobs);
    export_corpus(pool.examples, ExportFormat::Records, pool_path);
    out << "pool: " << pool.examples.size() << " examples from " << pool.instances_used << " instances\n";
    stages.mark("pool", ref_key);
  } else {
    out << "pool: up to date\n";
  }
  const auto pool = read_records(pool_path);
  std::map<std::string, std::vector<ReferenceSolution>> refs;
  for (const auto& s : split_names) refs[s] = read_references(inst_root / s / "references.jsonl");

  // 4. per strategy: sample, train (one model per seed), evaluate
  const std::size_t budget = o.budget.value_or(default_budget(domain, o.scale));
  std::string table = "train_split,iid_ilr_on_solved,iid_ilr_on_optimal,iid_swc,iid_optimal_pct,"
                      "ood_ilr_on_solved,ood_ilr_on_optimal,ood_swc,ood_optimal_pct\n";
  for (const auto& name : o.strategies) {
    SamplingOpts so;
    so.strategy = name;
    const Strategy strategy = parse_strategy(name);
    so.tau = strategy == Strategy::Combined ? o.combined_tau.value_or(default_combined_tau(domain))
                                            : o.tau.value_or(default_tau(domain));
    so.c_variant = o.c_variant;
    so.budget = budget;
    so.clusters = o.clusters;
    so.threshold = o.threshold;
    const double tau = *so.tau;
    const std::string label = strategy_label(strategy, tau);
    const fs::path sdir = root / "strategies" / std::string(strategy_name(strategy));
    const std::string key = git_blob_sha1(
        ref_key + "|" + name + "|" + format_number(tau, 6) + "|" + o.c_variant + "|" + std::to_string(budget) + "|" +
        std::to_string(o.clusters.value_or(0)) + "|" + format_number(o.threshold, 6) + "|" + o.model.kind + "|" +
        std::to_string(o.model.k) + "|" + format_number(o.model.ridge, 12) + "|" +
        format_number(o.model.validation_fraction, 6) + "|" + std::to_string(o.h.cache_size) + "|" +
        std::to_string(o.h.no_residual_floor) + std::to_string(o.h.round_residual) + "|" +
        [&] {
          std::string s;
          for (auto seed : o.seeds) s += std::to_string(seed) + ";";
          return s;
        }());
    if (!stages.done("strategy-" + std::string(strategy_name(strategy)), key)) {
      std::vector<std::shared_ptr<const ResidualModel>> models;
      for (std::uint64_t seed : o.seeds) {
        const std::uint64_t run_seed = derive_seed(g.seed, seed);
        const auto spec = sampling_spec(so, domain, pool.size(), derive_seed(run_seed, "sample"));
        const auto sel = select_examples(pool, spec, g.jobs);
        std::vector<TrainingExample> chosen;
        for (std::size_t i : sel.indices) chosen.push_back(pool[i]);
        const fs::path seed_dir = sdir / ("seed-" + std::to_string(seed));
        fs::create_directories(seed_dir);
        export_corpus(chosen, ExportFormat::Records, seed_dir / "selection.jsonl");
        auto model = train_residual_model(
            chosen, train_options(o.model, derive_seed(run_seed, "train"), std::string(strategy_name(strategy)),
                                  budget));
        model.save(seed_dir / "model.json");
        models.push_back(std::make_shared<const ResidualModel>(std::move(model)));
      }
      const auto opts = heuristic_options(o.h);
      std::map<std::uint64_t, std::size_t> model_of_seed;
      for (std::size_t i = 0; i < o.seeds.size(); ++i) model_of_seed[o.seeds[i]] = i;
      for (const std::string split : {"test-iid", "test-ood"}) {
        ExperimentConfig config;
        config.label = label + " " + split;
        config.instances = sets[split].instances;
        config.seeds = o.seeds;
        config.limits = limits;
        config.jobs = g.jobs;
        config.make_evaluator = [&](const PuzzleInstance&, std::uint64_t seed) {
          return std::make_shared<const LearnedHeuristic>(models[model_of_seed.at(seed)], domain, opts);
        };
        const auto report = run_experiment(config, refs[split]);
        write_eval_outputs(sdir / split, report, config_text, true);
      }
      stages.mark("strategy-" + std::string(strategy_name(strategy)), key);
    } else {
      out << label << ": up to date\n";
    }
    const auto iid = read_report_summary(sdir / "test-iid" / "report.csv", label);
    const auto ood = read_report_summary(sdir / "test-ood" / "report.csv", label);
    table += table_row(label, iid, ood);
  }
  write_text(root / "comparison.csv", table);
  out << table;
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"heurlab: A* heuristic learning with planner-aware training data selection", "heurlab"};
  app.set_config("--config", "", "INI file; [subcommand] sections, command-line flags take precedence");
  app.require_subcommand(1);
  app.fallthrough();
  Global g;
  app.add_option("--seed", g.seed, "Master seed for every stochastic component")
      ->envname("HEURLAB_SEED")
      ->capture_default_str();
  app.add_option("--jobs,-j", g.jobs, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  app.add_flag("--force", g.force, "Overwrite existing outputs");

  GenerateOpts gen;
  auto* generate = app.add_subcommand("generate", "Generate instance splits");
  generate->add_option("--domain", gen.domain, "maze, sokoban or stp")->capture_default_str();
  generate->add_option("--split", gen.splits, "train, val, test-iid, test-ood or all")->delimiter(',');
  generate->add_option("--scale", gen.scale, "Multiplier on the default split sizes")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  generate->add_option("--count", gen.count, "Instances per split part (overrides --scale)")->check(CLI::PositiveNumber);
  generate->add_option("--size", gen.size, "Maze side, STP width or Sokoban board side")->check(CLI::PositiveNumber);
  generate->add_option("--boxes", gen.boxes, "Sokoban box count")->check(CLI::PositiveNumber);
  generate->add_option("--o-l", gen.o_l, "Minimum optimal plan length (exclusive)")->check(CLI::NonNegativeNumber);
  generate->add_option("--alpha", gen.alpha, "Minimum closed-list to plan-length ratio");
  generate->add_option("--beta-min", gen.beta_min, "Minimum closed-list length");
  generate->add_option("--beta-max", gen.beta_max, "Maximum closed-list length");
  generate->add_option("--boxoban", gen.boxoban, "Boxoban file to draw Sokoban boards from")->check(CLI::ExistingFile);
  generate->add_option("--out", gen.out, "Output root; splits go to <out>/<domain>/<split>")->capture_default_str();

  SolveOpts solve;
  auto* solve_cmd = app.add_subcommand("solve", "Compute quick-heuristic reference solutions");
  solve_cmd->add_option("--instances", solve.instances, "Instance directory")->required()->check(CLI::ExistingDirectory);
  solve_cmd->add_option("--out", solve.out, "References file (default <instances>/references.jsonl)");
  solve_cmd->add_option("--max-iterations", solve.max_iterations, "Expansion cap per search");

  OracleOpts oracle;
  auto* oracle_cmd = app.add_subcommand("oracle-study", "Noisy-oracle study by path section");
  oracle_cmd->add_option("--instances", oracle.instances, "Maze validation directory (default: generate one)")
      ->check(CLI::ExistingDirectory);
  oracle_cmd->add_option("--scale", oracle.scale, "Validation split scale when generating")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  oracle_cmd->add_option("--sigmas", oracle.sigmas, "Noise standard deviations")->delimiter(',')->capture_default_str();
  oracle_cmd->add_option("--noise-seeds", oracle.noise_seeds, "Noise seeds")->delimiter(',')->capture_default_str();
  oracle_cmd->add_flag("--no-clamp", oracle.no_clamp, "Allow negative noisy heuristics");
  oracle_cmd->add_flag("--per-query", oracle.per_query, "Redraw noise at every query instead of once per state");
  oracle_cmd->add_flag("--assert-ordering", oracle.assert_ordering, "Exit 1 unless End > Middle > Initial");
  oracle_cmd->add_option("--margin", oracle.margin, "Required gap between adjacent sections")->capture_default_str();
  oracle_cmd->add_option("--out", oracle.out, "Also write the table here");
  oracle_cmd->add_option("--max-iterations", oracle.max_iterations, "Expansion cap per search");

  ExtractOpts extract;
  auto* extract_cmd = app.add_subcommand("extract", "Extract the training pool from optimal paths");
  extract_cmd->add_option("--instances", extract.instances, "Instance directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  extract_cmd->add_option("--out", extract.out, "Pool records file")->capture_default_str();
  extract_cmd->add_option("--max-iterations", extract.max_iterations, "Expansion cap per search");

  auto add_sampling = [](CLI::App* cmd, SamplingOpts& s) {
    cmd->add_option("--strategy", s.strategy, "full, uniform, planner_aware, semdedup, combined, section_split")
        ->capture_default_str();
    cmd->add_option("--tau", s.tau, "Temperature of D(n,tau)")->check(CLI::PositiveNumber);
    cmd->add_option("--c-variant", s.c_variant, "log_ratio, ratio or linear_depth")->capture_default_str();
    cmd->add_option("--budget", s.budget, "Total examples to select")->check(CLI::PositiveNumber);
    cmd->add_option("--m", s.m, "Examples per problem (default ceil(budget / problems))")->check(CLI::PositiveNumber);
    cmd->add_option("--clusters", s.clusters, "SemDeDup cluster count")->check(CLI::PositiveNumber);
    cmd->add_option("--threshold", s.threshold, "SemDeDup cosine threshold")->capture_default_str();
    cmd->add_option("--section", s.section, "Section split: initial, middle, end, all, ~initial, ~middle, ~end")
        ->capture_default_str();
  };
  SampleOpts sample;
  auto* sample_cmd = app.add_subcommand("sample", "Select training examples from a pool");
  sample_cmd->add_option("--pool", sample.pool, "Pool records file")->required()->check(CLI::ExistingFile);
  sample_cmd->add_option("--out", sample.out, "Selected records file")->capture_default_str();
  add_sampling(sample_cmd, sample.sampling);

  auto add_model = [](CLI::App* cmd, ModelOpts& m) {
    cmd->add_option("--model-kind", m.kind, "knn or linear")->capture_default_str();
    cmd->add_option("--k", m.k, "Neighbours for knn")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--ridge", m.ridge, "Ridge damping for linear")->capture_default_str();
    cmd->add_option("--validation-fraction", m.validation_fraction, "Held-out share of instance ids")
        ->capture_default_str();
  };
  auto add_heuristic = [](CLI::App* cmd, HeuristicOpts& h) {
    cmd->add_option("--cache-size", h.cache_size, "Heuristic cache entries (0 disables)")->capture_default_str();
    cmd->add_flag("--no-residual-floor", h.no_residual_floor, "Keep negative predicted residuals");
    cmd->add_flag("--round-residual", h.round_residual, "Round predicted residuals to integers");
  };
  TrainOpts train;
  auto* train_cmd = app.add_subcommand("train", "Fit a residual model");
  train_cmd->add_option("--examples", train.examples, "Training records file")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--out", train.out, "Model file")->capture_default_str();
  add_model(train_cmd, train.model);

  EvalOpts eval;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a heuristic against the references");
  eval_cmd->add_option("--instances", eval.instances, "Instance directory")->required()->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--references", eval.references, "References file (default <instances>/references.jsonl)");
  eval_cmd->add_option("--heuristic", eval.heuristic, "quick, zero, oracle or model")->capture_default_str();
  eval_cmd->add_option("--model", eval.model, "Model file for --heuristic model")->check(CLI::ExistingFile);
  add_heuristic(eval_cmd, eval.h);
  eval_cmd->add_option("--seeds", eval.seeds, "Evaluation seeds")->delimiter(',')->capture_default_str();
  eval_cmd->add_option("--max-iterations", eval.max_iterations, "Expansion cap per search");
  eval_cmd->add_option("--max-time", eval.max_time, "Wall-time cap per search, seconds");
  eval_cmd->add_flag("--with-timing", eval.with_timing, "Also write report.timing.csv with wall times and ITR");
  eval_cmd->add_option("--out", eval.out, "Output directory")->capture_default_str();

  PipelineOpts pipe;
  auto* pipeline_cmd = app.add_subcommand("pipeline", "Generate, solve, sample, train and evaluate end to end");
  pipeline_cmd->add_option("--domain", pipe.domain, "maze, sokoban or stp")->capture_default_str();
  pipeline_cmd->add_option("--scale", pipe.scale, "Multiplier on split sizes and budget")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  pipeline_cmd->add_option("--strategies", pipe.strategies, "Strategies to compare")
      ->delimiter(',')
      ->capture_default_str();
  pipeline_cmd->add_option("--budget", pipe.budget, "Examples per strategy")->check(CLI::PositiveNumber);
  pipeline_cmd->add_option("--tau", pipe.tau, "Temperature of D(n,tau)")->check(CLI::PositiveNumber);
  pipeline_cmd->add_option("--combined-tau", pipe.combined_tau, "Temperature inside SD+D(n,tau)")
      ->check(CLI::PositiveNumber);
  pipeline_cmd->add_option("--c-variant", pipe.c_variant, "log_ratio, ratio or linear_depth")->capture_default_str();
  pipeline_cmd->add_option("--clusters", pipe.clusters, "SemDeDup cluster count")->check(CLI::PositiveNumber);
  pipeline_cmd->add_option("--threshold", pipe.threshold, "SemDeDup cosine threshold")->capture_default_str();
  add_model(pipeline_cmd, pipe.model);
  add_heuristic(pipeline_cmd, pipe.h);
  pipeline_cmd->add_option("--seeds", pipe.seeds, "Sampling/training seeds")->delimiter(',')->capture_default_str();
  pipeline_cmd->add_option("--max-iterations", pipe.max_iterations, "Expansion cap per search")->capture_default_str();
  pipeline_cmd->add_option("--boxoban", pipe.boxoban, "Boxoban file for Sokoban boards")->check(CLI::ExistingFile);
  pipeline_cmd->add_option("--out", pipe.out, "Output directory")->capture_default_str();

  ExportOpts exp;
  auto* export_cmd = app.add_subcommand("export-prompts", "Write the training corpus as prompts or records");
  export_cmd->add_option("--examples", exp.examples, "Records file")->required()->check(CLI::ExistingFile);
  export_cmd->add_option("--out", exp.out, "Output file")->capture_default_str();
  export_cmd->add_option("--format", exp.format, "prompts or records")->capture_default_str();
  export_cmd->add_option("--symbol-seed", exp.symbol_seed, "Seed for STP letter assignment");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n' << "run 'heurlab --help' for usage\n";
    return kExitUsage;
  }

  const std::string config_text = canonical_config(app.config_to_str(true, false));
  try {
    if (generate->parsed()) return cmd_generate(gen, g, out);
    if (solve_cmd->parsed()) return cmd_solve(solve, g, out);
    if (oracle_cmd->parsed()) return cmd_oracle_study(oracle, g, out);
    if (extract_cmd->parsed()) return cmd_extract(extract, g, out);
    if (sample_cmd->parsed()) return cmd_sample(sample, g, out, err);
    if (train_cmd->parsed()) return cmd_train(train, g, out);
    if (eval_cmd->parsed()) return cmd_eval(eval, g, config_text, out);
    if (pipeline_cmd->parsed()) return cmd_pipeline(pipe, g, config_text, out);
    if (export_cmd->parsed()) return cmd_export(exp, g, out);
  } catch (const AssertionFailed& e) {
    err << "assertion failed: " << e.what() << '\n';
    return kExitAssertion;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "runtime failure: " << e.what() << '\n';
    return kExitRuntime;
  }
  err << "usage error: no subcommand\n";
  return kExitUsage;
}

}  // namespace heurlab::cli
