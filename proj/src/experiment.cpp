#include "heurlab/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "json.hpp"
#include <openssl/evp.h>
#include <omp.h>

#include "heurlab/ascii.hpp"
#include "heurlab/common.hpp"
#include "heurlab/parallel.hpp"

namespace heurlab {

namespace {

InstanceOutcome solve_one(const ExperimentConfig& config, const PuzzleInstance& instance, std::uint64_t seed) {
  const auto evaluator = config.make_evaluator(instance, seed);
  const auto result = astar(instance, *evaluator, config.limits, config.tie_break);
  return outcome_of(instance, result);
}

ExperimentReport aggregate(const ExperimentConfig& config, std::vector<MetricsReport> per_seed) {
  ExperimentReport report;
  report.label = config.label;
  report.seeds = config.seeds;
  report.per_seed = std::move(per_seed);
  auto collect = [&](double MetricsReport::*field) {
    std::vector<double> values;
    for (const auto& r : report.per_seed) values.push_back(r.*field);
    return mean_std(values);
  };
  report.ilr_on_solved = collect(&MetricsReport::ilr_on_solved);
  report.ilr_on_optimal = collect(&MetricsReport::ilr_on_optimal);
  report.swc = collect(&MetricsReport::swc);
  report.optimal_pct = collect(&MetricsReport::optimal_pct);
  report.itr_on_solved = collect(&MetricsReport::itr_on_solved);
  report.itr_on_optimal = collect(&MetricsReport::itr_on_optimal);
  report.inputs_hash = hash_instances(config.instances);
  return report;
}

void check_config(const ExperimentConfig& config) {
  if (!config.make_evaluator) throw InputError("experiment '" + config.label + "' has no evaluator factory");
  if (config.seeds.empty()) throw InputError("experiment '" + config.label + "' has no seeds");
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config, std::span<const ReferenceSolution> references) {
  check_config(config);
  const std::size_t n = config.instances.size();
  std::vector<InstanceOutcome> outcomes(n * config.seeds.size());
  parallel_for(outcomes.size(), config.jobs, [&](std::size_t k) {
    const std::size_t s = k / n;
    outcomes[k] = solve_one(config, config.instances[k % n], config.seeds[s]);
  });
  std::vector<MetricsReport> per_seed;
  for (std::size_t s = 0; s < config.seeds.size(); ++s) {
    per_seed.push_back(compute_metrics(std::span(outcomes).subspan(s * n, n), references));
  }
  return aggregate(config, std::move(per_seed));
}

ExperimentReport run_experiment_serial(const ExperimentConfig& config, std::span<const ReferenceSolution> references) {
  check_config(config);
  std::vector<MetricsReport> per_seed;
  for (std::uint64_t seed : config.seeds) {
    std::vector<InstanceOutcome> outcomes;
    outcomes.reserve(config.instances.size());
    for (const auto& instance : config.instances) outcomes.push_back(solve_one(config, instance, seed));
    per_seed.push_back(compute_metrics(outcomes, references));
  }
  return aggregate(config, std::move(per_seed));
}

MeanStd mean_std(std::span<const double> values) {
  double sum = 0.0;
  int n = 0;
  for (double v : values) {
    if (std::isnan(v)) continue;
    sum += v;
    ++n;
  }
  if (n == 0) return {std::nan(""), std::nan("")};
  const double mean = sum / n;
  double sq = 0.0;
  for (double v : values) {
    if (!std::isnan(v)) sq += (v - mean) * (v - mean);
  }
  return {mean, std::sqrt(sq / n)};
}

std::string git_blob_sha1(std::string_view content) {
  const std::string header = "blob " + std::to_string(content.size()) + std::string(1, '\0');
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr) throw std::runtime_error("EVP_MD_CTX_new failed");
  const bool ok = EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                  EVP_DigestUpdate(ctx, content.data(), content.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, digest, &length) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw std::runtime_error("SHA-1 digest failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

std::string hash_instances(std::span<const PuzzleInstance> instances) {
  std::string all;
  for (const auto& inst : instances) {
    all += inst.id;
    all.push_back('\n');
    all += render_ascii(inst);
  }
  return git_blob_sha1(all);
}

std::string format_number(double value, int digits) {
  if (std::isnan(value)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  return buf;
}

void write_report_csv(const std::filesystem::path& path, const ExperimentReport& report, bool with_timing) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << "seed,instance_id,solved,optimal,closed_length,path_length,s_star,plan_len_star,ilr,swc_term";
  if (with_timing) out << ",wall_time,wall_time_star,itr";
  out << ",error\n";
  for (std::size_t s = 0; s < report.per_seed.size(); ++s) {
    for (const auto& row : report.per_seed[s].rows) {
      out << report.seeds[s] << ',' << row.instance_id << ',' << row.solved << ',' << row.optimal << ','
          << row.closed_length << ',' << row.path_length << ',' << row.s_star << ',' << row.plan_len_star << ','
          << format_number(row.ilr, 6) << ',' << format_number(row.swc_term, 6);
      if (with_timing) {
        out << ',' << format_number(row.wall_time, 9) << ',' << format_number(row.wall_time_star, 9) << ','
            << format_number(row.itr, 6);
      }
      out << ',' << row.error << '\n';
    }
  }
  out << "\n# aggregate over " << report.seeds.size() << " seed(s): mean,std\n";
  auto line = [&](const char* name, const MeanStd& m) {
    out << name << ',' << format_number(m.mean) << ',' << format_number(m.stddev) << '\n';
  };
  line("ilr_on_solved", report.ilr_on_solved);
  line("ilr_on_optimal", report.ilr_on_optimal);
  line("swc", report.swc);
  line("optimal_pct", report.optimal_pct);
  if (with_timing) {
    line("itr_on_solved", report.itr_on_solved);
    line("itr_on_optimal", report.itr_on_optimal);
  }
}

void write_manifest(const std::filesystem::path& path, const ExperimentReport& report, std::string_view config_text) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  nlohmann::json header{{"kind", "experiment"},
                        {"label", report.label},
                        {"config_hash", git_blob_sha1(config_text)},
                        {"inputs_hash", report.inputs_hash},
                        {"seeds", report.seeds},
                        {"environment",
                         {{"compiler", __VERSION__},
                          {"cplusplus", static_cast<long>(__cplusplus)},
                          {"openmp", static_cast<long>(_OPENMP)}}}};
  out << header.dump() << '\n';
  for (std::size_t s = 0; s < report.per_seed.size(); ++s) {
    for (const auto& row : report.per_seed[s].rows) {
      nlohmann::json rec{{"kind", "instance"},
                         {"seed", report.seeds[s]},
                         {"instance_id", row.instance_id},
                         {"solved", row.solved},
                         {"optimal", row.optimal},
                         {"closed_length", row.closed_length},
                         {"path_length", row.path_length},
                         {"s_star", row.s_star},
                         {"plan_len_star", row.plan_len_star}};
      if (!row.error.empty()) rec["error"] = row.error;
      out << rec.dump() << '\n';
    }
  }
}

}  // namespace heurlab
