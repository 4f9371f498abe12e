#include "heurlab/oracle_noise.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <deque>
#include <map>
#include <numbers>
#include <sstream>

#include "heurlab/parallel.hpp"

namespace heurlab {

namespace {

// (k + 0.5) / 2^53 lies strictly inside (0, 1).
double open_unit(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

double box_muller(double u1, double u2) noexcept {
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

std::string_view section_name(Section section) noexcept {
  switch (section) {
    case Section::Initial: return "Initial";
    case Section::Middle: return "Middle";
    case Section::End: return "End";
  }
  return "unknown";
}

Section parse_section(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "initial") return Section::Initial;
  if (lower == "middle") return Section::Middle;
  if (lower == "end") return Section::End;
  throw InputError("unknown section '" + std::string(name) + "' (expected initial, middle or end)");
}

Section section_of(int g, int plan_len) {
  if (plan_len < 1) throw InputError("section_of needs plan_len >= 1");
  if (g < 0) throw InputError("section_of needs g >= 0");
  // g < plan/3  <=>  3g < plan, exactly, for integers.
  const long long g3 = 3LL * g;
  if (g3 < plan_len) return Section::Initial;
  if (g3 < 2LL * plan_len) return Section::Middle;
  return Section::End;
}

OracleDistances::OracleDistances(const PuzzleInstance& maze) {
  if (maze.domain != Domain::Maze) {
    throw UnsupportedDomain("oracle distances are only available for mazes, not " +
                            std::string(domain_name(maze.domain)));
  }
  by_cell_.assign(static_cast<std::size_t>(maze.cell_count()), -1);
  if (maze.goal < 0 || maze.goal >= maze.cell_count()) throw InputError("maze has no goal cell");
  std::deque<CellIndex> queue{maze.goal};
  by_cell_[static_cast<std::size_t>(maze.goal)] = 0;
  constexpr Cell kDirs[] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
  while (!queue.empty()) {
    const CellIndex at = queue.front();
    queue.pop_front();
    const Cell c = maze.cell(at);
    for (Cell d : kDirs) {
      const Cell n{c.row + d.row, c.col + d.col};
      if (!maze.in_bounds(n)) continue;
      const CellIndex ni = maze.index(n);
      if (maze.is_wall(ni) || by_cell_[static_cast<std::size_t>(ni)] >= 0) continue;
      by_cell_[static_cast<std::size_t>(ni)] = by_cell_[static_cast<std::size_t>(at)] + 1;
      queue.push_back(ni);
    }
  }
  if (const auto d = distance(maze.start)) plan_length_ = *d;
}

std::optional<int> OracleDistances::distance_of_cell(CellIndex cell) const {
  if (cell < 0 || static_cast<std::size_t>(cell) >= by_cell_.size()) return std::nullopt;
  const int d = by_cell_[static_cast<std::size_t>(cell)];
  if (d < 0) return std::nullopt;
  return d;
}

std::optional<int> OracleDistances::distance(const State& state) const { return distance_of_cell(state.player); }

std::vector<std::pair<CellIndex, int>> OracleDistances::entries() const {
  std::vector<std::pair<CellIndex, int>> out;
  for (std::size_t i = 0; i < by_cell_.size(); ++i) {
    if (by_cell_[i] >= 0) out.emplace_back(static_cast<CellIndex>(i), by_cell_[i]);
  }
  return out;
}

std::shared_ptr<const OracleDistances> oracle_distances(const PuzzleInstance& instance) {
  return std::make_shared<const OracleDistances>(instance);
}

void NoiseSpec::validate() const {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw InputError("sigma must be finite and nonnegative");
  if ((oracle_sections & ~kSectionAll) != 0) throw InputError("oracle_sections has unknown bits");
}

double keyed_normal(std::uint64_t seed, std::string_view key) noexcept {
  const std::uint64_t base = fnv1a(key, mix64(seed));
  return box_muller(open_unit(mix64(base ^ 0x5851f42d4c957f2dULL)), open_unit(mix64(base + 0x14057b7ef767814fULL)));
}

NoisyOracle::NoisyOracle(std::shared_ptr<const OracleDistances> oracle, NoiseSpec spec)
    : oracle_(std::move(oracle)), spec_(spec), rng_(spec.noise_seed) {
  if (!oracle_) throw InputError("noisy oracle needs an oracle table");
  spec_.validate();
  if (oracle_->plan_length() < 0) throw InputError("maze start cannot reach the goal");
}

void NoisyOracle::evaluate_batch(const PuzzleInstance& instance, std::span<const HeuristicQuery> queries,
                                 std::span<double> out) const {
  const int plan = std::max(oracle_->plan_length(), 1);
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const State& state = *queries[i].state;
    const auto exact = oracle_->distance(state);
    if (!exact) {
      ++fallbacks_;
      out[i] = quick_heuristic(state, instance);
      continue;
    }
    double h = *exact;
    const bool oracle_section = (spec_.oracle_sections & section_bit(section_of(queries[i].g, plan))) != 0;
    if (!oracle_section && spec_.sigma > 0.0) {
      double z = 0.0;
      if (spec_.mode == NoiseMode::PerState) {
        z = keyed_normal(spec_.noise_seed, state_key(state));
      } else {
        std::lock_guard lock(rng_mutex_);
        z = box_muller(open_unit(rng_()), open_unit(rng_()));
      }
      h += spec_.sigma * z;
    }
    out[i] = spec_.clamp_at_zero ? std::max(h, 0.0) : h;
  }
}

std::string OracleStudyRow::set_name() const { return all_row ? "All" : std::string(section_name(section)); }

std::vector<OracleStudyRow> run_oracle_experiment(std::span<const PuzzleInstance> instances,
                                                  std::span<const ReferenceSolution> references,
                                                  std::span<const double> sigmas,
                                                  std::span<const std::uint64_t> seeds,
                                                  const OracleStudyOptions& options) {
  if (seeds.empty()) throw InputError("oracle study needs at least one seed");
  for (const auto& inst : instances) {
    if (inst.domain != Domain::Maze) throw UnsupportedDomain("oracle study runs on mazes only");
  }
  std::vector<std::shared_ptr<const OracleDistances>> tables(instances.size());
  parallel_for(instances.size(), options.jobs, [&](std::size_t i) { tables[i] = oracle_distances(instances[i]); });

  auto run = [&](const std::string& label, double sigma, std::uint8_t sections) {
    ExperimentConfig config;
    config.label = label;
    config.instances = instances;
    config.seeds.assign(seeds.begin(), seeds.end());
    config.limits = options.limits;
    config.jobs = options.jobs;
    config.make_evaluator = [&, sigma, sections](const PuzzleInstance& inst, std::uint64_t seed) {
      NoiseSpec spec;
      spec.sigma = sigma;
      spec.oracle_sections = sections;
      spec.clamp_at_zero = options.clamp_at_zero;
      spec.mode = options.mode;
      spec.noise_seed = derive_seed(seed, inst.id);
      // the runner hands out references into `instances`
      const auto i = static_cast<std::size_t>(&inst - instances.data());
      return std::make_shared<const NoisyOracle>(tables[i], spec);
    };
    return run_experiment(config, references);
  };

  std::vector<OracleStudyRow> rows;
  OracleStudyRow all;
  all.all_row = true;
  all.report = run("All", 0.0, kSectionAll);
  rows.push_back(std::move(all));
  for (double sigma : sigmas) {
    for (Section s : {Section::Initial, Section::Middle, Section::End}) {
      OracleStudyRow row;
      row.section = s;
      row.sigma = sigma;
      row.report = run(std::string(section_name(s)), sigma, section_bit(s));
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string format_oracle_table(std::span<const OracleStudyRow> rows, char delimiter) {
  std::ostringstream out;
  out << "set" << delimiter << "sigma" << delimiter << "ilr_on_solved" << delimiter << "ilr_on_optimal" << delimiter
      << "swc" << delimiter << "optimal_pct\n";
  for (const auto& row : rows) {
    out << row.set_name() << delimiter << (row.all_row ? std::string("-") : format_number(row.sigma, 2)) << delimiter
        << format_number(row.report.ilr_on_solved.mean) << delimiter << format_number(row.report.ilr_on_optimal.mean)
        << delimiter << format_number(row.report.swc.mean) << delimiter
        << format_number(row.report.optimal_pct.mean, 2) << '\n';
  }
  return out.str();
}

std::vector<std::string> check_section_ordering(std::span<const OracleStudyRow> rows, double margin) {
  std::map<double, std::map<Section, double>> by_sigma;
  for (const auto& row : rows) {
    if (!row.all_row) by_sigma[row.sigma][row.section] = row.report.ilr_on_solved.mean;
  }
  std::vector<std::string> problems;
  for (const auto& [sigma, values] : by_sigma) {
    const std::string where = "sigma " + format_number(sigma, 2) + ": ";
    if (values.size() != 3) {
      problems.push_back(where + "missing section rows");
      continue;
    }
    const double initial = values.at(Section::Initial);
    const double middle = values.at(Section::Middle);
    const double end = values.at(Section::End);
    if (!(end - middle >= margin && end > middle)) {
      problems.push_back(where + "End " + format_number(end) + " vs Middle " + format_number(middle));
    }
    if (!(middle - initial >= margin && middle > initial)) {
      problems.push_back(where + "Middle " + format_number(middle) + " vs Initial " + format_number(initial));
    }
  }
  return problems;
}

}  // namespace heurlab
