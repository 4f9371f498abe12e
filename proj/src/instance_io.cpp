#include "heurlab/instance_io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

#include "heurlab/ascii.hpp"
#include "heurlab/common.hpp"
#include "heurlab/experiment.hpp"

namespace heurlab {

namespace fs = std::filesystem;

namespace {

constexpr const char* kManifest = "manifest.jsonl";
constexpr const char* kTiming = "timing.jsonl";

fs::path timing_sibling(const fs::path& path) {
  return path.parent_path() / (path.stem().string() + ".timing.jsonl");
}

// Goal and dock layout are part of the board text; everything else lives
// in the manifest.
std::string board_text(const PuzzleInstance& inst) {
  if (inst.domain != Domain::Stp) return render_ascii(inst);
  // Always write the goal line so that the file is self-describing.
  std::string text = render_stp_row(inst.start.cells) + "\n";
  text += render_stp_row(inst.goal_tiles) + "\n";
  return text;
}

}  // namespace

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw InputError("write failed for " + path.string());
}

void write_instance_set(const fs::path& dir, const InstanceSet& set, bool force, const std::string& header_extra) {
  if (fs::exists(dir / kManifest) && !force) {
    throw InputError(dir.string() + " already holds instances; pass --force to overwrite");
  }
  fs::create_directories(dir);
  nlohmann::json header{{"kind", "instances"},
                        {"domain", domain_name(set.domain)},
                        {"split", set.split},
                        {"count", set.instances.size()}};
  if (!header_extra.empty()) header["generation"] = nlohmann::json::parse(header_extra);
  std::string manifest = header.dump() + "\n";
  for (const auto& inst : set.instances) {
    if (inst.domain != set.domain) throw InputError("instance " + inst.id + " is not a " +
                                                    std::string(domain_name(set.domain)) + " instance");
    const std::string file = inst.id + ".txt";
    const std::string text = board_text(inst);
    write_text(dir / file, text);
    nlohmann::json rec{{"id", inst.id},
                       {"file", file},
                       {"seed", inst.seed},
                       {"provenance", inst.provenance},
                       {"sha1", git_blob_sha1(text)}};
    manifest += rec.dump() + "\n";
  }
  write_text(dir / kManifest, manifest);
}

InstanceSet read_instance_set(const fs::path& dir) {
  const fs::path manifest_path = dir / kManifest;
  std::istringstream lines(read_text(manifest_path));
  std::string line;
  InstanceSet set;
  int line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(manifest_path.string() + ": " + e.what(), line_no, 1);
    }
    if (line_no == 1) {
      if (j.value("kind", "") != "instances") throw InputError(manifest_path.string() + " is not an instance manifest");
      set.domain = parse_domain(j.at("domain").get<std::string>());
      set.split = j.value("split", "");
      continue;
    }
    const std::string file = j.at("file").get<std::string>();
    const std::string text = read_text(dir / file);
    if (j.contains("sha1") && j["sha1"].get<std::string>() != git_blob_sha1(text)) {
      throw InputError((dir / file).string() + " does not match its manifest hash");
    }
    PuzzleInstance inst = parse_ascii(text, set.domain);
    inst.id = j.at("id").get<std::string>();
    inst.seed = j.value("seed", std::uint64_t{0});
    inst.provenance = j.value("provenance", "");
    set.instances.push_back(std::move(inst));
  }
  if (line_no == 0) throw InputError(manifest_path.string() + " is empty");
  return set;
}

void write_timing(const fs::path& path, const std::vector<std::pair<std::string, double>>& rows) {
  std::string text;
  for (const auto& [id, seconds] : rows) text += nlohmann::json{{"id", id}, {"wall_time", seconds}}.dump() + "\n";
  write_text(path, text);
}

void write_references(const fs::path& path, std::span<const ReferenceSolution> refs) {
  std::string text;
  std::vector<std::pair<std::string, double>> timing;
  for (const auto& r : refs) {
    text += nlohmann::json{{"id", r.instance_id},
                           {"solved", r.solved},
                           {"s_star", r.s_star},
                           {"plan_len_star", r.plan_len_star}}
                .dump() +
            "\n";
    timing.emplace_back(r.instance_id, r.wall_time_star);
  }
  write_text(path, text);
  write_timing(timing_sibling(path), timing);
}

std::vector<ReferenceSolution> read_references(const fs::path& path) {
  std::map<std::string, double> times;
  if (const auto tp = timing_sibling(path); fs::exists(tp)) {
    std::istringstream tl(read_text(tp));
    std::string line;
    while (std::getline(tl, line)) {
      if (line.empty()) continue;
      const auto j = nlohmann::json::parse(line);
      times[j.at("id").get<std::string>()] = j.at("wall_time").get<double>();
    }
  }
  std::vector<ReferenceSolution> refs;
  std::istringstream lines(read_text(path));
  std::string line;
  int line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      ReferenceSolution r;
      r.instance_id = j.at("id").get<std::string>();
      r.solved = j.at("solved").get<bool>();
      r.s_star = j.at("s_star").get<std::int64_t>();
      r.plan_len_star = j.at("plan_len_star").get<int>();
      if (const auto it = times.find(r.instance_id); it != times.end()) r.wall_time_star = it->second;
      refs.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string() + ": " + e.what(), line_no, 1);
    }
  }
  return refs;
}

}  // namespace heurlab
