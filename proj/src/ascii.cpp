#include "heurlab/ascii.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <vector>

#include "heurlab/common.hpp"

namespace heurlab {

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t begin = 0;
  while (begin < text.size()) {
    const std::size_t end = text.find('\n', begin);
    if (end == std::string_view::npos) {
      lines.push_back(text.substr(begin));
      break;
    }
    lines.push_back(text.substr(begin, end - begin));
    begin = end + 1;
  }
  // a trailing blank line is not part of the board
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

PuzzleInstance parse_grid(std::string_view text, Domain domain) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw ParseError("empty board", 1, 1);
  const std::size_t width = lines.front().size();
  if (width == 0) throw ParseError("empty board row", 1, 1);

  PuzzleInstance inst;
  inst.domain = domain;
  inst.rows = static_cast<int>(lines.size());
  inst.cols = static_cast<int>(width);
  inst.walls.assign(lines.size() * width, 0);

  int player = -1;
  Cell player_at{};
  std::vector<Cell> boxes;
  Cell goal_at{};
  bool have_goal = false;

  for (std::size_t r = 0; r < lines.size(); ++r) {
    const int line_no = static_cast<int>(r) + 1;
    if (lines[r].size() != width) {
      throw ParseError("ragged row: " + std::to_string(lines[r].size()) + " columns, expected " +
                           std::to_string(width),
                       line_no, static_cast<int>(std::min(lines[r].size(), width)) + 1);
    }
    for (std::size_t c = 0; c < width; ++c) {
      const char ch = lines[r][c];
      const int col_no = static_cast<int>(c) + 1;
      const Cell here{static_cast<int>(r), static_cast<int>(c)};
      const CellIndex idx = inst.index(here);
      bool is_player = false;
      bool is_goal_or_dock = false;
      bool is_box = false;
      if (ch == '#') {
        inst.walls[static_cast<std::size_t>(idx)] = 1;
      } else if (domain == Domain::Maze) {
        switch (ch) {
          case '.': break;
          case '@': is_player = true; break;
          case 'X': is_goal_or_dock = true; break;
          case 'O': is_player = is_goal_or_dock = true; break;
          default:
            throw ParseError(std::string("unexpected maze glyph '") + ch + "'", line_no, col_no);
        }
      } else {
        switch (ch) {
          case ' ': break;
          case '.': is_goal_or_dock = true; break;
          case '$': is_box = true; break;
          case 'X': case '*': is_box = is_goal_or_dock = true; break;
          case '@': is_player = true; break;
          case 'O': case '+': is_player = is_goal_or_dock = true; break;
          default:
            throw ParseError(std::string("unexpected Sokoban glyph '") + ch + "'", line_no, col_no);
        }
      }
      if (is_player) {
        if (player >= 0) throw ParseError("duplicate player", line_no, col_no);
        player = idx;
        player_at = here;
      }
      if (is_box) boxes.push_back(here);
      if (is_goal_or_dock) {
        if (domain == Domain::Maze) {
          if (have_goal) throw ParseError("duplicate goal", line_no, col_no);
          have_goal = true;
          goal_at = here;
        } else {
          inst.docks.push_back(idx);
        }
      }
    }
  }
  const int last_line = static_cast<int>(lines.size());
  if (player < 0) throw ParseError("missing player", last_line, 1);
  if (domain == Domain::Maze) {
    if (!have_goal) throw ParseError("missing goal", last_line, 1);
    inst.goal = inst.index(goal_at);
    inst.start = make_maze_state(inst, player_at);
  } else {
    if (boxes.size() != inst.docks.size()) {
      throw ParseError("box/dock count mismatch: " + std::to_string(boxes.size()) + " boxes, " +
                           std::to_string(inst.docks.size()) + " docks",
                       last_line, 1);
    }
    std::sort(inst.docks.begin(), inst.docks.end());
    inst.start = make_sokoban_state(inst, player_at, std::move(boxes));
  }
  return inst;
}

std::vector<CellIndex> parse_tile_row(std::string_view line, int line_no) {
  std::vector<CellIndex> tiles;
  std::size_t i = 0;
  while (i < line.size()) {
    if (line[i] == ' ') {
      ++i;
      continue;
    }
    const std::size_t begin = i;
    while (i < line.size() && line[i] != ' ') ++i;
    int value = 0;
    const auto token = line.substr(begin, i - begin);
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
      throw ParseError("expected a tile number, got '" + std::string(token) + "'", line_no,
                       static_cast<int>(begin) + 1);
    }
    tiles.push_back(value);
  }
  return tiles;
}

PuzzleInstance parse_stp(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw ParseError("empty STP text", 1, 1);
  if (lines.size() > 2) throw ParseError("STP text has more than two lines", 3, 1);
  auto tiles = parse_tile_row(lines[0], 1);
  const auto width = static_cast<int>(std::lround(std::sqrt(static_cast<double>(tiles.size()))));
  if (width < 2 || width * width != static_cast<int>(tiles.size())) {
    throw ParseError("tile count " + std::to_string(tiles.size()) + " is not a square of width >= 2", 1, 1);
  }
  PuzzleInstance inst;
  try {
    inst = make_stp_instance(width, std::move(tiles));
  } catch (const InputError& e) {
    throw ParseError(e.what(), 1, 1);
  }
  if (lines.size() == 2) {
    auto goal = parse_tile_row(lines[1], 2);
    if (goal.size() != inst.goal_tiles.size()) throw ParseError("goal row length differs from puzzle row", 2, 1);
    try {
      inst.goal_tiles = make_stp_state(std::move(goal)).cells;
    } catch (const InputError& e) {
      throw ParseError(e.what(), 2, 1);
    }
  }
  return inst;
}

}  // namespace

std::string_view legend(Domain domain) noexcept {
  switch (domain) {
    case Domain::Maze: return kMazeLegend;
    case Domain::Sokoban: return kSokobanLegend;
    case Domain::Stp: return kStpLegend;
  }
  return {};
}

PuzzleInstance parse_ascii(std::string_view text, Domain domain) {
  return domain == Domain::Stp ? parse_stp(text) : parse_grid(text, domain);
}

std::string render_stp_row(const std::vector<CellIndex>& tiles) {
  std::string out;
  for (std::size_t i = 0; i < tiles.size(); ++i) {
    if (i) out.push_back(' ');
    out += std::to_string(tiles[i]);
  }
  return out;
}

std::string render_ascii(const PuzzleInstance& inst, const State& state) {
  if (inst.domain == Domain::Stp) {
    std::string out = render_stp_row(state.cells) + "\n";
    if (inst.goal_tiles != stp_goal_tiles(inst.cols)) out += render_stp_row(inst.goal_tiles) + "\n";
    return out;
  }
  std::string out;
  out.reserve(static_cast<std::size_t>(inst.rows * (inst.cols + 1)));
  for (int r = 0; r < inst.rows; ++r) {
    for (int c = 0; c < inst.cols; ++c) {
      const CellIndex i = inst.index({r, c});
      const bool player = i == state.player;
      char ch;
      if (inst.is_wall(i)) {
        ch = '#';
      } else if (inst.domain == Domain::Maze) {
        const bool goal = i == inst.goal;
        ch = player ? (goal ? 'O' : '@') : (goal ? 'X' : '.');
      } else {
        const bool dock = inst.is_dock(i);
        const bool box = std::binary_search(state.cells.begin(), state.cells.end(), i);
        if (player) ch = dock ? 'O' : '@';
        else if (box) ch = dock ? 'X' : '$';
        else ch = dock ? '.' : ' ';
      }
      out.push_back(ch);
    }
    out.push_back('\n');
  }
  return out;
}

}  // namespace heurlab
