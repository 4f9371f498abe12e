#pragma once

#include <string>
#include <string_view>

#include "heurlab/domain.hpp"

namespace heurlab {

inline constexpr std::string_view kMazeLegend = "@ - player, # - wall, . - empty cell, X - goal";
inline constexpr std::string_view kSokobanLegend =
    "@ - player, # - wall, . - empty docks, ' ' - empty cell, $ - box, X - box on dock, O - player on dock";
inline constexpr std::string_view kStpLegend = "0 - empty space";

[[nodiscard]] std::string_view legend(Domain domain) noexcept;

/// Parses one board.
///   maze:    '#' wall, '.' empty, '@' player, 'X' goal, 'O' player on goal
///   Sokoban: '#' wall, ' ' empty, '.' dock, '$' box, 'X' box on dock,
///            '@' player, 'O' player on dock ('*' and '+' accepted as the
///            boxoban spellings of 'X' and 'O')
///   STP:     one line of w*w space-separated integers, 0 the blank; an
///            optional second line gives the goal permutation
/// Throws ParseError carrying the offending line and column.
[[nodiscard]] PuzzleInstance parse_ascii(std::string_view text, Domain domain);

/// Renders instance with `state` in place of the start state. Board rows end
/// in '\n'. The STP goal line is emitted only for non-canonical goals.
[[nodiscard]] std::string render_ascii(const PuzzleInstance& instance, const State& state);
[[nodiscard]] inline std::string render_ascii(const PuzzleInstance& instance) {
  return render_ascii(instance, instance.start);
}

/// STP state as a space-separated row of symbols, no trailing newline.
[[nodiscard]] std::string render_stp_row(const std::vector<CellIndex>& tiles);

}  // namespace heurlab
