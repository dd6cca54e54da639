// Line-based unified diffs: rendering patches for reports and applying
// model-suggested diffs back onto program text.
#pragma once

#include <optional>
#include <string>
#include <vector>

namespace prodbg {

std::vector<std::string> split_lines(const std::string& text);

// Unified diff of two texts (LCS-based), with `context` lines around each
// change. Empty string when the texts are equal.
std::string make_unified_diff(const std::string& a, const std::string& b,
                              const std::string& a_label = "a",
                              const std::string& b_label = "b",
                              int context = 3);

// Applies a unified diff to `text`. Hunk positions are taken as hints: the
// old lines are located exactly, searching outward from the stated line.
// Returns nothing when any hunk fails to apply.
std::optional<std::string> apply_unified_diff(const std::string& text,
                                              const std::string& diff);

}  // namespace prodbg
