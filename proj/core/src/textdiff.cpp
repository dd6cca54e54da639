#include "prodbg/textdiff.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

namespace prodbg {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) lines.push_back(cur);
  return lines;
}

namespace {

struct DiffOp {
  char tag;  // ' ' keep, '-' delete, '+' insert
  const std::string* line;
};

std::vector<DiffOp> diff_ops(const std::vector<std::string>& a,
                             const std::vector<std::string>& b) {
  std::size_t n = a.size(), m = b.size();
  std::vector<std::vector<int>> lcs(n + 1, std::vector<int>(m + 1, 0));
  for (std::size_t i = n; i-- > 0;)
    for (std::size_t j = m; j-- > 0;)
      lcs[i][j] = a[i] == b[j] ? lcs[i + 1][j + 1] + 1
                               : std::max(lcs[i + 1][j], lcs[i][j + 1]);
  std::vector<DiffOp> ops;
  std::size_t i = 0, j = 0;
  while (i < n && j < m) {
    if (a[i] == b[j]) {
      ops.push_back({' ', &a[i]});
      ++i, ++j;
    } else if (lcs[i + 1][j] >= lcs[i][j + 1]) {
      ops.push_back({'-', &a[i]});
      ++i;
    } else {
      ops.push_back({'+', &b[j]});
      ++j;
    }
  }
  for (; i < n; ++i) ops.push_back({'-', &a[i]});
  for (; j < m; ++j) ops.push_back({'+', &b[j]});
  return ops;
}

}  // namespace

std::string make_unified_diff(const std::string& a, const std::string& b,
                              const std::string& a_label,
                              const std::string& b_label, int context) {
  auto la = split_lines(a), lb = split_lines(b);
  auto ops = diff_ops(la, lb);
  bool any = std::any_of(ops.begin(), ops.end(),
                         [](const DiffOp& op) { return op.tag != ' '; });
  if (!any) return "";

  std::ostringstream os;
  os << "--- " << a_label << "\n+++ " << b_label << "\n";

  std::size_t idx = 0;
  int a_line = 1, b_line = 1;  // 1-based position of ops[idx]
  while (idx < ops.size()) {
    if (ops[idx].tag == ' ') {
      ++a_line, ++b_line, ++idx;
      continue;
    }
    // Hunk: back up `context` lines, extend until changes are more than
    // 2*context apart.
    std::size_t start = idx;
    int lead = 0;
    while (start > 0 && ops[start - 1].tag == ' ' && lead < context) {
      --start;
      ++lead;
    }
    std::size_t end = idx;
    std::size_t last_change = idx;
    while (end < ops.size()) {
      if (ops[end].tag != ' ') {
        last_change = end;
        ++end;
        continue;
      }
      std::size_t gap = 0;
      std::size_t probe = end;
      while (probe < ops.size() && ops[probe].tag == ' ') ++probe, ++gap;
      if (probe < ops.size() && gap <= static_cast<std::size_t>(2 * context)) {
        end = probe;
      } else {
        end = std::min(probe, last_change + 1 + static_cast<std::size_t>(context));
        break;
      }
    }

    int a_start = a_line - lead, b_start = b_line - lead;
    int a_count = 0, b_count = 0;
    for (std::size_t k = start; k < end; ++k) {
      if (ops[k].tag != '+') ++a_count;
      if (ops[k].tag != '-') ++b_count;
    }
    os << "@@ -" << (a_count == 0 ? a_start - 1 : a_start) << "," << a_count
       << " +" << (b_count == 0 ? b_start - 1 : b_start) << "," << b_count
       << " @@\n";
    for (std::size_t k = start; k < end; ++k)
      os << ops[k].tag << *ops[k].line << "\n";

    for (std::size_t k = idx; k < end; ++k) {
      if (ops[k].tag != '+') ++a_line;
      if (ops[k].tag != '-') ++b_line;
    }
    idx = end;
  }
  return os.str();
}

namespace {

struct Hunk {
  int a_start = 1;  // 1-based
  std::vector<std::string> old_lines;  // ' ' and '-'
  std::vector<std::string> new_lines;  // ' ' and '+'
};

bool parse_hunks(const std::string& diff, std::vector<Hunk>& hunks) {
  auto lines = split_lines(diff);
  std::size_t i = 0;
  bool seen = false;
  while (i < lines.size()) {
    const std::string& l = lines[i];
    if (l.rfind("@@", 0) != 0) {
      ++i;
      continue;
    }
    Hunk h;
    std::size_t dash = l.find('-');
    if (dash == std::string::npos) return false;
    h.a_start = std::atoi(l.c_str() + dash + 1);
    ++i;
    while (i < lines.size() && !lines[i].empty() &&
           (lines[i][0] == ' ' || lines[i][0] == '-' || lines[i][0] == '+' ||
            lines[i][0] == '\\')) {
      char tag = lines[i][0];
      std::string body = lines[i].substr(1);
      if (tag == ' ') {
        h.old_lines.push_back(body);
        h.new_lines.push_back(body);
      } else if (tag == '-') {
        h.old_lines.push_back(body);
      } else if (tag == '+') {
        h.new_lines.push_back(body);
      }
      ++i;
    }
    hunks.push_back(std::move(h));
    seen = true;
  }
  return seen;
}

bool match_at(const std::vector<std::string>& lines, std::size_t pos,
              const std::vector<std::string>& pat) {
  if (pos + pat.size() > lines.size()) return false;
  for (std::size_t k = 0; k < pat.size(); ++k)
    if (lines[pos + k] != pat[k]) return false;
  return true;
}

}  // namespace

std::optional<std::string> apply_unified_diff(const std::string& text,
                                              const std::string& diff) {
  std::vector<Hunk> hunks;
  if (!parse_hunks(diff, hunks)) return std::nullopt;

  std::vector<std::string> lines = split_lines(text);
  long long offset = 0;
  for (const Hunk& h : hunks) {
    long long want = static_cast<long long>(h.a_start) - 1 + offset;
    if (h.old_lines.empty()) {
      // Pure insertion: the header position names the line before.
      long long at = static_cast<long long>(h.a_start) + offset;
      if (at < 0 || at > static_cast<long long>(lines.size()))
        return std::nullopt;
      lines.insert(lines.begin() + at, h.new_lines.begin(),
                   h.new_lines.end());
      offset += static_cast<long long>(h.new_lines.size());
      continue;
    }
    long long found = -1;
    long long limit = static_cast<long long>(lines.size());
    for (long long d = 0; d <= limit; ++d) {
      long long lo = want - d, hi = want + d;
      if (lo >= 0 && lo < limit &&
          match_at(lines, static_cast<std::size_t>(lo), h.old_lines)) {
        found = lo;
        break;
      }
      if (d > 0 && hi >= 0 && hi < limit &&
          match_at(lines, static_cast<std::size_t>(hi), h.old_lines)) {
        found = hi;
        break;
      }
    }
    if (found < 0) return std::nullopt;
    lines.erase(lines.begin() + found,
                lines.begin() + found + static_cast<long long>(h.old_lines.size()));
    lines.insert(lines.begin() + found, h.new_lines.begin(),
                 h.new_lines.end());
    offset = found + static_cast<long long>(h.new_lines.size()) -
             (static_cast<long long>(h.a_start) - 1 +
              static_cast<long long>(h.old_lines.size()));
  }
  std::string out;
  for (const auto& l : lines) {
    out += l;
    out += '\n';
  }
  return out;
}

}  // namespace prodbg
