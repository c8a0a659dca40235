#pragma once

// Reference implementations used only by tests. None of these share code
// with the library paths they check.

#include <cstdint>
#include <deque>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace oracle {

// Exhaustive search over restricted edit scripts: the strings are consumed
// front to back and every letter takes part in at most one operation
// (match, substitute, delete, insert, or swap of two adjacent letters).
// No memoization; every script is enumerated, with branch-and-bound pruning.
inline void restricted_search(const std::u32string& a, std::size_t i, const std::u32string& b,
                              std::size_t j, std::size_t cost, std::size_t& best) {
  if (cost >= best) return;
  if (i == a.size() && j == b.size()) {
    best = cost;
    return;
  }
  if (i < a.size() && j < b.size()) {
    restricted_search(a, i + 1, b, j + 1, cost + (a[i] == b[j] ? 0 : 1), best);
  }
  if (i + 1 < a.size() && j + 1 < b.size() && a[i] == b[j + 1] && a[i + 1] == b[j]) {
    restricted_search(a, i + 2, b, j + 2, cost + 1, best);
  }
  if (i < a.size()) restricted_search(a, i + 1, b, j, cost + 1, best);
  if (j < b.size()) restricted_search(a, i, b, j + 1, cost + 1, best);
}

inline std::size_t restricted_distance(const std::u32string& a, const std::u32string& b) {
  std::size_t best = a.size() + b.size() + 1;
  restricted_search(a, 0, b, 0, 0, best);
  return best;
}

// Breadth-first search over strings using the four operations with letters
// drawn from `alphabet`. Computes the unrestricted distance, where a letter
// may be edited more than once.
inline std::size_t bfs_distance(const std::u32string& from, const std::u32string& to,
                                const std::u32string& alphabet) {
  if (from == to) return 0;
  std::deque<std::pair<std::u32string, std::size_t>> queue{{from, 0}};
  std::set<std::u32string> seen{from};
  const auto limit = from.size() + to.size();
  while (!queue.empty()) {
    auto [s, d] = queue.front();
    queue.pop_front();
    std::vector<std::u32string> next;
    for (std::size_t k = 0; k <= s.size(); ++k) {
      for (char32_t c : alphabet) next.push_back(s.substr(0, k) + c + s.substr(k));
    }
    for (std::size_t k = 0; k < s.size(); ++k) {
      next.push_back(s.substr(0, k) + s.substr(k + 1));
      for (char32_t c : alphabet) {
        if (c != s[k]) {
          auto t = s;
          t[k] = c;
          next.push_back(t);
        }
      }
      if (k + 1 < s.size()) {
        auto t = s;
        std::swap(t[k], t[k + 1]);
        next.push_back(t);
      }
    }
    for (auto& t : next) {
      if (t == to) return d + 1;
      if (t.size() > limit || !seen.insert(t).second) continue;
      queue.emplace_back(std::move(t), d + 1);
    }
  }
  return limit;
}

// All strings over `alphabet` with length <= max_len, shortest first.
inline std::vector<std::u32string> all_strings(const std::u32string& alphabet, std::size_t max_len) {
  std::vector<std::u32string> out{U""};
  std::size_t begin = 0;
  for (std::size_t len = 1; len <= max_len; ++len) {
    const auto end = out.size();
    for (std::size_t k = begin; k < end; ++k) {
      for (char32_t c : alphabet) out.push_back(out[k] + c);
    }
    begin = end;
  }
  return out;
}

}  // namespace oracle
