#pragma once

#include "qdc/grid.hpp"
#include "qdc/rectcalc.hpp"

#include <functional>
#include <optional>
#include <vector>

// Brute-force oracles, kept independent of the library's incremental sweep
// and enumeration machinery: multiplicities are recomputed from the mixed
// second difference definition and every subset/gaggle is evaluated from
// scratch in plain rational arithmetic.  Usable on tiny meshes only.
namespace oracle {

using namespace qdc;

inline int cell_at(const std::vector<bool>& cells, std::size_t cx, std::size_t cy, long ci,
                   long cj) {
  if (ci < 0 || cj < 0 || ci >= static_cast<long>(cx) || cj >= static_cast<long>(cy)) return 0;
  return cells[static_cast<std::size_t>(ci) * cy + static_cast<std::size_t>(cj)] ? 1 : 0;
}

inline int mult_at(const std::vector<bool>& cells, std::size_t cx, std::size_t cy, std::size_t i,
                   std::size_t j) {
  const long ci = static_cast<long>(i), cj = static_cast<long>(j);
  return cell_at(cells, cx, cy, ci, cj) - cell_at(cells, cx, cy, ci - 1, cj) -
         cell_at(cells, cx, cy, ci, cj - 1) + cell_at(cells, cx, cy, ci - 1, cj - 1);
}

inline Rational l_of_cells(const GridFunction& lower, const GridFunction& upper,
                           const std::vector<bool>& cells) {
  const std::size_t cx = lower.nx() - 1, cy = lower.ny() - 1;
  Rational sum(0);
  for (std::size_t i = 0; i < lower.nx(); ++i) {
    for (std::size_t j = 0; j < lower.ny(); ++j) {
      const int m = mult_at(cells, cx, cy, i, j);
      if (m > 0) sum += upper.at(i, j) * m;
      if (m < 0) sum += lower.at(i, j) * m;
    }
  }
  return sum;
}

struct MinL {
  Rational value;
  std::vector<bool> cells;
};

/// Minimum of L over all nonempty cell subsets (every gaggle is equivalent
/// to one, and every subset is realized by a gaggle).
inline MinL min_l(const GridFunction& lower, const GridFunction& upper) {
  const std::size_t n = (lower.nx() - 1) * (lower.ny() - 1);
  MinL best;
  bool have = false;
  for (std::uint64_t mask = 1; mask < (std::uint64_t(1) << n); ++mask) {
    std::vector<bool> cells(n);
    for (std::size_t t = 0; t < n; ++t) cells[t] = (mask >> t) & 1;
    Rational l = l_of_cells(lower, upper, cells);
    if (!have || l < best.value) {
      have = true;
      best = MinL{std::move(l), std::move(cells)};
    }
  }
  return best;
}

/// Exact P bound at a point by exhaustive subset enumeration.
inline std::optional<Rational> p_bound(const GridFunction& lower, const GridFunction& upper,
                                       GridPoint x, CornerSide side) {
  const std::size_t cx = lower.nx() - 1, cy = lower.ny() - 1;
  const std::size_t n = cx * cy;
  std::optional<Rational> best;
  for (std::uint64_t mask = 1; mask < (std::uint64_t(1) << n); ++mask) {
    std::vector<bool> cells(n);
    for (std::size_t t = 0; t < n; ++t) cells[t] = (mask >> t) & 1;
    const int m = mult_at(cells, cx, cy, x.i, x.j);
    const bool admissible = side == CornerSide::opposite ? m < 0 : m > 0;
    if (!admissible) continue;
    Rational ratio = l_of_cells(lower, upper, cells) / (m < 0 ? -m : m);
    if (!best || ratio < *best) best = std::move(ratio);
  }
  return best;
}

/// Exhaustive small-gaggle P bound: all gaggles with at most `max_members`
/// members, built directly from the public definitional operations.
inline std::optional<Rational> p_bound_gaggles(const GridFunction& lower,
                                               const GridFunction& upper, GridPoint x,
                                               CornerSide side, std::size_t max_members) {
  std::vector<IndexRect> rects;
  for (std::size_t i1 = 0; i1 + 1 < lower.nx(); ++i1)
    for (std::size_t j1 = 0; j1 + 1 < lower.ny(); ++j1)
      for (std::size_t i2 = i1 + 1; i2 < lower.nx(); ++i2)
        for (std::size_t j2 = j1 + 1; j2 < lower.ny(); ++j2) rects.emplace_back(i1, j1, i2, j2);

  std::optional<Rational> best;
  std::vector<IndexRect> chosen;
  auto consider = [&]() {
    if (chosen.empty()) return;
    RectGaggle g(chosen);
    const int m = multiplicity(g).at(x);
    const bool admissible = side == CornerSide::opposite ? m < 0 : m > 0;
    if (!admissible) return;
    Rational ratio = l_value(lower, upper, g) / (m < 0 ? -m : m);
    if (!best || ratio < *best) best = std::move(ratio);
  };
  std::function<void(std::size_t)> descend = [&](std::size_t from) {
    consider();
    if (chosen.size() == max_members) return;
    for (std::size_t idx = from; idx < rects.size(); ++idx) {
      bool ok = true;
      for (const IndexRect& c : chosen) ok = ok && !interiors_overlap(c, rects[idx]);
      if (!ok) continue;
      chosen.push_back(rects[idx]);
      descend(idx + 1);
      chosen.pop_back();
    }
  };
  descend(0);
  return best;
}

/// Exhaustive small-gaggle search: all gaggles with at most `max_members`
/// members, built directly from the public definitional operations.
inline std::optional<Rational> min_l_gaggles(const GridFunction& lower, const GridFunction& upper,
                                             std::size_t max_members) {
  std::vector<IndexRect> rects;
  for (std::size_t i1 = 0; i1 + 1 < lower.nx(); ++i1)
    for (std::size_t j1 = 0; j1 + 1 < lower.ny(); ++j1)
      for (std::size_t i2 = i1 + 1; i2 < lower.nx(); ++i2)
        for (std::size_t j2 = j1 + 1; j2 < lower.ny(); ++j2) rects.emplace_back(i1, j1, i2, j2);

  std::optional<Rational> best;
  std::vector<IndexRect> chosen;
  auto consider = [&]() {
    if (chosen.empty()) return;
    Rational l = l_value(lower, upper, RectGaggle(chosen));
    if (!best || l < *best) best = std::move(l);
  };
  std::function<void(std::size_t)> descend = [&](std::size_t from) {
    consider();
    if (chosen.size() == max_members) return;
    for (std::size_t idx = from; idx < rects.size(); ++idx) {
      bool ok = true;
      for (const IndexRect& c : chosen) ok = ok && !interiors_overlap(c, rects[idx]);
      if (!ok) continue;
      chosen.push_back(rects[idx]);
      descend(idx + 1);
      chosen.pop_back();
    }
  };
  descend(0);
  return best;
}

}  // namespace oracle
