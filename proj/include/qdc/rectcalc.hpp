#pragma once

#include "qdc/grid.hpp"

#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace qdc {

/// A finite multiset of index rectangles with pairwise disjoint interiors;
/// closed rectangles may share boundary points, and corner multiplicities
/// add up where they meet.  Members are kept in lexicographic order.
class RectGaggle {
 public:
  explicit RectGaggle(std::vector<IndexRect> members);
  const std::vector<IndexRect>& members() const { return members_; }
  friend bool operator==(const RectGaggle& a, const RectGaggle& b) {
    return a.members_ == b.members_;
  }

 private:
  std::vector<IndexRect> members_;
};

bool interiors_overlap(const IndexRect& a, const IndexRect& b);

/// Signed corner counts: +1 per main corner (sw, ne), -1 per opposite corner
/// (se, nw), summed over members; zero entries are omitted.
class MultiplicityMap {
 public:
  explicit MultiplicityMap(std::map<GridPoint, int> entries) : entries_(std::move(entries)) {}
  int at(GridPoint p) const;
  const std::map<GridPoint, int>& entries() const { return entries_; }

 private:
  std::map<GridPoint, int> entries_;
};

MultiplicityMap multiplicity(const RectGaggle& gaggle);

/// Mixed corner sum: upper values at positive multiplicities, lower values at
/// negative ones.  Defined for any pair on a common mesh.
Rational l_value(const GridFunction& lower, const GridFunction& upper, const RectGaggle& gaggle);

/// Gaggle volume of a single function, additive over members.
Rational volume(const GridFunction& f, const RectGaggle& gaggle);

std::size_t cell_count(const Mesh& mesh);

enum class CornerSide { main, opposite };

struct BoundValue {
  bool infinite = false;  // no admissible gaggle within the search bound
  Rational value;
  std::optional<RectGaggle> witness;
  bool exact = false;  // search covered the whole family (cap reached)
};

/// min L(G)/|m_G(x)| over gaggles with at most max_rects members and
/// m_G(x) < 0 (opposite) or > 0 (main).  With max_rects at the elementary
/// cell count the result is the exact infimum over the whole family; below
/// the cap it is an upper estimate.
BoundValue p_bound(const GridFunction& lower, const GridFunction& upper, GridPoint x,
                   CornerSide side, std::size_t max_rects);

/// min(P_O(x), upper(x) - lower(x)); requires lower <= upper.
Rational gamma_value(const GridFunction& lower, const GridFunction& upper, GridPoint x,
                     std::size_t max_rects);

struct QReport {
  bool q1 = false;  // lower <= upper pointwise
  std::optional<GridPoint> q1_witness;
  bool q2 = false;  // no enumerated gaggle with L < 0
  std::optional<std::pair<RectGaggle, Rational>> q2_witness;
  bool exact = false;
};

QReport check_q(const GridFunction& lower, const GridFunction& upper, std::size_t max_rects);

struct BoundFailure {
  GridPoint point;
  CornerSide side;
  Rational difference;  // upper - lower at the point
  BoundValue bound;
};

struct CoherenceReport {
  bool feasible = false;
  std::optional<GridFunction> witness;  // a sandwiched distribution
  std::optional<std::pair<RectGaggle, Rational>> infeasibility;
  bool sup_attained = false;  // upper - lower <= P_O everywhere
  bool inf_attained = false;  // upper - lower <= P_M everywhere
  std::vector<BoundFailure> failures;
  bool exact = false;
  bool coherent = false;  // feasible and both bounds attained
};

/// Coherence test for a pair of quasi-distributions (or quasi-copulas on a
/// unit mesh) with equal margins.  Feasibility comes from the sandwich
/// oracle; when feasible, the two bound conditions are evaluated at every
/// grid point with witness gaggles for failures.
CoherenceReport check_coherence(const GridFunction& lower, const GridFunction& upper,
                                std::size_t max_rects);

GridPoint reflect_point(GridPoint p, const Mesh& mesh, Axis axis);
IndexRect reflect_rect(const IndexRect& r, const Mesh& mesh, Axis axis);
RectGaggle reflect_gaggle(const RectGaggle& gaggle, const Mesh& mesh, Axis axis);

/// Canonical gaggle covering a cell set: maximal runs of consecutive cells,
/// row by row.  Multiplicities and L depend only on the covered cells, so
/// this is the representative used for exact-search witnesses.
RectGaggle gaggle_from_cells(const std::vector<bool>& cells, std::size_t cells_x,
                             std::size_t cells_y);

}  // namespace qdc
