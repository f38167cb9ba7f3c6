#pragma once

#include "qdc/rational.hpp"

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace qdc {

enum class AxisKind { extended_real, unit };
enum class Axis { x, y };

/// One axis coordinate: a finite rational or one of the symbolic sentinels
/// -inf / inf.  Sentinels never enter arithmetic; evaluation and volume code
/// read stored grid values at sentinel indices instead.
class Coord {
 public:
  static Coord neg_inf() { return Coord(Tag::neg_inf, Rational(0)); }
  static Coord pos_inf() { return Coord(Tag::pos_inf, Rational(0)); }
  explicit Coord(Rational value) : tag_(Tag::finite), value_(std::move(value)) {}

  bool is_neg_inf() const { return tag_ == Tag::neg_inf; }
  bool is_pos_inf() const { return tag_ == Tag::pos_inf; }
  bool is_finite() const { return tag_ == Tag::finite; }
  const Rational& value() const;

  /// Negation for the extended-real reflection; sentinels swap.
  Coord negated() const;

  std::string str() const;
  static Coord parse(const std::string& text);

  friend bool operator==(const Coord& a, const Coord& b);
  friend bool operator<(const Coord& a, const Coord& b);
  friend bool operator!=(const Coord& a, const Coord& b) { return !(a == b); }
  friend bool operator<=(const Coord& a, const Coord& b) { return a < b || a == b; }
  friend bool operator>(const Coord& a, const Coord& b) { return b < a; }
  friend bool operator>=(const Coord& a, const Coord& b) { return b <= a; }

 private:
  enum class Tag { neg_inf, finite, pos_inf };
  Coord(Tag tag, Rational value) : tag_(tag), value_(std::move(value)) {}
  Tag tag_;
  Rational value_;
};

/// A finite, strictly increasing coordinate axis with sentinel endpoints:
/// -inf .. inf for the extended-real kind, 0 .. 1 for the unit kind.
class AxisGrid {
 public:
  AxisGrid(AxisKind kind, std::vector<Coord> coords);

  AxisKind kind() const { return kind_; }
  std::size_t size() const { return coords_.size(); }
  std::size_t last() const { return coords_.size() - 1; }
  const Coord& at(std::size_t i) const { return coords_.at(i); }
  const std::vector<Coord>& coords() const { return coords_; }

  std::optional<std::size_t> index_of(const Coord& c) const;

  friend bool operator==(const AxisGrid& a, const AxisGrid& b);

 private:
  AxisKind kind_;
  std::vector<Coord> coords_;
};

class Mesh {
 public:
  Mesh(AxisGrid x_axis, AxisGrid y_axis);
  const AxisGrid& x() const { return x_; }
  const AxisGrid& y() const { return y_; }
  AxisKind kind() const { return x_.kind(); }
  friend bool operator==(const Mesh& a, const Mesh& b);
  friend bool operator!=(const Mesh& a, const Mesh& b) { return !(a == b); }

 private:
  AxisGrid x_;
  AxisGrid y_;
};

struct GridPoint {
  std::size_t i = 0;
  std::size_t j = 0;
  friend bool operator==(const GridPoint&, const GridPoint&) = default;
  friend auto operator<=>(const GridPoint&, const GridPoint&) = default;
};

/// Axis-aligned rectangle given by axis indices, i1 < i2 and j1 < j2.
/// Standard corners: sw = (i1,j1), se = (i2,j1), ne = (i2,j2), nw = (i1,j2).
/// The main corner set is {sw, ne}, the opposite corner set {se, nw}.
class IndexRect {
 public:
  IndexRect(std::size_t i1, std::size_t j1, std::size_t i2, std::size_t j2);

  std::size_t i1() const { return i1_; }
  std::size_t j1() const { return j1_; }
  std::size_t i2() const { return i2_; }
  std::size_t j2() const { return j2_; }

  GridPoint sw() const { return {i1_, j1_}; }
  GridPoint se() const { return {i2_, j1_}; }
  GridPoint ne() const { return {i2_, j2_}; }
  GridPoint nw() const { return {i1_, j2_}; }

  friend bool operator==(const IndexRect& a, const IndexRect& b);
  /// Lexicographic by (i1, j1, i2, j2); fixes witness scan order.
  friend bool operator<(const IndexRect& a, const IndexRect& b);

 private:
  std::size_t i1_, j1_, i2_, j2_;
};

/// A function on a mesh with exact rational values in [0,1];
/// values are stored row-major with value(i, j) = F(x_i, y_j).
class GridFunction {
 public:
  GridFunction(Mesh mesh, std::vector<Rational> values);

  const Mesh& mesh() const { return mesh_; }
  std::size_t nx() const { return mesh_.x().size(); }
  std::size_t ny() const { return mesh_.y().size(); }
  const Rational& at(std::size_t i, std::size_t j) const { return values_.at(i * ny() + j); }
  const Rational& at(GridPoint p) const { return at(p.i, p.j); }
  const std::vector<Rational>& values() const { return values_; }

  GridFunction with_value(GridPoint p, Rational v) const;

  friend bool operator==(const GridFunction& a, const GridFunction& b);
  friend bool operator!=(const GridFunction& a, const GridFunction& b) { return !(a == b); }

 private:
  Mesh mesh_;
  std::vector<Rational> values_;
};

/// A univariate distribution sampled on an axis: nondecreasing values with
/// 0 at the bottom sentinel and 1 at the top one.
class UnivariateGrid {
 public:
  UnivariateGrid(AxisGrid axis, std::vector<Rational> values);

  const AxisGrid& axis() const { return axis_; }
  std::size_t size() const { return values_.size(); }
  const Rational& at(std::size_t i) const { return values_.at(i); }
  const std::vector<Rational>& values() const { return values_; }

  friend bool operator==(const UnivariateGrid& a, const UnivariateGrid& b);
  friend bool operator!=(const UnivariateGrid& a, const UnivariateGrid& b) { return !(a == b); }

 private:
  AxisGrid axis_;
  std::vector<Rational> values_;
};

struct PointWitness {
  GridPoint point;
  Rational value;
  std::string what;
};

struct RectWitness {
  IndexRect rect;
  Rational volume;
};

/// Verdicts for the groundedness / boundary-rectangle / all-rectangle
/// conditions, with the first failing witness in lexicographic scan order.
struct Classification {
  bool holds_a = false;  // grounded, F(top,top) = 1
  bool holds_b = false;  // (A) and nonnegative volume on boundary-touching rectangles
  bool holds_c = false;  // (A) and nonnegative volume on all rectangles
  std::optional<PointWitness> a_witness;
  std::optional<RectWitness> b_witness;
  std::optional<RectWitness> c_witness;
};

/// Signed corner sum F(sw) + F(ne) - F(se) - F(nw).
Rational volume(const GridFunction& f, const IndexRect& r);

Classification classify(const GridFunction& f);

/// (F(.,top), F(top,.)); requires a grounded input with F(top,top) = 1.
std::pair<UnivariateGrid, UnivariateGrid> margins(const GridFunction& f);

/// Pointwise infimum and supremum of grounded grids sharing mesh and margins.
/// Inputs with differing margins are rejected: such envelopes need not be
/// quasi-distributions.
std::pair<GridFunction, GridFunction> envelope(const std::vector<GridFunction>& fs);

/// Extended-real kind: F(-x, y) = F(top, y) - F(x, y) with the axis negated
/// and reversed.  Unit kind: F(1-x, y) = y - F(x, y).  (Axis::y mirrors.)
/// Double reflection is the identity.
GridFunction reflect(const GridFunction& f, Axis axis);

std::string point_str(const GridFunction& f, GridPoint p);
std::string rect_str(const GridFunction& f, const IndexRect& r);

}  // namespace qdc
