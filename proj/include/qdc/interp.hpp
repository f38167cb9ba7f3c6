#pragma once

#include "qdc/grid.hpp"

namespace qdc {

/// Extends a grid function to the whole domain rectangle.  Sections between
/// two finite mesh coordinates are linear; sections reaching a sentinel use
/// the rational rule
///
///     F(x, b) = F(-inf, b) + (a / x) * (F(a, b) - F(-inf, b)),  -inf <= x <= a,
///
/// and its mirror toward +inf.  Horizontal sections are interpolated first,
/// then the vertical one; mesh points always evaluate to the stored values.
///
/// For the rational rule to be pole-free the extended mesh must have a
/// strictly negative and a strictly positive finite coordinate on each axis;
/// the constructor rejects meshes without them.
class InterpolatedFunction {
 public:
  explicit InterpolatedFunction(GridFunction base);

  const GridFunction& base() const { return base_; }

  /// Value at any point of the domain rectangle; exact.
  Rational evaluate(const Coord& x, const Coord& y) const;
  Rational evaluate(const Rational& x, const Rational& y) const {
    return evaluate(Coord(x), Coord(y));
  }

  /// Pointwise sampling onto a mesh of the same kind.  Conditions (A), (B)
  /// and (C) of the source survive restriction.
  GridFunction restrict_to(const Mesh& target) const;

 private:
  struct Location {
    std::size_t index;
    bool exact;  // coordinate coincides with a mesh coordinate
  };
  Location locate(const AxisGrid& axis, const Coord& c) const;
  Rational section_value(const Coord& end0, const Coord& end1, const Rational& v0,
                         const Rational& v1, const Coord& at) const;

  GridFunction base_;
};

}  // namespace qdc
