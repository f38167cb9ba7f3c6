#include "qdc/interp.hpp"

#include <algorithm>
#include <stdexcept>

namespace qdc {

namespace {

void require_pole_free(const AxisGrid& axis, const char* name) {
  if (axis.kind() != AxisKind::extended_real) return;
  // Finite coordinates sit at indices 1 .. last-1.
  if (!(axis.at(1).value() < 0) || !(axis.at(axis.size() - 2).value() > 0))
    throw std::invalid_argument(std::string("InterpolatedFunction: ") + name +
                                " axis needs a negative and a positive finite coordinate");
}

}  // namespace

InterpolatedFunction::InterpolatedFunction(GridFunction base) : base_(std::move(base)) {
  require_pole_free(base_.mesh().x(), "x");
  require_pole_free(base_.mesh().y(), "y");
}

InterpolatedFunction::Location InterpolatedFunction::locate(const AxisGrid& axis,
                                                            const Coord& c) const {
  if (c < axis.at(0) || axis.at(axis.last()) < c)
    throw std::invalid_argument("evaluate: point outside domain at coordinate " + c.str());
  const auto& coords = axis.coords();
  auto it = std::upper_bound(coords.begin(), coords.end(), c);
  std::size_t i = static_cast<std::size_t>(it - coords.begin()) - 1;
  return {i, coords[i] == c};
}

Rational InterpolatedFunction::section_value(const Coord& end0, const Coord& end1,
                                             const Rational& v0, const Rational& v1,
                                             const Coord& at) const {
  const Rational& t = at.value();  // strictly between the ends, hence finite
  if (end0.is_finite() && end1.is_finite()) {
    const Rational& lo = end0.value();
    const Rational& hi = end1.value();
    return v0 + (t - lo) / (hi - lo) * (v1 - v0);
  }
  if (end0.is_neg_inf()) {
    const Rational& a = end1.value();  // a < 0, so t < a < 0
    return v0 + a / t * (v1 - v0);
  }
  // end1 is +inf; end0 finite with a > 0, so t > a > 0.
  const Rational& a = end0.value();
  return v1 - a / t * (v1 - v0);
}

Rational InterpolatedFunction::evaluate(const Coord& x, const Coord& y) const {
  const AxisGrid& xs = base_.mesh().x();
  const AxisGrid& ys = base_.mesh().y();
  Location lx = locate(xs, x);
  Location ly = locate(ys, y);

  if (lx.exact && ly.exact) return base_.at(lx.index, ly.index);

  auto row_value = [&](std::size_t j) -> Rational {
    if (lx.exact) return base_.at(lx.index, j);
    return section_value(xs.at(lx.index), xs.at(lx.index + 1), base_.at(lx.index, j),
                         base_.at(lx.index + 1, j), x);
  };

  if (ly.exact) return row_value(ly.index);
  Rational h0 = row_value(ly.index);
  Rational h1 = row_value(ly.index + 1);
  return section_value(ys.at(ly.index), ys.at(ly.index + 1), h0, h1, y);
}

GridFunction InterpolatedFunction::restrict_to(const Mesh& target) const {
  if (target.kind() != base_.mesh().kind())
    throw std::invalid_argument("restrict_to: axis kind mismatch");
  const std::size_t nx = target.x().size(), ny = target.y().size();
  std::vector<Rational> vals;
  vals.reserve(nx * ny);
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      vals.push_back(evaluate(target.x().at(i), target.y().at(j)));
    }
  }
  return GridFunction(target, std::move(vals));
}

}  // namespace qdc
