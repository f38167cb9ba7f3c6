#pragma once

#include "qdc/grid.hpp"

#include <functional>
#include <string>
#include <vector>

// Canonical grids used across the test suites: the three classical copulas
// on arbitrary unit meshes, the proper quasi-copula with one negative cell,
// and the two-margin worked example (F1/F2 with the M/W compositions).
namespace fixtures {

using namespace qdc;

inline Rational rat(const std::string& s) { return parse_rational(s); }

inline AxisGrid unit_axis(const std::vector<std::string>& coords) {
  std::vector<Coord> cs;
  cs.reserve(coords.size());
  for (const auto& s : coords) cs.emplace_back(rat(s));
  return AxisGrid(AxisKind::unit, std::move(cs));
}

inline AxisGrid extended_axis(const std::vector<std::string>& finite_coords) {
  std::vector<Coord> cs;
  cs.push_back(Coord::neg_inf());
  for (const auto& s : finite_coords) cs.emplace_back(rat(s));
  cs.push_back(Coord::pos_inf());
  return AxisGrid(AxisKind::extended_real, std::move(cs));
}

inline Mesh square(const AxisGrid& axis) { return Mesh(axis, axis); }

inline GridFunction tabulate(const Mesh& mesh,
                             const std::function<Rational(const Rational&, const Rational&)>& f) {
  std::vector<Rational> values;
  values.reserve(mesh.x().size() * mesh.y().size());
  for (const Coord& x : mesh.x().coords())
    for (const Coord& y : mesh.y().coords()) values.push_back(f(x.value(), y.value()));
  return GridFunction(mesh, std::move(values));
}

inline Rational min_copula(const Rational& u, const Rational& v) { return u < v ? u : v; }
inline Rational w_copula(const Rational& u, const Rational& v) {
  Rational s = u + v - 1;
  return s > 0 ? s : Rational(0);
}
inline Rational prod_copula(const Rational& u, const Rational& v) { return u * v; }

inline GridFunction min_grid(const Mesh& mesh) { return tabulate(mesh, min_copula); }
inline GridFunction w_grid(const Mesh& mesh) { return tabulate(mesh, w_copula); }
inline GridFunction prod_grid(const Mesh& mesh) { return tabulate(mesh, prod_copula); }

inline Mesh unit_square_5() {
  return square(unit_axis({"0", "1/4", "1/2", "3/4", "1"}));
}
inline Mesh unit_square_3() { return square(unit_axis({"0", "1/2", "1"})); }

/// The proper quasi-copula on {0,1/3,2/3,1}^2: conditions (A) and (B) hold,
/// the central cell has volume -1/3.
inline GridFunction qstar_grid() {
  Mesh mesh = square(unit_axis({"0", "1/3", "2/3", "1"}));
  auto r = [](const char* s) { return rat(s); };
  std::vector<Rational> v = {
      r("0"), r("0"),   r("0"),   r("0"),
      r("0"), r("0"),   r("1/3"), r("1/3"),
      r("0"), r("1/3"), r("1/3"), r("2/3"),
      r("0"), r("1/3"), r("2/3"), r("1"),
  };
  return GridFunction(mesh, std::move(v));
}

// Worked example: F1 vanishes up to 1/2 then rises as 2x - 1; F2 rises as 2x
// on (0, 1/2] and is 1 afterwards.
inline Rational f1_value(const Coord& x) {
  if (x.is_neg_inf()) return Rational(0);
  if (x.is_pos_inf()) return Rational(1);
  const Rational& t = x.value();
  if (t <= Rational(1, 2)) return Rational(0);
  if (t <= 1) return 2 * t - 1;
  return Rational(1);
}

inline Rational f2_value(const Coord& x) {
  if (x.is_neg_inf()) return Rational(0);
  if (x.is_pos_inf()) return Rational(1);
  const Rational& t = x.value();
  if (t <= 0) return Rational(0);
  if (t <= Rational(1, 2)) return 2 * t;
  return Rational(1);
}

inline AxisGrid example_axis() { return extended_axis({"0", "1/4", "1/2", "3/4", "1"}); }
inline Mesh example_mesh() { return square(example_axis()); }

inline UnivariateGrid f1_margin(const AxisGrid& axis) {
  std::vector<Rational> v;
  for (const Coord& c : axis.coords()) v.push_back(f1_value(c));
  return UnivariateGrid(axis, std::move(v));
}

inline UnivariateGrid f2_margin(const AxisGrid& axis) {
  std::vector<Rational> v;
  for (const Coord& c : axis.coords()) v.push_back(f2_value(c));
  return UnivariateGrid(axis, std::move(v));
}

inline GridFunction compose_on_mesh(const Mesh& mesh,
                                    const std::function<Rational(const Coord&)>& margin,
                                    const std::function<Rational(const Rational&, const Rational&)>& cop) {
  std::vector<Rational> values;
  for (const Coord& x : mesh.x().coords())
    for (const Coord& y : mesh.y().coords()) values.push_back(cop(margin(x), margin(y)));
  return GridFunction(mesh, std::move(values));
}

inline GridFunction example_f() { return compose_on_mesh(example_mesh(), f1_value, min_copula); }
inline GridFunction example_g() { return compose_on_mesh(example_mesh(), f2_value, w_copula); }
inline GridFunction example_h() { return compose_on_mesh(example_mesh(), f2_value, min_copula); }

}  // namespace fixtures
