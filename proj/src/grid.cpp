#include "qdc/grid.hpp"

#include <algorithm>
#include <stdexcept>

namespace qdc {

const Rational& Coord::value() const {
  if (tag_ != Tag::finite) throw std::logic_error("Coord::value: sentinel has no numeric value");
  return value_;
}

Coord Coord::negated() const {
  switch (tag_) {
    case Tag::neg_inf: return pos_inf();
    case Tag::pos_inf: return neg_inf();
    case Tag::finite: return Coord(-value_);
  }
  throw std::logic_error("Coord::negated: bad tag");
}

std::string Coord::str() const {
  switch (tag_) {
    case Tag::neg_inf: return "-inf";
    case Tag::pos_inf: return "inf";
    case Tag::finite: return format_rational(value_);
  }
  throw std::logic_error("Coord::str: bad tag");
}

Coord Coord::parse(const std::string& text) {
  if (text == "-inf") return neg_inf();
  if (text == "inf" || text == "+inf") return pos_inf();
  return Coord(parse_rational(text));
}

bool operator==(const Coord& a, const Coord& b) {
  if (a.tag_ != b.tag_) return false;
  if (a.tag_ != Coord::Tag::finite) return true;
  return a.value_ == b.value_;
}

bool operator<(const Coord& a, const Coord& b) {
  if (a.tag_ == Coord::Tag::neg_inf) return b.tag_ != Coord::Tag::neg_inf;
  if (a.tag_ == Coord::Tag::pos_inf) return false;
  if (b.tag_ == Coord::Tag::neg_inf) return false;
  if (b.tag_ == Coord::Tag::pos_inf) return true;
  return a.value_ < b.value_;
}

AxisGrid::AxisGrid(AxisKind kind, std::vector<Coord> coords)
    : kind_(kind), coords_(std::move(coords)) {
  if (coords_.size() < 3) throw std::invalid_argument("AxisGrid: need at least 3 coordinates");
  for (std::size_t i = 0; i + 1 < coords_.size(); ++i) {
    if (!(coords_[i] < coords_[i + 1]))
      throw std::invalid_argument("AxisGrid: axis not increasing at position " + std::to_string(i + 1));
  }
  if (kind_ == AxisKind::extended_real) {
    if (!coords_.front().is_neg_inf() || !coords_.back().is_pos_inf())
      throw std::invalid_argument("AxisGrid: extended axis must run from -inf to inf");
    bool any_finite = false;
    for (const Coord& c : coords_) any_finite = any_finite || c.is_finite();
    if (!any_finite) throw std::invalid_argument("AxisGrid: extended axis needs a finite coordinate");
  } else {
    for (const Coord& c : coords_) {
      if (!c.is_finite() || c.value() < 0 || c.value() > 1)
        throw std::invalid_argument("AxisGrid: unit axis coordinates must lie in [0,1]");
    }
    if (coords_.front().value() != 0 || coords_.back().value() != 1)
      throw std::invalid_argument("AxisGrid: unit axis must run from 0 to 1");
  }
}

std::optional<std::size_t> AxisGrid::index_of(const Coord& c) const {
  auto it = std::lower_bound(coords_.begin(), coords_.end(), c);
  if (it != coords_.end() && *it == c) return static_cast<std::size_t>(it - coords_.begin());
  return std::nullopt;
}

bool operator==(const AxisGrid& a, const AxisGrid& b) {
  return a.kind_ == b.kind_ && a.coords_ == b.coords_;
}

Mesh::Mesh(AxisGrid x_axis, AxisGrid y_axis) : x_(std::move(x_axis)), y_(std::move(y_axis)) {
  if (x_.kind() != y_.kind()) throw std::invalid_argument("Mesh: axes must share kind");
}

bool operator==(const Mesh& a, const Mesh& b) { return a.x_ == b.x_ && a.y_ == b.y_; }

IndexRect::IndexRect(std::size_t i1, std::size_t j1, std::size_t i2, std::size_t j2)
    : i1_(i1), j1_(j1), i2_(i2), j2_(j2) {
  if (i1 >= i2 || j1 >= j2)
    throw std::invalid_argument("IndexRect: degenerate rectangle (need i1 < i2 and j1 < j2)");
}

bool operator==(const IndexRect& a, const IndexRect& b) {
  return a.i1_ == b.i1_ && a.j1_ == b.j1_ && a.i2_ == b.i2_ && a.j2_ == b.j2_;
}

bool operator<(const IndexRect& a, const IndexRect& b) {
  if (a.i1_ != b.i1_) return a.i1_ < b.i1_;
  if (a.j1_ != b.j1_) return a.j1_ < b.j1_;
  if (a.i2_ != b.i2_) return a.i2_ < b.i2_;
  return a.j2_ < b.j2_;
}

GridFunction::GridFunction(Mesh mesh, std::vector<Rational> values)
    : mesh_(std::move(mesh)), values_(std::move(values)) {
  const std::size_t expected = mesh_.x().size() * mesh_.y().size();
  if (values_.size() != expected)
    throw std::invalid_argument("GridFunction: expected " + std::to_string(expected) +
                                " values, got " + std::to_string(values_.size()));
  for (const Rational& v : values_) {
    if (v < 0 || v > 1)
      throw std::invalid_argument("GridFunction: value " + format_rational(v) + " outside [0,1]");
  }
}

GridFunction GridFunction::with_value(GridPoint p, Rational v) const {
  std::vector<Rational> vals = values_;
  vals.at(p.i * ny() + p.j) = std::move(v);
  return GridFunction(mesh_, std::move(vals));
}

bool operator==(const GridFunction& a, const GridFunction& b) {
  return a.mesh_ == b.mesh_ && a.values_ == b.values_;
}

UnivariateGrid::UnivariateGrid(AxisGrid axis, std::vector<Rational> values)
    : axis_(std::move(axis)), values_(std::move(values)) {
  if (values_.size() != axis_.size())
    throw std::invalid_argument("UnivariateGrid: values length does not match axis");
  for (std::size_t i = 0; i + 1 < values_.size(); ++i) {
    if (values_[i] > values_[i + 1])
      throw std::invalid_argument("UnivariateGrid: values decrease at position " + std::to_string(i + 1));
  }
  if (values_.front() != 0)
    throw std::invalid_argument("UnivariateGrid: value at bottom sentinel must be 0");
  if (values_.back() != 1)
    throw std::invalid_argument("UnivariateGrid: value at top sentinel must be 1");
}

bool operator==(const UnivariateGrid& a, const UnivariateGrid& b) {
  return a.axis_ == b.axis_ && a.values_ == b.values_;
}

Rational volume(const GridFunction& f, const IndexRect& r) {
  if (r.i2() >= f.nx() || r.j2() >= f.ny())
    throw std::invalid_argument("volume: rectangle index out of range");
  return f.at(r.sw()) + f.at(r.ne()) - f.at(r.se()) - f.at(r.nw());
}

std::string point_str(const GridFunction& f, GridPoint p) {
  return "(" + f.mesh().x().at(p.i).str() + ", " + f.mesh().y().at(p.j).str() + ")";
}

std::string rect_str(const GridFunction& f, const IndexRect& r) {
  const AxisGrid& xs = f.mesh().x();
  const AxisGrid& ys = f.mesh().y();
  return "[" + xs.at(r.i1()).str() + ", " + xs.at(r.i2()).str() + "] x [" + ys.at(r.j1()).str() +
         ", " + ys.at(r.j2()).str() + "]";
}

namespace {

std::optional<PointWitness> groundedness_witness(const GridFunction& f) {
  const std::size_t nx = f.nx(), ny = f.ny();
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      if ((i == 0 || j == 0) && f.at(i, j) != 0)
        return PointWitness{{i, j}, f.at(i, j), "boundary value not 0"};
    }
  }
  if (f.at(nx - 1, ny - 1) != 1)
    return PointWitness{{nx - 1, ny - 1}, f.at(nx - 1, ny - 1), "top corner value not 1"};
  return std::nullopt;
}

}  // namespace

Classification classify(const GridFunction& f) {
  Classification out;
  out.a_witness = groundedness_witness(f);
  out.holds_a = !out.a_witness.has_value();
  if (!out.holds_a) return out;

  const std::size_t nx = f.nx(), ny = f.ny();

  // (B): the discrete boundary is the set of points with a sentinel
  // coordinate, so only rectangles with i1 = 0, j1 = 0, i2 = last, or
  // j2 = last need checking.
  out.holds_b = true;
  for (std::size_t i1 = 0; i1 + 1 < nx && out.holds_b; ++i1) {
    for (std::size_t j1 = 0; j1 + 1 < ny && out.holds_b; ++j1) {
      for (std::size_t i2 = i1 + 1; i2 < nx && out.holds_b; ++i2) {
        for (std::size_t j2 = j1 + 1; j2 < ny && out.holds_b; ++j2) {
          if (i1 != 0 && j1 != 0 && i2 != nx - 1 && j2 != ny - 1) continue;
          IndexRect r(i1, j1, i2, j2);
          Rational v = volume(f, r);
          if (v < 0) {
            out.holds_b = false;
            out.b_witness = RectWitness{r, v};
          }
        }
      }
    }
  }

  // (C): nonnegative elementary cells imply nonnegative volume for every
  // rectangle by additivity.
  out.holds_c = true;
  for (std::size_t i = 0; i + 1 < nx && out.holds_c; ++i) {
    for (std::size_t j = 0; j + 1 < ny && out.holds_c; ++j) {
      IndexRect cell(i, j, i + 1, j + 1);
      Rational v = volume(f, cell);
      if (v < 0) {
        out.holds_c = false;
        out.c_witness = RectWitness{cell, v};
      }
    }
  }
  return out;
}

std::pair<UnivariateGrid, UnivariateGrid> margins(const GridFunction& f) {
  if (auto w = groundedness_witness(f))
    throw std::invalid_argument("margins: input not grounded: " + w->what + " at " +
                                point_str(f, w->point));
  const std::size_t nx = f.nx(), ny = f.ny();
  std::vector<Rational> mx(nx), my(ny);
  for (std::size_t i = 0; i < nx; ++i) mx[i] = f.at(i, ny - 1);
  for (std::size_t j = 0; j < ny; ++j) my[j] = f.at(nx - 1, j);
  return {UnivariateGrid(f.mesh().x(), std::move(mx)), UnivariateGrid(f.mesh().y(), std::move(my))};
}

std::pair<GridFunction, GridFunction> envelope(const std::vector<GridFunction>& fs) {
  if (fs.empty()) throw std::invalid_argument("envelope: need at least one input");
  const Mesh& mesh = fs.front().mesh();
  for (std::size_t k = 1; k < fs.size(); ++k) {
    if (fs[k].mesh() != mesh) throw std::invalid_argument("envelope: inputs on different meshes");
  }
  auto first_margins = margins(fs.front());
  for (std::size_t k = 1; k < fs.size(); ++k) {
    auto mk = margins(fs[k]);
    for (std::size_t i = 0; i < mk.first.size(); ++i) {
      if (mk.first.at(i) != first_margins.first.at(i))
        throw std::invalid_argument("envelope: margin mismatch at x=" + mesh.x().at(i).str() +
                                    " between inputs 0 and " + std::to_string(k));
    }
    for (std::size_t j = 0; j < mk.second.size(); ++j) {
      if (mk.second.at(j) != first_margins.second.at(j))
        throw std::invalid_argument("envelope: margin mismatch at y=" + mesh.y().at(j).str() +
                                    " between inputs 0 and " + std::to_string(k));
    }
  }

  std::vector<Rational> lo = fs.front().values();
  std::vector<Rational> hi = fs.front().values();
  for (std::size_t k = 1; k < fs.size(); ++k) {
    const auto& vals = fs[k].values();
    for (std::size_t t = 0; t < vals.size(); ++t) {
      if (vals[t] < lo[t]) lo[t] = vals[t];
      if (vals[t] > hi[t]) hi[t] = vals[t];
    }
  }
  GridFunction lower(mesh, std::move(lo));
  GridFunction upper(mesh, std::move(hi));

  bool all_quasi = true;
  for (const GridFunction& f : fs) all_quasi = all_quasi && classify(f).holds_b;
  if (all_quasi) {
    if (!classify(lower).holds_b || !classify(upper).holds_b)
      throw std::logic_error("envelope: output failed condition (B) for quasi inputs");
  }
  return {std::move(lower), std::move(upper)};
}

GridFunction reflect(const GridFunction& f, Axis axis) {
  if (auto w = groundedness_witness(f))
    throw std::invalid_argument("reflect: input not grounded: " + w->what + " at " +
                                point_str(f, w->point));
  const std::size_t nx = f.nx(), ny = f.ny();
  const bool unit = f.mesh().kind() == AxisKind::unit;

  auto flipped_axis = [&](const AxisGrid& a) {
    std::vector<Coord> coords;
    coords.reserve(a.size());
    for (std::size_t t = a.size(); t-- > 0;) {
      coords.push_back(unit ? Coord(Rational(1) - a.at(t).value()) : a.at(t).negated());
    }
    return AxisGrid(a.kind(), std::move(coords));
  };

  std::vector<Rational> vals(nx * ny);
  if (axis == Axis::x) {
    // F(top, y) for extended grids; the y coordinate itself for unit grids.
    for (std::size_t i = 0; i < nx; ++i) {
      for (std::size_t j = 0; j < ny; ++j) {
        const Rational base = unit ? f.mesh().y().at(j).value() : f.at(nx - 1, j);
        Rational v = base - f.at(nx - 1 - i, j);
        if (v < 0 || v > 1)
          throw std::invalid_argument("reflect: value " + format_rational(v) +
                                      " outside [0,1]; input is not monotone in x");
        vals[i * ny + j] = std::move(v);
      }
    }
    return GridFunction(Mesh(flipped_axis(f.mesh().x()), f.mesh().y()), std::move(vals));
  }
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      const Rational base = unit ? f.mesh().x().at(i).value() : f.at(i, ny - 1);
      Rational v = base - f.at(i, ny - 1 - j);
      if (v < 0 || v > 1)
        throw std::invalid_argument("reflect: value " + format_rational(v) +
                                    " outside [0,1]; input is not monotone in y");
      vals[i * ny + j] = std::move(v);
    }
  }
  return GridFunction(Mesh(f.mesh().x(), flipped_axis(f.mesh().y())), std::move(vals));
}

}  // namespace qdc
