#include "qdc/rectcalc.hpp"

#include "qdc/construct.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace qdc {

namespace {

constexpr std::size_t kExactCellLimit = 30;

void require_valid_rect(const GridFunction& f, const IndexRect& r, const char* op) {
  if (r.i2() >= f.nx() || r.j2() >= f.ny())
    throw std::invalid_argument(std::string(op) + ": rectangle index out of range");
}

void require_same_mesh(const GridFunction& a, const GridFunction& b, const char* op) {
  if (a.mesh() != b.mesh()) throw std::invalid_argument(std::string(op) + ": mesh mismatch");
}

BigInt common_denominator(const GridFunction& a, const GridFunction& b) {
  BigInt d = 1;
  for (const Rational& v : a.values()) d = boost::multiprecision::lcm(d, boost::multiprecision::denominator(v));
  for (const Rational& v : b.values()) d = boost::multiprecision::lcm(d, boost::multiprecision::denominator(v));
  return d;
}

// Values of both bounds scaled to integers by the common denominator.  The
// int64 instantiation covers every realistic denominator; the BigInt one is
// the safety net for huge inputs.
template <class Int>
struct Scaled {
  std::size_t nx = 0, ny = 0;  // grid points per axis
  std::size_t cx = 0, cy = 0;  // elementary cells per axis
  std::vector<Int> lo, hi;     // indexed i * ny + j
  BigInt den;
};

template <class Int>
Scaled<Int> make_scaled(const GridFunction& a, const GridFunction& b, const BigInt& den) {
  Scaled<Int> s;
  s.nx = a.nx();
  s.ny = a.ny();
  s.cx = s.nx - 1;
  s.cy = s.ny - 1;
  s.den = den;
  s.lo.reserve(s.nx * s.ny);
  s.hi.reserve(s.nx * s.ny);
  auto scale = [&](const Rational& v) {
    BigInt scaled = boost::multiprecision::numerator(v) * (den / boost::multiprecision::denominator(v));
    if constexpr (std::is_same_v<Int, std::int64_t>) {
      return scaled.convert_to<std::int64_t>();
    } else {
      return scaled;
    }
  };
  for (const Rational& v : a.values()) s.lo.push_back(scale(v));
  for (const Rational& v : b.values()) s.hi.push_back(scale(v));
  return s;
}

bool int64_path_ok(const BigInt& den) {
  // |L| <= 4 * cells * den <= 120 * den and cells <= kExactCellLimit, so
  // int64 accumulators are safe up to den = 2^50; larger denominators fall
  // back to BigInt arithmetic.
  static const BigInt limit = BigInt(1) << 50;
  return den <= limit;
}

template <class Int>
Int corner_contrib(const Scaled<Int>& s, std::size_t pt, int m) {
  if (m > 0) return s.hi[pt] * m;
  if (m < 0) return s.lo[pt] * m;
  return Int(0);
}

// Gray-code sweep over all nonempty cell subsets.  The multiplicity map of a
// gaggle equals the mixed second difference of its covered-cell indicator,
// so L and every P bound depend on the covered cells only; at the cell-count
// cap this sweep realizes the exact infimum over the whole family.
template <class Int, class Visit>
void sweep_cell_subsets(const Scaled<Int>& s, Visit&& visit) {
  const std::size_t n = s.cx * s.cy;
  std::vector<int> m(s.nx * s.ny, 0);
  Int big_l(0);
  auto toggle_corner = [&](std::size_t pt, int delta) {
    const int old_m = m[pt];
    const int new_m = old_m + delta;
    big_l -= corner_contrib(s, pt, old_m);
    big_l += corner_contrib(s, pt, new_m);
    m[pt] = new_m;
  };
  const std::uint64_t total = std::uint64_t(1) << n;
  std::uint64_t state = 0;
  for (std::uint64_t k = 1; k < total; ++k) {
    const unsigned bit = static_cast<unsigned>(std::countr_zero(k));
    state ^= std::uint64_t(1) << bit;
    const int delta = ((state >> bit) & 1) ? +1 : -1;
    const std::size_t ci = bit / s.cy;
    const std::size_t cj = bit % s.cy;
    toggle_corner(ci * s.ny + cj, delta);
    toggle_corner((ci + 1) * s.ny + (cj + 1), delta);
    toggle_corner((ci + 1) * s.ny + cj, -delta);
    toggle_corner(ci * s.ny + (cj + 1), -delta);
    visit(k, big_l, m);
  }
}

std::vector<bool> cells_of_subset_step(std::uint64_t k, std::size_t n) {
  const std::uint64_t gray = k ^ (k >> 1);
  std::vector<bool> cells(n, false);
  for (std::size_t bit = 0; bit < n; ++bit) cells[bit] = (gray >> bit) & 1;
  return cells;
}

// Depth-first enumeration of gaggles with exactly `count` members, members
// chosen in lexicographic rectangle order, interiors kept disjoint.
template <class Int>
class CountEnumerator {
 public:
  CountEnumerator(const Scaled<Int>& s, std::vector<IndexRect> rects)
      : s_(s), rects_(std::move(rects)), m_(s.nx * s.ny, 0) {}

  template <class Visit>
  void run(std::size_t count, Visit&& visit) {
    chosen_.clear();
    descend(0, count, visit);
  }

  const std::vector<int>& multiplicities() const { return m_; }
  const Int& current_l() const { return big_l_; }

  std::vector<IndexRect> chosen_rects() const {
    std::vector<IndexRect> out;
    out.reserve(chosen_.size());
    for (std::size_t idx : chosen_) out.push_back(rects_[idx]);
    return out;
  }

 private:
  template <class Visit>
  void descend(std::size_t from, std::size_t remaining, Visit& visit) {
    if (remaining == 0) {
      visit(*this);
      return;
    }
    for (std::size_t idx = from; idx + remaining <= rects_.size(); ++idx) {
      const IndexRect& r = rects_[idx];
      bool ok = true;
      for (std::size_t c : chosen_) {
        if (interiors_overlap(rects_[c], r)) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      push(r);
      chosen_.push_back(idx);
      descend(idx + 1, remaining - 1, visit);
      chosen_.pop_back();
      pop(r);
    }
  }

  void toggle_corner(std::size_t pt, int delta) {
    const int old_m = m_[pt];
    const int new_m = old_m + delta;
    big_l_ -= corner_contrib(s_, pt, old_m);
    big_l_ += corner_contrib(s_, pt, new_m);
    m_[pt] = new_m;
  }
  void apply(const IndexRect& r, int sign) {
    toggle_corner(r.i1() * s_.ny + r.j1(), sign);
    toggle_corner(r.i2() * s_.ny + r.j2(), sign);
    toggle_corner(r.i2() * s_.ny + r.j1(), -sign);
    toggle_corner(r.i1() * s_.ny + r.j2(), -sign);
  }
  void push(const IndexRect& r) { apply(r, +1); }
  void pop(const IndexRect& r) { apply(r, -1); }

  const Scaled<Int>& s_;
  std::vector<IndexRect> rects_;
  std::vector<int> m_;
  Int big_l_{0};
  std::vector<std::size_t> chosen_;
};

std::vector<IndexRect> all_rects_lex(std::size_t nx, std::size_t ny) {
  std::vector<IndexRect> out;
  for (std::size_t i1 = 0; i1 + 1 < nx; ++i1)
    for (std::size_t j1 = 0; j1 + 1 < ny; ++j1)
      for (std::size_t i2 = i1 + 1; i2 < nx; ++i2)
        for (std::size_t j2 = j1 + 1; j2 < ny; ++j2) out.emplace_back(i1, j1, i2, j2);
  return out;
}

// Running minimum of L / d with d in {1, 2}; candidates compare by
// cross-multiplication, strict improvement keeps the earliest witness.
template <class Int>
struct RatioCandidate {
  bool set = false;
  Int num{0};
  int den = 1;

  bool improves(const Int& n, int d) const {
    if (!set) return true;
    return n * den < num * Int(d);
  }
  void assign(const Int& n, int d) {
    set = true;
    num = n;
    den = d;
  }
};

template <class Int>
Rational ratio_to_rational(const Int& num, int den, const BigInt& scale) {
  if constexpr (std::is_same_v<Int, std::int64_t>) {
    return Rational(BigInt(num), scale * den);
  } else {
    return Rational(num, scale * den);
  }
}

std::size_t exact_cap_or_throw(const Mesh& mesh, const char* op) {
  const std::size_t cap = cell_count(mesh);
  if (cap > kExactCellLimit)
    throw std::invalid_argument(std::string(op) + ": exact search supports at most " +
                                std::to_string(kExactCellLimit) + " elementary cells, mesh has " +
                                std::to_string(cap));
  return cap;
}

template <class Int>
BoundValue p_bound_impl(const GridFunction& lower, const GridFunction& upper, GridPoint x,
                        CornerSide side, std::size_t max_rects, const BigInt& den) {
  const Scaled<Int> s = make_scaled<Int>(lower, upper, den);
  const std::size_t cap = cell_count(lower.mesh());
  const std::size_t target = x.i * s.ny + x.j;
  const bool want_negative = (side == CornerSide::opposite);

  BoundValue out;
  RatioCandidate<Int> best;

  if (max_rects >= cap) {
    exact_cap_or_throw(lower.mesh(), "p_bound");
    out.exact = true;
    std::uint64_t best_k = 0;
    sweep_cell_subsets<Int>(s, [&](std::uint64_t k, const Int& big_l, const std::vector<int>& m) {
      const int mm = m[target];
      if (want_negative ? (mm < 0) : (mm > 0)) {
        const int d = mm < 0 ? -mm : mm;
        if (best.improves(big_l, d)) {
          best.assign(big_l, d);
          best_k = k;
        }
      }
    });
    if (best.set) {
      out.value = ratio_to_rational<Int>(best.num, best.den, den);
      out.witness = gaggle_from_cells(cells_of_subset_step(best_k, s.cx * s.cy), s.cx, s.cy);
    } else {
      out.infinite = true;
    }
    return out;
  }

  CountEnumerator<Int> en(s, all_rects_lex(s.nx, s.ny));
  std::optional<RectGaggle> witness;
  for (std::size_t count = 1; count <= max_rects; ++count) {
    en.run(count, [&](const CountEnumerator<Int>& e) {
      const int mm = e.multiplicities()[target];
      if (want_negative ? (mm < 0) : (mm > 0)) {
        const int d = mm < 0 ? -mm : mm;
        if (best.improves(e.current_l(), d)) {
          best.assign(e.current_l(), d);
          witness = RectGaggle(e.chosen_rects());
        }
      }
    });
  }
  if (best.set) {
    out.value = ratio_to_rational<Int>(best.num, best.den, den);
    out.witness = std::move(witness);
  } else {
    out.infinite = true;
  }
  return out;
}

template <class Int>
QReport check_q_impl(const GridFunction& lower, const GridFunction& upper, std::size_t max_rects,
                     const BigInt& den) {
  QReport report;
  report.q1 = true;
  for (std::size_t i = 0; i < lower.nx() && report.q1; ++i) {
    for (std::size_t j = 0; j < lower.ny() && report.q1; ++j) {
      if (lower.at(i, j) > upper.at(i, j)) {
        report.q1 = false;
        report.q1_witness = GridPoint{i, j};
      }
    }
  }

  const Scaled<Int> s = make_scaled<Int>(lower, upper, den);
  const std::size_t cap = cell_count(lower.mesh());
  report.q2 = true;

  if (max_rects >= cap) {
    exact_cap_or_throw(lower.mesh(), "check_q");
    report.exact = true;
    Int best_l(0);
    std::uint64_t best_k = 0;
    bool found = false;
    sweep_cell_subsets<Int>(s, [&](std::uint64_t k, const Int& big_l, const std::vector<int>&) {
      if (big_l < best_l) {
        best_l = big_l;
        best_k = k;
        found = true;
      }
    });
    if (found) {
      report.q2 = false;
      RectGaggle g = gaggle_from_cells(cells_of_subset_step(best_k, s.cx * s.cy), s.cx, s.cy);
      report.q2_witness = {std::move(g), ratio_to_rational<Int>(best_l, 1, den)};
    }
    return report;
  }

  CountEnumerator<Int> en(s, all_rects_lex(s.nx, s.ny));
  for (std::size_t count = 1; count <= max_rects && report.q2; ++count) {
    bool stop = false;
    en.run(count, [&](const CountEnumerator<Int>& e) {
      if (stop || e.current_l() >= 0) return;
      stop = true;
      report.q2 = false;
      report.q2_witness = {RectGaggle(e.chosen_rects()),
                           ratio_to_rational<Int>(e.current_l(), 1, den)};
    });
  }
  return report;
}

// Point-indexed running minima for both corner sides in one pass.
template <class Int>
struct PointBounds {
  std::vector<RatioCandidate<Int>> opposite, main;
  std::vector<std::uint64_t> opposite_k, main_k;
  std::vector<std::optional<RectGaggle>> opposite_witness, main_witness;

  explicit PointBounds(std::size_t npoints)
      : opposite(npoints), main(npoints), opposite_k(npoints, 0), main_k(npoints, 0),
        opposite_witness(npoints), main_witness(npoints) {}
};

template <class Int>
CoherenceReport coherence_bounds_impl(const GridFunction& lower, const GridFunction& upper,
                                      std::size_t max_rects, const BigInt& den,
                                      CoherenceReport report) {
  const Scaled<Int> s = make_scaled<Int>(lower, upper, den);
  const std::size_t npoints = s.nx * s.ny;
  const std::size_t cap = cell_count(lower.mesh());
  PointBounds<Int> bounds(npoints);
  const bool exact = max_rects >= cap;

  if (exact) {
    exact_cap_or_throw(lower.mesh(), "check_coherence");
    sweep_cell_subsets<Int>(s, [&](std::uint64_t k, const Int& big_l, const std::vector<int>& m) {
      for (std::size_t pt = 0; pt < npoints; ++pt) {
        const int mm = m[pt];
        if (mm == 0) continue;
        if (mm < 0) {
          if (bounds.opposite[pt].improves(big_l, -mm)) {
            bounds.opposite[pt].assign(big_l, -mm);
            bounds.opposite_k[pt] = k;
          }
        } else if (bounds.main[pt].improves(big_l, mm)) {
          bounds.main[pt].assign(big_l, mm);
          bounds.main_k[pt] = k;
        }
      }
    });
  } else {
    CountEnumerator<Int> en(s, all_rects_lex(s.nx, s.ny));
    for (std::size_t count = 1; count <= max_rects; ++count) {
      en.run(count, [&](const CountEnumerator<Int>& e) {
        const std::vector<int>& m = e.multiplicities();
        for (std::size_t pt = 0; pt < npoints; ++pt) {
          const int mm = m[pt];
          if (mm == 0) continue;
          if (mm < 0) {
            if (bounds.opposite[pt].improves(e.current_l(), -mm)) {
              bounds.opposite[pt].assign(e.current_l(), -mm);
              bounds.opposite_witness[pt] = RectGaggle(e.chosen_rects());
            }
          } else if (bounds.main[pt].improves(e.current_l(), mm)) {
            bounds.main[pt].assign(e.current_l(), mm);
            bounds.main_witness[pt] = RectGaggle(e.chosen_rects());
          }
        }
      });
    }
  }

  report.exact = exact;
  report.sup_attained = true;
  report.inf_attained = true;
  for (std::size_t i = 0; i < s.nx; ++i) {
    for (std::size_t j = 0; j < s.ny; ++j) {
      const std::size_t pt = i * s.ny + j;
      const Rational diff = upper.at(i, j) - lower.at(i, j);
      auto emit = [&](CornerSide side, const RatioCandidate<Int>& cand, std::uint64_t k,
                      std::optional<RectGaggle>& witness, bool& flag) {
        if (!cand.set) return;  // empty infimum is +inf, bound holds
        Rational value = ratio_to_rational<Int>(cand.num, cand.den, den);
        if (diff <= value) return;
        flag = false;
        BoundValue bv;
        bv.value = std::move(value);
        bv.exact = exact;
        if (exact) {
          bv.witness = gaggle_from_cells(cells_of_subset_step(k, s.cx * s.cy), s.cx, s.cy);
        } else {
          bv.witness = witness;
        }
        report.failures.push_back(BoundFailure{GridPoint{i, j}, side, diff, std::move(bv)});
      };
      emit(CornerSide::opposite, bounds.opposite[pt], bounds.opposite_k[pt],
           bounds.opposite_witness[pt], report.sup_attained);
      emit(CornerSide::main, bounds.main[pt], bounds.main_k[pt], bounds.main_witness[pt],
           report.inf_attained);
    }
  }
  report.coherent = report.feasible && report.sup_attained && report.inf_attained;
  return report;
}

}  // namespace

RectGaggle::RectGaggle(std::vector<IndexRect> members) : members_(std::move(members)) {
  if (members_.empty()) throw std::invalid_argument("RectGaggle: empty gaggle");
  std::sort(members_.begin(), members_.end());
  for (std::size_t a = 0; a < members_.size(); ++a) {
    for (std::size_t b = a + 1; b < members_.size(); ++b) {
      if (interiors_overlap(members_[a], members_[b]))
        throw std::invalid_argument("RectGaggle: members " + std::to_string(a) + " and " +
                                    std::to_string(b) + " have overlapping interiors");
    }
  }
}

bool interiors_overlap(const IndexRect& a, const IndexRect& b) {
  return std::max(a.i1(), b.i1()) < std::min(a.i2(), b.i2()) &&
         std::max(a.j1(), b.j1()) < std::min(a.j2(), b.j2());
}

int MultiplicityMap::at(GridPoint p) const {
  auto it = entries_.find(p);
  return it == entries_.end() ? 0 : it->second;
}

MultiplicityMap multiplicity(const RectGaggle& gaggle) {
  std::map<GridPoint, int> entries;
  auto add = [&](GridPoint p, int d) {
    auto [it, inserted] = entries.emplace(p, d);
    if (!inserted) {
      it->second += d;
      if (it->second == 0) entries.erase(it);
    }
  };
  for (const IndexRect& r : gaggle.members()) {
    add(r.sw(), +1);
    add(r.ne(), +1);
    add(r.se(), -1);
    add(r.nw(), -1);
  }
  return MultiplicityMap(std::move(entries));
}

Rational l_value(const GridFunction& lower, const GridFunction& upper, const RectGaggle& gaggle) {
  require_same_mesh(lower, upper, "l_value");
  for (const IndexRect& r : gaggle.members()) require_valid_rect(lower, r, "l_value");
  Rational sum(0);
  const MultiplicityMap mult = multiplicity(gaggle);
  for (const auto& [point, m] : mult.entries()) {
    sum += (m > 0 ? upper.at(point) : lower.at(point)) * m;
  }
  return sum;
}

Rational volume(const GridFunction& f, const RectGaggle& gaggle) {
  Rational sum(0);
  for (const IndexRect& r : gaggle.members()) {
    require_valid_rect(f, r, "volume");
    sum += volume(f, r);
  }
  return sum;
}

std::size_t cell_count(const Mesh& mesh) {
  return (mesh.x().size() - 1) * (mesh.y().size() - 1);
}

BoundValue p_bound(const GridFunction& lower, const GridFunction& upper, GridPoint x,
                   CornerSide side, std::size_t max_rects) {
  require_same_mesh(lower, upper, "p_bound");
  if (max_rects == 0) throw std::invalid_argument("p_bound: max_rects must be positive");
  if (x.i >= lower.nx() || x.j >= lower.ny())
    throw std::invalid_argument("p_bound: point index out of range");
  const BigInt den = common_denominator(lower, upper);
  if (int64_path_ok(den)) return p_bound_impl<std::int64_t>(lower, upper, x, side, max_rects, den);
  return p_bound_impl<BigInt>(lower, upper, x, side, max_rects, den);
}

Rational gamma_value(const GridFunction& lower, const GridFunction& upper, GridPoint x,
                     std::size_t max_rects) {
  require_same_mesh(lower, upper, "gamma_value");
  for (std::size_t i = 0; i < lower.nx(); ++i)
    for (std::size_t j = 0; j < lower.ny(); ++j)
      if (lower.at(i, j) > upper.at(i, j))
        throw std::invalid_argument("gamma_value: lower exceeds upper at " +
                                    point_str(lower, {i, j}));
  const Rational diff = upper.at(x.i, x.j) - lower.at(x.i, x.j);
  BoundValue po = p_bound(lower, upper, x, CornerSide::opposite, max_rects);
  if (po.infinite || po.value > diff) return diff;
  return po.value;
}

QReport check_q(const GridFunction& lower, const GridFunction& upper, std::size_t max_rects) {
  require_same_mesh(lower, upper, "check_q");
  if (max_rects == 0) throw std::invalid_argument("check_q: max_rects must be positive");
  const BigInt den = common_denominator(lower, upper);
  if (int64_path_ok(den)) return check_q_impl<std::int64_t>(lower, upper, max_rects, den);
  return check_q_impl<BigInt>(lower, upper, max_rects, den);
}

CoherenceReport check_coherence(const GridFunction& lower, const GridFunction& upper,
                                std::size_t max_rects) {
  require_same_mesh(lower, upper, "check_coherence");
  if (max_rects == 0) throw std::invalid_argument("check_coherence: max_rects must be positive");
  Classification cl = classify(lower);
  if (!cl.holds_b)
    throw std::invalid_argument("check_coherence: lower bound does not satisfy condition (B)");
  Classification cu = classify(upper);
  if (!cu.holds_b)
    throw std::invalid_argument("check_coherence: upper bound does not satisfy condition (B)");
  auto ml = margins(lower);
  auto mu = margins(upper);
  if (ml.first != mu.first || ml.second != mu.second)
    throw std::invalid_argument("check_coherence: margins of the two bounds differ");

  CoherenceReport report;
  FeasibilityCertificate feas = sandwich_decide(lower, upper);
  report.feasible = feas.verdict == Feasibility::feasible;
  report.witness = feas.witness;
  report.infeasibility = feas.certificate;
  if (!report.feasible) {
    // No sandwiched distribution: attainment is vacuous and the pair is not
    // coherent; the bound conditions are not evaluated.
    report.exact = true;
    return report;
  }

  const BigInt den = common_denominator(lower, upper);
  if (int64_path_ok(den))
    return coherence_bounds_impl<std::int64_t>(lower, upper, max_rects, den, std::move(report));
  return coherence_bounds_impl<BigInt>(lower, upper, max_rects, den, std::move(report));
}

GridPoint reflect_point(GridPoint p, const Mesh& mesh, Axis axis) {
  if (axis == Axis::x) return {mesh.x().last() - p.i, p.j};
  return {p.i, mesh.y().last() - p.j};
}

IndexRect reflect_rect(const IndexRect& r, const Mesh& mesh, Axis axis) {
  if (axis == Axis::x) {
    const std::size_t last = mesh.x().last();
    return IndexRect(last - r.i2(), r.j1(), last - r.i1(), r.j2());
  }
  const std::size_t last = mesh.y().last();
  return IndexRect(r.i1(), last - r.j2(), r.i2(), last - r.j1());
}

RectGaggle reflect_gaggle(const RectGaggle& gaggle, const Mesh& mesh, Axis axis) {
  std::vector<IndexRect> members;
  members.reserve(gaggle.members().size());
  for (const IndexRect& r : gaggle.members()) members.push_back(reflect_rect(r, mesh, axis));
  return RectGaggle(std::move(members));
}

RectGaggle gaggle_from_cells(const std::vector<bool>& cells, std::size_t cells_x,
                             std::size_t cells_y) {
  if (cells.size() != cells_x * cells_y)
    throw std::invalid_argument("gaggle_from_cells: cell mask has wrong size");
  std::vector<IndexRect> members;
  for (std::size_t ci = 0; ci < cells_x; ++ci) {
    std::size_t cj = 0;
    while (cj < cells_y) {
      if (!cells[ci * cells_y + cj]) {
        ++cj;
        continue;
      }
      std::size_t end = cj;
      while (end < cells_y && cells[ci * cells_y + end]) ++end;
      members.emplace_back(ci, cj, ci + 1, end);
      cj = end;
    }
  }
  return RectGaggle(std::move(members));
}

}  // namespace qdc
