#include "qdc/construct.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace qdc {

namespace {

void require_sandwich_inputs(const GridFunction& lower, const GridFunction& upper,
                             const char* op) {
  if (lower.mesh() != upper.mesh())
    throw std::invalid_argument(std::string(op) + ": mesh mismatch");
  if (!classify(lower).holds_b)
    throw std::invalid_argument(std::string(op) + ": lower bound does not satisfy condition (B)");
  if (!classify(upper).holds_b)
    throw std::invalid_argument(std::string(op) + ": upper bound does not satisfy condition (B)");
  for (std::size_t i = 0; i < lower.nx(); ++i)
    for (std::size_t j = 0; j < lower.ny(); ++j)
      if (lower.at(i, j) > upper.at(i, j))
        throw std::invalid_argument(std::string(op) + ": lower exceeds upper at " +
                                    point_str(lower, {i, j}));
  auto ml = margins(lower);
  auto mu = margins(upper);
  if (ml.first != mu.first || ml.second != mu.second)
    throw std::invalid_argument(std::string(op) + ": margins of the two bounds differ");
}

// Dense phase-1 simplex over exact rationals, Bland's smallest-index rule.
class Phase1 {
 public:
  // Equality rows over `ncols` columns with rhs >= 0 and a starting basis.
  Phase1(std::size_t ncols) : ncols_(ncols) {}

  void add_row(std::vector<Rational> coeffs, Rational rhs, std::size_t basic_col) {
    rows_.push_back(std::move(coeffs));
    rhs_.push_back(std::move(rhs));
    basis_.push_back(basic_col);
  }

  void mark_artificial(std::size_t col) { artificial_.push_back(col); }

  // Returns true when the artificials can be driven to zero.
  bool solve() {
    // phase-1 cost: 1 on artificial columns, priced out of the basic rows
    std::vector<Rational> obj(ncols_, Rational(0));
    for (std::size_t col : artificial_) obj[col] = 1;
    Rational obj_value(0);
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      if (!is_artificial(basis_[r])) continue;
      for (std::size_t c = 0; c < ncols_; ++c) obj[c] -= rows_[r][c];
      obj_value -= rhs_[r];
    }
    for (;;) {
      std::size_t enter = ncols_;
      for (std::size_t c = 0; c < ncols_; ++c) {
        if (obj[c] < 0) {
          enter = c;
          break;
        }
      }
      if (enter == ncols_) break;
      std::size_t leave = rows_.size();
      Rational best_ratio(0);
      for (std::size_t r = 0; r < rows_.size(); ++r) {
        if (rows_[r][enter] <= 0) continue;
        Rational ratio = rhs_[r] / rows_[r][enter];
        if (leave == rows_.size() || ratio < best_ratio ||
            (ratio == best_ratio && basis_[r] < basis_[leave])) {
          leave = r;
          best_ratio = ratio;
        }
      }
      if (leave == rows_.size())
        throw std::logic_error("sandwich_decide: unbounded phase-1 objective");
      pivot(leave, enter, obj, obj_value);
    }
    return obj_value == 0;
  }

  Rational value_of(std::size_t col) const {
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      if (basis_[r] == col) return rhs_[r];
    }
    return Rational(0);
  }

 private:
  bool is_artificial(std::size_t col) const {
    return std::find(artificial_.begin(), artificial_.end(), col) != artificial_.end();
  }

  void pivot(std::size_t leave, std::size_t enter, std::vector<Rational>& obj,
             Rational& obj_value) {
    const Rational p = rows_[leave][enter];
    for (std::size_t c = 0; c < ncols_; ++c) rows_[leave][c] /= p;
    rhs_[leave] /= p;
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      if (r == leave || rows_[r][enter] == 0) continue;
      const Rational f = rows_[r][enter];
      for (std::size_t c = 0; c < ncols_; ++c) rows_[r][c] -= f * rows_[leave][c];
      rhs_[r] -= f * rhs_[leave];
    }
    if (obj[enter] != 0) {
      const Rational f = obj[enter];
      for (std::size_t c = 0; c < ncols_; ++c) obj[c] -= f * rows_[leave][c];
      obj_value -= f * rhs_[leave];
    }
    basis_[leave] = enter;
  }

  std::size_t ncols_;
  std::vector<std::vector<Rational>> rows_;
  std::vector<Rational> rhs_;
  std::vector<std::size_t> basis_;
  std::vector<std::size_t> artificial_;
};

std::pair<RectGaggle, Rational> negative_gaggle_certificate(const GridFunction& lower,
                                                            const GridFunction& upper) {
  const std::size_t cap = cell_count(lower.mesh());
  QReport quick = check_q(lower, upper, std::min<std::size_t>(3, cap));
  if (quick.q2_witness) return *quick.q2_witness;
  QReport full = check_q(lower, upper, cap);
  if (full.q2_witness) return *full.q2_witness;
  throw std::logic_error("sandwich_decide: infeasible system without a negative gaggle");
}

}  // namespace

void validate_sandwich_inputs(const GridFunction& lower, const GridFunction& upper) {
  require_sandwich_inputs(lower, upper, "sandwich");
}

FeasibilityCertificate sandwich_decide(const GridFunction& lower, const GridFunction& upper) {
  require_sandwich_inputs(lower, upper, "sandwich_decide");

  const std::size_t nx = lower.nx(), ny = lower.ny();

  // Structural variables: u = F - lower at interior points with slack to move.
  std::vector<std::size_t> var_of(nx * ny, static_cast<std::size_t>(-1));
  std::vector<GridPoint> points;
  std::vector<Rational> ub;
  for (std::size_t i = 1; i + 1 < nx; ++i) {
    for (std::size_t j = 1; j + 1 < ny; ++j) {
      Rational d = upper.at(i, j) - lower.at(i, j);
      if (d == 0) continue;
      var_of[i * ny + j] = points.size();
      points.push_back({i, j});
      ub.push_back(std::move(d));
    }
  }
  const std::size_t n = points.size();

  struct CellRow {
    std::vector<std::pair<std::size_t, int>> terms;  // (var, +-1)
    Rational rhs;                                    // sum terms >= rhs
  };
  std::vector<CellRow> cells;
  for (std::size_t i = 0; i + 1 < nx; ++i) {
    for (std::size_t j = 0; j + 1 < ny; ++j) {
      IndexRect cell(i, j, i + 1, j + 1);
      CellRow row;
      row.rhs = -volume(lower, cell);
      auto add = [&](GridPoint p, int sign) {
        std::size_t v = var_of[p.i * ny + p.j];
        if (v != static_cast<std::size_t>(-1)) row.terms.emplace_back(v, sign);
      };
      add(cell.sw(), +1);
      add(cell.ne(), +1);
      add(cell.se(), -1);
      add(cell.nw(), -1);
      if (row.terms.empty()) {
        if (row.rhs > 0) {
          FeasibilityCertificate out;
          out.verdict = Feasibility::infeasible;
          out.certificate = negative_gaggle_certificate(lower, upper);
          return out;
        }
        continue;
      }
      cells.push_back(std::move(row));
    }
  }

  // Columns: structurals, upper-bound slacks, cell surpluses, artificials.
  std::size_t art_count = 0;
  for (const CellRow& c : cells)
    if (c.rhs > 0) ++art_count;
  const std::size_t col_slack = n;
  const std::size_t col_surplus = col_slack + n;
  const std::size_t col_art = col_surplus + cells.size();
  const std::size_t ncols = col_art + art_count;

  Phase1 lp(ncols);
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<Rational> row(ncols, Rational(0));
    row[k] = 1;
    row[col_slack + k] = 1;
    lp.add_row(std::move(row), ub[k], col_slack + k);
  }
  std::size_t next_art = col_art;
  for (std::size_t t = 0; t < cells.size(); ++t) {
    const CellRow& c = cells[t];
    std::vector<Rational> row(ncols, Rational(0));
    if (c.rhs > 0) {
      for (const auto& [v, s] : c.terms) row[v] += s;
      row[col_surplus + t] = -1;
      row[next_art] = 1;
      lp.mark_artificial(next_art);
      lp.add_row(std::move(row), c.rhs, next_art);
      ++next_art;
    } else {
      for (const auto& [v, s] : c.terms) row[v] -= s;
      row[col_surplus + t] = 1;
      lp.add_row(std::move(row), -c.rhs, col_surplus + t);
    }
  }

  FeasibilityCertificate out;
  if (!lp.solve()) {
    out.verdict = Feasibility::infeasible;
    out.certificate = negative_gaggle_certificate(lower, upper);
    return out;
  }

  std::vector<Rational> values = lower.values();
  for (std::size_t k = 0; k < n; ++k) {
    values[points[k].i * ny + points[k].j] += lp.value_of(k);
  }
  GridFunction witness(lower.mesh(), std::move(values));

  if (!classify(witness).holds_c)
    throw std::logic_error("sandwich_decide: witness failed condition (C)");
  auto mw = margins(witness);
  auto ml = margins(lower);
  if (mw.first != ml.first || mw.second != ml.second)
    throw std::logic_error("sandwich_decide: witness margins differ from the bounds");
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < ny; ++j)
      if (witness.at(i, j) < lower.at(i, j) || witness.at(i, j) > upper.at(i, j))
        throw std::logic_error("sandwich_decide: witness escaped the bounds");

  out.verdict = Feasibility::feasible;
  out.witness = std::move(witness);
  return out;
}

PatchTrace patch_sweep(const GridFunction& lower, const GridFunction& upper,
                       std::size_t max_rects) {
  require_sandwich_inputs(lower, upper, "patch_sweep");
  const std::size_t cap = cell_count(lower.mesh());
  QReport qr = check_q(lower, upper, std::max(max_rects, cap));
  if (!qr.q1 || !qr.q2) {
    std::string what = !qr.q1 ? "(Q1)" : "(Q2)";
    throw std::invalid_argument("patch_sweep: input pair fails condition " + what);
  }

  PatchTrace trace{{}, lower};
  GridFunction& cur = trace.final;
  for (std::size_t i = 0; i < lower.nx(); ++i) {
    for (std::size_t j = 0; j < lower.ny(); ++j) {
      const Rational diff = upper.at(i, j) - cur.at(i, j);
      if (diff == 0) continue;
      BoundValue po = p_bound(cur, upper, {i, j}, CornerSide::opposite, cap);
      Rational t = (po.infinite || po.value > diff) ? diff : po.value;
      if (t < 0) throw std::logic_error("patch_sweep: negative gamma under (Q2)");
      if (t == 0) continue;
      cur = cur.with_value({i, j}, cur.at(i, j) + t);
      trace.steps.push_back({GridPoint{i, j}, std::move(t)});
    }
  }

  if (!classify(cur).holds_c)
    throw std::logic_error("patch_sweep: final grid failed condition (C)");
  auto mf = margins(cur);
  auto ml = margins(lower);
  if (mf.first != ml.first || mf.second != ml.second)
    throw std::logic_error("patch_sweep: final grid margins differ from the bounds");
  for (std::size_t i = 0; i < lower.nx(); ++i)
    for (std::size_t j = 0; j < lower.ny(); ++j)
      if (cur.at(i, j) < lower.at(i, j) || cur.at(i, j) > upper.at(i, j))
        throw std::logic_error("patch_sweep: final grid escaped the bounds");
  return trace;
}

}  // namespace qdc
