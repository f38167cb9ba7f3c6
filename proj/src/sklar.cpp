#include "qdc/sklar.hpp"

#include "qdc/interp.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <utility>

namespace qdc {

namespace {

void require_unit_quasi_copula(const GridFunction& c, const char* op, const char* role) {
  if (c.mesh().kind() != AxisKind::unit)
    throw std::invalid_argument(std::string(op) + ": " + role + " must live on a unit mesh");
  if (!classify(c).holds_b)
    throw std::invalid_argument(std::string(op) + ": " + role +
                                " does not satisfy condition (B)");
  auto [mx, my] = margins(c);
  for (std::size_t i = 0; i < mx.size(); ++i)
    if (mx.at(i) != c.mesh().x().at(i).value())
      throw std::invalid_argument(std::string(op) + ": " + role +
                                  " x margin is not the identity at " +
                                  c.mesh().x().at(i).str());
  for (std::size_t j = 0; j < my.size(); ++j)
    if (my.at(j) != c.mesh().y().at(j).value())
      throw std::invalid_argument(std::string(op) + ": " + role +
                                  " y margin is not the identity at " +
                                  c.mesh().y().at(j).str());
}

AxisGrid range_axis(const UnivariateGrid& margin, const char* op) {
  std::vector<Rational> distinct;
  for (const Rational& v : margin.values()) {
    if (distinct.empty() || distinct.back() != v) distinct.push_back(v);
  }
  if (distinct.size() < 3)
    throw std::invalid_argument(std::string(op) +
                                ": margin takes fewer than 3 distinct values on the mesh");
  std::vector<Coord> coords;
  coords.reserve(distinct.size());
  for (Rational& v : distinct) coords.emplace_back(std::move(v));
  return AxisGrid(AxisKind::unit, std::move(coords));
}

std::size_t escalate_if_small(std::size_t max_rects, const Mesh& mesh) {
  const std::size_t cap = cell_count(mesh);
  return cap <= 20 ? std::max(max_rects, cap) : max_rects;
}

}  // namespace

SklarDecomposition sklar_decompose(const GridFunction& f) {
  if (f.mesh().kind() != AxisKind::extended_real)
    throw std::invalid_argument("sklar_decompose: input must live on an extended-real mesh");
  if (!classify(f).holds_b)
    throw std::invalid_argument("sklar_decompose: input does not satisfy condition (B)");
  auto [fx, fy] = margins(f);

  AxisGrid ux = range_axis(fx, "sklar_decompose");
  AxisGrid uy = range_axis(fy, "sklar_decompose");

  // rank of each mesh index in the range axis
  auto ranks = [](const UnivariateGrid& m, const AxisGrid& axis) {
    std::vector<std::size_t> r(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) r[i] = *axis.index_of(Coord(m.at(i)));
    return r;
  };
  std::vector<std::size_t> rx = ranks(fx, ux);
  std::vector<std::size_t> ry = ranks(fy, uy);

  const std::size_t cnx = ux.size(), cny = uy.size();
  std::vector<Rational> values(cnx * cny);
  std::vector<std::pair<std::size_t, std::size_t>> rep(cnx * cny, {0, 0});
  std::vector<bool> seen(cnx * cny, false);
  for (std::size_t i = 0; i < f.nx(); ++i) {
    for (std::size_t j = 0; j < f.ny(); ++j) {
      const std::size_t slot = rx[i] * cny + ry[j];
      if (!seen[slot]) {
        seen[slot] = true;
        values[slot] = f.at(i, j);
        rep[slot] = {i, j};
      } else if (values[slot] != f.at(i, j)) {
        throw std::invalid_argument(
            "sklar_decompose: inconsistent collapse between " +
            point_str(f, {rep[slot].first, rep[slot].second}) + " and " + point_str(f, {i, j}) +
            "; input is not a quasi-distribution");
      }
    }
  }

  GridFunction copula(Mesh(std::move(ux), std::move(uy)), std::move(values));
  return {std::move(copula), std::move(fx), std::move(fy)};
}

GridFunction sklar_compose(const GridFunction& copula, const UnivariateGrid& fx,
                           const UnivariateGrid& fy) {
  require_unit_quasi_copula(copula, "sklar_compose", "copula");
  InterpolatedFunction c(copula);
  const std::size_t nx = fx.size(), ny = fy.size();
  std::vector<Rational> values;
  values.reserve(nx * ny);
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      values.push_back(c.evaluate(fx.at(i), fy.at(j)));
    }
  }
  return GridFunction(Mesh(fx.axis(), fy.axis()), std::move(values));
}

ICReport check_imprecise(const GridFunction& p, const GridFunction& q) {
  if (p.mesh() != q.mesh()) throw std::invalid_argument("check_imprecise: mesh mismatch");
  if (p.mesh().kind() != AxisKind::unit)
    throw std::invalid_argument("check_imprecise: inputs must live on a unit mesh");

  ICReport report;
  report.ic1 = report.ic2 = report.ic3 = report.ic4 = true;
  const std::size_t nx = p.nx(), ny = p.ny();
  for (std::size_t i1 = 0; i1 + 1 < nx; ++i1) {
    for (std::size_t j1 = 0; j1 + 1 < ny; ++j1) {
      for (std::size_t i2 = i1 + 1; i2 < nx; ++i2) {
        for (std::size_t j2 = j1 + 1; j2 < ny; ++j2) {
          IndexRect r(i1, j1, i2, j2);
          const Rational& pa = p.at(r.sw());
          const Rational& pb = p.at(r.se());
          const Rational& pc = p.at(r.ne());
          const Rational& pd = p.at(r.nw());
          const Rational& qa = q.at(r.sw());
          const Rational& qb = q.at(r.se());
          const Rational& qc = q.at(r.ne());
          const Rational& qd = q.at(r.nw());
          auto probe = [&](bool& flag, std::optional<ICWitness>& witness, Rational v) {
            if (flag && v < 0) {
              flag = false;
              witness = ICWitness{r, std::move(v)};
            }
          };
          probe(report.ic1, report.ic1_witness, pa + qc - pb - pd);
          probe(report.ic2, report.ic2_witness, qa + pc - pb - pd);
          probe(report.ic3, report.ic3_witness, qa + qc - qb - pd);
          probe(report.ic4, report.ic4_witness, qa + qc - pb - qd);
        }
      }
    }
  }
  return report;
}

ImpreciseCopulaGrid::ImpreciseCopulaGrid(GridFunction p, GridFunction q)
    : p_(std::move(p)), q_(std::move(q)) {
  if (p_.mesh() != q_.mesh())
    throw std::invalid_argument("ImpreciseCopulaGrid: mesh mismatch");
  require_unit_quasi_copula(p_, "ImpreciseCopulaGrid", "lower");
  require_unit_quasi_copula(q_, "ImpreciseCopulaGrid", "upper");
  for (std::size_t i = 0; i < p_.nx(); ++i)
    for (std::size_t j = 0; j < p_.ny(); ++j)
      if (p_.at(i, j) > q_.at(i, j))
        throw std::invalid_argument("ImpreciseCopulaGrid: lower exceeds upper at " +
                                    point_str(p_, {i, j}));
}

RestrictedPBox::RestrictedPBox(GridFunction a, GridFunction b)
    : a_(std::move(a)),
      b_(std::move(b)),
      margin_x_(margins(a_).first),
      margin_y_(margins(a_).second) {
  if (a_.mesh() != b_.mesh()) throw std::invalid_argument("RestrictedPBox: mesh mismatch");
  if (a_.mesh().kind() != AxisKind::extended_real)
    throw std::invalid_argument("RestrictedPBox: bounds must live on an extended-real mesh");
  if (!classify(a_).holds_b)
    throw std::invalid_argument("RestrictedPBox: lower bound does not satisfy condition (B)");
  if (!classify(b_).holds_b)
    throw std::invalid_argument("RestrictedPBox: upper bound does not satisfy condition (B)");
  auto mb = margins(b_);
  if (mb.first != margin_x_ || mb.second != margin_y_)
    throw std::invalid_argument("RestrictedPBox: margins of the two bounds differ");
  for (std::size_t i = 0; i < a_.nx(); ++i)
    for (std::size_t j = 0; j < a_.ny(); ++j)
      if (a_.at(i, j) > b_.at(i, j))
        throw std::invalid_argument("RestrictedPBox: lower exceeds upper at " +
                                    point_str(a_, {i, j}));
}

PBoxBuild build_pbox(const GridFunction& p, const GridFunction& q, const UnivariateGrid& fx,
                     const UnivariateGrid& fy, std::size_t max_rects) {
  ImpreciseCopulaGrid pair(p, q);
  CoherenceReport input_check =
      check_coherence(p, q, escalate_if_small(max_rects, p.mesh()));
  if (!input_check.coherent)
    throw IncoherentInputError("build_pbox: input pair is not a coherent imprecise copula",
                               std::move(input_check));

  GridFunction a = sklar_compose(p, fx, fy);
  GridFunction b = sklar_compose(q, fx, fy);
  RestrictedPBox box(std::move(a), std::move(b));

  // Re-check on the composed grids.  A sandwiched distribution factors
  // exactly through the margin-range mesh, so coherence of the box equals
  // coherence of the pair induced there.  A negative verdict is definitive
  // even below the cap: estimated bounds only overstate the infima.
  SklarDecomposition da = sklar_decompose(box.lower());
  SklarDecomposition db = sklar_decompose(box.upper());
  CoherenceReport composed = check_coherence(
      da.copula, db.copula, escalate_if_small(max_rects, da.copula.mesh()));
  if (!composed.coherent)
    throw IncoherentInputError(
        "build_pbox: composition is not coherent at the margin resolution", std::move(composed));
  return PBoxBuild{std::move(box), std::move(composed)};
}

MemberVerdict pbox_member(const RestrictedPBox& box, const GridFunction& f) {
  if (f.mesh() != box.lower().mesh())
    throw std::invalid_argument("pbox_member: mesh mismatch");
  MemberVerdict out;
  Classification cls = classify(f);
  if (!cls.holds_c) {
    out.reason = "not a distribution";
    if (cls.a_witness) out.witness = cls.a_witness->point;
    if (cls.c_witness) out.witness = cls.c_witness->rect.sw();
    return out;
  }
  auto [mx, my] = margins(f);
  for (std::size_t i = 0; i < mx.size(); ++i) {
    if (mx.at(i) != box.margin_x().at(i)) {
      out.reason = "x margin differs from the box margin";
      out.witness = GridPoint{i, f.ny() - 1};
      return out;
    }
  }
  for (std::size_t j = 0; j < my.size(); ++j) {
    if (my.at(j) != box.margin_y().at(j)) {
      out.reason = "y margin differs from the box margin";
      out.witness = GridPoint{f.nx() - 1, j};
      return out;
    }
  }
  for (std::size_t i = 0; i < f.nx(); ++i) {
    for (std::size_t j = 0; j < f.ny(); ++j) {
      if (f.at(i, j) < box.lower().at(i, j)) {
        out.reason = "below the lower bound";
        out.witness = GridPoint{i, j};
        return out;
      }
      if (f.at(i, j) > box.upper().at(i, j)) {
        out.reason = "above the upper bound";
        out.witness = GridPoint{i, j};
        return out;
      }
    }
  }
  out.member = true;
  return out;
}

FamilyReport analyze_family(const std::vector<GridFunction>& fs, std::size_t max_rects) {
  if (fs.empty()) throw std::invalid_argument("analyze_family: need at least one input");
  const Mesh& mesh = fs.front().mesh();
  for (std::size_t k = 1; k < fs.size(); ++k)
    if (fs[k].mesh() != mesh)
      throw std::invalid_argument("analyze_family: inputs on different meshes");
  for (std::size_t k = 0; k < fs.size(); ++k)
    if (!classify(fs[k]).holds_c)
      throw std::invalid_argument("analyze_family: input " + std::to_string(k) +
                                  " is not a distribution");

  using MarginKey = std::pair<std::vector<Rational>, std::vector<Rational>>;
  std::map<MarginKey, std::vector<std::size_t>> grouped;
  for (std::size_t k = 0; k < fs.size(); ++k) {
    auto [mx, my] = margins(fs[k]);
    grouped[{mx.values(), my.values()}].push_back(k);
  }

  FamilyReport report;
  for (const auto& [key, indices] : grouped) {
    std::vector<GridFunction> members;
    members.reserve(indices.size());
    for (std::size_t k : indices) members.push_back(fs[k]);
    auto [lo, hi] = envelope(members);
    SklarDecomposition dl = sklar_decompose(lo);
    SklarDecomposition dh = sklar_decompose(hi);
    CoherenceReport coh = check_coherence(dl.copula, dh.copula,
                                          escalate_if_small(max_rects, dl.copula.mesh()));
    report.groups.push_back(FamilyGroup{UnivariateGrid(mesh.x(), key.first),
                                        UnivariateGrid(mesh.y(), key.second), indices,
                                        std::move(lo), std::move(hi), std::move(dl.copula),
                                        std::move(dh.copula), std::move(coh)});
  }
  return report;
}

}  // namespace qdc
