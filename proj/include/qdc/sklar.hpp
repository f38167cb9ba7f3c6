#pragma once

#include "qdc/grid.hpp"
#include "qdc/rectcalc.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace qdc {

struct SklarDecomposition {
  GridFunction copula;  // unit-kind grid on the margin-range mesh
  UnivariateGrid margin_x;
  UnivariateGrid margin_y;
};

/// Discrete Sklar decomposition: the copula mesh axes are the sorted distinct
/// margin values, and C(F_X(x_i), F_Y(y_j)) = F(x_i, y_j).  When margins are
/// not injective on the mesh the collapse must be consistent (equal margin
/// values force equal function values); inconsistency is rejected.
SklarDecomposition sklar_decompose(const GridFunction& f);

/// F(x_i, y_j) = C(F_X(x_i), F_Y(y_j)) on the margins' mesh; copula values
/// off C's mesh come from bilinear interpolation.
GridFunction sklar_compose(const GridFunction& copula, const UnivariateGrid& fx,
                           const UnivariateGrid& fy);

struct ICWitness {
  IndexRect rect;
  Rational value;
};

/// The four mixed-volume inequalities, each over every rectangle of the
/// common unit mesh, with a witness for the first failure of each axiom.
struct ICReport {
  bool ic1 = false, ic2 = false, ic3 = false, ic4 = false;
  std::optional<ICWitness> ic1_witness, ic2_witness, ic3_witness, ic4_witness;
  bool all() const { return ic1 && ic2 && ic3 && ic4; }
};

ICReport check_imprecise(const GridFunction& p, const GridFunction& q);

/// A pair P <= Q of quasi-copulas (condition (B), identity margins) on a
/// common unit mesh.
class ImpreciseCopulaGrid {
 public:
  ImpreciseCopulaGrid(GridFunction p, GridFunction q);
  const GridFunction& lower() const { return p_; }
  const GridFunction& upper() const { return q_; }

 private:
  GridFunction p_;
  GridFunction q_;
};

/// A pair A <= B of quasi-distributions with identical margins on a common
/// extended-real mesh.
class RestrictedPBox {
 public:
  RestrictedPBox(GridFunction a, GridFunction b);
  const GridFunction& lower() const { return a_; }
  const GridFunction& upper() const { return b_; }
  const UnivariateGrid& margin_x() const { return margin_x_; }
  const UnivariateGrid& margin_y() const { return margin_y_; }

 private:
  GridFunction a_;
  GridFunction b_;
  UnivariateGrid margin_x_;
  UnivariateGrid margin_y_;
};

struct IncoherentInputError : std::invalid_argument {
  IncoherentInputError(const std::string& what, CoherenceReport report_)
      : std::invalid_argument(what), report(std::move(report_)) {}
  CoherenceReport report;
};

struct PBoxBuild {
  RestrictedPBox box;
  /// Coherence of the box, evaluated through the pair induced on the
  /// margin-range mesh (the grid-scale equivalent of the composed box).
  CoherenceReport composed_check;
};

/// Composes a coherent imprecise copula with the given margins into a
/// restricted p-box.  Throws IncoherentInputError when the input pair (or
/// its composition at the margin resolution) fails the coherence check.
PBoxBuild build_pbox(const GridFunction& p, const GridFunction& q, const UnivariateGrid& fx,
                     const UnivariateGrid& fy, std::size_t max_rects);

struct MemberVerdict {
  bool member = false;
  std::string reason;  // empty when member
  std::optional<GridPoint> witness;
};

/// F belongs to the box when it is a distribution with exactly the box
/// margins and lies between the bounds.
MemberVerdict pbox_member(const RestrictedPBox& box, const GridFunction& f);

struct FamilyGroup {
  UnivariateGrid margin_x;
  UnivariateGrid margin_y;
  std::vector<std::size_t> members;  // indices into the input list
  GridFunction lower_envelope;
  GridFunction upper_envelope;
  GridFunction copula_lower;  // decomposed envelope pair
  GridFunction copula_upper;
  CoherenceReport coherence;  // of the induced copula pair
};

struct FamilyReport {
  std::vector<FamilyGroup> groups;
};

/// Groups distributions by their exact margin pair; per group computes the
/// envelope pair, its Sklar decomposition, and the coherence report of the
/// induced imprecise copula.
FamilyReport analyze_family(const std::vector<GridFunction>& fs, std::size_t max_rects);

}  // namespace qdc
