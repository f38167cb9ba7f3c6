#pragma once

#include "qdc/grid.hpp"
#include "qdc/rectcalc.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace qdc {

enum class Feasibility { feasible, infeasible };

/// Outcome of the sandwich decision: either a validated distribution between
/// the bounds, or a gaggle with strictly negative L value.  Exactly one of
/// the two is present and both re-validate independently.
struct FeasibilityCertificate {
  Feasibility verdict = Feasibility::infeasible;
  std::optional<GridFunction> witness;
  std::optional<std::pair<RectGaggle, Rational>> certificate;
};

/// Throws std::invalid_argument naming the first violated sandwich
/// precondition: condition (B) for both bounds, lower <= upper, equal margins.
void validate_sandwich_inputs(const GridFunction& lower, const GridFunction& upper);

/// Decides whether a distribution F with lower <= F <= upper and the common
/// margins exists.  Interior values are free variables, boundary values are
/// fixed by the margins; every elementary cell volume must be nonnegative.
/// Solved by exact-rational phase-1 simplex with smallest-index pivoting.
FeasibilityCertificate sandwich_decide(const GridFunction& lower, const GridFunction& upper);

struct PatchStep {
  GridPoint point;
  Rational amount;
};

struct PatchTrace {
  std::vector<PatchStep> steps;  // strictly positive patches, in sweep order
  GridFunction final;
};

/// One lexicographic sweep raising the lower function by its current gamma
/// at each point.  Gamma values are computed with exact bounds regardless of
/// max_rects (an overestimate would break condition (Q2)); max_rects is used
/// for the initial (Q1)/(Q2) verification.  The final grid is post-validated
/// to be a distribution inside the bounds with the common margins.
PatchTrace patch_sweep(const GridFunction& lower, const GridFunction& upper,
                       std::size_t max_rects);

}  // namespace qdc
