#pragma once

#include "qdc/grid.hpp"

#include <string>

namespace qdc {

// Grid documents are JSON objects:
//   { "kind": "extended" | "unit",
//     "xs": ["-inf", "0", "1/2", "inf"], "ys": [...],
//     "values": [["0", ...], ...] }         // values[i][j] = F(xs[i], ys[j])
// Univariate documents carry "coords" and a flat "values" list instead.
// Rationals are written in lowest terms ("p/q" or an integer); saving a
// loaded document reproduces the canonical bytes.

std::string grid_to_json(const GridFunction& f);
GridFunction grid_from_json(const std::string& text);

std::string univariate_to_json(const UnivariateGrid& g);
UnivariateGrid univariate_from_json(const std::string& text);

GridFunction load_grid(const std::string& path);
void save_grid(const GridFunction& f, const std::string& path);

UnivariateGrid load_univariate(const std::string& path);
void save_univariate(const UnivariateGrid& g, const std::string& path);

}  // namespace qdc
