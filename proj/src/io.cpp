#include "qdc/io.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qdc {

namespace {

using Json = nlohmann::ordered_json;

std::string kind_name(AxisKind kind) {
  return kind == AxisKind::extended_real ? "extended" : "unit";
}

AxisKind parse_kind(const Json& doc) {
  if (!doc.contains("kind") || !doc["kind"].is_string())
    throw std::invalid_argument("document: missing or non-string \"kind\"");
  const std::string k = doc["kind"].get<std::string>();
  if (k == "extended") return AxisKind::extended_real;
  if (k == "unit") return AxisKind::unit;
  throw std::invalid_argument("document: unknown kind \"" + k + "\"");
}

std::vector<Coord> parse_axis(const Json& doc, const char* field) {
  if (!doc.contains(field) || !doc[field].is_array())
    throw std::invalid_argument(std::string("document: missing coordinate list \"") + field +
                                "\"");
  std::vector<Coord> coords;
  for (const auto& item : doc[field]) {
    if (!item.is_string())
      throw std::invalid_argument(std::string("document: \"") + field +
                                  "\" entries must be strings");
    coords.push_back(Coord::parse(item.get<std::string>()));
  }
  return coords;
}

Json axis_json(const AxisGrid& axis) {
  Json out = Json::array();
  for (const Coord& c : axis.coords()) out.push_back(c.str());
  return out;
}

Json parse_document(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("document: ") + e.what());
  }
}

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write file: " + path);
  out << text;
}

}  // namespace

std::string grid_to_json(const GridFunction& f) {
  Json doc;
  doc["kind"] = kind_name(f.mesh().kind());
  doc["xs"] = axis_json(f.mesh().x());
  doc["ys"] = axis_json(f.mesh().y());
  Json rows = Json::array();
  for (std::size_t i = 0; i < f.nx(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < f.ny(); ++j) row.push_back(format_rational(f.at(i, j)));
    rows.push_back(std::move(row));
  }
  doc["values"] = std::move(rows);
  return dump(doc);
}

GridFunction grid_from_json(const std::string& text) {
  Json doc = parse_document(text);
  AxisKind kind = parse_kind(doc);
  AxisGrid xs(kind, parse_axis(doc, "xs"));
  AxisGrid ys(kind, parse_axis(doc, "ys"));
  if (!doc.contains("values") || !doc["values"].is_array())
    throw std::invalid_argument("document: missing \"values\" matrix");
  const auto& rows = doc["values"];
  if (rows.size() != xs.size())
    throw std::invalid_argument("document: expected " + std::to_string(xs.size()) +
                                " value rows, got " + std::to_string(rows.size()));
  std::vector<Rational> values;
  values.reserve(xs.size() * ys.size());
  for (const auto& row : rows) {
    if (!row.is_array() || row.size() != ys.size())
      throw std::invalid_argument("document: each value row needs " +
                                  std::to_string(ys.size()) + " entries");
    for (const auto& item : row) {
      if (!item.is_string())
        throw std::invalid_argument("document: values must be rational strings");
      values.push_back(parse_rational(item.get<std::string>()));
    }
  }
  return GridFunction(Mesh(std::move(xs), std::move(ys)), std::move(values));
}

std::string univariate_to_json(const UnivariateGrid& g) {
  Json doc;
  doc["kind"] = kind_name(g.axis().kind());
  doc["coords"] = axis_json(g.axis());
  Json values = Json::array();
  for (const Rational& v : g.values()) values.push_back(format_rational(v));
  doc["values"] = std::move(values);
  return dump(doc);
}

UnivariateGrid univariate_from_json(const std::string& text) {
  Json doc = parse_document(text);
  AxisKind kind = parse_kind(doc);
  AxisGrid axis(kind, parse_axis(doc, "coords"));
  if (!doc.contains("values") || !doc["values"].is_array())
    throw std::invalid_argument("document: missing \"values\" list");
  std::vector<Rational> values;
  for (const auto& item : doc["values"]) {
    if (!item.is_string())
      throw std::invalid_argument("document: values must be rational strings");
    values.push_back(parse_rational(item.get<std::string>()));
  }
  return UnivariateGrid(std::move(axis), std::move(values));
}

GridFunction load_grid(const std::string& path) {
  try {
    return grid_from_json(read_file(path));
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

void save_grid(const GridFunction& f, const std::string& path) {
  write_file(path, grid_to_json(f));
}

UnivariateGrid load_univariate(const std::string& path) {
  try {
    return univariate_from_json(read_file(path));
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

void save_univariate(const UnivariateGrid& g, const std::string& path) {
  write_file(path, univariate_to_json(g));
}

}  // namespace qdc
