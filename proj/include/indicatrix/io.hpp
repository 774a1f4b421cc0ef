#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "indicatrix/dyadic.hpp"
#include "indicatrix/errors.hpp"
#include "indicatrix/exhaustion.hpp"
#include "indicatrix/metric_space.hpp"
#include "indicatrix/multiplicity.hpp"
#include "indicatrix/variation.hpp"

namespace indicatrix::io {

using json = nlohmann::ordered_json;

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileNotFound("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FileNotFound("cannot write " + path);
  out << content;
  if (!out) throw FileNotFound("short write to " + path);
}

// FNV-1a, used as a content fingerprint in reports.
inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string fnv1a64_hex(std::string_view data) {
  char buf[19];
  std::snprintf(buf, sizeof(buf), "0x%016llx",
                static_cast<unsigned long long>(fnv1a64(data)));
  return buf;
}

// 17 significant digits: enough to round-trip any double.
inline std::string format_double(double v) {
  if (!std::isfinite(v)) throw Error("cannot serialize a non-finite number");
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace detail {

inline void dump_json_impl(const json& j, std::string& out) {
  switch (j.type()) {
    case json::value_t::null:
      out += "null";
      break;
    case json::value_t::boolean:
      out += j.get<bool>() ? "true" : "false";
      break;
    case json::value_t::number_integer:
      out += std::to_string(j.get<std::int64_t>());
      break;
    case json::value_t::number_unsigned:
      out += std::to_string(j.get<std::uint64_t>());
      break;
    case json::value_t::number_float:
      out += format_double(j.get<double>());
      break;
    case json::value_t::string:
      out += nlohmann::json(j.get<std::string>()).dump();
      break;
    case json::value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& item : j) {
        if (!first) out += ',';
        first = false;
        dump_json_impl(item, out);
      }
      out += ']';
      break;
    }
    case json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += nlohmann::json(it.key()).dump();
        out += ':';
        dump_json_impl(it.value(), out);
      }
      out += '}';
      break;
    }
    default:
      throw Error("cannot serialize this JSON node");
  }
}

}  // namespace detail

// Compact writer with pinned float formatting; key order is insertion
// order, so identical construction yields identical bytes.
inline std::string dump_json(const json& j) {
  std::string out;
  detail::dump_json_impl(j, out);
  return out;
}

inline json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("invalid JSON: ") + e.what());
  }
}

namespace detail {

inline double number_at(const json& j, const std::string& what) {
  if (!j.is_number()) throw SchemaError(what + " must be a number");
  return j.get<double>();
}

inline int int_at(const json& j, const std::string& what) {
  if (!j.is_number_integer() && !j.is_number_unsigned())
    throw SchemaError(what + " must be an integer");
  return j.get<int>();
}

inline std::vector<double> vector_at(const json& j, const std::string& what) {
  if (j.is_number()) return {j.get<double>()};
  if (!j.is_array()) throw SchemaError(what + " must be a number or an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) out.push_back(number_at(v, what));
  return out;
}

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  for (std::string& f : fields) {
    const auto b = f.find_first_not_of(" \t\r");
    const auto e = f.find_last_not_of(" \t\r");
    f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
  }
  return fields;
}

inline bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

inline std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    rows.push_back(split(line, ','));
  }
  return rows;
}

}  // namespace detail

// ---- point-cloud spaces ----------------------------------------------

inline Metric metric_from_name(const std::string& name) {
  if (name == "euclidean") return Metric::euclidean;
  if (name == "manhattan") return Metric::manhattan;
  throw SchemaError("unknown metric \"" + name + "\"");
}

inline PointCloudSpace space_from_json(const json& j) {
  if (!j.is_object()) throw SchemaError("space document must be an object");
  std::vector<double> weights;
  if (j.contains("weights")) {
    if (!j.at("weights").is_array()) throw SchemaError("weights must be an array");
    for (const auto& w : j.at("weights"))
      weights.push_back(detail::number_at(w, "weight"));
  }
  const json& metric = j.contains("metric") ? j.at("metric") : json("euclidean");
  if (metric.is_object()) {
    if (!metric.contains("matrix")) throw SchemaError("metric object needs a matrix field");
    const json& mj = metric.at("matrix");
    if (!mj.is_array()) throw SchemaError("matrix must be an array of rows");
    std::vector<std::vector<double>> matrix;
    for (const auto& row : mj) matrix.push_back(detail::vector_at(row, "matrix row"));
    return build_point_cloud_from_matrix(matrix, weights);
  }
  if (!metric.is_string()) throw SchemaError("metric must be a name or a matrix object");
  if (!j.contains("points")) throw SchemaError("space document needs points");
  if (!j.at("points").is_array()) throw SchemaError("points must be an array");
  std::vector<std::vector<double>> points;
  for (const auto& row : j.at("points")) points.push_back(detail::vector_at(row, "point"));
  return build_point_cloud(points, weights, metric_from_name(metric.get<std::string>()));
}

inline json space_to_json(const PointCloudSpace& s) {
  json j = json::object();
  if (s.metric == Metric::explicit_matrix) {
    json rows = json::array();
    for (int a = 0; a < s.size(); ++a) {
      json row = json::array();
      for (int b = 0; b < s.size(); ++b)
        row.push_back(s.matrix[static_cast<std::size_t>(a) * s.size() + b]);
      rows.push_back(std::move(row));
    }
    j["metric"] = json{{"matrix", std::move(rows)}};
  } else {
    json pts = json::array();
    for (const auto& p : s.coords) pts.push_back(p);
    j["points"] = std::move(pts);
    j["metric"] = metric_name(s.metric);
  }
  j["weights"] = s.weights;
  return j;
}

// CSV: one row per point, "id, coord_1..coord_d[, weight]"; an optional
// header row starting with "id" may name the columns, and the weight column
// exists exactly when the header's last field is "weight" or "w". Rows may
// appear in any order but the ids must fill [0, n). Coordinates only, so
// the metric is the caller's choice (euclidean by default).
inline PointCloudSpace space_from_csv(const std::string& text,
                                      Metric metric = Metric::euclidean) {
  auto rows = detail::csv_rows(text);
  if (rows.empty()) throw SchemaError("empty point-cloud CSV");
  bool has_weight = false;
  double probe;
  if (!detail::parse_number(rows.front().front(), probe)) {
    const auto& header = rows.front();
    if (header.front() != "id") throw SchemaError("point-cloud CSV header must start with id");
    has_weight = header.back() == "weight" || header.back() == "w";
    rows.erase(rows.begin());
    if (rows.empty()) throw SchemaError("point-cloud CSV has a header but no rows");
  }
  const std::size_t ncols = rows.front().size();
  const std::size_t ncoord = ncols - 1 - (has_weight ? 1 : 0);
  if (ncoord < 1) throw SchemaError("point-cloud CSV rows need at least one coordinate");
  std::vector<std::vector<double>> points(rows.size());
  std::vector<double> weights(rows.size(), 1.0);
  std::vector<char> seen(rows.size(), 0);
  for (const auto& row : rows) {
    if (row.size() != ncols)
      throw SchemaError("point-cloud CSV rows have inconsistent column counts");
    double idv;
    if (!detail::parse_number(row[0], idv) || idv != static_cast<double>(static_cast<long long>(idv)))
      throw SchemaError("point id \"" + row[0] + "\" is not an integer");
    const long long id = static_cast<long long>(idv);
    if (id < 0 || id >= static_cast<long long>(rows.size()) || seen[id])
      throw SchemaError("point ids must be unique and dense in [0, n); offending id " +
                        std::to_string(id));
    seen[id] = 1;
    std::vector<double> coords(ncoord);
    for (std::size_t c = 0; c < ncoord; ++c)
      if (!detail::parse_number(row[1 + c], coords[c]))
        throw SchemaError("bad coordinate \"" + row[1 + c] + "\" for point " +
                          std::to_string(id));
    points[id] = std::move(coords);
    if (has_weight && !detail::parse_number(row[ncols - 1], weights[id]))
      throw SchemaError("bad weight \"" + row[ncols - 1] + "\" for point " +
                        std::to_string(id));
  }
  return build_point_cloud(points, weights, metric);
}

inline std::string space_to_csv(const PointCloudSpace& s) {
  if (s.metric == Metric::explicit_matrix)
    throw SchemaError("matrix spaces have no CSV form; use JSON");
  std::string out = "id";
  for (int c = 0; c < s.dim(); ++c) out += ",x" + std::to_string(c + 1);
  out += ",weight\n";
  for (int p = 0; p < s.size(); ++p) {
    out += std::to_string(p);
    for (double c : s.coords[p]) out += "," + format_double(c);
    out += "," + format_double(s.weights[p]) + "\n";
  }
  return out;
}

inline PointCloudSpace read_space(const std::string& path) {
  const std::string text = read_text_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{')
    return space_from_json(parse_json(text));
  return space_from_csv(text);
}

// ---- sampled mappings --------------------------------------------------

inline CodomainMetric codomain_metric_from_name(const std::string& name) {
  if (name == "euclidean") return CodomainMetric::euclidean;
  if (name == "manhattan") return CodomainMetric::manhattan;
  throw SchemaError("unknown codomain metric \"" + name + "\"");
}

inline SampledMapping mapping_from_json(const json& j,
                                        std::shared_ptr<const PointCloudSpace> space) {
  if (!j.is_object() || !j.contains("values"))
    throw SchemaError("mapping document must be an object with a values array");
  const json& vj = j.at("values");
  if (!vj.is_array()) throw SchemaError("values must be an array");
  std::vector<std::vector<double>> values;
  std::vector<char> defined;
  for (const auto& v : vj) {
    if (v.is_null()) {
      values.emplace_back();
      defined.push_back(0);
    } else {
      values.push_back(detail::vector_at(v, "mapping value"));
      defined.push_back(1);
    }
  }
  if (j.contains("defined")) {
    const json& dj = j.at("defined");
    if (!dj.is_array() || dj.size() != defined.size())
      throw SchemaError("defined mask must be an array matching values");
    for (std::size_t i = 0; i < defined.size(); ++i) {
      if (!dj[i].is_boolean()) throw SchemaError("defined mask entries must be booleans");
      if (dj[i].get<bool>() != (defined[i] != 0))
        throw SchemaError("defined mask disagrees with null values at index " +
                          std::to_string(i));
    }
  }
  CodomainMetric metric = CodomainMetric::euclidean;
  if (j.contains("metric")) {
    if (!j.at("metric").is_string()) throw SchemaError("mapping metric must be a name");
    metric = codomain_metric_from_name(j.at("metric").get<std::string>());
  }
  return make_mapping(std::move(space), std::move(values), std::move(defined), metric);
}

inline json mapping_to_json(const SampledMapping& f) {
  json values = json::array();
  json defined = json::array();
  for (PointId p = 0; p < f.size(); ++p) {
    if (f.is_defined(p))
      values.push_back(f.values[p]);
    else
      values.push_back(nullptr);
    defined.push_back(f.is_defined(p));
  }
  json j = json::object();
  j["values"] = std::move(values);
  j["metric"] = codomain_metric_name(f.codomain_metric);
  j["defined"] = std::move(defined);
  return j;
}

// CSV: "id, v_1..v_m"; points whose id never appears are undefined.
inline SampledMapping mapping_from_csv(const std::string& text,
                                       std::shared_ptr<const PointCloudSpace> space,
                                       CodomainMetric metric = CodomainMetric::euclidean) {
  auto rows = detail::csv_rows(text);
  if (rows.empty()) throw SchemaError("empty mapping CSV");
  double probe;
  if (!detail::parse_number(rows.front().front(), probe)) {
    if (rows.front().front() != "id")
      throw SchemaError("mapping CSV header must start with id");
    rows.erase(rows.begin());
  }
  const int n = space->size();
  std::vector<std::vector<double>> values(static_cast<std::size_t>(n));
  std::vector<char> defined(static_cast<std::size_t>(n), 0);
  for (const auto& row : rows) {
    if (row.size() < 2) throw SchemaError("mapping CSV rows need an id and a value");
    double idv;
    if (!detail::parse_number(row[0], idv) || idv != static_cast<double>(static_cast<long long>(idv)))
      throw SchemaError("point id \"" + row[0] + "\" is not an integer");
    const long long id = static_cast<long long>(idv);
    if (id < 0 || id >= n || defined[id])
      throw SchemaError("mapping CSV id " + std::to_string(id) + " is out of range or repeated");
    std::vector<double> v(row.size() - 1);
    for (std::size_t c = 1; c < row.size(); ++c)
      if (!detail::parse_number(row[c], v[c - 1]))
        throw SchemaError("bad value \"" + row[c] + "\" for point " + std::to_string(id));
    values[id] = std::move(v);
    defined[id] = 1;
  }
  return make_mapping(std::move(space), std::move(values), std::move(defined), metric);
}

inline SampledMapping read_mapping(const std::string& path,
                                   std::shared_ptr<const PointCloudSpace> space) {
  const std::string text = read_text_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{')
    return mapping_from_json(parse_json(text), std::move(space));
  return mapping_from_csv(text, std::move(space));
}

// ---- dyadic systems -----------------------------------------------------

inline json dyadic_to_json(const DyadicSystem& sys) {
  json j = json::object();
  j["delta"] = sys.params.delta;
  j["scale"] = sys.params.scale;
  json gens = json::array();
  for (int g = 0; g < sys.generation_count(); ++g) {
    json cubes = json::array();
    for (const DyadicCube& q : sys.generations[g]) {
      json cj = json::object();
      cj["alpha"] = q.index;
      cj["center"] = q.center;
      if (q.parent >= 0)
        cj["parent"] = q.parent;
      else
        cj["parent"] = nullptr;
      cj["members"] = q.members;
      cubes.push_back(std::move(cj));
    }
    json gj = json::object();
    gj["k"] = sys.params.k_min + g;
    gj["cubes"] = std::move(cubes);
    gens.push_back(std::move(gj));
  }
  j["generations"] = std::move(gens);
  j["constants"] = json{{"c", sys.inner_constant}, {"C", sys.outer_constant}};
  return j;
}

inline DyadicSystem dyadic_from_json(const json& j,
                                     std::shared_ptr<const PointCloudSpace> space) {
  if (!space) throw InvalidParams("null space");
  if (!j.is_object() || !j.contains("delta") || !j.contains("scale") ||
      !j.contains("generations"))
    throw SchemaError("dyadic document needs delta, scale and generations");
  DyadicSystem sys;
  sys.space = space;
  sys.params.delta = detail::number_at(j.at("delta"), "delta");
  sys.params.scale = detail::number_at(j.at("scale"), "scale");
  if (!(sys.params.delta > 0.0 && sys.params.delta < 1.0))
    throw SchemaError("delta must lie in (0,1)");
  if (!(sys.params.scale > 0.0)) throw SchemaError("scale must be positive");
  const json& gens = j.at("generations");
  if (!gens.is_array() || gens.empty()) throw SchemaError("generations must be a nonempty array");
  const int n = space->size();

  bool first = true;
  for (const auto& gj : gens) {
    const int k = detail::int_at(gj.at("k"), "generation k");
    if (first) {
      sys.params.k_min = k;
      first = false;
    } else if (k != sys.params.k_min + static_cast<int>(sys.generations.size())) {
      throw SchemaError("generations must carry consecutive k values");
    }
    sys.params.k_max = k;
    if (!gj.contains("cubes") || !gj.at("cubes").is_array())
      throw SchemaError("each generation needs a cubes array");
    std::vector<DyadicCube> cubes;
    std::vector<int> owner(static_cast<std::size_t>(n), -1);
    for (const auto& cj : gj.at("cubes")) {
      DyadicCube q;
      q.generation = k;
      q.index = detail::int_at(cj.at("alpha"), "alpha");
      if (q.index != static_cast<int>(cubes.size()))
        throw SchemaError("cube alphas must be consecutive from 0");
      q.center = detail::int_at(cj.at("center"), "center");
      if (q.center < 0 || q.center >= n) throw SchemaError("cube center id out of range");
      if (!cj.contains("parent") || (!cj.at("parent").is_null() && !cj.at("parent").is_number()))
        throw SchemaError("cube parent must be an alpha or null");
      q.parent = cj.at("parent").is_null() ? -1 : detail::int_at(cj.at("parent"), "parent");
      if (!cj.contains("members") || !cj.at("members").is_array() || cj.at("members").empty())
        throw SchemaError("cube members must be a nonempty array");
      for (const auto& mj : cj.at("members")) {
        const int p = detail::int_at(mj, "member id");
        if (p < 0 || p >= n) throw SchemaError("cube member id out of range");
        if (owner[p] != -1)
          throw SchemaError("point " + std::to_string(p) +
                            " belongs to two cubes of generation " + std::to_string(k));
        owner[p] = q.index;
        q.members.push_back(p);
      }
      std::sort(q.members.begin(), q.members.end());
      if (!std::binary_search(q.members.begin(), q.members.end(), q.center))
        throw SchemaError("cube center must be a member");
      cubes.push_back(std::move(q));
    }
    for (int p = 0; p < n; ++p)
      if (owner[p] == -1)
        throw SchemaError("point " + std::to_string(p) + " missing from generation " +
                          std::to_string(k));
    sys.generations.push_back(std::move(cubes));
    sys.point_to_cube.emplace_back(owner.begin(), owner.end());
  }

  // parents must reproduce the nesting
  for (std::size_t g = 0; g < sys.generations.size(); ++g)
    for (DyadicCube& q : sys.generations[g]) {
      if (g == 0) {
        if (q.parent != -1) throw SchemaError("coarsest cubes cannot have parents");
        continue;
      }
      if (q.parent < 0 || q.parent >= static_cast<int>(sys.generations[g - 1].size()))
        throw SchemaError("cube parent alpha out of range");
      for (PointId p : q.members)
        if (sys.point_to_cube[g - 1][p] != q.parent)
          throw SchemaError("cube members escape their parent cube at generation " +
                            std::to_string(sys.params.k_min + static_cast<int>(g)));
      sys.generations[g - 1][q.parent].children.push_back(q.index);
    }

  if (j.contains("constants")) {
    sys.inner_constant = detail::number_at(j.at("constants").at("c"), "constant c");
    sys.outer_constant = detail::number_at(j.at("constants").at("C"), "constant C");
  }
  return sys;
}

inline DyadicSystem read_dyadic(const std::string& path,
                                std::shared_ptr<const PointCloudSpace> space) {
  return dyadic_from_json(parse_json(read_text_file(path)), std::move(space));
}

// ---- small readers -------------------------------------------------------

inline std::vector<std::vector<double>> y_grid_from_json(const json& j) {
  if (!j.is_array() || j.empty())
    throw SchemaError("query grid must be a nonempty array");
  std::vector<std::vector<double>> grid;
  grid.reserve(j.size());
  for (const auto& v : j) grid.push_back(detail::vector_at(v, "query value"));
  return grid;
}

inline std::vector<PointId> ids_from_json(const json& j) {
  if (!j.is_array()) throw SchemaError("id list must be an array");
  std::vector<PointId> ids;
  ids.reserve(j.size());
  for (const auto& v : j) ids.push_back(detail::int_at(v, "point id"));
  return ids;
}

inline std::vector<OscillationBound> schedule_from_json(const json& j) {
  if (!j.is_array() || j.empty())
    throw SchemaError("schedule must be a nonempty array of {r, eps} objects");
  std::vector<OscillationBound> out;
  for (const auto& s : j) {
    if (!s.is_object() || !s.contains("r") || !s.contains("eps"))
      throw SchemaError("schedule entries must carry r and eps");
    out.push_back({detail::number_at(s.at("r"), "schedule r"),
                   detail::number_at(s.at("eps"), "schedule eps")});
  }
  return out;
}

// CSV of x,y samples; rows may be unordered.
inline Sampled1DFunction function_from_csv(const std::string& text) {
  auto rows = detail::csv_rows(text);
  if (rows.empty()) throw SchemaError("empty function CSV");
  double probe;
  if (!detail::parse_number(rows.front().front(), probe)) rows.erase(rows.begin());
  std::vector<std::pair<double, double>> samples;
  for (const auto& row : rows) {
    if (row.size() != 2) throw SchemaError("function CSV rows must be x,y pairs");
    double x, y;
    if (!detail::parse_number(row[0], x) || !detail::parse_number(row[1], y))
      throw SchemaError("bad function sample \"" + row[0] + "," + row[1] + "\"");
    samples.emplace_back(x, y);
  }
  std::sort(samples.begin(), samples.end());
  std::vector<double> xs, ys;
  for (const auto& [x, y] : samples) {
    xs.push_back(x);
    ys.push_back(y);
  }
  return make_sampled_function(std::move(xs), std::move(ys));
}

inline json identity_report_to_json(const IdentityReport& r) {
  json j = json::object();
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["abs_diff"] = r.abs_diff;
  j["rel_diff"] = r.rel_diff;
  j["resolution"] = r.resolution;
  j["tolerance_used"] = r.tolerance_used;
  return j;
}

// "c0,c1,..." -> polynomial coefficients
inline Polynomial coeffs_from_arg(const std::string& arg) {
  std::vector<double> coeffs;
  for (const std::string& tok : detail::split(arg, ',')) {
    double c;
    if (!detail::parse_number(tok, c))
      throw SchemaError("bad polynomial coefficient \"" + tok + "\"");
    coeffs.push_back(c);
  }
  return make_polynomial(std::move(coeffs));
}

// "a1:b1,a2:b2" -> interval list
inline std::vector<Interval> intervals_from_arg(const std::string& arg) {
  std::vector<Interval> out;
  for (const std::string& tok : detail::split(arg, ',')) {
    const auto colon = tok.find(':');
    if (colon == std::string::npos)
      throw SchemaError("bad interval \"" + tok + "\", expected a:b");
    double a, b;
    if (!detail::parse_number(tok.substr(0, colon), a) ||
        !detail::parse_number(tok.substr(colon + 1), b))
      throw SchemaError("bad interval \"" + tok + "\", expected a:b");
    out.emplace_back(a, b);
  }
  return out;
}

}  // namespace indicatrix::io
