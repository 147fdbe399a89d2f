#include "merge_metrics/io.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "merge_metrics/errors.hpp"

namespace merge_metrics::io {

namespace {

Error invalid(const std::string& what) { return Error("InvalidInput", what); }

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw invalid(std::string("missing field '") + key + "'");
  return j.at(key);
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw invalid(where + " must be a number");
  return j.get<double>();
}

std::vector<double> numbers(const json& j, const std::string& where) {
  if (!j.is_array()) throw invalid(where + " must be an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(number(j[k], where + "[" + std::to_string(k) + "]"));
  return out;
}

std::vector<std::vector<double>> rows_of(const json& j, const std::string& where) {
  if (!j.is_array()) throw invalid(where + " must be an array of arrays");
  std::vector<std::vector<double>> out;
  out.reserve(j.size());
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(numbers(j[k], where + "[" + std::to_string(k) + "]"));
  return out;
}

MetricKind kind_from_json(const json& j) {
  if (!j.is_string()) throw invalid("'metric' must be a string");
  try {
    return metric_kind_from_string(j.get<std::string>());
  } catch (const Error&) {
    throw invalid("unknown metric '" + j.get<std::string>() + "'");
  }
}

json number_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string format_number(double v) { return number_json(v).dump(); }

SpacePtr space_from_json(const json& j) {
  if (!j.is_object()) throw invalid("space must be a JSON object");
  const MetricKind kind = kind_from_json(field(j, "metric"));
  std::optional<Coordinates> points;
  if (j.contains("points") && !j.at("points").is_null()) points = rows_of(j.at("points"), "points");
  if (kind == MetricKind::Matrix) {
    return make_space(MetricSpace::from_matrix(rows_of(field(j, "matrix"), "matrix"), std::move(points)));
  }
  if (kind == MetricKind::Discrete && !points) {
    if (j.contains("matrix")) return make_space(MetricSpace::discrete(field(j, "matrix").size()));
    const json& size = field(j, "size");
    if (!size.is_number_unsigned()) throw invalid("'size' must be a nonnegative integer");
    return make_space(MetricSpace::discrete(size.get<std::size_t>()));
  }
  if (!points) throw invalid("a " + to_string(kind) + " space needs 'points'");
  return make_space(MetricSpace::from_coordinates(std::move(*points), kind));
}

json space_to_json(const MetricSpace& space) {
  json j;
  j["metric"] = to_string(space.kind());
  if (space.has_coordinates()) {
    j["points"] = space.coordinates();
  } else {
    j["points"] = nullptr;
  }
  if (space.kind() == MetricKind::Matrix) {
    j["matrix"] = space.distance_matrix();
  } else if (space.kind() == MetricKind::Discrete && !space.has_coordinates()) {
    j["size"] = space.size();
  }
  return j;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("IoError", "cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw invalid("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

DiscreteMeasure measure_from_json(const json& j, const std::filesystem::path& base_dir) {
  const json& sj = field(j, "space");
  SpacePtr space;
  if (sj.is_string()) {
    std::filesystem::path p = sj.get<std::string>();
    if (p.is_relative()) p = base_dir / p;
    space = space_from_json(read_json_file(p));
  } else {
    space = space_from_json(sj);
  }
  std::vector<double> weights = numbers(field(j, "weights"), "weights");
  if (weights.size() != space->size()) {
    throw invalid("'weights' has " + std::to_string(weights.size()) + " entries for a space of " +
                  std::to_string(space->size()) + " points");
  }
  return discrete_measure(std::move(space), std::move(weights));
}

json measure_to_json(const DiscreteMeasure& p) {
  return json{{"space", space_to_json(*p.space())}, {"weights", p.weights()}};
}

Coordinates read_sample_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("IoError", "cannot open '" + path.string() + "'");
  Coordinates rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream cells(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(cells, cell, ',')) {
      const char* begin = cell.c_str();
      char* end = nullptr;
      errno = 0;
      const double v = std::strtod(begin, &end);
      while (end && (*end == ' ' || *end == '\t')) ++end;
      if (end == begin || *end != '\0' || errno == ERANGE) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (rows.empty() && line_no == 1) continue;  // header
      throw invalid("'" + path.string() + "' line " + std::to_string(line_no) + " is not numeric");
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw invalid("'" + path.string() + "' line " + std::to_string(line_no) + " has " + std::to_string(row.size()) +
                    " columns, expected " + std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error("EmptySample", "'" + path.string() + "' holds no sample points");
  return rows;
}

DiscreteMeasure load_measure(const std::filesystem::path& path, MetricKind sample_metric) {
  if (path.extension() == ".csv") return empirical(read_sample_csv(path), sample_metric);
  return measure_from_json(read_json_file(path), path.parent_path());
}

Modulus modulus_from_json(const json& j) {
  const auto knots_rows = rows_of(field(j, "knots"), "knots");
  std::vector<std::pair<double, double>> knots;
  for (std::size_t k = 0; k < knots_rows.size(); ++k) {
    if (knots_rows[k].size() != 2) throw invalid("knots[" + std::to_string(k) + "] must be [h, w]");
    knots.emplace_back(knots_rows[k][0], knots_rows[k][1]);
  }
  Modulus::Tail tail = Modulus::Tail::Constant;
  if (j.contains("tail")) {
    const json& t = j.at("tail");
    if (t == "const") {
      tail = Modulus::Tail::Constant;
    } else if (t == "linear") {
      tail = Modulus::Tail::Linear;
    } else {
      throw invalid("'tail' must be \"const\" or \"linear\"");
    }
  }
  return Modulus(std::move(knots), tail);
}

json modulus_to_json(const Modulus& m) {
  json knots = json::array();
  for (const auto& [h, w] : m.knots()) knots.push_back({h, w});
  return json{{"knots", knots}, {"tail", m.tail() == Modulus::Tail::Constant ? "const" : "linear"}};
}

FunctionOnSpace function_from_json(const json& j, const SpacePtr& space) {
  const json& kind = field(j, "kind");
  if (kind == "tabulated") {
    std::vector<double> values = numbers(field(j, "values"), "values");
    if (values.size() != space->size()) {
      throw invalid("'values' has " + std::to_string(values.size()) + " entries for a space of " +
                    std::to_string(space->size()) + " points");
    }
    return FunctionOnSpace::tabulated(space, std::move(values));
  }
  if (kind == "analytic") {
    const json& name = field(j, "name");
    if (!name.is_string()) throw invalid("'name' must be a string");
    std::optional<Modulus> modulus;
    if (j.contains("modulus") && !j.at("modulus").is_null()) modulus = modulus_from_json(j.at("modulus"));
    return named_function(name.get<std::string>(), std::move(modulus)).tabulate(space);
  }
  throw invalid("'kind' must be \"tabulated\" or \"analytic\"");
}

json to_json(const ProkhorovResult& r) {
  return json{{"pi", number_json(r.pi)},
              {"breakpoint", number_json(r.breakpoint)},
              {"transported_mass", number_json(r.transported_mass)}};
}

json to_json(const DualResult& r) {
  json j{{"value", number_json(r.value)}, {"witness", {{"values", r.witness.values()}}}};
  if (r.lipschitz_budget) j["lipschitz_budget"] = number_json(*r.lipschitz_budget);
  if (r.sup_budget) j["sup_budget"] = number_json(*r.sup_budget);
  return j;
}

json to_json(const OptimalCoupling& c) {
  json joint = json::array();
  for (const auto& e : c.coupling.entries()) {
    if (e.mass > 0.0) joint.push_back({e.source, e.target, e.mass});
  }
  return json{{"alpha", number_json(c.alpha)}, {"joint", joint}};
}

json to_json(const MergingReport& report) {
  json params = json::object();
  for (const auto& [k, v] : report.params) params[k] = v;
  json records = json::array();
  for (const auto& rec : report.records) {
    json metrics = json::object();
    for (const auto& [k, v] : rec.metrics) metrics[k] = number_json(v);
    json integrals = json::array();
    for (const auto& t : rec.integrals) {
      integrals.push_back(
          {{"label", t.label}, {"value", number_json(t.value)}, {"uniformly_continuous", t.uniformly_continuous}});
    }
    records.push_back({{"n", rec.n}, {"metrics", metrics}, {"integrals", integrals}});
  }
  json verdicts = json::array();
  for (const auto& v : report.verdicts) {
    verdicts.push_back({{"metric", v.metric}, {"threshold", v.threshold}, {"merging", v.merging}});
  }
  json headline = json::array();
  for (std::size_t k = 0; k < report.thresholds.size(); ++k) {
    headline.push_back({{"threshold", report.thresholds[k]}, {"merging", static_cast<bool>(report.merging[k])}});
  }
  json flags = json::array();
  for (const auto& f : report.flags) {
    flags.push_back({{"label", f.label}, {"threshold", f.threshold}, {"flag", "non-UC witness"}});
  }
  return json{{"scenario", report.scenario},
              {"params", params},
              {"metrics", report.metrics},
              {"window", report.window},
              {"thresholds", report.thresholds},
              {"rule", report.rule()},
              {"verdict_metric", report.verdict_metric},
              {"verdict", headline},
              {"coherent", report.coherent},
              {"verdicts", verdicts},
              {"flags", flags},
              {"records", records}};
}

std::string to_csv(const MergingReport& report) {
  std::ostringstream out;
  out << "n";
  for (const auto& m : report.metrics) out << "," << m;
  if (!report.records.empty()) {
    for (const auto& t : report.records.front().integrals) out << ",integral:" << t.label;
  }
  for (double t : report.thresholds) out << ",verdict@" << format_number(t);
  out << "\n";
  for (const auto& rec : report.records) {
    out << rec.n;
    for (const auto& [k, v] : rec.metrics) out << "," << format_number(v);
    for (const auto& t : rec.integrals) out << "," << format_number(t.value);
    for (std::size_t k = 0; k < report.thresholds.size(); ++k) {
      out << "," << (report.merging[k] ? "merging" : "not merging");
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace merge_metrics::io
