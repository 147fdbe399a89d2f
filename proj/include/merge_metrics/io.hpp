#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "merge_metrics/coupling.hpp"
#include "merge_metrics/dual_metrics.hpp"
#include "merge_metrics/function.hpp"
#include "merge_metrics/measures.hpp"
#include "merge_metrics/merging_lab.hpp"
#include "merge_metrics/metric_space.hpp"
#include "merge_metrics/prokhorov.hpp"

namespace merge_metrics::io {

using nlohmann::json;

/// Parse failures raise Error("InvalidInput", ...); file access failures
/// raise Error("IoError", ...).

/// {"points": [[...], ...] | null, "metric": "euclidean"|"l1"|"discrete"|"matrix",
///  "matrix": [[...]]}. "discrete" accepts points, a matrix, or {"size": n}.
SpacePtr space_from_json(const json& j);
json space_to_json(const MetricSpace& space);

/// {"space": <space object> | "<path to space file>", "weights": [...]}.
/// Relative space paths resolve against `base_dir`.
DiscreteMeasure measure_from_json(const json& j, const std::filesystem::path& base_dir = {});
json measure_to_json(const DiscreteMeasure& p);

/// One point per row, comma separated; blank lines and a non-numeric first
/// row (header) are skipped.
Coordinates read_sample_csv(const std::filesystem::path& path);

/// Measure from a file: *.csv is an empirical sample under `sample_metric`,
/// anything else a measure JSON document.
DiscreteMeasure load_measure(const std::filesystem::path& path, MetricKind sample_metric = MetricKind::Euclidean);

/// {"knots": [[h, w], ...], "tail": "const"|"linear"}.
Modulus modulus_from_json(const json& j);
json modulus_to_json(const Modulus& m);

/// {"kind": "tabulated", "values": [...]} (tabulated on `space`) or
/// {"kind": "analytic", "name": ..., "modulus": <modulus>|null}.
FunctionOnSpace function_from_json(const json& j, const SpacePtr& space);

json read_json_file(const std::filesystem::path& path);

json to_json(const ProkhorovResult& r);
json to_json(const DualResult& r);
json to_json(const OptimalCoupling& c);
json to_json(const MergingReport& report);
/// Columns: n, one per metric, one per test integral, then one verdict
/// column per threshold ("verdict@<t>", repeated on every row).
std::string to_csv(const MergingReport& report);

/// Shortest round-trip decimal form, as used by the JSON writer.
std::string format_number(double v);

}  // namespace merge_metrics::io
