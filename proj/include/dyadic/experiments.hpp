#pragma once

/// \file experiments.hpp
/// Configured experiments with machine-readable pass/fail reports.
///
/// Config documents are JSON objects:
///
///   {
///     "experiment": "am-constant",
///     "grid": {"dim": 1, "top_level": 3, "finest_level": -7, "shift": [0.0]},
///     "exponents": {"p": 2, "q": 3},
///     "seed": 1,
///     "trials": 200,
///     "resolution": 16,
///     "maximal": "hardy-littlewood",
///     "threads": 1,
///     "output": {"path": "report.json", "format": "json"}
///   }
///
/// Only "experiment" is required. Unknown keys and ill-typed values are
/// rejected. Omitted fields take the per-case defaults listed in README.md.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dyadic/grid.hpp"
#include "dyadic/maximal.hpp"

namespace dyadic {

/// Unknown experiment, malformed config, or invalid parameters.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ReportFormat { Json, Csv };

struct GridParams {
  int dim = 1;
  int top_level = 3;
  int finest_level = -10;
  std::vector<double> shift;

  DyadicGrid make() const;
};

struct ExperimentConfig {
  std::string experiment;
  std::optional<GridParams> grid;
  double p = 2.0;
  double q = 3.0;
  std::uint64_t seed = 0;
  std::optional<int> trials;
  int resolution = 16;
  MaximalKind maximal = MaximalKind::HardyLittlewood;
  int threads = 1;
  std::string output_path;
  ReportFormat format = ReportFormat::Json;
};

/// Parses and validates a config document; throws UsageError.
ExperimentConfig parse_config(std::string_view json_text);
/// Checks ranges, the exponent pair and the output path; throws UsageError.
void validate_config(const ExperimentConfig& cfg);

enum class Comparison {
  AtMost,   // value <= reference
  AtLeast,  // value >= reference
  Near,     // |value - reference| <= tolerance
  Finite,   // value is finite
};

struct Check {
  std::string name;
  double value = 0.0;
  double reference = 0.0;
  double tolerance = 0.0;
  Comparison comparison = Comparison::AtMost;
  bool pass = false;
};

Check make_check(std::string name, double value, Comparison cmp, double reference = 0.0,
                 double tolerance = 0.0);

/// A named list of per-trial measurements.
struct Series {
  std::string name;
  std::vector<double> values;
};

inline constexpr int kReportSchemaVersion = 1;

struct Report {
  std::string experiment;
  std::uint64_t seed = 0;
  int trials = 0;
  std::string grid;
  std::string timestamp;
  std::string environment;
  std::vector<Check> checks;
  std::vector<Series> series;

  bool passed() const;
};

/// Cases accepted by repro_paper and run_experiment.
const std::vector<std::string>& experiment_ids();

Report run_experiment(const ExperimentConfig& cfg);
/// The named case with every parameter at its default.
Report repro_paper(std::string_view id, std::uint64_t seed = 0);

/// Report documents. Non-finite numbers are null in JSON and inf/-inf/nan in
/// CSV. The CSV columns are kind,name,index,value,reference,tolerance,
/// comparison,pass; metadata rows have kind "meta" and samples "sample".
std::string report_to_json(const Report& report, bool include_timestamp = true);
std::string report_to_csv(const Report& report, bool include_timestamp = true);
std::string format_report(const Report& report, ReportFormat format, bool include_timestamp = true);

}  // namespace dyadic
