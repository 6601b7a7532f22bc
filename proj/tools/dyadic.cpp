// dyadic: run experiments, reproduce the reference cases, and convert
// serialized shifts, sparse families and coefficient maps.
//
// Exit status: 0 when every check passes, 1 on a failed check or invalid
// imported object, 2 on usage errors.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "dyadic/experiments.hpp"
#include "dyadic/instances.hpp"
#include "dyadic/io.hpp"
#include "dyadic/shifts.hpp"
#include "dyadic/sparse.hpp"

using namespace dyadic;

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<int> resolution;
  std::optional<int> threads;
  std::string format;
  std::string out;
  std::string maximal;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--seed", o.seed, "Master seed");
  cmd->add_option("--trials", o.trials, "Trial count (0 runs nothing)");
  cmd->add_option("--resolution", o.resolution, "Quadrature samples per axis per finest cell");
  cmd->add_option("--threads", o.threads, "Worker threads");
  cmd->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--out", o.out, "Report path (default: standard output)");
  cmd->add_option("--maximal", o.maximal, "Maximal operator for testing quantities")
      ->check(CLI::IsMember({"hardy-littlewood", "dyadic"}));
}

void apply(const Overrides& o, ExperimentConfig& cfg) {
  if (o.seed) cfg.seed = *o.seed;
  if (o.trials) cfg.trials = *o.trials;
  if (o.resolution) cfg.resolution = *o.resolution;
  if (o.threads) cfg.threads = *o.threads;
  if (o.format == "csv") cfg.format = ReportFormat::Csv;
  if (o.format == "json") cfg.format = ReportFormat::Json;
  if (!o.out.empty()) cfg.output_path = o.out;
  if (o.maximal == "dyadic") cfg.maximal = MaximalKind::Dyadic;
  if (o.maximal == "hardy-littlewood") cfg.maximal = MaximalKind::HardyLittlewood;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
}

int execute(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const Report report = run_experiment(cfg);
  emit(format_report(report, cfg.format), cfg.output_path);
  std::ostream& log = cfg.output_path.empty() ? std::cerr : std::cout;
  for (const Check& c : report.checks)
    log << (c.pass ? "PASS " : "FAIL ") << report.experiment << ' ' << c.name << ' '
        << format_double(c.value) << '\n';
  log << (report.passed() ? "PASS " : "FAIL ") << report.experiment << '\n';
  return report.passed() ? 0 : 1;
}

DyadicGrid parse_grid(const std::vector<double>& g) {
  if (g.size() < 3) throw UsageError("--grid needs dim,top,finest[,shift...]");
  std::vector<double> shift(g.begin() + 3, g.end());
  try {
    return DyadicGrid(static_cast<int>(g[0]), static_cast<int>(g[1]), static_cast<int>(g[2]), shift);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

int do_export(const std::string& kind, const std::vector<double>& grid_spec, std::uint64_t seed, int m, int k,
              const std::string& out) {
  const DyadicGrid grid = parse_grid(grid_spec);
  Rng rng(derive_seed(seed, "export", 0));
  std::ostringstream os;
  try {
    if (kind == "hilbert-shift") {
      write_shift(os, hilbert_as_shift(grid).spec);
    } else if (kind == "random-shift") {
      write_shift(os, random_shift(grid, m, k, seed));
    } else if (kind == "stopping-family") {
      write_sparse_family(os, sparse_from_stopping(random_step(grid, rng), grid.top_cube()));
    } else if (kind == "coefficients") {
      write_coefficients(os, random_coefficients(grid, rng));
    } else {
      write_step_csv(os, random_step(grid, rng, {.nonnegative = false}));
    }
  } catch (const PreconditionError& e) {
    throw UsageError(e.what());
  }
  emit(os.str(), out);
  return 0;
}

int do_import(const std::string& path) {
  const std::string text = read_file(path);
  const std::string kind = detect_kind(text.substr(0, text.find('\n')));
  std::istringstream in(text);
  ValidationReport report;
  try {
    if (kind == "haar-shift") {
      const HaarShiftSpec spec = read_shift(in);
      report = shift_validate(spec);
      std::cout << "haar-shift type (" << spec.m << "," << spec.k << ") terms " << spec.terms.size() << '\n';
    } else if (kind == "sparse-family") {
      const SparseFamily family = read_sparse_family(in);
      report = sparse_validate(family);
      std::cout << "sparse-family generations " << family.generations.size() << " cubes "
                << family.cube_count() << '\n';
    } else if (kind == "coefficients") {
      const CoefficientMap alpha = read_coefficients(in);
      std::cout << "coefficients entries " << alpha.entries().size() << '\n';
    } else {
      throw UsageError(path + ": unrecognized document header");
    }
  } catch (const FormatError& e) {
    throw UsageError(path + ": " + e.what());
  }
  for (const auto& v : report.violations) std::cout << "violation: " << v << '\n';
  std::cout << (report ? "valid" : "invalid") << '\n';
  return report ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-weight testbed for dyadic operators"};
  app.require_subcommand(1);

  Overrides run_o, repro_o;
  std::string config_path;
  auto* run = app.add_subcommand("run", "Run an experiment from a JSON config");
  run->add_option("--config", config_path, "Config file")->required();
  add_overrides(run, run_o);

  std::string repro_case;
  auto* repro = app.add_subcommand("repro", "Run a reference case with its defaults");
  repro->add_option("case", repro_case, "Case id")->required()->check(CLI::IsMember(experiment_ids()));
  add_overrides(repro, repro_o);

  std::string export_kind, export_out;
  std::vector<double> export_grid{1, 0, -4};
  std::uint64_t export_seed = 0;
  int export_m = 0, export_k = 1;
  auto* exp = app.add_subcommand("export", "Write a serialized object");
  exp->add_option("kind", export_kind, "Object kind")
      ->required()
      ->check(CLI::IsMember({"hilbert-shift", "random-shift", "stopping-family", "coefficients", "step"}));
  exp->add_option("--grid", export_grid, "dim,top,finest[,shift...]")->delimiter(',');
  exp->add_option("--seed", export_seed, "Seed for random objects");
  exp->add_option("-m", export_m, "Input depth of a random shift");
  exp->add_option("-k", export_k, "Output depth of a random shift");
  exp->add_option("--out", export_out, "Output path (default: standard output)");

  std::string import_path;
  auto* imp = app.add_subcommand("import", "Read and validate a serialized object");
  imp->add_option("path", import_path, "Input file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*run) {
      ExperimentConfig cfg = parse_config(read_file(config_path));
      apply(run_o, cfg);
      return execute(cfg);
    }
    if (*repro) {
      ExperimentConfig cfg;
      cfg.experiment = repro_case;
      apply(repro_o, cfg);
      return execute(cfg);
    }
    if (*exp) return do_export(export_kind, export_grid, export_seed, export_m, export_k, export_out);
    if (*imp) return do_import(import_path);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
