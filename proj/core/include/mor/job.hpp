#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mor/iha.hpp"

namespace mor {

enum class Method { iha, irka, bt, mbt };

std::string_view to_string(Method m);
std::optional<Method> parse_method(std::string_view s);

/// Matrix Market quadruple. A missing E means identity, a missing d means 0.
struct InputPaths {
  std::optional<std::filesystem::path> E;
  std::filesystem::path A, b, c;
  std::optional<std::filesystem::path> d;

  /// E.mtx (optional), A.mtx, b.mtx, c.mtx, d.mtx (optional) inside `dir`.
  static InputPaths from_dir(const std::filesystem::path& dir);
};

/// Sparse storage if any matrix file is in coordinate format. ParseError,
/// DimensionMismatch or SingularE on bad input.
LtiSystem ingest(const InputPaths& paths);

struct GridSpec {
  bool automatic = true;  // spans 1e-2 * |lambda|_min .. 1e2 * |lambda|_max
  double lo = 1e-8, hi = 10.0;
  int count = 500;

  FrequencyGrid resolve(const LtiSystem& sys) const;
};

/// "lo:hi:count" or "auto".
GridSpec parse_grid(std::string_view s);

struct Job {
  std::filesystem::path input_dir;
  std::optional<InputPaths> inputs;  // overrides input_dir
  std::vector<Method> methods{Method::iha};
  std::vector<int> orders;
  std::filesystem::path out = "mor_out";
  Step2Mode mode = Step2Mode::surrogate;
  bool sampled_norms = false;
  bool dump_curves = true;
  bool diagnostics = true;
  std::uint64_t seed = 0;
  GridSpec grid;
  double tol = 1e-6;  // IRKA shift tolerance
  int max_iters = 100;
  double surrogate_tol = 1e-5;
  double stability_margin = 0.0;
};

/// Applies one key = value setting. InvalidInput on unknown keys or values.
void apply_setting(Job& job, const std::string& key, const std::string& value);

/// Flat "key = value" file; '#' starts a comment.
Job load_job_file(const std::filesystem::path& path, Job base = {});

/// InvalidInput unless methods and orders are nonempty and 1 <= r <= n.
void validate_job(const Job& job, int n);

struct ReportRow {
  Method method = Method::iha;
  int r = 0;
  bool ok = false;
  std::string error_kind;
  std::string message;
  double dr_star = 0.0;
  double abs_error = 0.0;
  double rel_error = 0.0;
  double lower_bound = 0.0;
  bool bound_available = false;
  NormMethod norm_method = NormMethod::level_set;
  int surrogate_k = -1;
  int samples = -1;
  std::optional<bool> irka_converged;
  int irka_iterations = -1;
  double objective = 0.0;
  double objective_at_zero = 0.0;
  std::optional<double> circularity;
  std::optional<int> rhp_count;
  int rejected_dr = 0;
  std::vector<std::string> warnings;
  double wall_seconds = 0.0;  // written to timings.csv only
};

struct Report {
  int n = 0;
  Storage storage = Storage::dense;
  double full_norm = 0.0;
  NormMethod full_norm_method = NormMethod::level_set;
  std::vector<ReportRow> rows;
  int exit_code = 0;  // 0 success, 2 partial failure
};

/// Runs every (method, r) pair and writes report.csv, report.json,
/// manifest.json, timings.csv and per-row artifacts into job.out. A failing
/// row is recorded and the remaining rows still run.
Report run_job(const Job& job, const LtiSystem& sys);

/// Values printed with 5 significant digits; no wall-clock data.
std::string report_csv(const Report& report);
std::string report_json(const Report& report);

/// 5 significant digits; "inf", "-inf" and "nan" for non-finite values.
std::string format5(double v);

}  // namespace mor
