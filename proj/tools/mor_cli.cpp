#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "mor/job.hpp"
#include "mor/matrix_market.hpp"
#include "mor/synthetic.hpp"

namespace {

constexpr int kExitPartial = 2;
constexpr int kExitInvalid = 3;

void print_summary(const mor::Report& rep) {
  std::printf("n = %d, ||H|| = %s (%s)\n", rep.n, mor::format5(rep.full_norm).c_str(),
              std::string(mor::to_string(rep.full_norm_method)).c_str());
  std::printf("%-5s %3s %-6s %12s %12s %12s\n", "meth", "r", "status", "dr*", "rel.err", "bound");
  for (const auto& row : rep.rows) {
    if (row.ok)
      std::printf("%-5s %3d %-6s %12s %12s %12s\n", std::string(mor::to_string(row.method)).c_str(), row.r, "ok",
                  mor::format5(row.dr_star).c_str(), mor::format5(row.rel_error).c_str(),
                  row.bound_available ? mor::format5(row.lower_bound).c_str() : "-");
    else
      std::printf("%-5s %3d %-6s %s\n", std::string(mor::to_string(row.method)).c_str(), row.r, "error", row.message.c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Model-order reduction: IHA (IRKA + optimized feed-through), IRKA, BT and MBT"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Reduce a system and write reports");
  std::string config, input_dir, methods, orders, mode, out, grid;
  std::string e_path, a_path, b_path, c_path, d_path;
  long long seed = -1;
  double tol = -1.0, surrogate_tol = -1.0, margin = -1.0;
  int max_iters = -1;
  bool sampled = false, no_curves = false, no_diag = false;
  run->add_option("--config", config, "key = value configuration file (flags override it)");
  run->add_option("--input-dir", input_dir, "Directory holding E.mtx, A.mtx, b.mtx, c.mtx[, d.mtx]");
  run->add_option("--E", e_path, "E matrix (identity when omitted)");
  run->add_option("--A", a_path, "A matrix");
  run->add_option("--b", b_path, "input vector");
  run->add_option("--c", c_path, "output vector");
  run->add_option("--d", d_path, "feed-through (1x1)");
  run->add_option("--method", methods, "Comma-separated list of iha, irka, bt, mbt");
  run->add_option("--orders", orders, "Comma-separated reduction orders");
  run->add_option("--mode", mode, "Step-2 mode: surrogate, exact or both");
  run->add_option("--out", out, "Output directory");
  run->add_option("--seed", seed, "Seed for randomized shift initialization");
  run->add_option("--grid", grid, "Frequency grid 'lo:hi:count' or 'auto'");
  run->add_option("--tol", tol, "IRKA shift tolerance");
  run->add_option("--max-iters", max_iters, "IRKA iteration cap");
  run->add_option("--surrogate-tol", surrogate_tol, "Relative singular value cutoff for the Loewner surrogate");
  run->add_option("--stability-margin", margin, "Required distance of reduced poles from the imaginary axis");
  run->add_flag("--sampled-norms", sampled, "Use sampled H-infinity norms throughout");
  run->add_flag("--no-curves", no_curves, "Skip frequency-response and error-curve dumps");
  run->add_flag("--no-diagnostics", no_diag, "Skip circularity and winding-number diagnostics");

  auto* synth = app.add_subcommand("synth", "Write a synthetic test system as Matrix Market files");
  std::string kind = "sss", synth_out;
  int n = 10;
  unsigned long long synth_seed = 0;
  synth->add_option("--kind", kind, "sss, generic or resonant-chain");
  synth->add_option("--n", n, "Order (>= 2)")->required();
  synth->add_option("--seed", synth_seed, "Seed");
  synth->add_option("--out", synth_out, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) {
      const auto k = mor::parse_synthetic_kind(kind);
      if (!k) throw mor::Error(mor::ErrorKind::InvalidInput, "unknown synthetic kind '" + kind + "'");
      mor::write_system(synth_out, mor::make_synthetic({*k, n, synth_seed}));
      std::printf("wrote %s system of order %d to %s\n", kind.c_str(), n, synth_out.c_str());
      return 0;
    }

    mor::Job job;
    if (!config.empty()) job = mor::load_job_file(config);
    auto set = [&](const char* key, const std::string& v) {
      if (!v.empty()) mor::apply_setting(job, key, v);
    };
    set("input_dir", input_dir);
    set("E", e_path);
    set("A", a_path);
    set("b", b_path);
    set("c", c_path);
    set("d", d_path);
    set("method", methods);
    set("orders", orders);
    set("mode", mode);
    set("out", out);
    set("grid", grid);
    if (seed >= 0) job.seed = static_cast<std::uint64_t>(seed);
    if (tol > 0.0) job.tol = tol;
    if (max_iters > 0) job.max_iters = max_iters;
    if (surrogate_tol > 0.0) job.surrogate_tol = surrogate_tol;
    if (margin >= 0.0) job.stability_margin = margin;
    if (sampled) job.sampled_norms = true;
    if (no_curves) job.dump_curves = false;
    if (no_diag) job.diagnostics = false;

    const mor::InputPaths paths = job.inputs ? *job.inputs : mor::InputPaths::from_dir(job.input_dir);
    const mor::LtiSystem sys = mor::ingest(paths);
    mor::validate_job(job, sys.order());
    const mor::Report rep = mor::run_job(job, sys);
    print_summary(rep);
    std::printf("reports written to %s\n", job.out.string().c_str());
    return rep.exit_code == 0 ? 0 : kExitPartial;
  } catch (const mor::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
}
