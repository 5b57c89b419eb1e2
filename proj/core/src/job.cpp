#include "mor/job.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "mor/baselines.hpp"
#include "mor/matrix_market.hpp"
#include "mor/parallel.hpp"

#ifndef MOR_VERSION
#define MOR_VERSION "unknown"
#endif

namespace mor {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string_view to_string(Method m) {
  switch (m) {
    case Method::iha: return "iha";
    case Method::irka: return "irka";
    case Method::bt: return "bt";
    case Method::mbt: return "mbt";
  }
  return "iha";
}

std::optional<Method> parse_method(std::string_view s) {
  if (s == "iha") return Method::iha;
  if (s == "irka") return Method::irka;
  if (s == "bt") return Method::bt;
  if (s == "mbt") return Method::mbt;
  return std::nullopt;
}

InputPaths InputPaths::from_dir(const fs::path& dir) {
  InputPaths p;
  if (fs::exists(dir / "E.mtx")) p.E = dir / "E.mtx";
  p.A = dir / "A.mtx";
  p.b = dir / "b.mtx";
  p.c = dir / "c.mtx";
  if (fs::exists(dir / "d.mtx")) p.d = dir / "d.mtx";
  return p;
}

LtiSystem ingest(const InputPaths& paths) {
  const MatrixMarket A = read_matrix_market(paths.A);
  if (A.rows != A.cols) fail(ErrorKind::DimensionMismatch, "A must be square");
  const int n = A.rows;
  std::optional<MatrixMarket> E;
  if (paths.E) {
    E = read_matrix_market(*paths.E);
    if (E->rows != n || E->cols != n) fail(ErrorKind::DimensionMismatch, "E and A sizes differ");
  }
  const Vec b = read_matrix_market(paths.b).as_vector();
  const Vec c = read_matrix_market(paths.c).as_vector();
  if (b.size() != n) fail(ErrorKind::DimensionMismatch, "b has length " + std::to_string(b.size()) + ", expected " + std::to_string(n));
  if (c.size() != n) fail(ErrorKind::DimensionMismatch, "c has length " + std::to_string(c.size()) + ", expected " + std::to_string(n));
  double d = 0.0;
  if (paths.d) {
    const MatrixMarket dm = read_matrix_market(*paths.d);
    if (dm.rows != 1 || dm.cols != 1) fail(ErrorKind::DimensionMismatch, "d must be 1x1");
    d = dm.as_dense()(0, 0);
  }
  const bool sparse = A.coordinate || (E && E->coordinate);
  if (sparse) {
    SpMat Es(n, n);
    if (E) Es = E->as_sparse();
    else Es.setIdentity();
    return LtiSystem::sparse(std::move(Es), A.as_sparse(), b, c, d);
  }
  return LtiSystem::dense(E ? E->as_dense() : Mat(Mat::Identity(n, n)), A.as_dense(), b, c, d);
}

FrequencyGrid GridSpec::resolve(const LtiSystem& sys) const {
  if (!automatic) return FrequencyGrid::logspace(lo, hi, count);
  const auto [mn, mx] = spectrum_magnitude_bounds(sys);
  return FrequencyGrid::logspace(1e-2 * mn, 1e2 * mx, count);
}

GridSpec parse_grid(std::string_view s) {
  GridSpec g;
  if (s == "auto") return g;
  std::string str(s);
  for (char& ch : str)
    if (ch == ':') ch = ' ';
  std::istringstream is(str);
  g.automatic = false;
  if (!(is >> g.lo >> g.hi >> g.count) || !(g.lo > 0.0) || !(g.hi > g.lo) || g.count < 2)
    fail(ErrorKind::InvalidInput, "grid must be 'auto' or 'lo:hi:count' with 0 < lo < hi and count >= 2");
  std::string rest;
  if (is >> rest) fail(ErrorKind::InvalidInput, "trailing characters in grid specification");
  return g;
}

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',' || ch == ' ' || ch == '+') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  fail(ErrorKind::InvalidInput, key + ": expected a boolean, got '" + v + "'");
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos == v.size()) return x;
  } catch (const std::exception&) {
  }
  fail(ErrorKind::InvalidInput, key + ": expected a number, got '" + v + "'");
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos == v.size()) return x;
  } catch (const std::exception&) {
  }
  fail(ErrorKind::InvalidInput, key + ": expected an integer, got '" + v + "'");
}

}  // namespace

void apply_setting(Job& job, const std::string& key_in, const std::string& value_in) {
  std::string key = trim(key_in);
  std::replace(key.begin(), key.end(), '-', '_');
  const std::string v = trim(value_in);
  if (key == "input_dir") job.input_dir = v;
  else if (key == "method" || key == "methods") {
    job.methods.clear();
    for (const auto& m : split_list(v)) {
      const auto pm = parse_method(m);
      if (!pm) fail(ErrorKind::InvalidInput, "unknown method '" + m + "'");
      job.methods.push_back(*pm);
    }
  } else if (key == "orders" || key == "order" || key == "r") {
    job.orders.clear();
    for (const auto& o : split_list(v)) job.orders.push_back(static_cast<int>(parse_int(key, o)));
  } else if (key == "out" || key == "output_dir") job.out = v;
  else if (key == "mode") {
    if (v == "surrogate") job.mode = Step2Mode::surrogate;
    else if (v == "exact") job.mode = Step2Mode::exact;
    else if (v == "both") job.mode = Step2Mode::both;
    else fail(ErrorKind::InvalidInput, "mode must be surrogate, exact or both");
  } else if (key == "seed") job.seed = static_cast<std::uint64_t>(parse_int(key, v));
  else if (key == "grid") job.grid = parse_grid(v);
  else if (key == "tol") job.tol = parse_double(key, v);
  else if (key == "max_iters") job.max_iters = static_cast<int>(parse_int(key, v));
  else if (key == "surrogate_tol") job.surrogate_tol = parse_double(key, v);
  else if (key == "stability_margin") job.stability_margin = parse_double(key, v);
  else if (key == "sampled_norms") job.sampled_norms = parse_bool(key, v);
  else if (key == "dump_curves") job.dump_curves = parse_bool(key, v);
  else if (key == "diagnostics") job.diagnostics = parse_bool(key, v);
  else if (key == "E" || key == "A" || key == "b" || key == "c" || key == "d") {
    if (!job.inputs) job.inputs = InputPaths::from_dir(job.input_dir.empty() ? fs::path(".") : job.input_dir);
    if (key == "E") job.inputs->E = v;
    if (key == "A") job.inputs->A = v;
    if (key == "b") job.inputs->b = v;
    if (key == "c") job.inputs->c = v;
    if (key == "d") job.inputs->d = v;
  } else fail(ErrorKind::InvalidInput, "unknown setting '" + key_in + "'");
}

Job load_job_file(const fs::path& path, Job base) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::InvalidInput, "cannot open config " + path.string());
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorKind::ParseError, path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    apply_setting(base, line.substr(0, eq), line.substr(eq + 1));
  }
  return base;
}

void validate_job(const Job& job, int n) {
  if (job.methods.empty()) fail(ErrorKind::InvalidInput, "no methods requested");
  if (job.orders.empty()) fail(ErrorKind::InvalidInput, "no reduction orders requested");
  for (int r : job.orders)
    if (r < 1 || r > n) fail(ErrorKind::InvalidInput, "order " + std::to_string(r) + " outside [1, " + std::to_string(n) + "]");
  if (job.stability_margin < 0.0) fail(ErrorKind::InvalidInput, "stability margin must be nonnegative");
}

std::string format5(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.5g", v == 0.0 ? 0.0 : v);
  return buf;
}

namespace {

ordered_json num5(double v) {
  if (!std::isfinite(v)) return nullptr;
  return std::stod(format5(v));
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string join(const std::vector<std::string>& v, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
  return out;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

fs::path row_dir(const Job& job, Method m, int r) { return job.out / (std::string(to_string(m)) + "_r" + std::to_string(r)); }

void write_curves(const fs::path& dir, const LtiSystem& sys, const LtiSystem& red, const FrequencyGrid& grid) {
  const auto& w = grid.points();
  struct Pt {
    cplx h, hr;
  };
  const auto vals = parallel_map(w.size(), [&](std::size_t i) {
    const cplx s(0.0, w[i]);
    return Pt{eval(sys, s), eval(red, s)};
  });
  std::string fr = "omega,abs_H,arg_H,abs_Hr,arg_Hr\n", ec = "omega,re_err,im_err,abs_err\n";
  for (std::size_t i = 0; i < w.size(); ++i) {
    const auto& p = vals[i];
    const cplx e = p.h - p.hr;
    fr += fmt17(w[i]) + "," + fmt17(std::abs(p.h)) + "," + fmt17(std::arg(p.h)) + "," + fmt17(std::abs(p.hr)) + "," +
          fmt17(std::arg(p.hr)) + "\n";
    ec += fmt17(w[i]) + "," + fmt17(e.real()) + "," + fmt17(e.imag()) + "," + fmt17(std::abs(e)) + "\n";
  }
  write_text_atomic(dir / "freq_response.csv", fr);
  write_text_atomic(dir / "error_curve.csv", ec);
}

std::string trace_csv(const std::vector<std::pair<std::string, const DrOptimization*>>& steps) {
  std::string out = "step,dr,value,stable\n";
  for (const auto& [name, opt] : steps)
    for (const auto& p : opt->trace) out += name + "," + fmt17(p.dr) + "," + fmt17(p.value) + "," + (p.stable ? "1" : "0") + "\n";
  return out;
}

struct RowContext {
  const Job& job;
  const LtiSystem& sys;
  const FrequencyGrid& curve_grid;
  const std::optional<HankelSpectrum>& hsv;
  double full_norm;
  bool sampled;
};

void finish_row(const RowContext& ctx, ReportRow& row, const LtiSystem& red) {
  ErrorBoundOptions opt;
  opt.hsv = ctx.hsv;
  opt.full_norm = ctx.full_norm;
  opt.force_sampled = ctx.sampled;
  if (!ctx.job.grid.automatic) opt.grid = ctx.job.grid.resolve(ctx.sys);
  const ErrorAndBound eb = relative_error_and_bound(ctx.sys, red, row.r, opt);
  row.abs_error = eb.abs_error;
  row.rel_error = eb.rel_error;
  row.lower_bound = eb.lower_bound;
  row.bound_available = ctx.hsv.has_value();
  row.norm_method = eb.method;
  if (row.bound_available && eb.method == NormMethod::level_set && !eb.bound_respected)
    row.warnings.push_back("relative error below the Hankel lower bound");
  const fs::path dir = row_dir(ctx.job, row.method, row.r);
  write_system(dir / "model", red);
  if (ctx.job.dump_curves) write_curves(dir, ctx.sys, red, ctx.curve_grid);
}

void run_row(const RowContext& ctx, ReportRow& row) {
  const Job& job = ctx.job;
  const fs::path dir = row_dir(job, row.method, row.r);
  IrkaConfig irka;
  irka.r = row.r;
  irka.tol = job.tol;
  irka.max_iters = job.max_iters;
  irka.seed = job.seed;
  switch (row.method) {
    case Method::irka: {
      const IrkaResult res = run_irka(ctx.sys, irka);
      row.irka_converged = res.converged;
      row.irka_iterations = res.iterations;
      if (!res.converged) row.warnings.push_back("IrkaFailed: IRKA stopped without converging");
      finish_row(ctx, row, res.model.to_system());
      break;
    }
    case Method::iha: {
      IhaConfig cfg;
      cfg.irka = irka;
      cfg.step2_mode = job.mode;
      cfg.stability_margin = job.stability_margin;
      cfg.surrogate_k = SurrogateOrder::automatic(job.surrogate_tol);
      if (ctx.sampled) cfg.sampled_grid = job.grid.automatic ? default_sampled_grid() : job.grid.resolve(ctx.sys);
      const IhaResult res = run_iha(ctx.sys, cfg);
      row.dr_star = res.dr_star;
      row.irka_converged = res.irka.converged;
      row.irka_iterations = res.irka.iterations;
      row.surrogate_k = res.degenerate ? 0 : res.surrogate.order;
      row.samples = res.sample_count;
      row.objective = res.objective_value;
      row.objective_at_zero = res.objective_at_zero;
      row.rejected_dr = res.rejected_dr;
      row.warnings.insert(row.warnings.end(), res.warnings.begin(), res.warnings.end());
      const LtiSystem red = res.model.to_system();
      finish_row(ctx, row, red);

      std::vector<std::pair<std::string, const DrOptimization*>> steps;
      if (job.mode != Step2Mode::exact && !res.degenerate) steps.emplace_back("surrogate", &res.surrogate_step);
      if (res.exact_step) steps.emplace_back("exact", &*res.exact_step);
      write_text_atomic(dir / "dr_trace.csv", trace_csv(steps));
      std::string sv = "index,sigma\n";
      for (Eigen::Index i = 0; i < res.surrogate.singular_values.size(); ++i)
        sv += std::to_string(i + 1) + "," + fmt17(res.surrogate.singular_values(i)) + "\n";
      write_text_atomic(dir / "loewner_sv.csv", sv);

      ordered_json diag;
      diag["dr_star"] = num5(res.dr_star);
      diag["objective"] = num5(res.objective_value);
      diag["objective_at_zero"] = num5(res.objective_at_zero);
      diag["surrogate_order"] = row.surrogate_k;
      diag["sample_count"] = res.sample_count;
      diag["rejected_dr"] = res.rejected_dr;
      diag["degenerate"] = res.degenerate;
      if (res.exact_step) {
        diag["exact_dr_star"] = num5(res.exact_step->dr_star);
        diag["exact_value"] = num5(res.exact_step->value);
      }
      if (job.diagnostics && ctx.sys.order() + row.r <= kDefaultDenseCap && !ctx.sampled) {
        const TrefethenDiagnostics t = trefethen_diagnostics(ctx.sys, res.model, ctx.curve_grid);
        row.circularity = t.circularity;
        if (t.contour_converged) row.rhp_count = t.rhp_interp_count;
        diag["circularity"] = num5(t.circularity);
        diag["circularity_degenerate"] = t.degenerate;
        diag["rhp_interp_count"] = t.contour_converged ? ordered_json(t.rhp_interp_count) : ordered_json(nullptr);
        diag["sampled_min"] = num5(t.sampled_min);
        diag["certified_max"] = num5(t.certified_max);
      }
      diag["warnings"] = res.warnings;
      write_text_atomic(dir / "diagnostics.json", diag.dump(2) + "\n");
      break;
    }
    case Method::bt: {
      const BtResult bt = balanced_truncation(ctx.sys, row.r);
      if (bt.model.order() < row.r) row.warnings.push_back("order clamped to " + std::to_string(bt.model.order()));
      finish_row(ctx, row, bt.model.to_system());
      break;
    }
    case Method::mbt: {
      const MbtResult mbt = modified_bt(ctx.sys, row.r);
      row.dr_star = mbt.dr_star;
      row.objective = mbt.hinf_error;
      row.objective_at_zero = mbt.hinf_error_at_zero;
      finish_row(ctx, row, mbt.bt.model.to_system());
      std::string tr = "step,dr,value,stable\n";
      for (const auto& p : mbt.search.trace) tr += "mbt," + fmt17(p.x) + "," + fmt17(p.value) + "," + (p.feasible ? "1" : "0") + "\n";
      write_text_atomic(dir / "dr_trace.csv", tr);
      break;
    }
  }
  row.ok = true;
}

ordered_json manifest(const Job& job, const LtiSystem& sys) {
  ordered_json m;
  m["version"] = MOR_VERSION;
  m["n"] = sys.order();
  m["storage"] = sys.storage() == Storage::sparse ? "sparse" : "dense";
  m["seed"] = job.seed;
  std::vector<std::string> methods;
  for (Method x : job.methods) methods.emplace_back(to_string(x));
  m["methods"] = methods;
  m["orders"] = job.orders;
  m["mode"] = std::string(to_string(job.mode));
  m["sampled_norms"] = job.sampled_norms;
  m["grid"] = job.grid.automatic ? "auto" : format5(job.grid.lo) + ":" + format5(job.grid.hi) + ":" + std::to_string(job.grid.count);
  m["tol"] = job.tol;
  m["max_iters"] = job.max_iters;
  m["surrogate_tol"] = job.surrogate_tol;
  m["stability_margin"] = job.stability_margin;
  m["threads_env"] = "MOR_IHA_THREADS";
  return m;
}

}  // namespace

std::string report_csv(const Report& rep) {
  std::string out =
      "method,r,status,dr_star,abs_error,rel_error,lower_bound,norm_method,surrogate_k,samples,irka_converged,"
      "irka_iterations,objective,objective_at_zero,circularity,rhp_count,rejected_dr,message\n";
  for (const auto& row : rep.rows) {
    std::vector<std::string> f;
    f.emplace_back(to_string(row.method));
    f.push_back(std::to_string(row.r));
    f.push_back(row.ok ? "ok" : "error");
    if (row.ok) {
      f.push_back(format5(row.dr_star));
      f.push_back(format5(row.abs_error));
      f.push_back(format5(row.rel_error));
      f.push_back(row.bound_available ? format5(row.lower_bound) : "");
      f.emplace_back(to_string(row.norm_method));
    } else {
      f.insert(f.end(), 5, "");
    }
    f.push_back(row.surrogate_k >= 0 ? std::to_string(row.surrogate_k) : "");
    f.push_back(row.samples >= 0 ? std::to_string(row.samples) : "");
    f.push_back(row.irka_converged ? (*row.irka_converged ? "1" : "0") : "");
    f.push_back(row.irka_iterations >= 0 ? std::to_string(row.irka_iterations) : "");
    const bool has_obj = row.ok && (row.method == Method::iha || row.method == Method::mbt);
    f.push_back(has_obj ? format5(row.objective) : "");
    f.push_back(has_obj ? format5(row.objective_at_zero) : "");
    f.push_back(row.circularity ? format5(*row.circularity) : "");
    f.push_back(row.rhp_count ? std::to_string(*row.rhp_count) : "");
    f.push_back(std::to_string(row.rejected_dr));
    std::vector<std::string> msg;
    if (!row.ok) msg.push_back(row.message);
    msg.insert(msg.end(), row.warnings.begin(), row.warnings.end());
    f.push_back(csv_escape(join(msg, "; ")));
    out += join(f, ",") + "\n";
  }
  return out;
}

std::string report_json(const Report& rep) {
  ordered_json j;
  j["n"] = rep.n;
  j["storage"] = rep.storage == Storage::sparse ? "sparse" : "dense";
  j["full_norm"] = num5(rep.full_norm);
  j["full_norm_method"] = std::string(to_string(rep.full_norm_method));
  j["exit_code"] = rep.exit_code;
  ordered_json rows = ordered_json::array();
  for (const auto& row : rep.rows) {
    ordered_json o;
    o["method"] = std::string(to_string(row.method));
    o["r"] = row.r;
    o["status"] = row.ok ? "ok" : "error";
    if (!row.ok) {
      o["error_kind"] = row.error_kind;
      o["message"] = row.message;
    } else {
      o["dr_star"] = num5(row.dr_star);
      o["abs_error"] = num5(row.abs_error);
      o["rel_error"] = num5(row.rel_error);
      o["lower_bound"] = row.bound_available ? num5(row.lower_bound) : ordered_json(nullptr);
      o["norm_method"] = std::string(to_string(row.norm_method));
    }
    if (row.surrogate_k >= 0) o["surrogate_k"] = row.surrogate_k;
    if (row.samples >= 0) o["samples"] = row.samples;
    if (row.irka_converged) o["irka_converged"] = *row.irka_converged;
    if (row.irka_iterations >= 0) o["irka_iterations"] = row.irka_iterations;
    if (row.ok && (row.method == Method::iha || row.method == Method::mbt)) {
      o["objective"] = num5(row.objective);
      o["objective_at_zero"] = num5(row.objective_at_zero);
    }
    if (row.circularity) o["circularity"] = num5(*row.circularity);
    if (row.rhp_count) o["rhp_count"] = *row.rhp_count;
    o["rejected_dr"] = row.rejected_dr;
    o["warnings"] = row.warnings;
    rows.push_back(o);
  }
  j["rows"] = rows;
  return j.dump(2) + "\n";
}

Report run_job(const Job& job, const LtiSystem& sys) {
  validate_job(job, sys.order());
  Report rep;
  rep.n = sys.order();
  rep.storage = sys.storage();
  fs::create_directories(job.out);
  write_text_atomic(job.out / "manifest.json", manifest(job, sys).dump(2) + "\n");

  const bool dense_ok = sys.order() <= kDefaultDenseCap;
  const bool sampled = job.sampled_norms || !dense_ok;
  std::optional<std::string> global_error;
  std::string global_kind;
  std::optional<HankelSpectrum> hsv;
  double full_norm = 0.0;
  std::optional<FrequencyGrid> curve_grid;
  try {
    // Dense eigenvalues are only affordable at desk scale.
    if (sys.order() <= 2000 && !is_stable(sys)) fail(ErrorKind::UnstableSystem, "input system is not asymptotically stable");
    if (!sampled) {
      full_norm = hinf_norm(sys).value;
      hsv = hankel_singular_values(sys);
      rep.full_norm_method = NormMethod::level_set;
    } else {
      full_norm = hinf_norm_sampled(sys, job.grid.automatic ? default_sampled_grid() : job.grid.resolve(sys)).value;
      rep.full_norm_method = NormMethod::sampled;
    }
    curve_grid = job.grid.resolve(sys);
  } catch (const Error& e) {
    global_error = e.what();
    global_kind = std::string(to_string(e.kind()));
  }
  rep.full_norm = full_norm;

  std::string timings = "method,r,seconds\n";
  for (Method m : job.methods) {
    for (int r : job.orders) {
      ReportRow row;
      row.method = m;
      row.r = r;
      const auto t0 = std::chrono::steady_clock::now();
      if (global_error) {
        row.error_kind = global_kind;
        row.message = *global_error;
      } else {
        try {
          run_row(RowContext{job, sys, *curve_grid, hsv, full_norm, sampled}, row);
        } catch (const Error& e) {
          row.ok = false;
          row.error_kind = std::string(to_string(e.kind()));
          row.message = e.what();
        } catch (const std::exception& e) {
          row.ok = false;
          row.error_kind = "Internal";
          row.message = e.what();
        }
      }
      row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      timings += std::string(to_string(m)) + "," + std::to_string(r) + "," + fmt17(row.wall_seconds) + "\n";
      rep.rows.push_back(std::move(row));
    }
  }
  rep.exit_code = std::all_of(rep.rows.begin(), rep.rows.end(), [](const ReportRow& r) { return r.ok; }) ? 0 : 2;
  write_text_atomic(job.out / "report.csv", report_csv(rep));
  write_text_atomic(job.out / "report.json", report_json(rep));
  write_text_atomic(job.out / "timings.csv", timings);
  return rep;
}

}  // namespace mor
