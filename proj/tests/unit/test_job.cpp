#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "json.hpp"
#include "mor/error.hpp"
#include "mor/job.hpp"
#include "mor/matrix_market.hpp"

namespace mor {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mor_job_" + name);
  fs::remove_all(p);
  return p;
}

Job make_job(std::vector<Method> methods, std::vector<int> orders, const fs::path& out) {
  Job job;
  job.methods = std::move(methods);
  job.orders = std::move(orders);
  job.out = out;
  return job;
}

// Job used for the golden report: every method on a small dense system.
Job golden_job(const fs::path& out) { return make_job({Method::iha, Method::irka, Method::bt, Method::mbt}, {2, 3}, out); }
LtiSystem golden_system() { return make_synthetic({SyntheticKind::generic, 12, 5}); }

TEST(Job, ExactRecoveryRow) {
  const fs::path out = scratch("exact");
  const Report rep = run_job(make_job({Method::iha}, {2}, out), test::random_stable(2, 77));
  ASSERT_EQ(rep.rows.size(), 1u);
  EXPECT_TRUE(rep.rows[0].ok) << rep.rows[0].message;
  EXPECT_LE(rep.rows[0].rel_error, 1e-8);
  EXPECT_EQ(rep.exit_code, 0);
}

TEST(Job, UnstableInputRecorded) {
  const fs::path out = scratch("unstable");
  const Report rep = run_job(make_job({Method::iha, Method::bt}, {1}, out), test::first_order(-1.0).with_d(0.0));
  ASSERT_EQ(rep.rows.size(), 2u);
  for (const auto& row : rep.rows) {
    EXPECT_FALSE(row.ok);
    EXPECT_EQ(row.error_kind, "UnstableSystem");
  }
  EXPECT_NE(rep.exit_code, 0);
  const auto j = nlohmann::json::parse(slurp(out / "report.json"));
  EXPECT_EQ(j["rows"][0]["error_kind"], "UnstableSystem");
}

TEST(Job, ArtifactsWritten) {
  const fs::path out = scratch("artifacts");
  const Report rep = run_job(make_job({Method::iha, Method::mbt}, {2}, out), make_synthetic({SyntheticKind::sss, 20, 3}));
  ASSERT_EQ(rep.exit_code, 0);
  for (const char* f : {"manifest.json", "report.csv", "report.json", "timings.csv"}) EXPECT_TRUE(fs::exists(out / f)) << f;
  for (const char* f : {"model/A.mtx", "model/E.mtx", "model/b.mtx", "model/c.mtx", "freq_response.csv", "error_curve.csv",
                        "dr_trace.csv", "loewner_sv.csv", "diagnostics.json"})
    EXPECT_TRUE(fs::exists(out / "iha_r2" / f)) << f;
  EXPECT_TRUE(fs::exists(out / "mbt_r2" / "dr_trace.csv"));

  // The written model reproduces the reported error.
  const LtiSystem sys = make_synthetic({SyntheticKind::sss, 20, 3});
  InputPaths p = InputPaths::from_dir(out / "iha_r2" / "model");
  const LtiSystem red = ingest(p);
  const double rel = hinf_norm(block_difference(sys, red)).value / hinf_norm(sys).value;
  EXPECT_NEAR(rel, rep.rows[0].rel_error, 1e-6 * rel);

  // Relative errors respect the Hankel lower bound.
  for (const auto& row : rep.rows) EXPECT_GE(row.rel_error, row.lower_bound - 1e-8);
  EXPECT_EQ(slurp(out / "timings.csv").rfind("method,r,seconds\n", 0), 0u);
  EXPECT_EQ(slurp(out / "report.csv").find("seconds"), std::string::npos);
}

TEST(Job, IhaBeatsMbtOnSss) {
  const fs::path out = scratch("sss100");
  const Report rep = run_job(make_job({Method::iha, Method::bt, Method::mbt}, {2, 4, 6}, out),
                             make_synthetic({SyntheticKind::sss, 100, 0}));
  ASSERT_EQ(rep.rows.size(), 9u);
  for (int i = 0; i < 3; ++i) {
    const ReportRow& iha = rep.rows[static_cast<std::size_t>(i)];
    const ReportRow& mbt = rep.rows[static_cast<std::size_t>(6 + i)];
    ASSERT_TRUE(iha.ok && mbt.ok);
    EXPECT_LE(iha.rel_error, mbt.rel_error) << "r = " << iha.r;
  }
}

TEST(Job, GoldenReport) {
  const fs::path out = scratch("golden");
  run_job(golden_job(out), golden_system());
  const fs::path golden = fs::path(MOR_GOLDEN_DIR);
  EXPECT_EQ(slurp(out / "report.csv"), slurp(golden / "report.csv"));
  EXPECT_EQ(slurp(out / "report.json"), slurp(golden / "report.json"));
}

TEST(Job, Deterministic) {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  run_job(golden_job(a), golden_system());
  run_job(golden_job(b), golden_system());
  for (const char* f : {"report.csv", "report.json", "manifest.json", "iha_r3/dr_trace.csv", "iha_r3/model/A.mtx"})
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
}

TEST(Job, SampledNormsFlagged) {
  const fs::path out = scratch("sampled");
  Job job = make_job({Method::iha}, {2}, out);
  job.sampled_norms = true;
  const Report rep = run_job(job, make_synthetic({SyntheticKind::sss, 20, 3}));
  ASSERT_TRUE(rep.rows[0].ok) << rep.rows[0].message;
  EXPECT_EQ(rep.full_norm_method, NormMethod::sampled);
  EXPECT_EQ(rep.rows[0].norm_method, NormMethod::sampled);
}

TEST(JobConfig, SettingsAndFile) {
  const fs::path dir = scratch("cfg");
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "job.conf");
    f << "# comment\nmethod = iha, mbt\norders = 2,4\nmode = both\nseed = 9\ngrid = 1e-3:1e3:50\n"
         "sampled-norms = yes\nout = " << (dir / "o").string() << "  # trailing\n";
  }
  const Job job = load_job_file(dir / "job.conf");
  EXPECT_EQ(job.methods, (std::vector<Method>{Method::iha, Method::mbt}));
  EXPECT_EQ(job.orders, (std::vector<int>{2, 4}));
  EXPECT_EQ(job.mode, Step2Mode::both);
  EXPECT_EQ(job.seed, 9u);
  EXPECT_FALSE(job.grid.automatic);
  EXPECT_EQ(job.grid.count, 50);
  EXPECT_TRUE(job.sampled_norms);
  EXPECT_EQ(job.out, dir / "o");

  Job j2;
  EXPECT_THROW(apply_setting(j2, "colour", "blue"), Error);
  EXPECT_THROW(apply_setting(j2, "method", "hna"), Error);
  EXPECT_THROW(apply_setting(j2, "orders", "two"), Error);
  EXPECT_THROW(parse_grid("1:0.5:10"), Error);
  EXPECT_TRUE(parse_grid("auto").automatic);
}

TEST(JobConfig, Validation) {
  Job job;
  job.orders = {2};
  EXPECT_NO_THROW(validate_job(job, 5));
  job.orders = {6};
  EXPECT_THROW(validate_job(job, 5), Error);
  job.orders = {};
  EXPECT_THROW(validate_job(job, 5), Error);
}

TEST(ReportFormat, FiveDigits) {
  EXPECT_EQ(format5(0.0123456789), "0.012346");
  EXPECT_EQ(format5(123456.0), "1.2346e+05");
  EXPECT_EQ(format5(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format5(-0.0), "0");
}

}  // namespace
}  // namespace mor
