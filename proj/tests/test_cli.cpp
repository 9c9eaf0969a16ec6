#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "axistable/config.hpp"
#include "axistable/errors.hpp"
#include "axistable/runner.hpp"

using namespace axistable;
namespace fs = std::filesystem;

namespace {

std::string write_config(const std::string& name, const std::string& body) {
  const std::string dir = fs::temp_directory_path() / "axistable_test";
  fs::create_directories(dir);
  const std::string path = dir + "/" + name;
  std::ofstream out(path);
  out << body;
  return path;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const char* kPoly2 = R"(
[potential]
family = product_polynomial
dimension = 1
alpha = 1.0
epsilons = 2.0

[criteria]
ladder_span = 1e5
)";

}  // namespace

TEST_CASE("config parsing: values, defaults, strictness") {
  auto path = write_config("basic.cfg", kPoly2);
  RunConfig rc = RunConfig::load(path, "criteria");
  CHECK(rc.potential.family == "product_polynomial");
  CHECK(rc.potential.epsilons == std::vector<double>{2.0});
  CHECK(rc.criteria.ladder_span == doctest::Approx(1e5));
  CHECK(rc.criteria.r_min == doctest::Approx(1.0));  // default

  auto bad_key = write_config("bad_key.cfg",
                              "[potential]\nfamily = product_polynomial\n"
                              "dimension = 1\nalpha = 1\nepsilons = 2\n"
                              "typo_key = 3\n");
  CHECK_THROWS_AS(RunConfig::load(bad_key, "criteria"), config_error);

  auto bad_sec = write_config("bad_sec.cfg",
                              "[potential]\nfamily = product_polynomial\n"
                              "dimension = 1\nalpha = 1\nepsilons = 2\n"
                              "[nonsense]\nx = 1\n");
  CHECK_THROWS_AS(RunConfig::load(bad_sec, "criteria"), config_error);

  auto bad_alpha = write_config("bad_alpha.cfg",
                                "[potential]\nfamily = product_polynomial\n"
                                "dimension = 1\nalpha = 2.5\nepsilons = 2\n");
  CHECK_THROWS_AS(RunConfig::load(bad_alpha, "criteria"), config_error);
}

TEST_CASE("criteria run emits artifacts; manifest round-trips the run") {
  auto path = write_config("crit.cfg", kPoly2);
  RunConfig rc = RunConfig::load(path, "criteria");
  const std::string out1 = fs::temp_directory_path() / "axistable_out1";
  const std::string out2 = fs::temp_directory_path() / "axistable_out2";
  fs::remove_all(out1);
  fs::remove_all(out2);
  rc.out_dir = out1;
  run_task(rc);
  CHECK(fs::exists(out1 + "/summary.json"));
  CHECK(fs::exists(out1 + "/phi_table.csv"));
  CHECK(fs::exists(out1 + "/limsup.csv"));
  CHECK(fs::exists(out1 + "/manifest.cfg"));
  CHECK(slurp(out1 + "/summary.json").find("HOLDS") != std::string::npos);

  // re-ingest the manifest: identical artifacts
  RunConfig rc2 = RunConfig::load(out1 + "/manifest.cfg", "criteria");
  rc2.out_dir = out2;
  run_task(rc2);
  CHECK(slurp(out1 + "/summary.json") == slurp(out2 + "/summary.json"));
  CHECK(slurp(out1 + "/phi_table.csv") == slurp(out2 + "/phi_table.csv"));
  CHECK(slurp(out1 + "/limsup.csv") == slurp(out2 + "/limsup.csv"));
}

TEST_CASE("task/manifest mismatch is rejected") {
  auto path = write_config("crit2.cfg", kPoly2);
  RunConfig rc = RunConfig::load(path, "criteria");
  const std::string out = fs::temp_directory_path() / "axistable_out3";
  fs::remove_all(out);
  rc.out_dir = out;
  run_task(rc);
  CHECK_THROWS_AS(RunConfig::load(out + "/manifest.cfg", "rates"), config_error);
}

TEST_CASE("gap task validates the dimension gate") {
  auto path = write_config("gap3.cfg",
                           "[potential]\nfamily = product_polynomial\n"
                           "dimension = 3\nalpha = 1\nepsilons = 2 2 2\n"
                           "[gap]\nboxes = 5 10\nn = 16\n");
  RunConfig rc = RunConfig::load(path, "gap");
  rc.out_dir = fs::temp_directory_path() / "axistable_out4";
  CHECK_THROWS_AS(run_task(rc), config_error);
}

TEST_CASE("identical config and seed give byte-identical simulate outputs") {
  auto path = write_config("sim.cfg",
                           "[potential]\nfamily = product_polynomial\n"
                           "dimension = 1\nalpha = 1\nepsilons = 2.0\n"
                           "[simulate]\nhorizon = 20\ntrajectories = 1200\n");
  RunConfig rc = RunConfig::load(path, "simulate");
  const std::string out1 = fs::temp_directory_path() / "axistable_sim1";
  const std::string out2 = fs::temp_directory_path() / "axistable_sim2";
  fs::remove_all(out1);
  fs::remove_all(out2);
  rc.seed = 99;
  rc.out_dir = out1;
  run_task(rc);
  rc.out_dir = out2;
  rc.threads = 2;  // thread count must not change a byte
  run_task(rc);
  CHECK(slurp(out1 + "/decay.csv") == slurp(out2 + "/decay.csv"));
  CHECK(slurp(out1 + "/summary.json") == slurp(out2 + "/summary.json"));
}

TEST_CASE("lyapunov task refuses subcritical hypotheses with a gate") {
  auto path = write_config("drift_sub.cfg",
                           "[potential]\nfamily = product_polynomial\n"
                           "dimension = 1\nalpha = 1\nepsilons = 0.5\n"
                           "[criteria]\nladder_span = 1e5\n"
                           "[lyapunov]\nsteps = 6\n");
  RunConfig rc = RunConfig::load(path, "lyapunov");
  rc.out_dir = fs::temp_directory_path() / "axistable_out5";
  CHECK_THROWS_AS(run_task(rc), gate_error);
}

TEST_CASE("variable-order potential flows through criteria and rates") {
  auto path = write_config("vo.cfg",
                           "[potential]\nfamily = variable_order\n"
                           "dimension = 1\nalpha = 1.0\n"
                           "coeff_1 = blend(2, 3, 10, 20)\n"
                           "[criteria]\nladder_span = 1e4\n"
                           "shells_per_decade = 4\ndirections = 2\n");
  RunConfig rc = RunConfig::load(path, "rates");
  const std::string out = fs::temp_directory_path() / "axistable_vo";
  fs::remove_all(out);
  rc.out_dir = out;
  run_task(rc);
  const std::string summary = slurp(out + "/summary.json");
  CHECK(summary.find("\"a_star\"") != std::string::npos);
  CHECK(summary.find("beta_exponent") != std::string::npos);
  CHECK(slurp(out + "/rates.csv").find("variable_order_a") != std::string::npos);
}

TEST_CASE("log-corrected family reports the log-Sobolev threshold") {
  auto path = write_config("logc.cfg",
                           "[potential]\nfamily = product_log_corrected\n"
                           "dimension = 1\nalpha = 1.0\nepsilons = 2.0\n"
                           "[rates]\ns_lo = 1e-2\ns_hi = 1e-1\n");
  RunConfig rc = RunConfig::load(path, "rates");
  const std::string out = fs::temp_directory_path() / "axistable_logc";
  fs::remove_all(out);
  rc.out_dir = out;
  run_task(rc);
  const std::string summary = slurp(out + "/summary.json");
  CHECK(summary.find("\"logsobolev_iff\": true") != std::string::npos);
  CHECK(slurp(out + "/rates.csv").find("log_beta") != std::string::npos);
}

TEST_CASE("report task names the weak regime with its decay envelope") {
  auto path = write_config("weak.cfg",
                           "[potential]\nfamily = product_polynomial\n"
                           "dimension = 2\nalpha = 1.0\nepsilons = 0.5 2.0\n"
                           "[criteria]\nladder_span = 1e4\n"
                           "shells_per_decade = 4\ndirections = 16\n");
  RunConfig rc = RunConfig::load(path, "report");
  const std::string out = fs::temp_directory_path() / "axistable_weak";
  fs::remove_all(out);
  rc.out_dir = out;
  run_task(rc);
  const std::string summary = slurp(out + "/summary.json");
  CHECK(summary.find("weak (algebraic decay)") != std::string::npos);
  CHECK(summary.find("FAILS") != std::string::npos);
  CHECK(slurp(out + "/rate_table.csv").find("decay_envelope_power") !=
        std::string::npos);
}
