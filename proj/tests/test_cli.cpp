#include <doctest.h>
#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>

#include "hybq/json_io.hpp"
#include "hybq/version.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::string kTool = HYBQ_TOOL_PATH;
const fs::path kRepoRoot = HYBQ_REPO_ROOT;

int run(const std::string& args, bool quiet = true) {
  std::string cmd = kTool + " " + args;
  if (quiet) cmd += " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(static_cast<bool>(in));
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("hybq_cli_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

}  // namespace

TEST_CASE("version flag reports the tool version") {
  const fs::path dir = fresh_dir("version");
  const fs::path cap = dir / "version.txt";
  const int status = std::system((kTool + " --version > " + cap.string() + " 2>&1").c_str());
  REQUIRE(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == 0);
  const std::string text = slurp(cap);
  CHECK(text.find(hybq::kToolVersion) != std::string::npos);
}

TEST_CASE("argument errors exit with the input-error code") {
  CHECK(run("") == 2);                         // a subcommand is required
  CHECK(run("--bogus-flag derive-effective x") == 2);
  CHECK(run("explode") == 2);
}

TEST_CASE("effective-Hamiltonian derivation is byte-reproducible") {
  const fs::path params = kRepoRoot / "data" / "default_params.json";
  const fs::path dir_a = fresh_dir("derive_a");
  const fs::path dir_b = fresh_dir("derive_b");

  CHECK(run("--seed 1 --out-dir " + dir_a.string() + " derive-effective " + params.string()) == 0);
  CHECK(run("--seed 1 --out-dir " + dir_b.string() + " derive-effective " + params.string()) == 0);

  const std::string report_a = slurp(dir_a / "derive_report.json");
  const std::string report_b = slurp(dir_b / "derive_report.json");
  CHECK(report_a == report_b);
  CHECK(!report_a.empty());

  // The manifest carries provenance: digest of the resolved config and the
  // list of outputs (wall time may differ between runs).
  const json manifest = json::parse(slurp(dir_a / "manifest.json"));
  CHECK(manifest.at("subcommand") == "derive-effective");
  CHECK(manifest.at("config_digest").get<std::string>().rfind("sha256:", 0) == 0);
  CHECK(manifest.at("tool_version") == hybq::kToolVersion);
  const json manifest_b = json::parse(slurp(dir_b / "manifest.json"));
  CHECK(manifest.at("config_digest") == manifest_b.at("config_digest"));

  const json report = json::parse(report_a);
  CHECK(report.at("couplings").at("j1").get<double>() == 2e-4);
  CHECK(report.at("gaps_mev").contains("ed"));
  CHECK(report.at("scaling").at("analytic_errors_mev").size() == 3);
}

TEST_CASE("unreadable, malformed and non-conforming inputs exit 2") {
  const fs::path dir = fresh_dir("badinput");

  CHECK(run("--out-dir " + dir.string() + " derive-effective /no/such/params.json") == 2);

  const fs::path broken = dir / "broken.json";
  write_text(broken, "{");
  CHECK(run("--out-dir " + dir.string() + " derive-effective " + broken.string()) == 2);

  const fs::path invalid = dir / "invalid.json";
  write_text(invalid, R"({"eps": {}})");
  CHECK(run("--out-dir " + dir.string() + " derive-effective " + invalid.string()) == 2);
}

TEST_CASE("out-of-regime parameters exit with the regime code") {
  const fs::path params = kRepoRoot / "data" / "default_params.json";
  json doc = hybq::read_json_file(params);
  // Biasing the right dot below the left reverses the level ordering the
  // perturbative treatment needs.
  doc["mu"] = {0.5, 0.0};
  const fs::path dir = fresh_dir("regime");
  const fs::path reversed = dir / "reversed.json";
  hybq::write_json_file(reversed, doc);
  CHECK(run("--out-dir " + dir.string() + " derive-effective " + reversed.string()) == 3);
}

TEST_CASE("template search succeeds, verifies and reruns identically") {
  const fs::path dir = fresh_dir("search");
  const fs::path tmpl = dir / "template.json";
  write_text(tmpl, "[[0, 1], [3, 4]]");

  // Intra-pair pulses cannot leak, so a leakage-only objective is solvable
  // with a tiny budget; what matters here is the tool contract, not the gate.
  const std::string search_args =
      " search-cnot --graph d --template " + tmpl.string() +
      " --target class --w-inv 0 --population 8 --generations 4 --restarts 2"
      " --nm-iters 40 --polish-period 2 --polish-iters 20 --threshold 1e-8 --out result.json";

  CHECK(run("--seed 1 --threads 1 --out-dir " + dir.string() + search_args) == 0);
  const std::string result_text = slurp(dir / "result.json");
  const json result = json::parse(result_text);
  CHECK(result.at("success") == true);
  CHECK(result.at("objective").get<double>() < 1e-8);
  CHECK(result.at("leakage").get<double>() < 1e-12);
  CHECK(result.at("sequence").at("pulses").size() == 2);

  // Same seed, same bytes; the thread count must not matter either, and the
  // environment variable route must equal the flag route.
  const fs::path dir2 = fresh_dir("search2");
  const int status = std::system(("HYBQ_THREADS=3 " + kTool + " --seed 1 --out-dir " +
                                  dir2.string() + search_args + " > /dev/null 2>&1")
                                     .c_str());
  REQUIRE(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == 0);
  CHECK(slurp(dir2 / "result.json") == result_text);

  // Round trip: re-evaluate the found sequence on the full spin space.
  const fs::path seq_file = dir / "sequence.json";
  hybq::write_json_file(seq_file, result.at("sequence"));
  CHECK(run("--out-dir " + dir.string() + " verify-sequence " + seq_file.string()) == 0);
  const json verify = json::parse(slurp(dir / "verify_report.json"));
  CHECK(verify.at("route") == "full_space");
  CHECK(std::abs(verify.at("leakage").get<double>() -
                 result.at("leakage").get<double>()) < 1e-10);
  const double g1_re = verify.at("invariants").at("g1")[0].get<double>();
  const double g1_re_search = result.at("invariants").at("g1")[0].get<double>();
  CHECK(std::abs(g1_re - g1_re_search) < 1e-10);
}

TEST_CASE("failed searches exit 4 but still write their result") {
  const fs::path dir = fresh_dir("searchfail");
  const fs::path tmpl = dir / "template.json";
  write_text(tmpl, "[[0, 1]]");  // one intra-pair pulse can never reach CNOT

  const int code = run("--seed 1 --threads 1 --out-dir " + dir.string() +
                       " search-cnot --graph d --template " + tmpl.string() +
                       " --population 4 --generations 2 --restarts 1 --nm-iters 10"
                       " --polish-period 2 --polish-iters 5 --threshold 1e-12");
  CHECK(code == 4);
  const json result = json::parse(slurp(dir / "search_result.json"));
  CHECK(result.at("success") == false);
  CHECK(result.at("objective").get<double>() > 1.0);  // stuck at 13/9
}

TEST_CASE("rabi simulation reproduces the rotating-wave rate") {
  const fs::path drive = kRepoRoot / "data" / "resonant_drive.json";
  const fs::path dir = fresh_dir("rabi");
  CHECK(run("--out-dir " + dir.string() + " simulate-rabi " + drive.string() +
            " --trace trace.csv") == 0);

  const json summary = json::parse(slurp(dir / "rabi_summary.json"));
  const double fitted = summary.at("fitted_rabi_ghz").get<double>();
  const double rwa = summary.at("rwa_rabi_ghz").get<double>();
  CHECK(rwa > 0.0);
  CHECK(std::abs(fitted - rwa) / rwa < 0.05);
  CHECK(summary.at("max_p1").get<double>() > 0.9);

  const std::string csv = slurp(dir / "trace.csv");
  CHECK(csv.rfind("time_s,p0,p1\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') ==
        static_cast<long>(summary.at("samples").get<std::size_t>()) + 1);
}

TEST_CASE("bundled example sequence verifies as a clean local gate") {
  const fs::path seq = kRepoRoot / "data" / "example_sequence.json";
  const fs::path dir = fresh_dir("example");
  CHECK(run("--out-dir " + dir.string() + " verify-sequence " + seq.string()) == 0);
  const json report = json::parse(slurp(dir / "verify_report.json"));
  CHECK(report.at("leakage").get<double>() < 1e-12);
  // A single intra-pair pulse acts as a local rotation: identity class.
  CHECK(report.at("invariants").at("g1")[0].get<double>() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(report.at("invariants").at("g2")[0].get<double>() == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(report.at("cnot_class_error").get<double>() ==
        doctest::Approx(13.0 / 9.0).epsilon(1e-9));
  CHECK(report.at("unitary_defect").get<double>() < 1e-12);
}
