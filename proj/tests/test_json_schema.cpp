#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>

#include "hybq/constants.hpp"
#include "hybq/errors.hpp"
#include "hybq/json_io.hpp"
#include "hybq/schema.hpp"
#include "hybq/sha256.hpp"

using namespace hybq;
using nlohmann::json;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

TEST_CASE("sha256 reproduces the published reference digests") {
  CHECK(sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq") ==
        "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
}

TEST_CASE("canonical dumps are key-order independent and digest-stable") {
  const json a = json::parse(R"({"b": 1, "a": [1.5, true, "x"], "c": {"z": null, "y": 2}})");
  const json b = json::parse(R"({"c": {"y": 2, "z": null}, "a": [1.5, true, "x"], "b": 1})");
  CHECK(canonical_dump(a) == canonical_dump(b));
  CHECK(json_digest(a) == json_digest(b));
  CHECK(json_digest(a).rfind("sha256:", 0) == 0);
  CHECK(json_digest(a) == "sha256:" + sha256_hex(canonical_dump(a)));

  // Doubles print as shortest round-trip forms.
  const json d = json::parse(R"({"x": 0.1, "y": 12.0})");
  const std::string dump = canonical_dump(d);
  CHECK(dump.find("0.1") != std::string::npos);
  CHECK(dump.find("0.1000000") == std::string::npos);
}

TEST_CASE("file round trips preserve the document") {
  const auto path = std::filesystem::temp_directory_path() / "hybq_json_io_test.json";
  const json doc = {{"name", "roundtrip"}, {"values", {1, 2, 3}}, {"nested", {{"pi", 3.25}}}};
  write_json_file(path, doc);
  CHECK(read_json_file(path) == doc);
  std::filesystem::remove(path);

  CHECK_THROWS_AS(read_json_file("/nonexistent/place/nothing.json"), ValidationError);
}

TEST_CASE("complex and matrix serialization uses [re, im] pairs") {
  const Complex z(1.25, -2.5);
  const json jz = complex_to_json(z);
  CHECK(jz.is_array());
  CHECK(jz[0].get<double>() == 1.25);
  CHECK(jz[1].get<double>() == -2.5);
  CHECK(complex_from_json(jz) == z);

  MatrixXcd m(2, 2);
  m << Complex(1, 0), Complex(0, 2), Complex(3, -1), Complex(0, 0);
  const json jm = matrix_to_json(m);
  CHECK(jm.size() == 2);
  CHECK(jm[0][1][1].get<double>() == 2.0);  // row 0, col 1, imaginary part
  CHECK(jm[1][0][0].get<double>() == 3.0);
}

TEST_CASE("gate sequences round trip through their JSON form") {
  GateSequence seq;
  seq.graph = "hybrid_linear";
  seq.pulses = {{0, 1, 0.25}, {2, 3, 0.7071067811865476}};
  seq.seed = 99;

  json j = seq;
  CHECK(j.at("graph") == "hybrid_linear");
  CHECK(j.at("pulses")[0].at("edge")[0] == 0);
  CHECK(j.at("pulses")[1].at("tau").get<double>() == 0.7071067811865476);

  GateSequence back = j.get<GateSequence>();
  CHECK(back.graph == seq.graph);
  CHECK(back.seed == seq.seed);
  REQUIRE(back.pulses.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back.pulses[i].i == seq.pulses[i].i);
    CHECK(back.pulses[i].j == seq.pulses[i].j);
    CHECK(back.pulses[i].tau == seq.pulses[i].tau);
  }

  // Digest stability: same logical sequence, same digest.
  CHECK(json_digest(j) == json_digest(json(back)));
}

TEST_CASE("embedded schemas match the files shipped in the repository") {
  const std::filesystem::path root = HYBQ_REPO_ROOT;
  const auto& texts = schema_texts();
  std::size_t on_disk = 0;
  for (const auto& entry : std::filesystem::directory_iterator(root / "schemas")) {
    if (entry.path().extension() != ".json") continue;
    ++on_disk;
    const std::string key = entry.path().filename().string();
    REQUIRE(texts.count(key) == 1);
    CHECK(texts.at(key) == slurp(entry.path()));
  }
  CHECK(on_disk == texts.size());
  CHECK(on_disk >= 9);
}

TEST_CASE("schema validation accepts conforming sequence documents") {
  const json schema = json::parse(schema_texts().at("gate_sequence.schema.json"));
  const json good = json::parse(
      R"({"graph": "hybrid_linear", "pulses": [{"edge": [0, 1], "tau": 0.25}], "seed": 7})");
  CHECK_NOTHROW(validate_against_schema(good, schema));
  CHECK_NOTHROW(validate_with_named_schema(good, "gate_sequence"));
}

TEST_CASE("schema validation pinpoints violations") {
  const json schema = json::parse(schema_texts().at("gate_sequence.schema.json"));
  auto rejects = [&](const char* text) {
    CHECK_THROWS_AS(validate_against_schema(json::parse(text), schema), ValidationError);
  };
  rejects(R"({"pulses": []})");                                               // missing graph
  rejects(R"({"graph": "g", "pulses": [], "extra": 1})");                     // unknown key
  rejects(R"({"graph": "g", "pulses": [{"edge": [0, 1], "tau": "x"}]})");     // wrong type
  rejects(R"({"graph": "g", "pulses": [{"edge": [0, 1, 2], "tau": 0.1}]})");  // too many items
  rejects(R"({"graph": "g", "pulses": [{"edge": [-1, 1], "tau": 0.1}]})");    // minimum
  rejects(R"({"graph": "g", "pulses": [{"edge": [0, 1]}]})");                 // missing tau
  rejects(R"({"graph": 3, "pulses": []})");                                   // type mismatch

  CHECK_THROWS_AS(validate_with_named_schema(json::object(), "no_such_schema"),
                  ValidationError);

  // The reported path names the offending location.
  try {
    validate_against_schema(
        json::parse(R"({"graph": "g", "pulses": [{"edge": [0, 1], "tau": "x"}]})"), schema);
    CHECK(false);
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("pulses") != std::string::npos);
    CHECK(std::string(e.what()).find("tau") != std::string::npos);
  }
}

TEST_CASE("drive jobs default to resonant driving") {
  json j = json::parse(R"({
    "qubit": {"j1": 0.0, "j2": 0.0, "jp": 0.0, "e_st_l": 0.05},
    "modulated_term": "off_diagonal",
    "shape": "sine",
    "amplitude_mev": 0.001,
    "duration_s": 8e-9
  })");
  auto job = rabi_job_from_json(j);
  const double expect = 2.0 * kPi * job.drive.base.resonance_ghz() * 1e9;
  CHECK(job.drive.omega_rad_s == doctest::Approx(expect).epsilon(1e-12));
  CHECK(job.initial(0) == Complex(1.0, 0.0));
  CHECK(job.initial(1) == Complex(0.0, 0.0));

  j["frequency_ghz"] = 10.0;
  job = rabi_job_from_json(j);
  CHECK(job.drive.omega_rad_s == doctest::Approx(2.0 * kPi * 1e10).epsilon(1e-12));

  j["modulated_term"] = "sideways";
  CHECK_THROWS_AS(rabi_job_from_json(j), ValidationError);
}

TEST_CASE("run manifests serialize every provenance field") {
  RunManifest m;
  m.subcommand = "derive-effective";
  m.config_digest = "sha256:abc";
  m.tool_version = "1.0.0";
  m.seed = 5;
  m.outputs = {"out/report.json"};
  m.wall_time_s = 0.25;
  const json j = m;
  CHECK(j.at("subcommand") == "derive-effective");
  CHECK(j.at("config_digest") == "sha256:abc");
  CHECK(j.at("tool_version") == "1.0.0");
  CHECK(j.at("seed") == 5);
  CHECK(j.at("outputs")[0] == "out/report.json");
  CHECK(j.at("wall_time_s") == 0.25);
}
