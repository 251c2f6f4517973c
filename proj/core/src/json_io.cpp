#include "hybq/json_io.hpp"

#include <fstream>
#include <sstream>

#include "hybq/errors.hpp"
#include "hybq/schrieffer_wolff.hpp"
#include "hybq/sha256.hpp"

namespace hybq {

std::string canonical_dump(const nlohmann::json& j) {
  return j.dump(2);
}

std::string json_digest(const nlohmann::json& j) {
  return "sha256:" + sha256_hex(canonical_dump(j));
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("failed to parse " + path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << canonical_dump(j) << '\n';
  if (!out) throw ValidationError("write failed for " + path.string());
}

nlohmann::json complex_to_json(const Complex& z) {
  return nlohmann::json::array({z.real(), z.imag()});
}

Complex complex_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2)
    throw ValidationError("complex value must be a [re, im] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

nlohmann::json matrix_to_json(const MatrixXcd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(complex_to_json(m(i, k)));
    rows.push_back(row);
  }
  return rows;
}

void to_json(nlohmann::json& j, const GateSequence& seq) {
  nlohmann::json pulses = nlohmann::json::array();
  for (const Pulse& p : seq.pulses)
    pulses.push_back(nlohmann::json{{"edge", {p.i, p.j}}, {"tau", p.tau}});
  j = nlohmann::json{{"graph", seq.graph}, {"pulses", pulses}, {"seed", seq.seed}};
}

void from_json(const nlohmann::json& j, GateSequence& seq) {
  seq = GateSequence{};
  seq.graph = j.at("graph").get<std::string>();
  for (const auto& pj : j.at("pulses")) {
    const auto& e = pj.at("edge");
    if (!e.is_array() || e.size() != 2)
      throw ValidationError("pulse edge must be a [i, j] pair");
    Pulse p;
    p.i = e[0].get<int>();
    p.j = e[1].get<int>();
    p.tau = pj.at("tau").get<double>();
    seq.pulses.push_back(p);
  }
  if (j.contains("seed")) seq.seed = j.at("seed").get<std::uint64_t>();
}

RabiJob rabi_job_from_json(const nlohmann::json& j) {
  RabiJob job;
  const auto& q = j.at("qubit");
  job.drive.base =
      make_effective_qubit(q.at("j1").get<double>(), q.at("j2").get<double>(),
                           q.at("jp").get<double>(), q.at("e_st_l").get<double>());
  const std::string term = j.value("modulated_term", std::string("off_diagonal"));
  if (term == "off_diagonal") {
    job.drive.target = ModulatedTerm::OffDiagonal;
  } else if (term == "detuning") {
    job.drive.target = ModulatedTerm::Detuning;
  } else {
    throw ValidationError("modulated_term must be 'off_diagonal' or 'detuning'");
  }
  const std::string shape = j.value("shape", std::string("sine"));
  if (shape == "sine") {
    job.drive.shape = DriveShape::Sine;
  } else if (shape == "square") {
    job.drive.shape = DriveShape::Square;
  } else {
    throw ValidationError("shape must be 'sine' or 'square'");
  }
  job.drive.amplitude_mev = j.at("amplitude_mev").get<double>();
  const double freq_ghz = j.value("frequency_ghz", 0.0);
  job.drive.omega_rad_s = freq_ghz > 0.0
                              ? 2.0 * kPi * freq_ghz * 1e9
                              : 2.0 * kPi * job.drive.base.resonance_ghz() * 1e9;
  job.drive.duration_s = j.at("duration_s").get<double>();
  job.drive.timestep_s = j.value("timestep_s", 0.0);
  if (j.contains("initial")) {
    const auto& init = j.at("initial");
    if (!init.is_array() || init.size() != 2)
      throw ValidationError("initial must be two [re, im] pairs");
    job.initial(0) = complex_from_json(init[0]);
    job.initial(1) = complex_from_json(init[1]);
    const double n = job.initial.norm();
    if (n < 1e-12) throw ValidationError("initial state must be nonzero");
    job.initial /= n;
  }
  return job;
}

void to_json(nlohmann::json& j, const RunManifest& m) {
  j = nlohmann::json{{"subcommand", m.subcommand}, {"config_digest", m.config_digest},
                     {"tool_version", m.tool_version}, {"seed", m.seed},
                     {"outputs", m.outputs},         {"wall_time_s", m.wall_time_s}};
}

}  // namespace hybq
