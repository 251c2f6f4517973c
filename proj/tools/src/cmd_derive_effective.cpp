#include <iostream>

#include "commands.hpp"
#include "hybq/schrieffer_wolff.hpp"

namespace hybq::cli {

namespace {

nlohmann::json matrix2_json(const Eigen::Matrix2cd& m) {
  MatrixXcd d = m;
  return matrix_to_json(d);
}

double safe_ratio(double num, double den, std::vector<std::string>& warnings,
                  const std::string& label) {
  if (den == 0.0) {
    if (num == 0.0) return 1.0;
    warnings.push_back(label + ": analytic value is zero, ratio reported as 0");
    return 0.0;
  }
  return num / den;
}

}  // namespace

int run_derive_effective(const DeriveArgs& args, const GlobalOpts& global) {
  const nlohmann::json inputs = read_json_file(args.params_file);
  const HubbardParams params = load_params(args.params_file);

  const nlohmann::json config = {{"subcommand", "derive-effective"},
                                 {"params", inputs},
                                 {"drop_u1", args.drop_u1},
                                 {"seed", global.seed}};
  RunEmitter emitter(global, "derive-effective", config);

  const EffectiveQubit analytic = effective_hamiltonian_analytic(params);
  const EffectiveCouplings couplings = effective_couplings(params);
  const NumericEffective numeric = effective_hamiltonian_numeric(params, !args.drop_u1);
  const double ed_gap = ed_reference_gap(params);
  const ConvergenceStudy study = convergence_study(params, {0.02, 0.05, 0.1});

  std::vector<std::string> warnings = couplings.warnings;
  nlohmann::json ratios = {
      {"j1", safe_ratio(numeric.j1_numeric, analytic.j1, warnings, "j1")},
      {"jp", safe_ratio(numeric.jp_numeric, analytic.jp, warnings, "jp")}};

  nlohmann::json scaling = {{"delta_mev", study.delta},
                            {"t_over_delta", nlohmann::json::array()},
                            {"analytic_errors_mev", nlohmann::json::array()},
                            {"numeric_errors_mev", nlohmann::json::array()},
                            {"analytic_exponent", study.analytic_exponent},
                            {"numeric_exponent", study.numeric_exponent}};
  for (const ConvergencePoint& pt : study.points) {
    scaling["t_over_delta"].push_back(pt.t / study.delta);
    scaling["analytic_errors_mev"].push_back(pt.analytic_error);
    scaling["numeric_errors_mev"].push_back(pt.numeric_error);
  }

  const nlohmann::json report = {
      {"couplings",
       {{"j1", couplings.j1},
        {"j2", couplings.j2},
        {"jp", couplings.jp},
        {"t", couplings.t},
        {"e_st_l", analytic.e_st_l}}},
      {"analytic_h2_mev", matrix2_json(analytic.h2)},
      {"numeric_h2_mev", matrix2_json(numeric.h2)},
      {"u_pin_mev", numeric.u_pin},
      {"gaps_mev",
       {{"analytic", analytic.gap()},
        {"numeric", qubit_from_matrix(numeric.h2).gap()},
        {"ed", ed_gap}}},
      {"resonance_ghz", analytic.resonance_ghz()},
      {"numeric_over_analytic", ratios},
      {"scaling", scaling},
      {"inputs", inputs},
      {"warnings", warnings}};

  emitter.add_json(args.out_name, report, "derive_report");
  emitter.finish();

  std::cout << "J1 = " << couplings.j1 << " meV, J2 = " << couplings.j2
            << " meV, J' = " << couplings.jp << " meV\n"
            << "analytic gap " << analytic.gap() << " meV, ED gap " << ed_gap << " meV ("
            << analytic.resonance_ghz() << " GHz)\n"
            << "wrote " << emitter.out_path(args.out_name).string() << "\n";
  return kExitOk;
}

}  // namespace hybq::cli
