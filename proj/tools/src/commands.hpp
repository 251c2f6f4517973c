#pragma once

#include <string>

#include "common.hpp"
#include "hybq/optimizer.hpp"

namespace hybq::cli {

struct DeriveArgs {
  std::string params_file;
  std::string out_name = "derive_report.json";
  bool drop_u1 = false;  // numeric pipeline keeps the inter-dot part by default
};
int run_derive_effective(const DeriveArgs& args, const GlobalOpts& global);

struct SearchArgs {
  std::string graph = "d";
  int length = 16;
  std::string target = "class";
  std::string template_file;  // optional fixed edge ordering
  std::string out_name = "search_result.json";
  double w_leak = 1.0;
  double w_inv = 1.0;
  SearchConfig config;
};
int run_search_cnot(const SearchArgs& args, const GlobalOpts& global);

struct VerifyArgs {
  std::string sequence_file;
  std::string graph_override;  // required when the sequence names a custom graph
  std::string out_name = "verify_report.json";
};
int run_verify_sequence(const VerifyArgs& args, const GlobalOpts& global);

struct RabiArgs {
  std::string drive_file;
  std::string summary_name = "rabi_summary.json";
  std::string trace_name = "rabi_trace.csv";
};
int run_simulate_rabi(const RabiArgs& args, const GlobalOpts& global);

}  // namespace hybq::cli
