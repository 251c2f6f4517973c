#pragma once

#include <stdexcept>
#include <string>

namespace hybq {

// Malformed or out-of-contract user input (bad JSON, bad mode index, ...).
// The CLI maps this to exit code 2.
struct ValidationError : std::invalid_argument {
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Parameter regime where a requested reduction is ill-defined, e.g. a
// non-positive perturbative denominator. The CLI maps this to exit code 3.
struct RegimeError : std::runtime_error {
  explicit RegimeError(const std::string& what) : std::runtime_error(what) {}
};

// Two states coupled by tunneling are closer than the degeneracy floor, so
// the generator denominator is unusable. Subtype of the regime family;
// carries its own diagnostics in the message. CLI exit code 3.
struct NearDegeneracyError : RegimeError {
  NearDegeneracyError(const std::string& what, double gap_mev)
      : RegimeError(what), gap_mev(gap_mev) {}
  double gap_mev;
};

// A search completed without reaching its success threshold. CLI exit code 4.
struct SearchFailure : std::runtime_error {
  explicit SearchFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hybq
