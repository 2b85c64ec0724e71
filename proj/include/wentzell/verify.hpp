#pragma once

#include "wentzell/coefficient.hpp"
#include "wentzell/forms.hpp"
#include "wentzell/polynomial.hpp"

#include "json.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace wentzell {

struct CheckResult {
  std::string suite;
  std::string name;
  nlohmann::json inputs;
  nlohmann::json values;
  double tolerance = 0.0;
  bool passed = false;
};

struct VerificationReport {
  std::vector<CheckResult> checks;

  bool passed() const;
  nlohmann::json to_json() const;
};

struct GreenCase {
  std::string name;
  OperatorForm form;
  DegenerateCoefficient coeff;
  PiecewisePolynomial u;
  PiecewisePolynomial v;
  bool expects_jump = false;
};

/// Polynomial test pairs covering the weak, strong-interior (with jump) and
/// one-sided (x0 = 0, x0 = 1) identities.
std::vector<GreenCase> green_battery();

/// One case of the standard operator matrix {form} x {coefficient} x {gamma}.
struct MatrixCase {
  std::string name;
  OperatorForm form;
  DegenerateCoefficient coeff;
  WentzellParams params;
};

/// {Divergence, NonDivergence} x {K = 0.5, 1, 1.5, constant} x {gamma = 0, -1}, x0 = 0.5.
std::vector<MatrixCase> operator_matrix();

struct VerifyOptions {
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::size_t n = 16; ///< elements for the spectral suite
};

/// Suite names: green, hardy, fit, pointwise, spectral, equivalence; "all" runs every suite.
const std::vector<std::string>& verification_suites();

/// Throws std::invalid_argument for an unknown suite name.
VerificationReport run_verification(const std::vector<std::string>& suites, const VerifyOptions& options = {});

} // namespace wentzell
