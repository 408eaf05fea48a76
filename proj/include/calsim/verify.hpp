// verify.hpp — oracle comparisons shared by `calsim verify` and the acceptance suite.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace calsim::verify {

struct CheckResult {
  std::string id;
  std::string description;
  bool passed{false};
  std::string detail;
  double seconds{0.0};
};

CheckResult wick_counts();
/// Product formula for J_{k,N} against ordered-simplex quadrature with explicit index sets.
CheckResult product_formula(int cases = 12, std::uint64_t seed = 20240611);
/// Power formula for J_k^(m), m in {2, 4}, against Wick-pairing sums on the simplex.
CheckResult power_formula(int cases = 6, std::uint64_t seed = 20240612);
CheckResult lowrank_exactness();
CheckResult ohmic_endpoint();
CheckResult energy_conservation(std::size_t trajectories = 100);
CheckResult eigensolver_agreement();
CheckResult correlation_at_zero();
CheckResult harmonic_amplitude();

std::vector<CheckResult> run_all();
std::string format_row(const CheckResult& r);

}  // namespace calsim::verify
