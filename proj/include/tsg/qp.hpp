#pragma once

#include <vector>

namespace tsg {

struct QpResult {
  std::vector<double> x;
  /// One multiplier per constraint row (zero when inactive).
  std::vector<double> multipliers;
  int iterations = 0;
};

/// min 1/2 |x|^2 + a'x  subject to  C x <= b, with C given as dense rows.
///
/// Goldfarb-Idnani dual active-set method specialised to an identity
/// Hessian, so no factorisation is needed up front. Throws Error(kLpFailure)
/// when the constraints are infeasible or the method breaks down.
QpResult identity_qp(const std::vector<double>& a, const std::vector<std::vector<double>>& c,
                     const std::vector<double>& b);

}  // namespace tsg
