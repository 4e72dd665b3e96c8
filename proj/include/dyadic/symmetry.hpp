#pragma once
// Exact symmetries of the dyadic system. Given a solution X:
//
//   sign flip at the first nonzero shell nb:  Y_nb = -X_nb, other shells kept
//   index shift by nb-1:                      Z_n(t) = X_{n+nb-1}(t / k_{nb-1})
//   amplitude/time scaling by alpha > 0:      W_n(t) = alpha X_n(alpha t)
//
// Each map is linear in the state, so it is applied to the stored samples and
// to the dense-output coefficients directly; the transformed grid is the image
// of the original one.

#include <cstddef>

#include "dyadic/integrator.hpp"

namespace dyadic {

Trajectory transform_sign_flip(const Trajectory& sol, std::size_t nbar);
Trajectory transform_shift(const Trajectory& sol, std::size_t nbar);
Trajectory transform_scale(const Trajectory& sol, double alpha);

// Defect of the dense output as a solution of its own equations. At each step
// midpoint the time derivative of the continuous extension (fourth-order
// central difference) is compared with the vector field; the mismatch times the
// step length is divided by the local tolerance atol + rtol * |x|_inf.
struct ResidualReport {
  double max_defect = 0.0;  // in units of the local tolerance
  double worst_time = 0.0;
  std::size_t worst_shell = 0;  // 1-based
  std::size_t probes = 0;
  bool passes(double factor = 10.0) const { return max_defect <= factor; }
};

ResidualReport residual_check(const Trajectory& traj);

}  // namespace dyadic
