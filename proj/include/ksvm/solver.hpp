#ifndef KSVM_SOLVER_HPP
#define KSVM_SOLVER_HPP

#include <functional>

#include "ksvm/types.hpp"

namespace ksvm {

using ResidualFn = std::function<Vector(const Vector&)>;
using JacobianFn = std::function<Matrix(const Vector&)>;

enum class SolveStatus { Converged, MaxIterations, StalledStep, SingularModel };

const char* to_string(SolveStatus s);

struct SolveReport {
    Vector solution;
    double residual_inf_norm = 0.0;
    int iterations = 0;
    SolveStatus status = SolveStatus::MaxIterations;
};

/// Square nonlinear root finder: Powell dogleg trust-region iteration on
/// F(x) = 0 with a user-supplied analytic Jacobian.
///
/// Steps blend the Gauss-Newton and steepest-descent directions inside the
/// trust radius; a step is accepted when the actual-vs-predicted reduction
/// ratio exceeds 1e-4, the radius grows by 2x when the ratio exceeds 0.75 at
/// the boundary and shrinks by 0.25 when it falls below 0.25. A numerically
/// singular Jacobian (condition estimate above 1e12) falls back to a
/// Levenberg-Marquardt damped step. Convergence is ||F||_inf <= tol.
SolveReport solve_root(const ResidualFn& residual_fn, const JacobianFn& jacobian_fn,
                       const Vector& x0, double tol, int max_iter);

} // namespace ksvm

#endif
