#ifndef KSVM_KKT_HPP
#define KSVM_KKT_HPP

#include "ksvm/types.hpp"

namespace ksvm {

/// Solver variables: the perturbation r and the unconstrained multiplier
/// variable mu. The recovered Lagrange multiplier is |mu|.
struct KktPoint {
    Vector r;
    double mu = 0.0;

    Vector flat() const {
        Vector v(r.size() + 1);
        v.head(r.size()) = r;
        v[r.size()] = mu;
        return v;
    }
    static KktPoint from_flat(const Vector& v) {
        KktPoint p;
        p.r = v.head(v.size() - 1);
        p.mu = v[v.size() - 1];
        return p;
    }
};

/// Which class branch of the attack system applies. Chosen from the
/// unperturbed prediction of x_hat, never from its true label.
enum class Branch { Positive, Negative };

const char* to_string(Branch b);
Branch branch_for(double decision_value_at_x_hat);

/// The model-dependent pieces of the residual at x = x_hat + r, accumulated
/// in one pass over the support vectors:
///   value = sum_i c_i K(x, sv_i)           (no bias)
///   grad  = sum_i c_i dK/dx(x, sv_i)
///   hess  = sum_i c_i d2K/dx2(x, sv_i)     (only when requested)
struct ModelExpansion {
    double value = 0.0;
    Vector grad;
    Matrix hess;
};
ModelExpansion expand_model(const SvmModel& model, const Vector& x, bool want_hess);

/// Residual of the reformulated root-finding system, length d+1.
/// Positive branch: [2r + |mu| g(x); s(x) + b + eps],
/// Negative branch: [2r - |mu| g(x); -s(x) - b + eps], with x = x_hat + r.
Vector residual(const SvmModel& model, const Vector& x_hat, double eps, Branch branch,
                const KktPoint& point);

/// Analytic Jacobian of the residual, (d+1) x (d+1). The |mu| kink uses
/// sign(0) = +1; the last row's mu-derivative is identically zero.
Matrix jacobian(const SvmModel& model, const Vector& x_hat, double eps, Branch branch,
                const KktPoint& point);

struct KktDiagnostics {
    bool ok = false;
    double stationarity = 0.0;     // inf-norm of the stationarity block
    double complementarity = 0.0;  // |mu * constraint|
    double feasibility = 0.0;      // max(0, constraint value)
    double multiplier_sign = 0.0;  // max(0, -mu)
    double constraint_value = 0.0; // signed constraint, <= 0 when feasible
};

/// Raw check of the first-order optimality conditions at (r, mu >= 0):
/// stationarity, complementarity, primal feasibility and multiplier sign,
/// each within tol.
KktDiagnostics check_kkt(const SvmModel& model, const Vector& x_hat, double eps,
                         Branch branch, const Vector& r, double mu, double tol);

} // namespace ksvm

#endif
