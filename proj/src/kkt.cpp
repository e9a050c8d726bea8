#include "ksvm/kkt.hpp"

#include <cmath>

#include "ksvm/kernels.hpp"

namespace ksvm {

const char* to_string(Branch b) {
    return b == Branch::Positive ? "positive" : "negative";
}

Branch branch_for(double decision_value_at_x_hat) {
    return sign_pm(decision_value_at_x_hat) > 0 ? Branch::Positive : Branch::Negative;
}

ModelExpansion expand_model(const SvmModel& model, const Vector& x, bool want_hess) {
    if (x.size() != model.dimension())
        throw DimensionError("point has dimension " + std::to_string(x.size()) +
                             ", model expects " + std::to_string(model.dimension()));
    ModelExpansion e;
    e.grad = Vector::Zero(x.size());
    if (want_hess) e.hess = Matrix::Zero(x.size(), x.size());
    for (Index i = 0; i < model.num_support_vectors(); ++i)
        kernel_accumulate(model.kernel, x, model.support_vectors[static_cast<size_t>(i)],
                          model.dual_coeffs[i], &e.value, &e.grad,
                          want_hess ? &e.hess : nullptr);
    return e;
}

namespace {

void check_point(const SvmModel& model, const Vector& x_hat, const KktPoint& point) {
    if (x_hat.size() != model.dimension() || point.r.size() != model.dimension())
        throw DimensionError("kkt point/model dimension mismatch");
}

} // namespace

Vector residual(const SvmModel& model, const Vector& x_hat, double eps, Branch branch,
                const KktPoint& point) {
    check_point(model, x_hat, point);
    const double branch_sign = branch == Branch::Positive ? 1.0 : -1.0;
    const ModelExpansion e = expand_model(model, x_hat + point.r, false);
    const Index d = model.dimension();
    Vector h(d + 1);
    h.head(d) = 2.0 * point.r + (branch_sign * std::abs(point.mu)) * e.grad;
    h[d] = branch_sign * (e.value + model.bias) + eps;
    return h;
}

Matrix jacobian(const SvmModel& model, const Vector& x_hat, double eps, Branch branch,
                const KktPoint& point) {
    (void)eps; // enters the residual as an additive constant only
    check_point(model, x_hat, point);
    const double branch_sign = branch == Branch::Positive ? 1.0 : -1.0;
    const double abs_mu = std::abs(point.mu);
    const double dabs_dmu = static_cast<double>(sign_pm(point.mu)); // sign(0) = +1
    const ModelExpansion e = expand_model(model, x_hat + point.r, true);
    const Index d = model.dimension();

    Matrix jac(d + 1, d + 1);
    jac.topLeftCorner(d, d) = (branch_sign * abs_mu) * e.hess;
    jac.topLeftCorner(d, d).diagonal().array() += 2.0;
    jac.block(0, d, d, 1) = (branch_sign * dabs_dmu) * e.grad;
    jac.block(d, 0, 1, d) = (branch_sign * e.grad).transpose();
    jac(d, d) = 0.0;
    return jac;
}

KktDiagnostics check_kkt(const SvmModel& model, const Vector& x_hat, double eps,
                         Branch branch, const Vector& r, double mu, double tol) {
    if (x_hat.size() != model.dimension() || r.size() != model.dimension())
        throw DimensionError("kkt check dimension mismatch");
    const double branch_sign = branch == Branch::Positive ? 1.0 : -1.0;
    const ModelExpansion e = expand_model(model, x_hat + r, false);

    KktDiagnostics diag;
    // constraint c(r) <= 0 in both branches; only its orientation differs
    diag.constraint_value = branch_sign * (e.value + model.bias) + eps;
    diag.stationarity =
        (2.0 * r + (branch_sign * mu) * e.grad).lpNorm<Eigen::Infinity>();
    diag.complementarity = std::abs(mu * diag.constraint_value);
    diag.feasibility = std::max(0.0, diag.constraint_value);
    diag.multiplier_sign = std::max(0.0, -mu);
    diag.ok = diag.stationarity <= tol && diag.complementarity <= tol &&
              diag.constraint_value <= tol && mu >= -tol;
    return diag;
}

} // namespace ksvm
