#include "ksvm/kernels.hpp"

#include <cmath>

namespace ksvm {

namespace {

void check_dims(const Vector& x, const Vector& x2) {
    if (x.size() != x2.size())
        throw DimensionError("kernel arguments have dimensions " + std::to_string(x.size()) +
                             " and " + std::to_string(x2.size()));
}

bool is_integral(double e) { return std::floor(e) == e; }

// base^expo with the domain pinned down: a negative base is only legal with
// an integral exponent, 0^0 = 1, and a negative exponent of zero is rejected.
double pow_checked(double base, double expo) {
    if (base > 0.0) return std::pow(base, expo);
    if (base == 0.0) {
        if (expo > 0.0) return 0.0;
        if (expo == 0.0) return 1.0;
        throw KernelDomainError("polynomial kernel: zero base raised to negative exponent " +
                                std::to_string(expo));
    }
    if (is_integral(expo)) return std::pow(base, expo);
    throw KernelDomainError("polynomial kernel: negative base " + std::to_string(base) +
                            " with fractional exponent " + std::to_string(expo));
}

} // namespace

void kernel_accumulate(const KernelSpec& spec, const Vector& x, const Vector& x2,
                       double weight, double* value, Vector* grad, Matrix* hess) {
    check_dims(x, x2);
    switch (spec.family) {
    case KernelFamily::Linear: {
        if (value) *value += weight * x.dot(x2);
        if (grad) grad->noalias() += weight * x2;
        // Hessian is identically zero.
        break;
    }
    case KernelFamily::Polynomial: {
        const double base = spec.scale_p * x.dot(x2) + spec.offset_a;
        const double deg = spec.degree;
        const double p = spec.scale_p;
        if (value) *value += weight * pow_checked(base, deg);
        if (grad) {
            const double c = deg * p * pow_checked(base, deg - 1.0);
            grad->noalias() += (weight * c) * x2;
        }
        if (hess) {
            const double c2 = deg * (deg - 1.0) * p * p;
            if (c2 != 0.0) { // degree == 1 keeps the Hessian zero without touching base^(deg-2)
                const double c = c2 * pow_checked(base, deg - 2.0);
                hess->noalias() += (weight * c) * (x2 * x2.transpose());
            }
        }
        break;
    }
    case KernelFamily::Rbf: {
        const Vector diff = x - x2;
        const double sq = diff.squaredNorm();
        const double g = spec.gamma;
        const double e = std::exp(-g * sq);
        if (value) *value += weight * e;
        if (grad) grad->noalias() += (-2.0 * g * e * weight) * diff;
        if (hess) {
            hess->noalias() += (4.0 * g * g * e * weight) * (diff * diff.transpose());
            hess->diagonal().array() += -2.0 * g * e * weight;
        }
        break;
    }
    }
}

double kernel_value(const KernelSpec& spec, const Vector& x, const Vector& x2) {
    double v = 0.0;
    kernel_accumulate(spec, x, x2, 1.0, &v, nullptr, nullptr);
    return v;
}

Vector kernel_grad_first(const KernelSpec& spec, const Vector& x, const Vector& x2) {
    Vector g = Vector::Zero(x.size());
    kernel_accumulate(spec, x, x2, 1.0, nullptr, &g, nullptr);
    return g;
}

Matrix kernel_hess_first(const KernelSpec& spec, const Vector& x, const Vector& x2) {
    check_dims(x, x2);
    Matrix h = Matrix::Zero(x.size(), x.size());
    kernel_accumulate(spec, x, x2, 1.0, nullptr, nullptr, &h);
    return h;
}

} // namespace ksvm
