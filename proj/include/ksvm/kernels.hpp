#ifndef KSVM_KERNELS_HPP
#define KSVM_KERNELS_HPP

#include "ksvm/types.hpp"

namespace ksvm {

/// K(x, x2) for the spec'd family.
double kernel_value(const KernelSpec& spec, const Vector& x, const Vector& x2);

/// Gradient of K with respect to its first argument, evaluated at (x, x2).
Vector kernel_grad_first(const KernelSpec& spec, const Vector& x, const Vector& x2);

/// Hessian of K with respect to its first argument.
Matrix kernel_hess_first(const KernelSpec& spec, const Vector& x, const Vector& x2);

/// Fused evaluation: value, gradient and Hessian share one pass over the
/// inputs (one squared distance for rbf, one inner product for the others).
/// Null outputs are skipped. hess, when requested, is accumulated as
/// hess += weight * (kernel Hessian); value and grad are likewise
/// accumulated with the same weight, so one call folds a support vector's
/// contribution into running sums.
void kernel_accumulate(const KernelSpec& spec, const Vector& x, const Vector& x2,
                       double weight, double* value, Vector* grad, Matrix* hess);

} // namespace ksvm

#endif
