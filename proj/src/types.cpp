#include "ksvm/types.hpp"

#include "ksvm/kernels.hpp"

namespace ksvm {

double decision_value(const SvmModel& model, const Vector& x) {
    if (x.size() != model.dimension())
        throw DimensionError("input has dimension " + std::to_string(x.size()) +
                             ", model expects " + std::to_string(model.dimension()));
    double s = 0.0;
    for (Index i = 0; i < model.num_support_vectors(); ++i)
        kernel_accumulate(model.kernel, x, model.support_vectors[static_cast<size_t>(i)],
                          model.dual_coeffs[i], &s, nullptr, nullptr);
    return s + model.bias;
}

int predicted_label(const SvmModel& model, const Vector& x) {
    return sign_pm(decision_value(model, x));
}

Vector explicit_weight(const SvmModel& model) {
    if (model.kernel.family != KernelFamily::Linear)
        throw InvalidInput("explicit_weight requires a linear kernel");
    Vector w = Vector::Zero(model.dimension());
    for (Index i = 0; i < model.num_support_vectors(); ++i)
        w.noalias() += model.dual_coeffs[i] * model.support_vectors[static_cast<size_t>(i)];
    return w;
}

} // namespace ksvm
