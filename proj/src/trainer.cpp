#include "ksvm/trainer.hpp"

#include <cmath>
#include <limits>

#include "ksvm/kernels.hpp"

namespace ksvm {

namespace {

constexpr double kTau = 1e-12; // floor for the pairwise curvature

Matrix gram_matrix(const Dataset& data, const KernelSpec& kernel) {
    const Index m = data.size();
    Matrix k(m, m);
    for (Index i = 0; i < m; ++i) {
        for (Index j = 0; j <= i; ++j) {
            const double v = kernel_value(kernel, data[i].features, data[j].features);
            k(i, j) = v;
            k(j, i) = v;
        }
    }
    return k;
}

SvmModel assemble_model(const Vector& lambdas, const Dataset& data, const KernelSpec& kernel,
                        double bias) {
    SvmModel model;
    model.kernel = kernel;
    model.bias = bias;
    std::vector<double> coeffs;
    for (Index i = 0; i < data.size(); ++i) {
        if (lambdas[i] > kSupportVectorThreshold) {
            model.support_vectors.push_back(data[i].features);
            coeffs.push_back(lambdas[i] * data[i].label);
        }
    }
    model.dual_coeffs = Eigen::Map<const Vector>(coeffs.data(), static_cast<Index>(coeffs.size()));
    return model;
}

} // namespace

Vector solve_dual(const Dataset& data, const KernelSpec& kernel, const TrainConfig& cfg) {
    data.require_trainable();
    kernel.validate();
    cfg.validate();

    const Index m = data.size();
    const double c = cfg.c_penalty;
    const Matrix k = gram_matrix(data, kernel);
    Vector y(m);
    for (Index i = 0; i < m; ++i) y[i] = data[i].label;

    // minimize 1/2 a'Qa - e'a with Q_ij = y_i y_j K_ij, 0 <= a <= C, y'a = 0
    Vector alpha = Vector::Zero(m);
    Vector grad = Vector::Constant(m, -1.0); // Q*alpha - e at alpha = 0

    for (int pass = 0; pass < cfg.max_passes; ++pass) {
        // maximal violating pair
        Index i = -1, j = -1;
        double up_max = -std::numeric_limits<double>::infinity();
        double low_min = std::numeric_limits<double>::infinity();
        for (Index t = 0; t < m; ++t) {
            const double v = -y[t] * grad[t];
            const bool in_up = (y[t] > 0 && alpha[t] < c) || (y[t] < 0 && alpha[t] > 0);
            const bool in_low = (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < c);
            if (in_up && v > up_max) {
                up_max = v;
                i = t;
            }
            if (in_low && v < low_min) {
                low_min = v;
                j = t;
            }
        }
        if (i < 0 || j < 0 || up_max - low_min <= cfg.kkt_tol) return alpha;

        // move along d = y_i e_i - y_j e_j, which keeps y'a constant;
        // curvature along d is K_ii + K_jj - 2 K_ij for any label pattern
        const double quad = std::max(k(i, i) + k(j, j) - 2.0 * k(i, j), kTau);
        double step = (up_max - low_min) / quad;

        double step_hi = std::numeric_limits<double>::infinity();
        double step_lo = -std::numeric_limits<double>::infinity();
        auto tighten = [&](double lo, double hi) {
            step_lo = std::max(step_lo, lo);
            step_hi = std::min(step_hi, hi);
        };
        if (y[i] > 0) tighten(-alpha[i], c - alpha[i]);
        else tighten(alpha[i] - c, alpha[i]);
        if (y[j] > 0) tighten(alpha[j] - c, alpha[j]);
        else tighten(-alpha[j], c - alpha[j]);
        step = std::min(std::max(step, step_lo), step_hi);

        // snap to the box and derive deltas from the snapped values so the
        // cached gradient stays consistent with alpha
        const double alpha_i_new = std::min(std::max(alpha[i] + y[i] * step, 0.0), c);
        const double alpha_j_new = std::min(std::max(alpha[j] - y[j] * step, 0.0), c);
        const double delta_i = alpha_i_new - alpha[i];
        const double delta_j = alpha_j_new - alpha[j];
        alpha[i] = alpha_i_new;
        alpha[j] = alpha_j_new;

        for (Index t = 0; t < m; ++t)
            grad[t] += y[t] * (y[i] * k(t, i) * delta_i + y[j] * k(t, j) * delta_j);
    }

    SvmModel best;
    try {
        const double bias = compute_bias(alpha, data, kernel);
        best = assemble_model(alpha, data, kernel, bias);
    } catch (const Error&) {
        // best-effort model; leave it empty if no support vectors emerged
    }
    throw ConvergenceError("training did not converge within " +
                               std::to_string(cfg.max_passes) + " passes",
                           std::move(best));
}

double compute_bias(const Vector& lambdas, const Dataset& data, const KernelSpec& kernel) {
    if (lambdas.size() != data.size())
        throw InvalidInput("lambda vector size does not match dataset size");
    std::vector<Index> support;
    for (Index i = 0; i < lambdas.size(); ++i)
        if (lambdas[i] > kSupportVectorThreshold) support.push_back(i);
    if (support.empty()) throw InvalidInput("no support vectors: empty S");

    double b = 0.0;
    for (Index s : support) {
        double val = 0.0;
        for (Index j : support)
            val += lambdas[j] * data[j].label *
                   kernel_value(kernel, data[s].features, data[j].features);
        b += data[s].label - val;
    }
    return b / static_cast<double>(support.size());
}

SvmModel train(const Dataset& data, const KernelSpec& kernel, const TrainConfig& cfg) {
    const Vector lambdas = solve_dual(data, kernel, cfg);
    const double bias = compute_bias(lambdas, data, kernel);
    SvmModel model = assemble_model(lambdas, data, kernel, bias);
    model.validate();
    return model;
}

} // namespace ksvm
