#ifndef KSVM_TYPES_HPP
#define KSVM_TYPES_HPP

#include <Eigen/Dense>
#include <vector>

#include "ksvm/errors.hpp"

namespace ksvm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// sign with the tie broken upward: sign(0) = +1. The evaluation pipeline
/// needs a total function.
inline int sign_pm(double t) { return t < 0.0 ? -1 : 1; }

struct Sample {
    Vector features;
    int label = 1; // -1 or +1
};

/// Labeled samples sharing one feature dimension. Training and seeding
/// additionally require both classes present; plain containers (single-class
/// eval sets, single-sample probes) are legal.
class Dataset {
public:
    Dataset() = default;
    explicit Dataset(Index dimension) : dimension_(dimension) {
        if (dimension <= 0) throw InvalidInput("dataset dimension must be positive");
    }

    void add(Vector features, int label) {
        if (features.size() != dimension_)
            throw DimensionError("sample has dimension " + std::to_string(features.size()) +
                                 ", dataset expects " + std::to_string(dimension_));
        if (label != 1 && label != -1)
            throw InvalidInput("label must be +1 or -1, got " + std::to_string(label));
        samples_.push_back(Sample{std::move(features), label});
    }

    Index dimension() const { return dimension_; }
    Index size() const { return static_cast<Index>(samples_.size()); }
    bool empty() const { return samples_.empty(); }
    const Sample& operator[](Index i) const { return samples_[static_cast<size_t>(i)]; }
    const std::vector<Sample>& samples() const { return samples_; }

    bool has_both_classes() const {
        bool pos = false, neg = false;
        for (const auto& s : samples_) (s.label > 0 ? pos : neg) = true;
        return pos && neg;
    }

    /// Preconditions shared by the trainer and the seed construction.
    void require_trainable() const {
        if (size() < 2) throw InvalidInput("need at least 2 samples, got " + std::to_string(size()));
        if (!has_both_classes()) throw InvalidInput("both classes must be present");
    }

private:
    std::vector<Sample> samples_;
    Index dimension_ = 0;
};

enum class KernelFamily { Linear, Polynomial, Rbf };

/// Kernel family plus its hyperparameters. Parameters not used by the
/// family are ignored. The polynomial kernel is (p * <x,x'> + a)^degree
/// with a positive real exponent.
struct KernelSpec {
    KernelFamily family = KernelFamily::Linear;
    double gamma = 1.0;   // rbf
    double scale_p = 1.0; // polynomial p
    double offset_a = 0.0; // polynomial a
    double degree = 3.0;  // polynomial exponent

    static KernelSpec linear() { return KernelSpec{}; }
    static KernelSpec rbf(double gamma) {
        KernelSpec k;
        k.family = KernelFamily::Rbf;
        k.gamma = gamma;
        k.validate();
        return k;
    }
    static KernelSpec polynomial(double p, double a, double degree) {
        KernelSpec k;
        k.family = KernelFamily::Polynomial;
        k.scale_p = p;
        k.offset_a = a;
        k.degree = degree;
        k.validate();
        return k;
    }

    void validate() const {
        if (family == KernelFamily::Rbf && !(gamma > 0.0))
            throw InvalidInput("rbf kernel requires gamma > 0");
        if (family == KernelFamily::Polynomial) {
            if (!(scale_p > 0.0)) throw InvalidInput("polynomial kernel requires p > 0");
            if (!(degree > 0.0)) throw InvalidInput("polynomial kernel requires degree > 0");
        }
    }
};

/// Trained dual-form binary SVM. dual_coeffs[i] stores the signed product
/// lambda_i * y_i (the libsvm sv_coef convention); the support vector's
/// label is recovered as its sign.
struct SvmModel {
    std::vector<Vector> support_vectors;
    Vector dual_coeffs;
    double bias = 0.0;
    KernelSpec kernel;
    double epsilon_default = 1e-5;

    Index dimension() const {
        return support_vectors.empty() ? 0 : support_vectors.front().size();
    }
    Index num_support_vectors() const { return static_cast<Index>(support_vectors.size()); }

    void validate() const {
        if (support_vectors.empty()) throw InvalidInput("model has no support vectors");
        if (dual_coeffs.size() != num_support_vectors())
            throw InvalidInput("dual_coeffs size does not match support vector count");
        const Index d = dimension();
        for (const auto& sv : support_vectors)
            if (sv.size() != d) throw DimensionError("support vectors have inconsistent dimensions");
        for (Index i = 0; i < dual_coeffs.size(); ++i)
            if (dual_coeffs[i] == 0.0)
                throw InvalidInput("dual coefficient " + std::to_string(i) + " is zero");
        kernel.validate();
        if (!(epsilon_default > 0.0)) throw InvalidInput("epsilon_default must be positive");
    }
};

/// Raw decision score sum_i dual_coeffs[i] * K(x, sv_i) + bias.
double decision_value(const SvmModel& model, const Vector& x);

/// sign of the decision value, with sign(0) = +1.
int predicted_label(const SvmModel& model, const Vector& x);

/// For the linear kernel only: the explicit primal weight sum_i coeff_i * sv_i.
Vector explicit_weight(const SvmModel& model);

struct AttackConfig {
    double epsilon = 1e-5;
    double residual_tol = 1e-8;
    int max_iterations = 200;
    int max_restarts = 4;
    double mu_init = 1e-3;
    double step_init_scale = 0.9;

    void validate() const {
        if (!(epsilon > 0.0)) throw InvalidInput("epsilon must be positive");
        if (!(residual_tol > 0.0)) throw InvalidInput("residual_tol must be positive");
        if (max_iterations < 1) throw InvalidInput("max_iterations must be >= 1");
        if (max_restarts < 0) throw InvalidInput("max_restarts must be >= 0");
        if (!(mu_init > 0.0)) throw InvalidInput("mu_init must be positive");
        if (!(step_init_scale > 0.0 && step_init_scale <= 1.0))
            throw InvalidInput("step_init_scale must lie in (0, 1]");
    }
};

struct AttackResult {
    Vector perturbation;
    double multiplier = 0.0;    // recovered as |mu|, always >= 0
    double residual_norm = 0.0; // inf-norm of the KKT residual at the solution
    int iterations = 0;
    int restarts_used = 0;
    bool flipped = false;
    double perturbation_norm = 0.0; // ||r||_2
};

} // namespace ksvm

#endif
