#ifndef KSVM_TRAINER_HPP
#define KSVM_TRAINER_HPP

#include "ksvm/types.hpp"

namespace ksvm {

struct TrainConfig {
    double c_penalty = 1.0; // box constraint C of the L1-loss dual
    double kkt_tol = 1e-6;  // maximal-violating-pair gap at which training stops
    int max_passes = 1000000; // budget of pairwise optimization steps
    long seed = 0;            // reserved for tie-breaking; selection is deterministic

    void validate() const {
        if (!(c_penalty > 0.0)) throw InvalidInput("c_penalty must be positive");
        if (!(kkt_tol > 0.0)) throw InvalidInput("kkt_tol must be positive");
        if (max_passes < 1) throw InvalidInput("max_passes must be >= 1");
    }
};

/// Training ran out of its iteration budget. Carries the best iterate so the
/// caller can inspect or keep it.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& msg, SvmModel best)
        : Error(msg), best_(std::move(best)) {}
    const SvmModel& best_model() const { return best_; }

private:
    SvmModel best_;
};

/// Dual variables lambda (one per training sample) of the C-SVC problem,
/// solved by sequential minimal optimization on maximal violating pairs.
/// Guarantees 0 <= lambda_i <= C and sum lambda_i y_i = 0 exactly.
Vector solve_dual(const Dataset& data, const KernelSpec& kernel, const TrainConfig& cfg);

/// Bias averaged over all support vectors S = {i : lambda_i > 1e-8}:
/// b = (1/|S|) sum_{s in S} (y_s - sum_{j in S} lambda_j y_j K(x_s, x_j)).
double compute_bias(const Vector& lambdas, const Dataset& data, const KernelSpec& kernel);

/// Train a binary kernel SVM in the dual, keeping only support vectors.
SvmModel train(const Dataset& data, const KernelSpec& kernel, const TrainConfig& cfg);

/// Support-vector threshold: lambda_i above this counts as "in S".
inline constexpr double kSupportVectorThreshold = 1e-8;

} // namespace ksvm

#endif
