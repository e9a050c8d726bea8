#ifndef KSVM_ATTACK_HPP
#define KSVM_ATTACK_HPP

#include <vector>

#include "ksvm/kkt.hpp"
#include "ksvm/types.hpp"

namespace ksvm {

/// A strictly feasible starting point r0 = x_{i0} - x_hat built from a
/// correctly classified training point of the target class.
struct FeasibleSeed {
    Vector r0;
    Index source_index = -1;
    double distance = 0.0; // ||x_{i0} - x_hat||_2
};

/// Every restart failed. Carries the best (lowest residual) iterate.
class AttackFailure : public Error {
public:
    AttackFailure(const std::string& msg, AttackResult best)
        : Error(msg), best_(std::move(best)) {}
    const AttackResult& best_result() const { return best_; }

private:
    AttackResult best_;
};

/// Margin guaranteeing a nonempty feasible set: half the distance of the
/// best correctly classified sample of the target class to the boundary.
/// Positive branch: eps = -c_bar/2 with c_bar = max decision value over
/// correctly classified negatives; Negative branch mirrored.
double calibrate_epsilon(const SvmModel& model, const Dataset& data, Branch branch);

/// All strictly feasible seeds for this margin, sorted by distance to x_hat
/// (zero-distance candidates are skipped). Empty when none qualify.
std::vector<FeasibleSeed> seed_candidates(const SvmModel& model, const Dataset& data,
                                          const Vector& x_hat, double eps, Branch branch);

/// Nearest strictly feasible seed; throws InfeasibleSeedError when no
/// training point qualifies for this margin.
FeasibleSeed make_seed(const SvmModel& model, const Dataset& data, const Vector& x_hat,
                       double eps, Branch branch);

/// Full attack on one sample: branch selection from the unperturbed
/// prediction, seeded multi-start dogleg solve of the root system, |mu|
/// recovery, and flip verification. Throws AttackFailure when every restart
/// fails; the failure carries the best iterate.
AttackResult attack_sample(const SvmModel& model, const Vector& x_hat,
                           const AttackConfig& cfg, const Dataset& data_for_seeding);

/// Closed-form minimal perturbation for the linear kernel:
/// r = -sign(f) (|f| + eps) w / ||w||^2, so the perturbed decision value is
/// exactly -sign(f) * eps. Used as the oracle for the solved route.
Vector closed_form_linear(const SvmModel& model, const Vector& x_hat, double eps);

/// Local-minimality probe: perturb r_star along random tangent directions
/// (delta = 1e-3 ||r_star||), project back onto the constraint manifold by
/// 1-D root finding along the decision gradient, and count directions whose
/// projected norm is >= ||r_star|| - 1e-6. Returns the number passing.
int minimality_probe(const SvmModel& model, const Vector& x_hat, double eps, Branch branch,
                     const Vector& r_star, int num_directions, unsigned rng_seed);

} // namespace ksvm

#endif
