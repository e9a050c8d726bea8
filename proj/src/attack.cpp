#include "ksvm/attack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "ksvm/solver.hpp"

namespace ksvm {

namespace {

// target class on the given branch: the class the perturbed point must reach
int target_label(Branch branch) { return branch == Branch::Positive ? -1 : 1; }

// decision value qualifies as "correctly classified, strictly past the
// margin" for seeding: dv <= -2 eps on the Positive branch, dv >= 2 eps on
// the Negative branch
bool qualifies(Branch branch, double dv, double eps) {
    return branch == Branch::Positive ? dv <= -2.0 * eps : dv >= 2.0 * eps;
}

} // namespace

double calibrate_epsilon(const SvmModel& model, const Dataset& data, Branch branch) {
    const int want = target_label(branch);
    bool found = false;
    double best = 0.0; // c_bar: max dv over I_- (Positive) / min dv over I_+ (Negative)
    for (Index i = 0; i < data.size(); ++i) {
        const Sample& s = data[i];
        if (s.label != want) continue;
        const double dv = decision_value(model, s.features);
        if (sign_pm(dv) != s.label) continue; // misclassified, not usable
        if (!found || (branch == Branch::Positive ? dv > best : dv < best)) {
            best = dv;
            found = true;
        }
    }
    if (!found)
        throw CalibrationError(std::string("no correctly classified sample of class ") +
                               (want > 0 ? "+1" : "-1") + " to calibrate epsilon from");
    // dv = 0 is predicted +1 (sign(0) = +1), so a correctly classified
    // negative has dv < 0 strictly and eps > 0 follows; mirrored for +1.
    return branch == Branch::Positive ? -0.5 * best : 0.5 * best;
}

std::vector<FeasibleSeed> seed_candidates(const SvmModel& model, const Dataset& data,
                                          const Vector& x_hat, double eps, Branch branch) {
    if (x_hat.size() != data.dimension() || x_hat.size() != model.dimension())
        throw DimensionError("seed construction dimension mismatch");
    const int want = target_label(branch);
    std::vector<FeasibleSeed> seeds;
    for (Index i = 0; i < data.size(); ++i) {
        const Sample& s = data[i];
        if (s.label != want) continue;
        const double dv = decision_value(model, s.features);
        if (sign_pm(dv) != s.label) continue;
        if (!qualifies(branch, dv, eps)) continue;
        FeasibleSeed seed;
        seed.r0 = s.features - x_hat;
        seed.distance = seed.r0.norm();
        seed.source_index = i;
        if (seed.distance == 0.0) continue; // x_hat coincides with the candidate
        seeds.push_back(std::move(seed));
    }
    std::sort(seeds.begin(), seeds.end(), [](const FeasibleSeed& a, const FeasibleSeed& b) {
        return a.distance != b.distance ? a.distance < b.distance
                                        : a.source_index < b.source_index;
    });
    return seeds;
}

FeasibleSeed make_seed(const SvmModel& model, const Dataset& data, const Vector& x_hat,
                       double eps, Branch branch) {
    auto seeds = seed_candidates(model, data, x_hat, eps, branch);
    if (seeds.empty())
        throw InfeasibleSeedError("no training point is strictly feasible for eps = " +
                                  std::to_string(eps));
    return seeds.front();
}

Vector closed_form_linear(const SvmModel& model, const Vector& x_hat, double eps) {
    if (model.kernel.family != KernelFamily::Linear)
        throw InvalidInput("closed-form route requires a linear kernel");
    const Vector w = explicit_weight(model);
    const double w_sq = w.squaredNorm();
    if (w_sq == 0.0) throw InvalidInput("degenerate linear model: zero weight vector");
    const double f = decision_value(model, x_hat);
    if (f == 0.0) throw InvalidInput("sample sits exactly on the decision boundary");
    return (-sign_pm(f) * (std::abs(f) + eps) / w_sq) * w;
}

namespace {

struct SolveAttempt {
    KktPoint point;
    double residual_inf = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
};

// Full Newton steps from an already-converged iterate, keeping the best.
// Drives the residual toward machine precision so the multiplier-weighted
// complementarity check holds even when |mu| is large.
void polish(const SvmModel& model, const Vector& x_hat, double eps, Branch branch,
            SolveAttempt& attempt, int steps = 3) {
    for (int k = 0; k < steps; ++k) {
        const Vector f = residual(model, x_hat, eps, branch, attempt.point);
        const Matrix jac = jacobian(model, x_hat, eps, branch, attempt.point);
        Eigen::FullPivLU<Matrix> lu(jac);
        if (!lu.isInvertible()) return;
        const Vector flat = attempt.point.flat() + lu.solve(-f);
        if (!flat.allFinite()) return;
        const KktPoint candidate = KktPoint::from_flat(flat);
        const double res =
            residual(model, x_hat, eps, branch, candidate).lpNorm<Eigen::Infinity>();
        if (res >= attempt.residual_inf) return;
        attempt.point = candidate;
        attempt.residual_inf = res;
        attempt.iterations += 1;
    }
}

// Pull r onto the level set {f(x_hat + r) = target} by 1-D Newton along the
// current decision gradient. False when no progress is possible (vanishing
// gradient, e.g. far out on a flat kernel surface).
bool project_onto_level(const SvmModel& model, const Vector& x_hat, double target,
                        Vector& r) {
    for (int it = 0; it < 60; ++it) {
        const ModelExpansion e = expand_model(model, x_hat + r, false);
        const double val = e.value + model.bias - target;
        if (std::abs(val) <= 1e-13) return true;
        const double gn2 = e.grad.squaredNorm();
        if (gn2 == 0.0) return false;
        r -= (val / gn2) * e.grad;
    }
    const ModelExpansion e = expand_model(model, x_hat + r, false);
    return std::abs(e.value + model.bias - target) <= 1e-10;
}

// Fallback for solves the dogleg cannot finish within budget: strongly curved
// valleys where the decision surface flattens and the multiplier grows by
// orders of magnitude. Works on the geometry directly - find the level
// crossing bracketed along the anchor segment, minimize ||r||^2 on the level
// set by shrinking the tangential component of r with reprojection, recover
// the multiplier from stationarity, and polish on the square system. The
// anchor comes from a qualified seed, so f(x_hat + anchor) is strictly past
// the target while f(x_hat) is strictly on the other side.
SolveAttempt manifold_rescue(const SvmModel& model, const Vector& x_hat, double eps,
                             Branch branch, const Vector& anchor, const AttackConfig& cfg,
                             int budget) {
    SolveAttempt attempt;
    const double target = branch == Branch::Positive ? -eps : eps;

    Vector r = anchor;
    const double h_lo = decision_value(model, x_hat) - target;
    const double h_hi = decision_value(model, x_hat + anchor) - target;
    if (h_hi != 0.0 && (h_lo > 0.0) != (h_hi > 0.0)) {
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 120 && hi - lo > 1e-16; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double h = decision_value(model, x_hat + mid * anchor) - target;
            if (h == 0.0) {
                lo = hi = mid;
                break;
            }
            ((h > 0.0) == (h_lo > 0.0) ? lo : hi) = mid;
        }
        r = (0.5 * (lo + hi)) * anchor;
    }
    if (!project_onto_level(model, x_hat, target, r)) return attempt;

    double step = 1.0;
    for (int it = 0; it < budget; ++it) {
        ++attempt.iterations;
        const ModelExpansion e = expand_model(model, x_hat + r, false);
        const double gn2 = e.grad.squaredNorm();
        if (gn2 == 0.0) break;
        const Vector tangential = r - (r.dot(e.grad) / gn2) * e.grad;
        const double rn = r.norm();
        if (tangential.norm() <= 1e-12 * std::max(1.0, rn)) break;
        bool moved = false;
        for (int bt = 0; bt < 30; ++bt) {
            Vector trial = r - step * tangential;
            if (project_onto_level(model, x_hat, target, trial) && trial.norm() < rn) {
                r = std::move(trial);
                moved = true;
                step = std::min(1.0, 2.0 * step);
                break;
            }
            step *= 0.5;
        }
        if (!moved) break;
    }

    const ModelExpansion e = expand_model(model, x_hat + r, false);
    const double gn2 = e.grad.squaredNorm();
    if (gn2 == 0.0) return attempt;
    attempt.point.mu = 2.0 * std::abs(r.dot(e.grad)) / gn2;
    attempt.point.r = std::move(r);
    attempt.residual_inf =
        residual(model, x_hat, eps, branch, attempt.point).lpNorm<Eigen::Infinity>();
    polish(model, x_hat, eps, branch, attempt, 8);
    attempt.converged = attempt.residual_inf <= cfg.residual_tol;
    return attempt;
}

SolveAttempt run_solve(const SvmModel& model, const Vector& x_hat, double eps, Branch branch,
                       const Vector& r_init, const AttackConfig& cfg,
                       const Vector* rescue_anchor) {
    KktPoint start{r_init, cfg.mu_init};

    auto res_fn = [&](const Vector& v) {
        return residual(model, x_hat, eps, branch, KktPoint::from_flat(v));
    };
    auto jac_fn = [&](const Vector& v) {
        return jacobian(model, x_hat, eps, branch, KktPoint::from_flat(v));
    };

    // when a rescue anchor exists, reserve half the iteration budget for it
    const int dogleg_budget =
        rescue_anchor != nullptr ? std::max(1, cfg.max_iterations / 2) : cfg.max_iterations;
    const SolveReport report =
        solve_root(res_fn, jac_fn, start.flat(), cfg.residual_tol, dogleg_budget);

    SolveAttempt attempt;
    attempt.point = KktPoint::from_flat(report.solution);
    attempt.residual_inf = report.residual_inf_norm;
    attempt.iterations = report.iterations;
    attempt.converged = report.status == SolveStatus::Converged;
    if (attempt.converged) {
        polish(model, x_hat, eps, branch, attempt);
        return attempt;
    }

    const int remaining = cfg.max_iterations - report.iterations;
    if (rescue_anchor != nullptr && remaining > 0) {
        SolveAttempt rescue =
            manifold_rescue(model, x_hat, eps, branch, *rescue_anchor, cfg, remaining);
        rescue.iterations += attempt.iterations;
        if (rescue.converged || rescue.residual_inf < attempt.residual_inf) return rescue;
    }
    return attempt;
}

} // namespace

AttackResult attack_sample(const SvmModel& model, const Vector& x_hat,
                           const AttackConfig& cfg, const Dataset& data_for_seeding) {
    cfg.validate();
    if (x_hat.size() != model.dimension())
        throw DimensionError("attack input has dimension " + std::to_string(x_hat.size()) +
                             ", model expects " + std::to_string(model.dimension()));
    const double dv_hat = decision_value(model, x_hat);
    if (dv_hat == 0.0)
        throw InvalidInput("sample sits exactly on the decision boundary; no branch applies");
    const Branch branch = branch_for(dv_hat);
    const double eps = cfg.epsilon;

    std::vector<FeasibleSeed> seeds;
    if (!data_for_seeding.empty())
        seeds = seed_candidates(model, data_for_seeding, x_hat, eps, branch);

    // initialization plan: scaled seed, then the raw seed, walking outward
    // through seeds by distance; r = 0 is the last resort when nothing
    // qualifies. Each seeded attempt carries its seed as the rescue anchor.
    std::vector<Vector> inits;
    std::vector<const Vector*> anchors;
    for (const auto& seed : seeds) {
        inits.push_back(cfg.step_init_scale * seed.r0);
        anchors.push_back(&seed.r0);
        inits.push_back(seed.r0);
        anchors.push_back(&seed.r0);
    }
    if (inits.empty()) {
        inits.push_back(Vector::Zero(model.dimension()));
        anchors.push_back(nullptr);
    }

    const int max_attempts = std::min<int>(static_cast<int>(inits.size()), 1 + cfg.max_restarts);

    SolveAttempt best;
    int attempts_used = 0;
    for (int a = 0; a < max_attempts; ++a) {
        attempts_used = a + 1;
        SolveAttempt attempt = run_solve(model, x_hat, eps, branch, inits[static_cast<size_t>(a)],
                                         cfg, anchors[static_cast<size_t>(a)]);
        if (attempt.residual_inf < best.residual_inf) best = attempt;
        if (attempt.converged) {
            best = attempt;
            break;
        }
    }

    AttackResult result;
    result.perturbation = best.point.r;
    result.multiplier = std::abs(best.point.mu); // any solved mu maps to |mu|
    result.residual_norm = best.residual_inf;
    result.iterations = best.iterations;
    result.restarts_used = attempts_used - 1;
    result.perturbation_norm = best.point.r.norm();

    const double dv_after = decision_value(model, x_hat + best.point.r);
    const bool sign_flip = sign_pm(dv_after) != sign_pm(dv_hat);
    const bool kkt_ok =
        check_kkt(model, x_hat, eps, branch, best.point.r, result.multiplier,
                  10.0 * cfg.residual_tol)
            .ok;
    result.flipped = best.converged && sign_flip && kkt_ok;

    if (!best.converged)
        throw AttackFailure("attack did not converge after " + std::to_string(attempts_used) +
                                " attempt(s); best residual " +
                                std::to_string(best.residual_inf),
                            std::move(result));
    return result;
}

int minimality_probe(const SvmModel& model, const Vector& x_hat, double eps, Branch branch,
                     const Vector& r_star, int num_directions, unsigned rng_seed) {
    if (r_star.size() != model.dimension())
        throw DimensionError("minimality probe dimension mismatch");
    const Index d = model.dimension();
    const double r_norm = r_star.norm();
    const double delta = 1e-3 * r_norm;
    // constraint manifold: s(x_hat + r) + b = -eps (Positive) or +eps (Negative)
    const double target = branch == Branch::Positive ? -eps : eps;

    std::mt19937 rng(rng_seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    const Vector g_star = expand_model(model, x_hat + r_star, false).grad;

    int passing = 0;
    for (int k = 0; k < num_directions; ++k) {
        Vector u(d);
        for (Index i = 0; i < d; ++i) u[i] = normal(rng);
        // tangent to the constraint at r_star
        const double gn = g_star.squaredNorm();
        if (gn > 0.0) u -= (u.dot(g_star) / gn) * g_star;
        const double un = u.norm();
        if (un == 0.0) continue;
        u /= un;

        // project r_star + delta*u back onto the manifold: 1-D Newton along
        // the decision gradient direction at the displaced point
        Vector r = r_star + delta * u;
        bool projected = false;
        Vector dir = expand_model(model, x_hat + r, false).grad;
        if (dir.norm() == 0.0) continue;
        dir.normalize();
        for (int it = 0; it < 50; ++it) {
            const ModelExpansion e = expand_model(model, x_hat + r, false);
            const double val = e.value + model.bias - target;
            if (std::abs(val) <= 1e-12) {
                projected = true;
                break;
            }
            const double slope = e.grad.dot(dir);
            if (slope == 0.0) break;
            r -= (val / slope) * dir;
        }
        if (projected && r.norm() >= r_norm - 1e-6) ++passing;
    }
    return passing;
}

} // namespace ksvm
