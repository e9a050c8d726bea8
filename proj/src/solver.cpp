#include "ksvm/solver.hpp"

#include <cmath>

namespace ksvm {

const char* to_string(SolveStatus s) {
    switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIterations: return "max-iterations";
    case SolveStatus::StalledStep: return "stalled-step";
    case SolveStatus::SingularModel: return "singular-model";
    }
    return "unknown";
}

namespace {

constexpr double kAcceptRatio = 1e-4;
constexpr double kExpandRatio = 0.75;
constexpr double kShrinkRatio = 0.25;
constexpr double kShrinkFactor = 0.25;
constexpr double kExpandFactor = 2.0;
constexpr double kMinRadius = 1e-14;
constexpr double kMaxConditionRcond = 1e-12; // rcond below this counts as singular

// Blend the Gauss-Newton and Cauchy steps inside the trust radius.
Vector dogleg_step(const Vector& newton, const Vector& cauchy, double radius) {
    const double n_norm = newton.norm();
    if (n_norm <= radius) return newton;
    const double c_norm = cauchy.norm();
    if (c_norm >= radius) return (radius / c_norm) * cauchy;
    // ||cauchy + tau * (newton - cauchy)|| = radius for tau in (0, 1)
    const Vector d = newton - cauchy;
    const double a = d.squaredNorm();
    const double b = cauchy.dot(d);
    const double c = cauchy.squaredNorm() - radius * radius;
    const double tau = (-b + std::sqrt(std::max(0.0, b * b - a * c))) / a;
    return cauchy + tau * d;
}

} // namespace

SolveReport solve_root(const ResidualFn& residual_fn, const JacobianFn& jacobian_fn,
                       const Vector& x0, double tol, int max_iter) {
    if (!(tol > 0.0)) throw InvalidInput("solve_root: tol must be positive");
    if (max_iter < 1) throw InvalidInput("solve_root: max_iter must be >= 1");
    if (!x0.allFinite()) throw InvalidInput("solve_root: x0 is not finite");

    const Index n = x0.size();
    Vector x = x0;
    Vector f = residual_fn(x);
    if (f.size() != n)
        throw InvalidInput("solve_root: residual dimension " + std::to_string(f.size()) +
                           " does not match variable dimension " + std::to_string(n));
    if (!f.allFinite()) throw InvalidInput("solve_root: residual is not finite at x0");

    SolveReport report;
    report.solution = x;
    report.residual_inf_norm = f.lpNorm<Eigen::Infinity>();
    if (report.residual_inf_norm <= tol) {
        report.status = SolveStatus::Converged;
        return report;
    }

    double merit = 0.5 * f.squaredNorm(); // phi = 1/2 ||F||^2

    // Elliptical trust region: each variable is measured by the largest
    // Jacobian column norm seen so far, so badly scaled variables (for this
    // problem the multiplier can be several orders larger than the
    // perturbation) still take full-size steps in their own units.
    Vector scale = Vector::Ones(n);
    double radius = 0.0; // set from the first Jacobian

    Matrix jac;
    Vector newton(n), newton_s(n), cauchy_s(n), grad(n);
    bool model_fresh = false; // newton/cauchy valid for the current x

    for (int iter = 1; iter <= max_iter; ++iter) {
        report.iterations = iter;

        if (!model_fresh) {
            jac = jacobian_fn(x);
            if (jac.rows() != n || jac.cols() != n || !jac.allFinite()) {
                report.status = SolveStatus::SingularModel;
                return report;
            }
            grad.noalias() = jac.transpose() * f;

            // current column norms, so the metric follows the surface as it
            // steepens or flattens; a vanishing column keeps its last scale
            for (Index j = 0; j < n; ++j) {
                const double cn = jac.col(j).norm();
                if (cn > 0.0) scale[j] = cn;
            }
            if (iter == 1) radius = std::max(1.0, scale.cwiseProduct(x).norm());

            Eigen::FullPivLU<Matrix> lu(jac);
            bool ok = lu.isInvertible() && lu.rcond() > kMaxConditionRcond;
            if (ok) {
                newton = lu.solve(-f);
                ok = newton.allFinite();
            }
            if (!ok) {
                // Levenberg-Marquardt damped step for a near-singular Jacobian
                Matrix jtj = jac.transpose() * jac;
                const double damping =
                    std::max(1e-12, 1e-3 * jtj.diagonal().lpNorm<Eigen::Infinity>());
                jtj.diagonal() += damping * scale.cwiseProduct(scale);
                newton = Eigen::LLT<Matrix>(jtj).solve(-grad);
                if (!newton.allFinite()) {
                    report.status = SolveStatus::SingularModel;
                    return report;
                }
            }

            // steepest descent for the scaled variables z = D x: the merit
            // gradient is D^-1 J^T F and the curvature along it J D^-1 g_z
            const Vector grad_s = grad.cwiseQuotient(scale);
            const double grad_sq = grad_s.squaredNorm();
            const double jg_sq = (jac * grad_s.cwiseQuotient(scale)).squaredNorm();
            if (grad_sq == 0.0 || jg_sq == 0.0) {
                // stationary point of the merit function that is not a root
                report.status = SolveStatus::StalledStep;
                return report;
            }
            newton_s = scale.cwiseProduct(newton);
            cauchy_s = -(grad_sq / jg_sq) * grad_s;
            model_fresh = true;
        }

        const Vector step_s = dogleg_step(newton_s, cauchy_s, radius);
        const Vector step = step_s.cwiseQuotient(scale);
        const double predicted = merit - 0.5 * (f + jac * step).squaredNorm();

        const Vector x_trial = x + step;
        const Vector f_trial = residual_fn(x_trial);
        const bool trial_finite = f_trial.allFinite();
        const double merit_trial = trial_finite ? 0.5 * f_trial.squaredNorm() : merit;
        const double actual = merit - merit_trial;

        const double ratio =
            (trial_finite && predicted > 0.0) ? actual / predicted : -1.0;

        if (ratio > kAcceptRatio) {
            const double step_norm = step_s.norm();
            x = x_trial;
            f = f_trial;
            merit = merit_trial;
            model_fresh = false;

            report.solution = x;
            report.residual_inf_norm = f.lpNorm<Eigen::Infinity>();
            if (report.residual_inf_norm <= tol) {
                report.status = SolveStatus::Converged;
                return report;
            }
            if (ratio < kShrinkRatio)
                radius *= kShrinkFactor;
            else if (ratio > kExpandRatio && step_norm >= 0.99 * radius)
                radius *= kExpandFactor;
        } else {
            radius *= kShrinkFactor;
            if (radius < kMinRadius) {
                report.status = SolveStatus::StalledStep;
                return report;
            }
        }
    }

    report.status = SolveStatus::MaxIterations;
    return report;
}

} // namespace ksvm
