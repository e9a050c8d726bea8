#include <doctest.h>

#include <cstring>

#include "ksvm/kernels.hpp"
#include "ksvm/kkt.hpp"
#include "oracles.hpp"

using namespace ksvm;

namespace {

KktPoint random_point(std::mt19937& rng, Index d) {
    KktPoint p;
    p.r = oracle::random_vector(rng, d, -0.8, 0.8);
    p.mu = oracle::uniform(rng, -2.0, 2.0);
    return p;
}

} // namespace

TEST_SUITE("kkt") {

TEST_CASE("branch selection follows the sign of the decision value") {
    CHECK(branch_for(0.3) == Branch::Positive);
    CHECK(branch_for(-0.3) == Branch::Negative);
    // sign(0) = +1 keeps the choice total
    CHECK(branch_for(0.0) == Branch::Positive);
    CHECK(std::string(to_string(Branch::Positive)) == "positive");
    CHECK(std::string(to_string(Branch::Negative)) == "negative");
}

TEST_CASE("flat packing round-trips") {
    KktPoint p;
    p.r = Vector(2);
    p.r << 3, -4;
    p.mu = 7;
    const KktPoint q = KktPoint::from_flat(p.flat());
    CHECK(q.r == p.r);
    CHECK(q.mu == p.mu);
}

TEST_CASE("model expansion agrees with per-vector kernel calls") {
    std::mt19937 rng(51);
    const SvmModel m = oracle::random_model(rng, 4, 6, KernelFamily::Rbf);
    const Vector x = oracle::random_vector(rng, 4);

    double value = 0.0;
    Vector grad = Vector::Zero(4);
    Matrix hess = Matrix::Zero(4, 4);
    for (Index i = 0; i < m.num_support_vectors(); ++i) {
        const Vector& sv = m.support_vectors[static_cast<size_t>(i)];
        value += m.dual_coeffs[i] * kernel_value(m.kernel, x, sv);
        grad += m.dual_coeffs[i] * kernel_grad_first(m.kernel, x, sv);
        hess += m.dual_coeffs[i] * kernel_hess_first(m.kernel, x, sv);
    }

    const ModelExpansion e = expand_model(m, x, true);
    CHECK(std::abs(e.value - value) <= 1e-12);
    CHECK((e.grad - grad).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((e.hess - hess).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(std::abs((e.value + m.bias) - decision_value(m, x)) <= 1e-14);
}

TEST_CASE("residual blocks match their definition") {
    std::mt19937 rng(53);
    for (int t = 0; t < 20; ++t) {
        const SvmModel m = oracle::random_model(rng, 3, 5, KernelFamily::Polynomial);
        const Vector x_hat = oracle::random_vector(rng, 3);
        const KktPoint p = random_point(rng, 3);
        const double eps = 1e-3;

        const ModelExpansion e = expand_model(m, x_hat + p.r, false);
        const double abs_mu = std::abs(p.mu);

        const Vector f_pos = residual(m, x_hat, eps, Branch::Positive, p);
        CHECK((f_pos.head(3) - (2.0 * p.r + abs_mu * e.grad)).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK(std::abs(f_pos[3] - (e.value + m.bias + eps)) <= 1e-12);

        const Vector f_neg = residual(m, x_hat, eps, Branch::Negative, p);
        CHECK((f_neg.head(3) - (2.0 * p.r - abs_mu * e.grad)).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK(std::abs(f_neg[3] - (-e.value - m.bias + eps)) <= 1e-12);
    }
}

TEST_CASE("residual is even in the multiplier variable, bitwise") {
    std::mt19937 rng(59);
    for (auto family :
         {KernelFamily::Linear, KernelFamily::Polynomial, KernelFamily::Rbf}) {
        for (auto branch : {Branch::Positive, Branch::Negative}) {
            const SvmModel m = oracle::random_model(rng, 4, 5, family);
            const Vector x_hat = oracle::random_vector(rng, 4);
            KktPoint p = random_point(rng, 4);

            const Vector f_plus = residual(m, x_hat, 1e-4, branch, p);
            p.mu = -p.mu;
            const Vector f_minus = residual(m, x_hat, 1e-4, branch, p);
            REQUIRE(f_plus.size() == f_minus.size());
            CHECK(std::memcmp(f_plus.data(), f_minus.data(),
                              sizeof(double) * static_cast<size_t>(f_plus.size())) == 0);
        }
    }
}

TEST_CASE("analytic jacobian matches finite differences across families and branches") {
    std::mt19937 rng(61);
    for (auto family :
         {KernelFamily::Linear, KernelFamily::Polynomial, KernelFamily::Rbf}) {
        for (int t = 0; t < 30; ++t) {
            const SvmModel m = oracle::random_model(rng, 4, 5, family);
            const Vector x_hat = oracle::random_vector(rng, 4);
            const KktPoint p = random_point(rng, 4);
            const Branch branch = (t % 2 == 0) ? Branch::Positive : Branch::Negative;
            const double eps = 1e-3;

            const Matrix analytic = jacobian(m, x_hat, eps, branch, p);
            const Matrix fd = oracle::fd_jacobian(
                [&](const Vector& flat) {
                    return residual(m, x_hat, eps, branch, KktPoint::from_flat(flat));
                },
                p.flat());
            CHECK(oracle::rel_error(analytic, fd) <= 1e-5);
        }
    }
}

TEST_CASE("jacobian structure: last row and multiplier column") {
    std::mt19937 rng(67);
    const SvmModel m = oracle::random_model(rng, 3, 4, KernelFamily::Rbf);
    const Vector x_hat = oracle::random_vector(rng, 3);
    KktPoint p = random_point(rng, 3);
    p.mu = 0.75;

    for (auto branch : {Branch::Positive, Branch::Negative}) {
        const Matrix j = jacobian(m, x_hat, 1e-3, branch, p);
        REQUIRE(j.rows() == 4);
        REQUIRE(j.cols() == 4);
        // d(constraint row)/d(mu) is identically zero
        CHECK(j(3, 3) == 0.0);
        // d(stationarity)/d(mu) = branch_sign * sign(mu) * g
        const ModelExpansion e = expand_model(m, x_hat + p.r, false);
        const double s = (branch == Branch::Positive) ? 1.0 : -1.0;
        CHECK((j.block(0, 3, 3, 1) - s * e.grad).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("jacobian at mu = 0 uses the upward sign convention") {
    std::mt19937 rng(71);
    const SvmModel m = oracle::random_model(rng, 3, 4, KernelFamily::Linear);
    const Vector x_hat = oracle::random_vector(rng, 3);
    KktPoint p;
    p.r = oracle::random_vector(rng, 3);
    p.mu = 0.0;

    const Matrix j = jacobian(m, x_hat, 1e-3, Branch::Positive, p);
    const ModelExpansion e = expand_model(m, x_hat + p.r, false);
    // sign(0) = +1, so the mu column equals +g exactly
    CHECK((j.block(0, 3, 3, 1) - e.grad).cwiseAbs().maxCoeff() == 0.0);
    CHECK(j.allFinite());
}

TEST_CASE("first-order conditions hold at a hand-computed linear optimum") {
    // f(x) = x on the line; attacking x_hat = 1 moves to x = -eps, so
    // r* = -(1 + eps) and the stationarity equation gives mu* = 2(1 + eps).
    SvmModel m;
    Vector sv_pos(1), sv_neg(1);
    sv_pos << 1;
    sv_neg << -1;
    m.support_vectors = {sv_pos, sv_neg};
    m.dual_coeffs = Vector(2);
    m.dual_coeffs << 0.5, -0.5;
    m.bias = 0.0;
    m.kernel = KernelSpec::linear();

    Vector x_hat(1);
    x_hat << 1;
    const double eps = 0.25;
    Vector r_star(1);
    r_star << -(1.0 + eps);
    const double mu_star = 2.0 * (1.0 + eps);

    const auto diag = check_kkt(m, x_hat, eps, Branch::Positive, r_star, mu_star, 1e-12);
    CHECK(diag.ok);
    CHECK(diag.stationarity <= 1e-12);
    CHECK(diag.complementarity <= 1e-12);
    CHECK(diag.feasibility == 0.0);
    CHECK(diag.multiplier_sign == 0.0);
    CHECK(diag.constraint_value == doctest::Approx(0.0).epsilon(1e-12));

    // perturbing the point breaks the conditions
    Vector r_bad = r_star;
    r_bad[0] += 0.01;
    CHECK_FALSE(check_kkt(m, x_hat, eps, Branch::Positive, r_bad, mu_star, 1e-10).ok);

    // a negative multiplier is flagged even at the right point
    const auto neg = check_kkt(m, x_hat, eps, Branch::Positive, r_star, -mu_star, 1e-10);
    CHECK_FALSE(neg.ok);
    CHECK(neg.multiplier_sign > 0.0);
}

TEST_CASE("kkt check flags an infeasible point") {
    SvmModel m;
    Vector sv(1);
    sv << 1;
    m.support_vectors = {sv};
    m.dual_coeffs = Vector(1);
    m.dual_coeffs << 1;
    m.bias = 0.0;
    m.kernel = KernelSpec::linear();

    Vector x_hat(1);
    x_hat << 1;
    // r = 0 leaves f = 1 > -eps: infeasible for the positive branch
    const auto diag = check_kkt(m, x_hat, 1e-5, Branch::Positive, Vector::Zero(1), 0.0, 1e-8);
    CHECK_FALSE(diag.ok);
    CHECK(diag.feasibility > 0.0);
}

TEST_CASE("residual and jacobian validate dimensions") {
    std::mt19937 rng(73);
    const SvmModel m = oracle::random_model(rng, 3, 4, KernelFamily::Linear);
    KktPoint p;
    p.r = Vector::Zero(2); // wrong size
    p.mu = 0.1;
    CHECK_THROWS_AS(residual(m, Vector::Zero(3), 1e-3, Branch::Positive, p), DimensionError);
    CHECK_THROWS_AS(residual(m, Vector::Zero(2), 1e-3, Branch::Positive, p), DimensionError);
}

} // TEST_SUITE
