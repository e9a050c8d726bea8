#include <doctest.h>

#include <cstring>

#include "ksvm/kernels.hpp"
#include "ksvm/types.hpp"
#include "oracles.hpp"

using namespace ksvm;

namespace {

Vector vec1(double a) {
    Vector v(1);
    v << a;
    return v;
}

// Hand-solved one-dimensional model: support vectors +-1 with dual weights
// +-0.5 and zero bias, i.e. f(x) = x under the linear kernel.
SvmModel toy_model() {
    SvmModel m;
    m.support_vectors = {vec1(1.0), vec1(-1.0)};
    m.dual_coeffs = Vector(2);
    m.dual_coeffs << 0.5, -0.5;
    m.bias = 0.0;
    m.kernel = KernelSpec::linear();
    return m;
}

} // namespace

TEST_SUITE("core") {

TEST_CASE("decision value of a single linear support vector") {
    SvmModel m;
    m.support_vectors = {vec1(1.0)};
    m.dual_coeffs = Vector(1);
    m.dual_coeffs << 1;
    m.bias = 0.0;
    m.kernel = KernelSpec::linear();

    CHECK(decision_value(m, vec1(0.0)) == 0.0);
    // sign(0) is defined as +1
    CHECK(predicted_label(m, vec1(0.0)) == 1);
}

TEST_CASE("decision value of the hand-solved toy model") {
    const SvmModel m = toy_model();
    CHECK(decision_value(m, vec1(1.0)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(decision_value(m, vec1(-0.25)) == doctest::Approx(-0.25));
    CHECK(predicted_label(m, vec1(-0.25)) == -1);
}

TEST_CASE("rbf model evaluated at its own support vector") {
    SvmModel m;
    Vector sv(2);
    sv << 0.5, -0.5;
    m.support_vectors = {sv};
    m.dual_coeffs = Vector(1);
    m.dual_coeffs << 1;
    m.bias = 0.0;
    m.kernel = KernelSpec::rbf(2.0);
    CHECK(decision_value(m, sv) == 1.0);
}

TEST_CASE("decision values are bitwise reproducible") {
    std::mt19937 rng(31);
    const SvmModel m = oracle::random_model(rng, 5, 7, KernelFamily::Rbf);
    const Vector x = oracle::random_vector(rng, 5);
    const double a = decision_value(m, x);
    const double b = decision_value(m, x);
    CHECK(std::memcmp(&a, &b, sizeof(double)) == 0);
}

TEST_CASE("explicit weight vector reproduces linear decision values") {
    std::mt19937 rng(37);
    for (int t = 0; t < 25; ++t) {
        const SvmModel m = oracle::random_model(rng, 4, 6, KernelFamily::Linear);
        const Vector w = explicit_weight(m);
        for (int k = 0; k < 5; ++k) {
            const Vector x = oracle::random_vector(rng, 4);
            const double direct = decision_value(m, x);
            const double via_w = w.dot(x) + m.bias;
            CHECK(std::abs(direct - via_w) <= 1e-10 * std::max(1.0, std::abs(direct)));
        }
    }
}

TEST_CASE("explicit weight is rejected for nonlinear kernels") {
    std::mt19937 rng(41);
    const SvmModel m = oracle::random_model(rng, 3, 4, KernelFamily::Rbf);
    CHECK_THROWS_AS(explicit_weight(m), InvalidInput);
}

TEST_CASE("decision value rejects mismatched probe dimension") {
    const SvmModel m = toy_model();
    Vector x(2);
    x << 1, 2;
    CHECK_THROWS_AS(decision_value(m, x), DimensionError);
}

TEST_CASE("sign convention: zero maps to plus one") {
    CHECK(sign_pm(0.0) == 1);
    CHECK(sign_pm(-0.0) == 1);
    CHECK(sign_pm(1e-300) == 1);
    CHECK(sign_pm(-1e-300) == -1);
}

TEST_CASE("dataset validates labels and dimensions") {
    Dataset data(2);
    Vector x(2);
    x << 1, 2;
    data.add(x, 1);
    data.add(x, -1);
    CHECK(data.size() == 2);
    CHECK(data.dimension() == 2);
    CHECK(data.has_both_classes());

    CHECK_THROWS_AS(data.add(x, 0), InvalidInput);
    CHECK_THROWS_AS(data.add(x, 2), InvalidInput);
    Vector bad(3);
    bad << 1, 2, 3;
    CHECK_THROWS_AS(data.add(bad, 1), DimensionError);
    CHECK_THROWS_AS(Dataset(0), InvalidInput);
}

TEST_CASE("require_trainable demands both classes") {
    Dataset data(1);
    data.add(vec1(1.0), 1);
    data.add(vec1(2.0), 1);
    CHECK_THROWS_AS(data.require_trainable(), InvalidInput);
    data.add(vec1(-1.0), -1);
    CHECK_NOTHROW(data.require_trainable());
}

TEST_CASE("kernel spec validation rejects bad shape parameters") {
    CHECK_THROWS_AS(KernelSpec::rbf(0.0), InvalidInput);
    CHECK_THROWS_AS(KernelSpec::rbf(-1.0), InvalidInput);
    CHECK_THROWS_AS(KernelSpec::polynomial(0.0, 0.0, 2.0), InvalidInput);
    CHECK_THROWS_AS(KernelSpec::polynomial(1.0, 0.0, 0.0), InvalidInput);
    CHECK_NOTHROW(KernelSpec::linear().validate());
    CHECK_NOTHROW(KernelSpec::polynomial(1.0, 0.0, 1.0));
}

TEST_CASE("model validation catches structural problems") {
    SvmModel m = toy_model();
    CHECK_NOTHROW(m.validate());

    SvmModel empty;
    CHECK_THROWS_AS(empty.validate(), InvalidInput);

    SvmModel mismatched = toy_model();
    mismatched.dual_coeffs = Vector(1);
    mismatched.dual_coeffs << 0.5;
    CHECK_THROWS_AS(mismatched.validate(), InvalidInput);

    SvmModel zero_coeff = toy_model();
    zero_coeff.dual_coeffs(1) = 0.0;
    CHECK_THROWS_AS(zero_coeff.validate(), InvalidInput);

    SvmModel ragged = toy_model();
    Vector wide(2);
    wide << 1, 2;
    ragged.support_vectors[1] = wide;
    CHECK_THROWS_AS(ragged.validate(), DimensionError);

    SvmModel bad_kernel = toy_model();
    bad_kernel.kernel.family = KernelFamily::Rbf;
    bad_kernel.kernel.gamma = -2.0;
    CHECK_THROWS_AS(bad_kernel.validate(), InvalidInput);
}

TEST_CASE("attack config validation") {
    AttackConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.epsilon = 0.0;
    CHECK_THROWS_AS(cfg.validate(), InvalidInput);
    cfg = AttackConfig{};
    cfg.residual_tol = -1e-9;
    CHECK_THROWS_AS(cfg.validate(), InvalidInput);
    cfg = AttackConfig{};
    cfg.max_iterations = 0;
    CHECK_THROWS_AS(cfg.validate(), InvalidInput);
    cfg = AttackConfig{};
    cfg.max_restarts = -1;
    CHECK_THROWS_AS(cfg.validate(), InvalidInput);
    cfg = AttackConfig{};
    cfg.step_init_scale = 0.0;
    CHECK_THROWS_AS(cfg.validate(), InvalidInput);
    cfg = AttackConfig{};
    cfg.mu_init = 0.0;
    CHECK_THROWS_AS(cfg.validate(), InvalidInput);
}

} // TEST_SUITE
