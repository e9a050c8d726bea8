#include <doctest.h>

#include "ksvm/kernels.hpp"
#include "oracles.hpp"

using namespace ksvm;

TEST_SUITE("kernels") {

TEST_CASE("linear value is the inner product") {
    Vector x(2), y(2);
    x << 1, 2;
    y << 3, 4;
    CHECK(kernel_value(KernelSpec::linear(), x, y) == 11.0); // exact in ieee754
}

TEST_CASE("rbf value at identical arguments is one") {
    std::mt19937 rng(7);
    for (double gamma : {1e-5, 0.5, 3.0}) {
        const Vector x = oracle::random_vector(rng, 4);
        CHECK(kernel_value(KernelSpec::rbf(gamma), x, x) == 1.0);
    }
}

TEST_CASE("polynomial value matches the closed form") {
    Vector x(2), y(2);
    x << 1, 2;
    y << 3, 4;
    CHECK(kernel_value(KernelSpec::polynomial(1.0, 0.0, 2.0), x, y) == doctest::Approx(121.0));
    CHECK(kernel_value(KernelSpec::polynomial(0.5, 1.0, 3.0), x, y) ==
          doctest::Approx(6.5 * 6.5 * 6.5));
}

TEST_CASE("kernel symmetry in its two arguments") {
    std::mt19937 rng(11);
    for (auto family :
         {KernelFamily::Linear, KernelFamily::Polynomial, KernelFamily::Rbf}) {
        for (int t = 0; t < 20; ++t) {
            const KernelSpec spec = oracle::random_kernel(rng, family);
            const Vector x = oracle::random_vector(rng, 5);
            const Vector y = oracle::random_vector(rng, 5);
            CHECK(kernel_value(spec, x, y) == kernel_value(spec, y, x));
        }
    }
}

TEST_CASE("rbf values lie in (0, 1]") {
    std::mt19937 rng(13);
    for (int t = 0; t < 100; ++t) {
        const KernelSpec spec = oracle::random_kernel(rng, KernelFamily::Rbf);
        const double v =
            kernel_value(spec, oracle::random_vector(rng, 6), oracle::random_vector(rng, 6));
        CHECK(v > 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("linear gradient is the second argument") {
    Vector x(2), y(2);
    x << -5, 9;
    y << 3, 4;
    CHECK(kernel_grad_first(KernelSpec::linear(), x, y) == y);
}

TEST_CASE("rbf gradient vanishes at identical arguments") {
    Vector x(3);
    x << 1, -2, 0.5;
    CHECK(kernel_grad_first(KernelSpec::rbf(0.7), x, x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("rbf gradient at a pinned configuration matches finite differences") {
    const KernelSpec spec = KernelSpec::rbf(0.5);
    Vector x(2), y(2);
    x << 1, 0;
    y << 0, 0;
    const Vector analytic = kernel_grad_first(spec, x, y);
    const Vector fd = oracle::fd_gradient(
        [&](const Vector& v) { return kernel_value(spec, v, y); }, x);
    CHECK(oracle::rel_error(analytic, fd) <= 1e-5);
}

TEST_CASE("gradients match finite differences on 100 random triples per family") {
    std::mt19937 rng(17);
    for (auto family :
         {KernelFamily::Linear, KernelFamily::Polynomial, KernelFamily::Rbf}) {
        for (int t = 0; t < 100; ++t) {
            const KernelSpec spec = oracle::random_kernel(rng, family);
            const Vector x = oracle::random_vector(rng, 4);
            const Vector y = oracle::random_vector(rng, 4);
            const Vector analytic = kernel_grad_first(spec, x, y);
            const Vector fd = oracle::fd_gradient(
                [&](const Vector& v) { return kernel_value(spec, v, y); }, x);
            CHECK(oracle::rel_error(analytic, fd) <= 1e-5);
        }
    }
}

TEST_CASE("linear hessian is the zero matrix") {
    Vector x(3), y(3);
    x << 1, 2, 3;
    y << -1, 0, 2;
    CHECK(kernel_hess_first(KernelSpec::linear(), x, y).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("rbf hessian at identical arguments is -2 gamma I") {
    const double gamma = 0.3;
    Vector x(2);
    x << 4, -1;
    const Matrix h = kernel_hess_first(KernelSpec::rbf(gamma), x, x);
    CHECK((h - (-2.0 * gamma) * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("quadratic polynomial hessian collapses to 2 x2 x2^T") {
    Vector x(2), y(2);
    x << 0.2, 0.8;
    y << 3, 4;
    const Matrix h = kernel_hess_first(KernelSpec::polynomial(1.0, 0.0, 2.0), x, y);
    Matrix want(2, 2);
    want << 18, 24, 24, 32;
    CHECK((h - want).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("hessians match finite differences of the gradient, and are symmetric") {
    std::mt19937 rng(19);
    for (auto family :
         {KernelFamily::Linear, KernelFamily::Polynomial, KernelFamily::Rbf}) {
        for (int t = 0; t < 40; ++t) {
            const KernelSpec spec = oracle::random_kernel(rng, family);
            const Vector x = oracle::random_vector(rng, 4);
            const Vector y = oracle::random_vector(rng, 4);
            const Matrix analytic = kernel_hess_first(spec, x, y);
            const Matrix fd = oracle::fd_jacobian(
                [&](const Vector& v) { return kernel_grad_first(spec, v, y); }, x);
            CHECK(oracle::rel_error(analytic, fd) <= 1e-4);
            CHECK((analytic - analytic.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
        }
    }
}

TEST_CASE("degree-one polynomial has a zero hessian") {
    Vector x(2), y(2);
    x << 1, 1;
    y << 2, -3;
    const Matrix h = kernel_hess_first(KernelSpec::polynomial(1.5, 0.2, 1.0), x, y);
    CHECK(h.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("fused accumulation equals the sum of separate weighted calls") {
    std::mt19937 rng(23);
    const KernelSpec spec = oracle::random_kernel(rng, KernelFamily::Rbf);
    const Vector x = oracle::random_vector(rng, 3);
    const Vector y1 = oracle::random_vector(rng, 3);
    const Vector y2 = oracle::random_vector(rng, 3);

    double value = 0.0;
    Vector grad = Vector::Zero(3);
    Matrix hess = Matrix::Zero(3, 3);
    kernel_accumulate(spec, x, y1, 0.7, &value, &grad, &hess);
    kernel_accumulate(spec, x, y2, -1.3, &value, &grad, &hess);

    const double want_value = 0.7 * kernel_value(spec, x, y1) - 1.3 * kernel_value(spec, x, y2);
    const Vector want_grad =
        0.7 * kernel_grad_first(spec, x, y1) - 1.3 * kernel_grad_first(spec, x, y2);
    const Matrix want_hess =
        0.7 * kernel_hess_first(spec, x, y1) - 1.3 * kernel_hess_first(spec, x, y2);
    CHECK(std::abs(value - want_value) <= 1e-14);
    CHECK((grad - want_grad).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK((hess - want_hess).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("null output pointers skip the corresponding work") {
    Vector x(2), y(2);
    x << 0.5, 0.5;
    y << 1, 2;
    double value = 0.0;
    kernel_accumulate(KernelSpec::rbf(0.4), x, y, 2.0, &value, nullptr, nullptr);
    CHECK(value == doctest::Approx(2.0 * kernel_value(KernelSpec::rbf(0.4), x, y)));
}

TEST_CASE("dimension mismatch raises a dimension error") {
    Vector x(2), y(3);
    x << 1, 2;
    y << 1, 2, 3;
    CHECK_THROWS_AS(kernel_value(KernelSpec::linear(), x, y), DimensionError);
    CHECK_THROWS_AS(kernel_grad_first(KernelSpec::rbf(1.0), x, y), DimensionError);
    CHECK_THROWS_AS(kernel_hess_first(KernelSpec::polynomial(1, 0, 2), x, y), DimensionError);
}

TEST_CASE("negative polynomial base with fractional degree is a domain error") {
    Vector x(1), y(1);
    x << 1;
    y << -1; // base = p 'x . y' + a = -1
    CHECK_THROWS_AS(kernel_value(KernelSpec::polynomial(1.0, 0.0, 2.5), x, y),
                    KernelDomainError);
    // integral degree on a negative base is fine
    CHECK(kernel_value(KernelSpec::polynomial(1.0, 0.0, 3.0), x, y) == doctest::Approx(-1.0));
}

TEST_CASE("zero base edge cases") {
    Vector x(1), y(1);
    x << 0;
    y << 1; // base = 0
    CHECK(kernel_value(KernelSpec::polynomial(1.0, 0.0, 2.0), x, y) == 0.0);
    // degree-2 hessian at zero base: 2 p^2 x2 x2^T, no 0^(negative) evaluation
    CHECK(kernel_hess_first(KernelSpec::polynomial(1.0, 0.0, 2.0), x, y)(0, 0) ==
          doctest::Approx(2.0));
}

} // TEST_SUITE
