#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>

#include "probe/testfn.hpp"

using namespace probe;

namespace {

// forward transform of the tabulation: Int e^{itx} phi(x) dx (trapezoid)
Complex forward_transform(const TestFunction& tf, double t) {
    Complex acc{0, 0};
    const auto n = tf.re.size();
    for (Eigen::Index i = 0; i < n; ++i) {
        const double x = tf.x_first + i * tf.dx;
        const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        acc += w * std::exp(Complex(0, t * x)) * Complex(tf.re(i), tf.im(i));
    }
    return acc * tf.dx;
}

}  // namespace

TEST_CASE("standard even bump: real phi, phihat(0) = e^{-1}, integral identity") {
    const TestFunction tf = build_test_function(1.0, 0, BumpShape::standard_even);
    CHECK_FALSE(tf.complex_valued);
    CHECK(tf.phihat0() == doctest::Approx(std::exp(-1.0)).epsilon(1e-10));
    // Fourier inversion at t=0: integral of phi equals phihat(0)
    const Complex I = tf.integrate_weighted([](double) { return 1.0; });
    CHECK(I.real() == doctest::Approx(std::exp(-1.0)).epsilon(1e-8));
    CHECK(std::abs(I.imag()) < 1e-12);
}

TEST_CASE("round trip phi -> phihat at tabulated t") {
    const TestFunction tf = build_test_function(1.0, 2, BumpShape::standard_even);
    const double ref = tf.phihat_grid.cwiseAbs().maxCoeff();
    for (double t : {0.0, 0.3, -0.55, 0.917, -1.2}) {
        const Complex ft = forward_transform(tf, t);
        CHECK(std::abs(ft - Complex(tf.phihat_at(t), 0)) <= 1e-9 * ref);
    }
}

TEST_CASE("flatness by construction: j0 = 2 kills moments 0..3") {
    const TestFunction tf = build_test_function(1.0, 2, BumpShape::standard_even);
    CHECK(tf.flatness_verified >= 2);
    const AdmissibilityReport rep = check_admissibility(tf, 10.0);
    CHECK(rep.flat_ok);
    // leading non-vanishing coefficient at order 2 j0
    const double ref = tf.phihat_grid.cwiseAbs().maxCoeff();
    CHECK(std::abs(tf.flat_coeffs(4)) > 1e-3 * ref);
    for (int j = 0; j < 4; ++j) CHECK(std::abs(tf.flat_coeffs(j)) <= 1e-6 * ref);
}

TEST_CASE("shifted bump is complex valued and decays") {
    const TestFunction tf = build_test_function(1.0, 2, BumpShape::shifted);
    CHECK(tf.complex_valued);
    double beyond = 0;
    for (Eigen::Index i = 0; i < tf.re.size(); ++i) {
        const double x = tf.x_first + i * tf.dx;
        if (std::abs(x) > 150.0) beyond = std::max(beyond, std::hypot(tf.re(i), tf.im(i)));
    }
    CHECK(beyond <= 1e-8 * tf.max_abs);
}

TEST_CASE("parity pair: real even member, imaginary odd member, shared grid") {
    const auto [ev, od] = parity_pair(1.0, 3);
    CHECK(ev.M == od.M);
    CHECK(ev.j0 == od.j0);
    CHECK(ev.dx == od.dx);
    CHECK(ev.re.size() == od.re.size());
    CHECK_FALSE(ev.complex_valued);
    // odd phihat (real) gives purely imaginary phi
    CHECK(od.re.cwiseAbs().maxCoeff() <= 1e-10 * od.im.cwiseAbs().maxCoeff());
}

TEST_CASE("grid independence: doubling the t grid leaves phi unchanged") {
    TfGridSpec g1, g2;
    g2.t_nodes = 2 * g1.t_nodes;
    const TestFunction a = build_test_function(1.0, 3, BumpShape::standard_even, g1);
    const TestFunction b = build_test_function(1.0, 3, BumpShape::standard_even, g2);
    REQUIRE(a.dx == doctest::Approx(b.dx).epsilon(1e-15));  // dx depends only on M and pad
    double worst = 0;
    for (double x : {0.0, 1.0, 5.5, 17.3, 60.0, 151.0})
        worst = std::max(worst, std::abs(a.eval(x) - b.eval(x)));
    CHECK(worst <= 1e-8 * a.max_abs);
}

TEST_CASE("admissibility support check") {
    const TestFunction small = build_test_function(1.0, 3, BumpShape::standard_even);
    CHECK(check_admissibility(small, M_PI).support_ok);
    const TestFunction wide = build_test_function(4.0, 3, BumpShape::standard_even);
    CHECK_FALSE(check_admissibility(wide, M_PI).support_ok);
    CHECK(check_admissibility(small, M_PI).max_flatness_verified >= 3);
}

TEST_CASE("aliasing check rejects a too-coarse grid") {
    TfGridSpec g;
    g.t_nodes = 32;
    g.pad = 8;
    CHECK_THROWS_WITH_AS(build_test_function(1.0, 0, BumpShape::standard_even, g),
                         doctest::Contains("increase grid"), std::runtime_error);
}

TEST_CASE("grid spec validation") {
    TfGridSpec g;
    g.pad = 4;
    CHECK_THROWS_AS(build_test_function(1.0, 0, BumpShape::standard_even, g),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_test_function(-1.0, 0, BumpShape::standard_even),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_test_function(1.0, -1, BumpShape::standard_even),
                    std::invalid_argument);
}

TEST_CASE("interpolation error bound is honest") {
    const TestFunction tf = build_test_function(1.0, 1, BumpShape::standard_even);
    // compare the cubic evaluator against a direct quadrature of the inverse transform
    for (double x : {0.37, 3.1415, 12.77}) {
        Complex direct{0, 0};
        const auto n = tf.t_grid.size();
        const double dt = tf.t_grid(1) - tf.t_grid(0);
        for (Eigen::Index i = 0; i < n; ++i)
            direct += std::exp(Complex(0, -tf.t_grid(i) * x)) * tf.phihat_grid(i) * dt;
        direct /= 2.0 * M_PI;
        CHECK(std::abs(tf.eval(x) - direct) <= 20 * tf.interp_tol + 1e-12);
    }
}

TEST_CASE("export table") {
    const TestFunction tf = build_test_function(0.5, 1, BumpShape::odd);
    const std::string path = "tf_table_tmp.txt";
    export_table(tf, path);
    std::ifstream in(path);
    REQUIRE(in.good());
    std::string header;
    std::getline(in, header);
    CHECK(header == "# x re_phi im_phi");
    int rows = 0;
    std::string line;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == tf.re.size());
    std::remove(path.c_str());
}
