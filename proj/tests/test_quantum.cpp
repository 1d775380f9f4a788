#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "probe/quantum.hpp"

using namespace probe;

TEST_CASE("window validation") {
    CHECK_THROWS_AS((Window{2.0, 1.0, 0.1}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((Window{0.0, 1.0, -0.2}).validate(), std::invalid_argument);
    const Window w{0.0, 1.0, 0.0};
    CHECK(w.margin() == doctest::Approx(0.1));  // default 10% of |J|
}

TEST_CASE("oscillator oracle closed forms") {
    // c=1, hbar=1, J(eps)=[0,10] -> {1,3,5,7,9}
    const EigenSet a = oscillator_oracle(1.0, 1.0, Window{0.5, 9.5, 0.5}, 1);
    REQUIRE(a.lambda.size() == 5);
    for (int j = 0; j < 5; ++j) CHECK(a.lambda(j) == doctest::Approx(2 * j + 1.0));

    // c=4, hbar=0.5, J(eps)=[0,4] -> {1,3}
    const EigenSet b = oscillator_oracle(4.0, 0.5, Window{0.5, 3.5, 0.5}, 1);
    REQUIRE(b.lambda.size() == 2);
    CHECK(b.lambda(0) == doctest::Approx(1.0));
    CHECK(b.lambda(1) == doctest::Approx(3.0));

    // n=2, c=1, hbar=1, J(eps)=[0,5] -> {2,4,4}
    const EigenSet c = oscillator_oracle(1.0, 1.0, Window{0.5, 4.5, 0.5}, 2);
    REQUIRE(c.lambda.size() == 3);
    CHECK(c.lambda(0) == doctest::Approx(2.0));
    CHECK(c.lambda(1) == doctest::Approx(4.0));
    CHECK(c.lambda(2) == doctest::Approx(4.0));
}

TEST_CASE("harmonic eigenvalues in the window at hbar = 0.05") {
    // lambda_j = hbar (2j+1); in [0.1, 2]: 0.15 .. 1.95, 19 values
    const Window win{0.1, 2.0, 0.001};
    const EigenSet es = discretize_and_solve(make_harmonic(1.0, 3.0), 0.05, win);
    REQUIRE(es.lambda.size() == 19);
    for (int j = 0; j < 19; ++j)
        CHECK(es.lambda(j) == doctest::Approx(0.05 * (2 * (j + 1) + 1)).epsilon(1e-6));
}

TEST_CASE("scaled harmonic: lambda_j = 2 hbar (2j+1) for c=4") {
    const Window win{0.1, 1.0, 0.001};
    const double hbar = 0.05;
    const EigenSet es = discretize_and_solve(make_harmonic(4.0, 2.5), hbar, win);
    const EigenSet oracle = oscillator_oracle(4.0, hbar, win, 1);
    REQUIRE(es.lambda.size() == oracle.lambda.size());
    for (Eigen::Index j = 0; j < es.lambda.size(); ++j)
        CHECK(es.lambda(j) == doctest::Approx(oracle.lambda(j)).epsilon(1e-6));
}

TEST_CASE("oracle agreement at relative 1e-5 for the lowest 50 in-window levels") {
    const Window win{0.1, 2.0, 0.001};
    const double hbar = 0.01;
    const EigenSet es = discretize_and_solve(make_harmonic(1.0, 3.0), hbar, win);
    const EigenSet oracle = oscillator_oracle(1.0, hbar, win, 1);
    REQUIRE(es.lambda.size() >= 50);
    for (int j = 0; j < 50; ++j)
        CHECK(std::abs(es.lambda(j) / oracle.lambda(j) - 1.0) <= 1e-5);
}

TEST_CASE("separable 2D oscillator eigenvalues") {
    // 2 hbar (j+1) with multiplicity j+1
    const Window win{0.3, 0.9, 0.05};
    const double hbar = 0.1;
    const EigenSet es = discretize_and_solve(make_aniso2d(1.0, 1.0, 1.7), hbar, win);
    const EigenSet oracle = oscillator_oracle(1.0, hbar, win, 2);
    REQUIRE(es.lambda.size() == oracle.lambda.size());
    for (Eigen::Index j = 0; j < es.lambda.size(); ++j)
        CHECK(std::abs(es.lambda(j) / oracle.lambda(j) - 1.0) <= 2e-3);
}

TEST_CASE("anisotropic 2D separable oracle") {
    const Window win{0.3, 0.8, 0.05};
    const EigenSet o = oscillator2d_oracle(1.0, 4.0, 0.1, win);
    // lambda = 0.1 (2 j1 + 1) + 0.2 (2 j2 + 1)
    for (Eigen::Index i = 0; i < o.lambda.size(); ++i) {
        const double lam = o.lambda(i);
        bool representable = false;
        for (int j1 = 0; j1 < 20; ++j1)
            for (int j2 = 0; j2 < 20; ++j2)
                if (std::abs(lam - 0.1 * (2 * j1 + 1) - 0.2 * (2 * j2 + 1)) < 1e-12)
                    representable = true;
        CHECK(representable);
    }
}

TEST_CASE("grid refinement shrinks the error bound") {
    const Window win{0.1, 2.0, 0.001};
    ResolutionPolicy coarse, fine;
    coarse.points_per_wavelength = 8;
    fine.points_per_wavelength = 16;
    const EigenSet a = discretize_and_solve(make_harmonic(1.0, 3.0), 0.05, win, coarse);
    const EigenSet b = discretize_and_solve(make_harmonic(1.0, 3.0), 0.05, win, fine);
    CHECK(a.err_bound.maxCoeff() / b.err_bound.maxCoeff() >= 3.0);
}

TEST_CASE("Dirichlet box insensitivity") {
    const Window win{0.1, 2.0, 0.001};
    const EigenSet a = discretize_and_solve(make_harmonic(1.0, 3.0), 0.05, win);
    const EigenSet b = discretize_and_solve(make_harmonic(1.0, 3.75), 0.05, win);
    REQUIRE(a.lambda.size() == b.lambda.size());
    for (Eigen::Index j = 0; j < a.lambda.size(); ++j)
        CHECK(std::abs(a.lambda(j) / b.lambda(j) - 1.0) <= 1e-8);
}

TEST_CASE("eigenvalue count obeys the Weyl sanity bound") {
    const Window win{0.1, 2.0, 0.19};
    const double hbar = 0.02;
    const Potential pot = make_harmonic(1.0, 3.0);
    const EigenSet es = discretize_and_solve(pot, hbar, win);
    const double est = weyl_count_estimate(pot, win, hbar);
    CHECK(es.lambda.size() >= 0.5 * est);
    CHECK(es.lambda.size() <= 2.0 * est);
}

TEST_CASE("boundary and resolution guards") {
    const Window win{0.1, 2.0, 0.19};
    CHECK_THROWS_WITH_AS(discretize_and_solve(make_harmonic(1.0, 1.0), 0.05, win),
                         doctest::Contains("box too small"), std::runtime_error);
    ResolutionPolicy tiny;
    tiny.points_per_wavelength = 0.5;
    tiny.min_points = 16;
    CHECK_THROWS_WITH_AS(discretize_and_solve(make_harmonic(1.0, 3.0), 0.002, win, tiny),
                         doctest::Contains("resolution insufficient"), std::runtime_error);
}

TEST_CASE("eigenset csv round trip is bit exact") {
    const Window win{0.1, 2.0, 0.001};
    const EigenSet es = discretize_and_solve(make_harmonic(1.0, 3.0), 0.05, win);
    save_eigenset_csv(es, "eigs_tmp.csv");
    const EigenSet back = load_eigenset_csv("eigs_tmp.csv");
    REQUIRE(back.lambda.size() == es.lambda.size());
    for (Eigen::Index j = 0; j < es.lambda.size(); ++j) {
        CHECK(back.lambda(j) == es.lambda(j));  // bit-identical
        CHECK(back.err_bound(j) == es.err_bound(j));
    }
    CHECK(back.hbar == es.hbar);
    std::remove("eigs_tmp.csv");
}
