#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <cmath>
#include <vector>

#include "probe/numerics.hpp"

using namespace probe;

TEST_CASE("fit_line recovers slope and intercept") {
    Eigen::VectorXd x(5), y(5);
    for (int i = 0; i < 5; ++i) {
        x(i) = i;
        y(i) = 3.5 - 2.0 * i;
    }
    const LineFit f = fit_line(x, y);
    CHECK(f.slope == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(f.intercept == doctest::Approx(3.5).epsilon(1e-12));
    CHECK(f.rms < 1e-12);
}

TEST_CASE("fit_line_complex") {
    Eigen::VectorXd x(4);
    Eigen::VectorXcd y(4);
    const Complex a{2.0, -1.0}, b{0.5, 3.0};
    for (int i = 0; i < 4; ++i) {
        x(i) = 0.5 * i;
        y(i) = a * x(i) + b;
    }
    const auto [ae, be] = fit_line_complex(x, y);
    CHECK(std::abs(ae - a) < 1e-12);
    CHECK(std::abs(be - b) < 1e-12);
}

TEST_CASE("cubic interpolation on a smooth function") {
    const int n = 200;
    const double x0 = -3.0, dx = 6.0 / (n - 1);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = std::sin(x0 + i * dx);
    for (double x : {-2.513, -0.1, 0.7321, 2.9}) {
        CHECK(interp_cubic(v, x0, dx, x) == doctest::Approx(std::sin(x)).epsilon(1e-6));
        CHECK(interp_cubic_deriv(v, x0, dx, x) == doctest::Approx(std::cos(x)).epsilon(1e-4));
    }
}

TEST_CASE("adaptive integration") {
    const double I =
        integrate_adaptive([](double x) { return std::exp(-x * x); }, 0.0, 8.0, 1e-12);
    CHECK(I == doctest::Approx(0.5 * std::sqrt(M_PI)).epsilon(1e-10));
}

TEST_CASE("beta function against gamma identity") {
    CHECK(beta_function(0.5, 0.5) == doctest::Approx(M_PI).epsilon(1e-12));
    CHECK(beta_function(2, 3) == doctest::Approx(1.0 / 12.0).epsilon(1e-12));
}

TEST_CASE("fnv1a64 is stable") {
    CHECK(fnv1a64("") == 14695981039346656037ull);
    CHECK(fnv1a64("probe") == fnv1a64("probe"));
    CHECK(fnv1a64("probe") != fnv1a64("probf"));
}

TEST_CASE("format_double round-trips") {
    for (double v : {1.0 / 3.0, 0.1, 1e-17, 12345.678901234567}) {
        const std::string s = format_double(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
}

TEST_CASE("parallel_for covers all indices once") {
    std::vector<std::atomic<int>> hits(257);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits) CHECK(h.load() == 1);
}
