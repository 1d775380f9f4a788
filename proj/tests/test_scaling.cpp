#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "probe/scaling.hpp"

using namespace probe;

namespace {

std::vector<GammaSample> synth(const std::vector<double>& hs, double alpha, double C, int m,
                               double noise, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    std::vector<GammaSample> out;
    for (double h : hs) {
        GammaSample g;
        g.E = 0;
        g.hbar = h;
        double v = C * std::pow(h, alpha);
        if (m == 1) v *= std::log(1.0 / h);
        if (noise > 0) v *= (1.0 + noise * gauss(rng));
        g.value = v;
        g.err_bound = 0;
        out.push_back(g);
    }
    return out;
}

}  // namespace

TEST_CASE("ladder values") {
    const Ladder lad{0.1, 0.75, 10};
    const auto v = lad.values();
    REQUIRE(v.size() == 10);
    CHECK(v.front() == doctest::Approx(0.1));
    CHECK(v.back() == doctest::Approx(lad.hbar_min()));
    CHECK(lad.hbar_min() == doctest::Approx(0.1 * std::pow(0.75, 9)));
}

TEST_CASE("fit recovers a clean power law") {
    std::mt19937_64 rng(1);
    const Ladder lad{0.1, 0.75, 10};
    const auto s = synth(lad.values(), -0.25, 2.0, 0, 0.0, rng);
    const OrderFit f = fit_order(s);
    CHECK(f.alpha == doctest::Approx(-0.25).epsilon(1e-10));
    CHECK(f.logflag == 0);
    CHECK(std::abs(f.coefficient) == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("fit recovers a clean log model") {
    std::mt19937_64 rng(2);
    const Ladder lad{0.1, 0.75, 10};
    const auto s = synth(lad.values(), 0.0, 0.5, 1, 0.0, rng);
    const OrderFit f = fit_order(s);
    CHECK(f.logflag == 1);
    CHECK(f.alpha == doctest::Approx(0.0).epsilon(1e-8));
    CHECK(std::abs(f.coefficient) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("synthetic recovery: 200 random trials per model") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ua(-1.0, 1.0), uc(0.1, 10.0);
    std::uniform_int_distribution<int> um(0, 1);
    const Ladder lad{0.1, 0.7, 8};
    int alpha_ok = 0, m_ok = 0;
    const int trials = 200;
    for (int t = 0; t < trials; ++t) {
        const double alpha = ua(rng), C = uc(rng);
        const int m = um(rng);
        const auto s = synth(lad.values(), alpha, C, m, 0.01, rng);
        const OrderFit f = fit_order(s);
        if (std::abs(f.alpha - alpha) <= 0.02) ++alpha_ok;
        if (f.logflag == m) ++m_ok;
    }
    CHECK(alpha_ok == trials);          // alpha within 0.02 in every trial
    CHECK(m_ok >= 0.95 * trials);       // correct model in >= 95%
}

TEST_CASE("ladder invariance: even-indexed subladder") {
    std::mt19937_64 rng(11);
    const Ladder lad{0.1, 0.75, 12};
    const auto s = synth(lad.values(), -0.4, 1.7, 0, 0.005, rng);
    const OrderFit full = fit_order(s);
    std::vector<GammaSample> even;
    for (std::size_t i = 0; i < s.size(); i += 2) even.push_back(s[i]);
    const OrderFit sub = fit_order(even);
    // residual-based uncertainty of the slope
    Eigen::VectorXd L(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) L(i) = std::log(s[i].hbar);
    const double sxx = (L.array() - L.mean()).matrix().squaredNorm();
    const double sigma = std::max(full.residual / std::sqrt(sxx), 1e-4);
    CHECK(std::abs(full.alpha - sub.alpha) <= 2.0 * sigma);
}

TEST_CASE("fit preconditions and failure modes") {
    std::mt19937_64 rng(3);
    const Ladder lad{0.1, 0.75, 4};
    auto s = synth(lad.values(), 0.0, 1.0, 0, 0.0, rng);
    CHECK_THROWS_AS(fit_order(s), std::invalid_argument);  // < 6 points

    const Ladder lad6{0.1, 0.75, 8};
    s = synth(lad6.values(), 0.0, 1.0, 0, 0.0, rng);
    s[3].E = 0.5;
    CHECK_THROWS_AS(fit_order(s), std::invalid_argument);  // mixed E

    s = synth(lad6.values(), 0.0, 1.0, 0, 0.0, rng);
    s[2].err_bound = 1.0;  // drown one sample
    CHECK_THROWS_WITH_AS(fit_order(s), doctest::Contains("classify_regular"),
                         std::runtime_error);

    // alternating signs of comparable magnitude: orbit-like oscillation
    s = synth(lad6.values(), 0.0, 1.0, 0, 0.0, rng);
    for (std::size_t i = 0; i < s.size(); ++i)
        s[i].value = (i % 2 ? 1.0 : -1.0) * std::abs(s[i].value);
    CHECK_THROWS_WITH_AS(fit_order(s), doctest::Contains("oscillatory"), std::runtime_error);
}

TEST_CASE("classify_regular branches") {
    std::mt19937_64 rng(4);
    const Ladder lad{0.1, 0.75, 8};

    // fast decay: slope 5
    auto s = synth(lad.values(), 5.0, 1.0, 0, 0.0, rng);
    CHECK(classify_regular(s).is_fast_decay);

    // critical-like: slope 0
    s = synth(lad.values(), 0.0, 1.0, 0, 0.0, rng);
    const DecayReport r = classify_regular(s);
    CHECK_FALSE(r.is_fast_decay);
    CHECK(r.slope == doctest::Approx(0.0).epsilon(1e-9));

    // all-zero samples trip the absolute floor branch
    for (auto& g : s) g.value = 0.0;
    CHECK(classify_regular(s, 1.0).is_fast_decay);
}
