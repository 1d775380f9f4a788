#include "probe/trace.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "probe/numerics.hpp"
#include "probe/potential.hpp"

namespace probe {

GammaSample gamma_sample(const EigenSet& es, const TestFunction& tf, double E) {
    GammaSample g;
    g.E = E;
    g.hbar = es.hbar;
    g.count = static_cast<int>(es.lambda.size());
    if (es.lambda.size() == 0) return g;

    if (es.err_bound.size() > 0 && es.err_bound.maxCoeff() >= 0.1 * es.hbar)
        throw std::runtime_error("spectrum too coarse for this hbar");

    Complex acc{0, 0};
    double err = 0;
    int tail_count = 0;
    for (Eigen::Index j = 0; j < es.lambda.size(); ++j) {
        const double s = (es.lambda(j) - E) / es.hbar;
        if (s < tf.x_first || s > tf.x_max()) {
            ++tail_count;
            continue;
        }
        acc += tf.eval(s);
        const double eb = es.err_bound.size() > j ? es.err_bound(j) : 0.0;
        err += std::abs(tf.eval_deriv(s)) * eb / es.hbar;
    }
    g.value = acc;
    g.err_bound = err + g.count * tf.interp_tol + tail_count * tf.tail_bound;
    return g;
}

namespace {

/// phase-space volume Vol{xi^2 + V <= E} (n=1: strip integral; n=2 handled by MC)
double volume_below_1d(const Potential& pot, double E, int m = 200000) {
    const double h = 2.0 * pot.box / m;
    double s = 0;
    for (int i = 0; i <= m; ++i) {
        Eigen::VectorXd x(1);
        x << -pot.box + i * h;
        const double r = E - pot.value(x);
        if (r > 0) s += 2.0 * std::sqrt(r) * ((i == 0 || i == m) ? 0.5 : 1.0);
    }
    return s * h;
}

bool near_critical_value(const Potential& pot, double E, double guard) {
    const auto cps = find_critical_points(pot, 9);
    for (const auto& cp : cps)
        if (std::abs(E - cp.value) < guard) return true;
    return false;
}

}  // namespace

LiouvilleResult liouville_volume(const Potential& pot, double E, double guard,
                                 std::uint64_t seed, long mc_points) {
    if (near_critical_value(pot, E, guard))
        throw std::runtime_error("regular energies only: E within guard band of a critical value");

    LiouvilleResult out;
    const double de = std::max(1e-4, 1e-3 * std::abs(E));
    if (pot.n == 1) {
        out.value = (volume_below_1d(pot, E + de) - volume_below_1d(pot, E - de)) / (2.0 * de);
        return out;
    }

    // n=2: common-random-number Monte Carlo over the box times a momentum ball
    const double L = pot.box;
    double vmin = std::numeric_limits<double>::max();
    for (int i = 0; i <= 256; ++i)
        for (int j = 0; j <= 256; ++j) {
            Eigen::VectorXd x(2);
            x << -L + 2.0 * L * i / 256.0, -L + 2.0 * L * j / 256.0;
            vmin = std::min(vmin, pot.value(x));
        }
    const double P = std::sqrt(std::max(E + de - vmin, 0.0)) * 1.01;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(-L, L), up(-P, P);
    long shell = 0, below = 0;
    Eigen::VectorXd x(2);
    for (long i = 0; i < mc_points; ++i) {
        const double x1 = ux(rng), x2 = ux(rng);
        const double k1 = up(rng), k2 = up(rng);
        x << x1, x2;
        const double val = k1 * k1 + k2 * k2 + pot.value(x);
        if (val <= E + de) {
            ++below;
            if (val > E - de) ++shell;
        }
    }
    const double cell = std::pow(2.0 * L, 2) * std::pow(2.0 * P, 2);
    const double q = static_cast<double>(shell) / mc_points;
    out.value = q * cell / (2.0 * de);
    out.std_error = std::sqrt(q * (1.0 - q) / mc_points) * cell / (2.0 * de);
    (void)below;
    return out;
}

WeylReport weyl_check_with_lvol(const std::vector<EigenSet>& ladder,
                                const TestFunction& tf_nonflat, int n, double E, double lvol) {
    const double ph0 = tf_nonflat.phihat0();
    if (std::abs(ph0) < 1e-12)
        throw std::invalid_argument("weyl_check: phihat(0) must be non-zero (use j0 = 0)");
    WeylReport rep;
    rep.lvol = lvol;
    double hmin = std::numeric_limits<double>::max();
    for (const auto& es : ladder) {
        const GammaSample g = gamma_sample(es, tf_nonflat, E);
        const double ratio =
            std::abs(g.value) * std::pow(2.0 * M_PI * es.hbar, n - 1) * 2.0 * M_PI /
            (std::abs(ph0) * lvol);
        rep.hbars.push_back(es.hbar);
        rep.deviations.push_back(std::abs(ratio - 1.0));
        if (es.hbar < hmin) {
            hmin = es.hbar;
            rep.deviation_at_smallest = std::abs(ratio - 1.0);
        }
    }
    return rep;
}

WeylReport weyl_check(const std::vector<EigenSet>& ladder, const TestFunction& tf_nonflat,
                      const Potential& pot, double E, std::uint64_t seed) {
    const LiouvilleResult lv = liouville_volume(pot, E, 0.01, seed);
    return weyl_check_with_lvol(ladder, tf_nonflat, pot.n, E, lv.value);
}

}  // namespace probe
