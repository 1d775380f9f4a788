#include "probe/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "probe/numerics.hpp"

namespace probe {

std::vector<double> Ladder::values() const {
    std::vector<double> v;
    v.reserve(count);
    double h = hbar_max;
    for (int i = 0; i < count; ++i) {
        v.push_back(h);
        h *= rho;
    }
    return v;
}

double Ladder::hbar_min() const { return hbar_max * std::pow(rho, count - 1); }

namespace {

OrderFit fit_order_impl(const Eigen::VectorXd& hbars, const Eigen::VectorXcd& values) {
    const auto n = hbars.size();
    if (n < 6) throw std::invalid_argument("fit_order: need >= 6 ladder points");

    Eigen::VectorXd L(n), y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        L(i) = std::log(hbars(i));
        const double a = std::abs(values(i));
        if (a <= 0) throw std::invalid_argument("fit_order: zero sample");
        y(i) = std::log(a);
    }

    // oscillation check: sign changes of Re gamma with non-monotone |gamma|
    {
        int flips = 0;
        for (Eigen::Index i = 1; i < n; ++i)
            if (values(i).real() * values(i - 1).real() < 0 &&
                std::abs(values(i)) > 1e-3 * values.cwiseAbs().maxCoeff())
                ++flips;
        if (flips >= 3) throw std::runtime_error("oscillatory, refine E");
    }

    const LineFit m0 = fit_line(L, y);
    Eigen::VectorXd y1(n);
    for (Eigen::Index i = 0; i < n; ++i) y1(i) = y(i) - std::log(std::log(1.0 / hbars(i)));
    const LineFit m1 = fit_line(L, y1);

    OrderFit fit;
    const bool log_wins = m1.rms < 0.9 * m0.rms;
    fit.ambiguous = !log_wins && m1.rms < m0.rms;  // log slightly better but within the tie band
    const LineFit& sel = log_wins ? m1 : m0;
    fit.logflag = log_wins ? 1 : 0;
    fit.alpha = sel.slope;
    fit.residual = sel.rms;
    fit.residual_other = (log_wins ? m0 : m1).rms;

    // magnitude from the fit, phase from the smallest-hbar sample
    Eigen::Index imin = 0;
    for (Eigen::Index i = 1; i < n; ++i)
        if (hbars(i) < hbars(imin)) imin = i;
    const double mag = std::exp(sel.intercept);
    const Complex ph = values(imin) / std::abs(values(imin));
    fit.coefficient = mag * ph;
    return fit;
}

}  // namespace

OrderFit fit_order(const std::vector<GammaSample>& samples) {
    if (samples.size() < 6) throw std::invalid_argument("fit_order: need >= 6 ladder points");
    const double E = samples.front().E;
    Eigen::VectorXd h(samples.size());
    Eigen::VectorXcd v(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (std::abs(samples[i].E - E) > 1e-12)
            throw std::invalid_argument("fit_order: samples must share E");
        if (std::abs(samples[i].value) <= 10.0 * samples[i].err_bound)
            throw std::runtime_error("fit_order: sample below 10x error bound, classify_regular applies");
        h(i) = samples[i].hbar;
        v(i) = samples[i].value;
    }
    return fit_order_impl(h, v);
}

OrderFit fit_order_values(const std::vector<double>& hbars, const std::vector<Complex>& values) {
    Eigen::VectorXd h = Eigen::Map<const Eigen::VectorXd>(hbars.data(), hbars.size());
    Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(values.data(), values.size());
    return fit_order_impl(h, v);
}

DecayReport classify_regular(const std::vector<GammaSample>& samples, double sweep_max_abs) {
    if (samples.size() < 6) throw std::invalid_argument("classify_regular: need >= 6 points");
    DecayReport rep;
    double vmax = 0;
    for (const auto& s : samples) vmax = std::max(vmax, std::abs(s.value));
    const double floor_scale = sweep_max_abs > 0 ? sweep_max_abs : vmax;
    if (vmax <= 1e-10 * floor_scale || vmax == 0) {
        rep.is_fast_decay = true;
        rep.slope = std::numeric_limits<double>::infinity();
        return rep;
    }
    Eigen::VectorXd L(samples.size()), y(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        L(i) = std::log(samples[i].hbar);
        y(i) = std::log(std::max(std::abs(samples[i].value), 1e-300));
    }
    rep.slope = fit_line(L, y).slope;
    rep.is_fast_decay = rep.slope >= 4.0;
    return rep;
}

}  // namespace probe
