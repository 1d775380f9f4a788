#include "probe/testfn.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace probe {

namespace {

/// fraction of the x period counted as "outer" for the aliasing energy check
constexpr double kAliasOuterFraction = 0.10;
constexpr double kAliasEnergyTol = 1e-10;
/// scaled-Taylor threshold below which a phi-hat coefficient counts as vanishing
constexpr double kFlatTol = 1e-6;

double bump(double u) {  // supported on |u| < 1
    if (std::abs(u) >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - u * u));
}

double bump_factor(BumpShape shape, double t, double M) {
    switch (shape) {
        case BumpShape::standard_even: return bump(t / M);
        case BumpShape::odd: return bump(t / M) * (t / M);
        case BumpShape::shifted: return bump((t - 0.5 * M) / (0.5 * M));
    }
    return 0.0;
}

}  // namespace

std::string to_string(BumpShape s) {
    switch (s) {
        case BumpShape::standard_even: return "standard-even";
        case BumpShape::odd: return "odd";
        case BumpShape::shifted: return "shifted";
    }
    return "?";
}

TestFunction build_test_function(double M, int j0, BumpShape shape, TfGridSpec grid) {
    if (M <= 0) throw std::invalid_argument("build_test_function: M > 0 required");
    if (j0 < 0) throw std::invalid_argument("build_test_function: j0 >= 0 required");
    if (grid.t_nodes < 16) throw std::invalid_argument("t_nodes too small");
    if (grid.pad < 8) throw std::invalid_argument("zero-padding factor >= 8 required");

    const long K = static_cast<long>(grid.t_nodes) * grid.pad;
    const double dt = 2.0 * M / grid.t_nodes;
    const double dx = 2.0 * M_PI / (K * dt);

    // phi(x_m) = (dt/2pi) (-1)^m FFT[(-1)^k phihat(t_k)](m) on centered grids
    std::vector<Complex> in(K);
    for (long k = 0; k < K; ++k) {
        const double t = (k - K / 2) * dt;
        const double v = std::pow(t, 2 * j0) * bump_factor(shape, t, M);
        in[k] = (k % 2 == 0) ? Complex(v, 0) : Complex(-v, 0);
    }
    Eigen::FFT<double> fft;
    std::vector<Complex> out(K);
    fft.fwd(out, in);
    const double scale = dt / (2.0 * M_PI);
    std::vector<Complex> phi(K);
    for (long m = 0; m < K; ++m)
        phi[m] = scale * ((m % 2 == 0) ? out[m] : -out[m]);

    // aliasing check: |phi|^2 energy in the outer 10% of the x period
    double e_tot = 0, e_out = 0;
    const long outer = static_cast<long>(kAliasOuterFraction * 0.5 * K);
    for (long m = 0; m < K; ++m) {
        const double e = std::norm(phi[m]);
        e_tot += e;
        if (m < outer || m >= K - outer) e_out += e;
    }
    if (e_tot <= 0 || e_out > kAliasEnergyTol * e_tot)
        throw std::runtime_error("increase grid: aliasing energy check failed");

    TestFunction tf;
    tf.M = M;
    tf.j0 = j0;
    tf.shape = shape;

    // phi-hat tabulation restricted to [-M, M]
    {
        const long kc = K / 2;
        const long half = static_cast<long>(std::ceil(M / dt)) + 2;
        const long lo = kc - half, hi = kc + half;
        tf.t_grid.resize(hi - lo + 1);
        tf.phihat_grid.resize(hi - lo + 1);
        for (long k = lo; k <= hi; ++k) {
            const double t = (k - kc) * dt;
            tf.t_grid(k - lo) = t;
            tf.phihat_grid(k - lo) = std::pow(t, 2 * j0) * bump_factor(shape, t, M);
        }
    }

    // stored x range
    const double period_half = M_PI / dt;
    double X = grid.x_store > 0 ? grid.x_store : std::max(240.0, 1100.0 / M);
    X = std::min(X, 0.45 * 2.0 * period_half);
    const long mlo = static_cast<long>(std::floor((-X) / dx)) + K / 2;
    const long mhi = static_cast<long>(std::ceil(X / dx)) + K / 2;
    const long nstore = mhi - mlo + 1;
    tf.x_first = (mlo - K / 2) * dx;
    tf.dx = dx;
    tf.re.resize(nstore);
    tf.im.resize(nstore);
    double tail = 0, maxabs = 0, l1 = 0;
    for (long m = 0; m < K; ++m) {
        const double a = std::abs(phi[m]);
        maxabs = std::max(maxabs, a);
        l1 += a;
        if (m < mlo || m > mhi) tail = std::max(tail, a);
    }
    for (long m = mlo; m <= mhi; ++m) {
        tf.re(m - mlo) = phi[m].real();
        tf.im(m - mlo) = phi[m].imag();
    }
    tf.tail_bound = tail;
    tf.max_abs = maxabs;
    tf.l1_norm = l1 * dx;

    // interpolation error bound from |phi''''| <= (1/2pi) Int t^4 |phihat|
    double m4 = 0;
    for (long i = 0; i < tf.t_grid.size(); ++i)
        m4 += std::pow(tf.t_grid(i), 4) * std::abs(tf.phihat_grid(i)) * dt;
    tf.interp_tol = (m4 / (2.0 * M_PI)) * std::pow(dx, 4) * (9.0 / 16.0) / 24.0;

    // imaginary part is pure roundoff for the real-even bump
    tf.complex_valued = (shape != BumpShape::standard_even);
    if (!tf.complex_valued) tf.im.setZero();

    // flatness: scaled Taylor coefficients of phi-hat at 0, fitted on |t| <= M/4
    {
        const double tfit = 0.25 * M;
        std::vector<double> ts, vs;
        for (long i = 0; i < tf.t_grid.size(); ++i)
            if (std::abs(tf.t_grid(i)) <= tfit) {
                ts.push_back(tf.t_grid(i) / tfit);
                vs.push_back(tf.phihat_grid(i));
            }
        const int deg = std::min(2 * j0 + 2, 12);
        Eigen::MatrixXd V(ts.size(), deg + 1);
        Eigen::VectorXd y(ts.size());
        for (std::size_t r = 0; r < ts.size(); ++r) {
            double p = 1;
            for (int c = 0; c <= deg; ++c) {
                V(r, c) = p;
                p *= ts[r];
            }
            y(r) = vs[r];
        }
        tf.flat_coeffs = V.colPivHouseholderQr().solve(y);
        const double ref = tf.phihat_grid.cwiseAbs().maxCoeff();
        int jf = 0;
        while (jf <= deg && std::abs(tf.flat_coeffs(jf)) <= kFlatTol * ref) ++jf;
        tf.flatness_verified = jf / 2;
    }
    return tf;
}

Complex TestFunction::eval(double s) const {
    if (s < x_first || s > x_max()) return {0.0, 0.0};
    const double r = interp_cubic(re, x_first, dx, s);
    const double i = complex_valued ? interp_cubic(im, x_first, dx, s) : 0.0;
    return {r, i};
}

Complex TestFunction::eval_deriv(double s) const {
    if (s < x_first || s > x_max()) return {0.0, 0.0};
    const double r = interp_cubic_deriv(re, x_first, dx, s);
    const double i = complex_valued ? interp_cubic_deriv(im, x_first, dx, s) : 0.0;
    return {r, i};
}

double TestFunction::phihat_at(double t) const {
    if (t < t_grid(0) || t > t_grid(t_grid.size() - 1)) return 0.0;
    return interp_cubic(phihat_grid, t_grid(0), t_grid(1) - t_grid(0), t);
}

Complex TestFunction::integrate_weighted(const std::function<double(double)>& w) const {
    // trapezoid over the stored tabulation
    Complex acc{0, 0};
    const auto n = re.size();
    for (Eigen::Index i = 0; i < n; ++i) {
        const double x = x_first + i * dx;
        const double wt = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        acc += wt * w(x) * Complex(re(i), im(i));
    }
    return acc * dx;
}

AdmissibilityReport check_admissibility(const TestFunction& tf, double T) {
    AdmissibilityReport rep;
    rep.support_ok = tf.M < T;
    rep.max_flatness_verified = tf.flatness_verified;
    rep.flat_ok = tf.flatness_verified >= tf.j0;
    return rep;
}

std::pair<TestFunction, TestFunction> parity_pair(double M, int j0, TfGridSpec grid) {
    return {build_test_function(M, j0, BumpShape::standard_even, grid),
            build_test_function(M, j0, BumpShape::odd, grid)};
}

void export_table(const TestFunction& tf, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "# x re_phi im_phi\n";
    for (Eigen::Index i = 0; i < tf.re.size(); ++i)
        out << format_double(tf.x_first + i * tf.dx) << ' ' << format_double(tf.re(i)) << ' '
            << format_double(tf.im(i)) << '\n';
}

}  // namespace probe
