#include "probe/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace probe {

LineFit fit_line(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    const auto n = x.size();
    if (n < 2 || y.size() != n) throw std::invalid_argument("fit_line: need >=2 paired points");
    const double xm = x.mean(), ym = y.mean();
    const Eigen::VectorXd dx = x.array() - xm;
    const double sxx = dx.squaredNorm();
    if (sxx <= 0) throw std::invalid_argument("fit_line: degenerate abscissae");
    LineFit f;
    const Eigen::VectorXd dy = y.array() - ym;
    f.slope = dx.dot(dy) / sxx;
    f.intercept = ym - f.slope * xm;
    const Eigen::VectorXd r = dy - f.slope * dx;
    f.rms = std::sqrt(r.squaredNorm() / static_cast<double>(n));
    return f;
}

std::pair<Complex, Complex> fit_line_complex(const Eigen::VectorXd& x,
                                             const Eigen::VectorXcd& y) {
    const auto n = x.size();
    if (n < 2 || y.size() != n) throw std::invalid_argument("fit_line_complex: size mismatch");
    Eigen::MatrixXcd A(n, 2);
    A.col(0) = x.cast<Complex>();
    A.col(1).setOnes();
    Eigen::Vector2cd sol = A.colPivHouseholderQr().solve(y);
    return {sol(0), sol(1)};
}

namespace {

// Lagrange weights for the 4 nodes around u in [0,1) between nodes 1 and 2.
inline void lagrange4(double u, double w[4]) {
    w[0] = -u * (u - 1.0) * (u - 2.0) / 6.0;
    w[1] = (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0;
    w[2] = -(u + 1.0) * u * (u - 2.0) / 2.0;
    w[3] = (u + 1.0) * u * (u - 1.0) / 6.0;
}

inline void lagrange4_deriv(double u, double w[4]) {
    w[0] = -(3.0 * u * u - 6.0 * u + 2.0) / 6.0;
    w[1] = (3.0 * u * u - 4.0 * u - 1.0) / 2.0;
    w[2] = -(3.0 * u * u - 2.0 * u - 2.0) / 2.0;
    w[3] = (3.0 * u * u - 1.0) / 6.0;
}

template <typename WeightFn>
double interp4(const Eigen::VectorXd& v, double x0, double dx, double x, WeightFn wf,
               double deriv_scale) {
    const auto n = v.size();
    if (n < 4) throw std::invalid_argument("interp_cubic: need >=4 nodes");
    double s = (x - x0) / dx;
    long i = static_cast<long>(std::floor(s));
    i = std::clamp(i, 1L, static_cast<long>(n) - 3);
    const double u = s - static_cast<double>(i);
    double w[4];
    wf(u, w);
    const double r =
        w[0] * v(i - 1) + w[1] * v(i) + w[2] * v(i + 1) + w[3] * v(i + 2);
    return r * deriv_scale;
}

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    // n intervals, n even
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

}  // namespace

double interp_cubic(const Eigen::VectorXd& v, double x0, double dx, double x) {
    return interp4(v, x0, dx, x, lagrange4, 1.0);
}

double interp_cubic_deriv(const Eigen::VectorXd& v, double x0, double dx, double x) {
    return interp4(v, x0, dx, x, lagrange4_deriv, 1.0 / dx);
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol, int max_doublings, int base_intervals) {
    double achieved = 0;
    int n = base_intervals;
    double prev = simpson(f, a, b, n);
    for (int d = 0; d < max_doublings; ++d) {
        n *= 2;
        const double cur = simpson(f, a, b, n);
        achieved = std::abs(cur - prev);
        if (achieved <= rel_tol * (1.0 + std::abs(cur))) return cur;
        prev = cur;
    }
    throw std::runtime_error("integrate_adaptive: no convergence, achieved " +
                             std::to_string(achieved));
}

double integrate_best_effort(const std::function<double(double)>& f, double a, double b,
                             double rel_tol, double* achieved_out) {
    int n = 64;
    double prev = simpson(f, a, b, n);
    double achieved = std::abs(prev);
    for (int d = 0; d < 16; ++d) {
        n *= 2;
        const double cur = simpson(f, a, b, n);
        achieved = std::abs(cur - prev);
        prev = cur;
        if (achieved <= rel_tol * (1.0 + std::abs(cur))) break;
    }
    if (achieved_out) *achieved_out = achieved;
    return prev;
}

double beta_function(double a, double b) {
    return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    unsigned workers = std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
    workers = std::min(workers, 8u);
    if (const char* env = std::getenv("PROBE_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1 && v <= 256) workers = static_cast<unsigned>(v);
    }
    if (n <= 1 || workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::mutex err_mx;
    const unsigned nw = std::min<std::size_t>(workers, n);
    pool.reserve(nw);
    for (unsigned w = 0; w < nw; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lk(err_mx);
                    if (!err) err = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace probe
