#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace probe {

using Complex = std::complex<double>;

/// Straight-line least squares y ~ intercept + slope*x.
struct LineFit {
    double slope = 0;
    double intercept = 0;
    double rms = 0;  // root mean square residual
};

LineFit fit_line(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// Complex linear least squares y ~ a*x + b; returns (a, b).
std::pair<Complex, Complex> fit_line_complex(const Eigen::VectorXd& x,
                                             const Eigen::VectorXcd& y);

/// Four-point Lagrange interpolation on a uniform grid starting at x0 with step dx.
/// Clamped to the tabulated range; caller handles out-of-range logic.
double interp_cubic(const Eigen::VectorXd& values, double x0, double dx, double x);
double interp_cubic_deriv(const Eigen::VectorXd& values, double x0, double dx, double x);

/// Composite-Simpson integration with interval doubling until |I_2n - I_n| <= tol*(1+|I_2n|).
/// Throws std::runtime_error on non-convergence.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol, int max_doublings = 16, int base_intervals = 64);

/// Same but keeps the best estimate instead of throwing; reports achieved tolerance.
double integrate_best_effort(const std::function<double(double)>& f, double a, double b,
                             double rel_tol, double* achieved = nullptr);

/// Euler Beta via lgamma.
double beta_function(double a, double b);

/// FNV-1a 64-bit hash of a byte string.
std::uint64_t fnv1a64(std::string_view bytes);

/// Shortest-round-trip decimal formatting for doubles (%.17g semantics).
std::string format_double(double v);

/// Deterministic parallel map: fn(i) for i in [0,n), results placed by index.
/// Worker count from PROBE_THREADS (default: hardware, capped at 8); n small runs inline.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace probe
