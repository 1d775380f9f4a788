#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <utility>

#include "probe/numerics.hpp"

namespace probe {

enum class BumpShape { standard_even, shifted, odd };

std::string to_string(BumpShape s);

struct TfGridSpec {
    int t_nodes = 8192;   // nodes across [-M, M], >= 4096
    int pad = 128;        // zero-padding factor for the inverse transform, >= 8
    double x_store = 0;   // stored half-range for phi; 0 = automatic (>= 240)
};

/// Admissible test function: phi_hat(t) = t^{2 j0} g(t) with g a bump supported
/// in [-M, M]; phi obtained by inverse Fourier transform, tabulated on a uniform
/// x grid with cubic interpolation. Fourier convention: phi_hat(t) = Int e^{itx} phi(x) dx.
/// Immutable after construction.
struct TestFunction {
    double M = 1;
    int j0 = 0;
    BumpShape shape = BumpShape::standard_even;
    bool complex_valued = false;

    // phi-hat tabulation on [-M, M]
    Eigen::VectorXd t_grid;
    Eigen::VectorXd phihat_grid;

    // phi tabulation on [-X, X], uniform step dx starting at x_first
    double x_first = 0, dx = 0;
    Eigen::VectorXd re, im;

    // decay / error metadata
    double tail_bound = 0;    // sup |phi| beyond the stored range
    double interp_tol = 0;    // absolute interpolation error bound
    double max_abs = 0;       // max |phi| on the tabulation
    double l1_norm = 0;

    // flatness diagnostics: scaled Taylor coefficients of phi_hat at 0 (see source)
    Eigen::VectorXd flat_coeffs;
    int flatness_verified = 0;  // largest j0' with all coefficients below j' < 2 j0' vanishing

    double x_max() const { return x_first + dx * (re.size() - 1); }
    Complex eval(double s) const;
    Complex eval_deriv(double s) const;
    double phihat_at(double t) const;
    double phihat0() const { return phihat_at(0.0); }

    /// integral of w(s) phi(s) over the tabulated range (trapezoid on the grid)
    Complex integrate_weighted(const std::function<double(double)>& w) const;
};

/// Builds the test function; throws std::runtime_error("increase grid") when the
/// aliasing check fails (energy in the outer 10% of the x period above 1e-10 of total).
TestFunction build_test_function(double M, int j0, BumpShape shape, TfGridSpec grid = {});

struct AdmissibilityReport {
    bool support_ok = false;
    bool flat_ok = false;
    int max_flatness_verified = 0;
};

AdmissibilityReport check_admissibility(const TestFunction& tf, double T);

/// Standard-even and odd bumps on identical grids (same M, j0, grid).
std::pair<TestFunction, TestFunction> parity_pair(double M, int j0, TfGridSpec grid = {});

/// Two-column export (x, Re phi, Im phi).
void export_table(const TestFunction& tf, const std::string& path);

}  // namespace probe
