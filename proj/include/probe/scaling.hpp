#pragma once

#include <Eigen/Dense>
#include <vector>

#include "probe/trace.hpp"

namespace probe {

/// Geometric hbar ladder: hbar_max * rho^i, i = 0..count-1.
struct Ladder {
    double hbar_max = 0.1;
    double rho = 0.75;
    int count = 10;

    std::vector<double> values() const;
    double hbar_min() const;
};

/// Fitted leading order |gamma| ~ |C| hbar^alpha log(1/hbar)^m.
struct OrderFit {
    double alpha = 0;
    int logflag = 0;           // m in {0, 1}
    Complex coefficient{0, 0}; // |C| from the fit, phase from the smallest-hbar sample
    double residual = 0;       // RMS residual of the selected model in log space
    double residual_other = 0; // RMS residual of the rejected model
    bool ambiguous = false;    // models tied within 10%
    Ladder ladder;
};

/// Least squares of log|gamma| against alpha log(hbar) + log|C| and the same
/// plus log log(1/hbar); the smaller residual wins, ties within 10% select m=0.
/// Pre: >= 6 samples at a common E with |gamma| > 10x its error bound.
/// Throws "oscillatory, refine E" on sign-definite alternation of the residuals.
OrderFit fit_order(const std::vector<GammaSample>& samples);

/// Variant without the error-bound precondition (used on derived sample sets
/// such as background-subtracted probes).
OrderFit fit_order_values(const std::vector<double>& hbars, const std::vector<Complex>& values);

struct DecayReport {
    double slope = 0;
    bool is_fast_decay = false;
};

/// slope of log|gamma| vs log hbar; fast decay when slope >= 4 or all values
/// below the absolute floor 1e-10 * scale.
DecayReport classify_regular(const std::vector<GammaSample>& samples, double sweep_max_abs = 0);

}  // namespace probe
