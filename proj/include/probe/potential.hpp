#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace probe {

/// Smooth potential on [-box, box]^n with analytic derivatives.
/// Evaluators must be pure; instances are immutable after construction and
/// safe to share across threads.
struct Potential {
    int n = 1;
    double box = 5.0;
    std::string label;
    std::function<double(const Eigen::VectorXd&)> value;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hessian;

    double v1(double x) const;  // convenience for n==1
};

enum class CriticalClass { minimum, maximum, saddle, unresolved };

std::string to_string(CriticalClass c);

struct CriticalPoint {
    Eigen::VectorXd x0;
    double value = 0;              // E_c = V(x0)
    Eigen::VectorXd hess_eigs;     // spectrum of d^2V(x0), ascending
    bool degenerate = false;
    CriticalClass cls = CriticalClass::unresolved;
};

/// Homogeneous leading part of V - E_c at an extremum.
struct Germ {
    Eigen::VectorXd x0;
    int k = 1;                     // degree 2k
    int sign = +1;                 // +1 definite positive, -1 definite negative
    std::function<double(const Eigen::VectorXd&)> sample;  // eta -> V_{2k}(eta)
};

/// Newton search on grad V from a uniform seed grid; merged, sorted by value.
/// warning_flag (if given) is set when no seed converged.
std::vector<CriticalPoint> find_critical_points(const Potential& pot, int seeds_per_axis,
                                                bool* warning_flag = nullptr);

/// Fits the homogeneity degree of V - E_c around cp and builds the germ sampler.
/// Throws std::runtime_error("non-homogeneous germ") or ("not an extremum germ").
Germ extract_germ(const Potential& pot, const CriticalPoint& cp);

/// Integral over S^{n-1} of |V_2k(eta)|^{-n/2k}; n=1 is the two-point sum.
double spherical_average(const Germ& g, int n);

/// Relative discrepancy of int_{R^n} exp(-|V_2k|) dx against (1/2k) Gamma(n/2k) * A.
double gamma_identity_check(const Germ& g, int n);

// ---- catalog ----------------------------------------------------------

Potential make_harmonic(double c, double box = 4.0);
Potential make_quartic(double box = 2.0);
Potential make_double_well(double box = 1.9);
Potential make_aniso2d(double c1, double c2, double box = 2.5);
/// h0 - c x^2 + d x^4 (maximum at 0 with value h0, regularized by the quartic term).
Potential make_barrier(double h0, double c, double d, double box = 2.6);

/// Plain-text polynomial: one term per line, "e1 [e2 ... en] coefficient".
Potential load_polynomial(const std::string& path, double box);
Potential make_polynomial(int n, const std::vector<std::pair<std::vector<int>, double>>& terms,
                          double box, const std::string& label);

/// Catalog lookup by name with parameter list; throws on unknown name.
Potential make_catalog(const std::string& name, const std::vector<double>& params);

}  // namespace probe
