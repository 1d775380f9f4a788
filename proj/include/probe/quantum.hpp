#pragma once

#include <Eigen/Dense>
#include <string>

#include "probe/potential.hpp"

namespace probe {

/// Spectral window J(eps) = [E1-eps, E2+eps].
struct Window {
    double E1 = 0, E2 = 1;
    double eps = 0;  // 0 = automatic: 10% of |J|

    double lo() const { return E1 - margin(); }
    double hi() const { return E2 + margin(); }
    double margin() const { return eps > 0 ? eps : 0.1 * (E2 - E1); }
    void validate() const;
};

/// Eigenvalues of -hbar^2 Lap + V inside J(eps), sorted ascending.
struct EigenSet {
    double hbar = 0;
    Eigen::VectorXd lambda;
    Eigen::VectorXd err_bound;  // per-eigenvalue absolute error estimate
    // discretization record
    int n = 1;
    double box = 0;
    int grid_points = 0;   // finest grid used (per axis)
    int stencil_order = 2; // Richardson over two 2nd-order grids => effective 4
    std::string provenance;
};

struct ResolutionPolicy {
    double points_per_wavelength = 32;  // de Broglie points per wavelength (base grid)
    int min_points = 64;
    int max_points_1d = 2'000'000;
    int max_points_2d = 120;            // per axis cap for n=2
};

/// Finite-difference Dirichlet eigensolve, Richardson-extrapolated over two grids.
/// Throws "box too small" when V on the boundary does not clear the window,
/// and "resolution insufficient" when the error estimate is too large for hbar.
EigenSet discretize_and_solve(const Potential& pot, double hbar, const Window& win,
                              const ResolutionPolicy& policy = {});

/// Closed-form oscillator spectrum: n=1: hbar sqrt(c) (2j+1); n=2 isotropic:
/// 2 hbar sqrt(c) (j+1) with multiplicity j+1. Filtered to the window.
EigenSet oscillator_oracle(double c, double hbar, const Window& win, int n);

/// Closed-form separable spectrum of c1 x1^2 + c2 x2^2.
EigenSet oscillator2d_oracle(double c1, double c2, double hbar, const Window& win);

/// Weyl count estimate for the window (phase-space volume / (2 pi hbar)^n).
double weyl_count_estimate(const Potential& pot, const Window& win, double hbar);

void save_eigenset_csv(const EigenSet& es, const std::string& path);
EigenSet load_eigenset_csv(const std::string& path);

}  // namespace probe
