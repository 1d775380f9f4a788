#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "probe/quantum.hpp"
#include "probe/testfn.hpp"

namespace probe {

/// One value of the scaled spectral distribution gamma(E, hbar, phi).
struct GammaSample {
    double E = 0;
    double hbar = 0;
    Complex value{0, 0};
    int count = 0;          // eigenvalues in the window
    double err_bound = 0;   // interpolation + eigenvalue-error propagation + tails
};

/// gamma = sum over lambda_j in J(eps) of phi((lambda_j - E)/hbar).
/// Refuses ("spectrum too coarse for this hbar") when the eigenvalue error
/// bound reaches 0.1 hbar.
GammaSample gamma_sample(const EigenSet& es, const TestFunction& tf, double E);

/// Liouville volume d/dE Vol{p <= E} by central difference of a phase-space
/// volume quadrature (n=1) or common-random-number Monte Carlo (n=2).
struct LiouvilleResult {
    double value = 0;
    double std_error = 0;  // statistical error (n=2 Monte Carlo)
};
LiouvilleResult liouville_volume(const Potential& pot, double E, double guard = 0.01,
                                 std::uint64_t seed = 12345, long mc_points = 10'000'000);

/// Weyl-law control: max |gamma (2 pi hbar)^{n-1} 2 pi / (phihat(0) LVol) - 1|
/// evaluated at the smallest hbar of the ladder.
struct WeylReport {
    double deviation_at_smallest = 0;
    std::vector<double> hbars;
    std::vector<double> deviations;
    double lvol = 0;
};
WeylReport weyl_check(const std::vector<EigenSet>& ladder, const TestFunction& tf_nonflat,
                      const Potential& pot, double E, std::uint64_t seed = 12345);

/// Same control against a caller-supplied Liouville volume (oracle spectra).
WeylReport weyl_check_with_lvol(const std::vector<EigenSet>& ladder,
                                const TestFunction& tf_nonflat, int n, double E, double lvol);

}  // namespace probe
