#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "probe/potential.hpp"
#include "probe/quantum.hpp"

namespace probe {

/// Phase-space point of p(x, xi) = xi^2 + V(x).
struct PhasePoint {
    Eigen::VectorXd x;
    Eigen::VectorXd xi;
};

struct Trajectory {
    std::vector<double> t;
    std::vector<PhasePoint> z;
    bool box_exit = false;
    double max_drift = 0;  // max relative energy drift along the run
};

/// Leapfrog integration of xdot = 2 xi, xidot = -grad V.
/// Truncates with box_exit on leaving the box; throws "reduce dt" when the
/// relative energy drift exceeds 1e-6.
Trajectory flow(const Potential& pot, const PhasePoint& z0, double t_final, double dt);

struct PeriodBound {
    double a = 2;        // Lipschitz constant of the Hamiltonian field
    double b = 0;        // gradient-Lipschitz constant of grad V on the region
    double T = 0;        // 2 pi / a
    double region_radius = 0;  // spatial extent of {V <= E2 + eps}
    bool inflated = false;     // 5% sampling-safety applied
};

/// b = sup of the Hessian norm over the spatial projection of p^{-1}(J(eps)),
/// located by grid scan with at least `samples` points. The 5% safety inflation
/// is applied only when grid refinement still moves the sup (guards sampling
/// gaps); a refinement-stable sup is exact for the scanned region.
PeriodBound period_bound(const Potential& pot, const Window& win, int samples = 4096);

/// Primitive periods 2 pi / sqrt(2 mu_i) of the linearized flow at a
/// nondegenerate minimum; empty for maxima/degenerate points (no non-zero period).
std::vector<double> linearized_periods(const CriticalPoint& cp);

struct OrbitRecord {
    double energy = 0;
    double period = 0;
    Eigen::VectorXd launch_x;
    bool found = false;
};

struct OrbitSearch {
    std::vector<OrbitRecord> attempts;
    std::optional<double> shortest;  // over all found periods
};

/// Shooting search for the shortest periodic orbit with energy in [E1, E2].
OrbitSearch shortest_orbit_search(const Potential& pot, const Window& win, int energies = 24);

void dump_trajectory_csv(const Trajectory& traj, const std::string& path);

}  // namespace probe
