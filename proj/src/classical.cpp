#include "probe/classical.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "probe/numerics.hpp"

namespace probe {

namespace {

constexpr double kDriftTol = 1e-6;

double energy(const Potential& pot, const PhasePoint& z) {
    return z.xi.squaredNorm() + pot.value(z.x);
}

/// one KDK leapfrog step
void leap(const Potential& pot, PhasePoint& z, double dt) {
    z.xi -= 0.5 * dt * pot.gradient(z.x);
    z.x += dt * 2.0 * z.xi;
    z.xi -= 0.5 * dt * pot.gradient(z.x);
}

}  // namespace

Trajectory flow(const Potential& pot, const PhasePoint& z0, double t_final, double dt) {
    if (dt <= 0) throw std::invalid_argument("flow: dt > 0 required");
    Trajectory traj;
    const double sgn = t_final < 0 ? -1.0 : 1.0;
    const double step = sgn * dt;
    const long nsteps = static_cast<long>(std::ceil(std::abs(t_final) / dt));
    const double e0 = energy(pot, z0);

    PhasePoint z = z0;
    traj.t.reserve(nsteps + 1);
    traj.z.reserve(nsteps + 1);
    traj.t.push_back(0);
    traj.z.push_back(z);
    for (long i = 0; i < nsteps; ++i) {
        leap(pot, z, step);
        const double drift = std::abs(energy(pot, z) - e0) / (1.0 + std::abs(e0));
        traj.max_drift = std::max(traj.max_drift, drift);
        if (drift > kDriftTol)
            throw std::runtime_error("reduce dt: energy drift " + format_double(drift));
        traj.t.push_back((i + 1) * step);
        traj.z.push_back(z);
        if ((z.x.array().abs() > pot.box).any()) {
            traj.box_exit = true;
            break;
        }
    }
    return traj;
}

PeriodBound period_bound(const Potential& pot, const Window& win, int samples) {
    win.validate();
    const double vcap = win.hi();

    auto scan = [&](int m) {
        double sup = -1, radius = 0;
        if (pot.n == 1) {
            for (int i = 0; i <= m; ++i) {
                Eigen::VectorXd x(1);
                x << -pot.box + 2.0 * pot.box * i / m;
                if (pot.value(x) > vcap) continue;
                sup = std::max(sup, std::abs(pot.hessian(x)(0, 0)));
                radius = std::max(radius, std::abs(x(0)));
            }
        } else {
            const int g = std::max(32, static_cast<int>(std::sqrt(double(m))));
            for (int i = 0; i <= g; ++i)
                for (int j = 0; j <= g; ++j) {
                    Eigen::VectorXd x(2);
                    x << -pot.box + 2.0 * pot.box * i / g, -pot.box + 2.0 * pot.box * j / g;
                    if (pot.value(x) > vcap) continue;
                    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(pot.hessian(x));
                    sup = std::max(sup, es.eigenvalues().cwiseAbs().maxCoeff());
                    radius = std::max(radius, x.norm());
                }
        }
        return std::pair{sup, radius};
    };

    const int m = std::max(samples, 4096);
    const auto [sup_full, radius] = scan(m);
    if (sup_full < 0) throw std::runtime_error("period_bound: no point of p^-1(J) found");
    const auto [sup_half, radius_half] = scan(m / 2);
    (void)radius_half;

    PeriodBound pb;
    pb.region_radius = radius;
    pb.inflated = std::abs(sup_full - sup_half) > 1e-9 * std::max(1.0, sup_full);
    pb.b = pb.inflated ? 1.05 * sup_full : sup_full;
    pb.a = std::max(2.0, pb.b);
    pb.T = 2.0 * M_PI / pb.a;
    return pb;
}

std::vector<double> linearized_periods(const CriticalPoint& cp) {
    if (cp.cls != CriticalClass::minimum || cp.degenerate) return {};
    std::vector<double> out;
    for (Eigen::Index i = 0; i < cp.hess_eigs.size(); ++i) {
        const double mu = cp.hess_eigs(i);
        if (mu <= 0) return {};
        out.push_back(2.0 * M_PI / std::sqrt(2.0 * mu));
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

/// First return time to the section {x(0)-plane, same crossing direction};
/// returns 0 when no return is detected within t_max.
double section_return_time(const Potential& pot, const PhasePoint& z0, double dt, double t_max) {
    PhasePoint z = z0;
    const double e0 = energy(pot, z0);
    const double x0 = z0.x(0);
    double prev_s = 0, prev_t = 0;
    const long nsteps = static_cast<long>(t_max / dt);
    // require leaving the section neighbourhood first
    bool armed = false;
    const double scale = std::max(1.0, z0.x.norm() + z0.xi.norm());
    for (long i = 1; i <= nsteps; ++i) {
        leap(pot, z, dt);
        const double t = i * dt;
        if (std::abs(energy(pot, z) - e0) / (1.0 + std::abs(e0)) > kDriftTol) return 0;
        if ((z.x.array().abs() > pot.box).any()) return 0;
        const double s = z.x(0) - x0;
        if (!armed) {
            if (std::abs(s) > 1e-3 * scale) armed = true;
        } else if (prev_s < 0 && s >= 0 && z.xi(0) > 0) {
            // linear interpolation of the crossing time
            const double tc = prev_t + dt * (-prev_s) / (s - prev_s);
            if (pot.n == 1) return tc;
            // n >= 2: accept only if the full phase point returned
            Eigen::VectorXd dxf = z.x - z0.x;
            Eigen::VectorXd dvf = z.xi - z0.xi;
            if (dxf.norm() + dvf.norm() < 1e-2 * scale) return tc;
        }
        prev_s = s;
        prev_t = t;
    }
    return 0;
}

}  // namespace

OrbitSearch shortest_orbit_search(const Potential& pot, const Window& win, int energies) {
    win.validate();
    OrbitSearch out;
    const PeriodBound pb = period_bound(pot, win);
    const double dt = std::min(pb.T, 2.0 * M_PI / std::sqrt(2.0 * std::max(pb.b, 2.0))) / 2000.0;
    const double t_max = 60.0;

    for (int ie = 0; ie < energies; ++ie) {
        const double E = win.E1 + (win.E2 - win.E1) * (ie + 0.5) / energies;
        if (pot.n == 1) {
            // launch from each potential-well floor at this energy
            const int m = 2048;
            double prev_v = pot.v1(-pot.box);
            bool inside = prev_v < E;
            double best_x = -pot.box, best_v = prev_v;
            for (int i = 1; i <= m + 1; ++i) {
                const double x = -pot.box + 2.0 * pot.box * i / m;
                const double v = i <= m ? pot.v1(x) : E + 1.0;
                if (v < E) {
                    if (!inside) {
                        inside = true;
                        best_x = x;
                        best_v = v;
                    } else if (v < best_v) {
                        best_x = x;
                        best_v = v;
                    }
                } else if (inside) {
                    inside = false;
                    OrbitRecord rec;
                    rec.energy = E;
                    rec.launch_x = Eigen::VectorXd::Constant(1, best_x);
                    PhasePoint z0{rec.launch_x, Eigen::VectorXd::Constant(
                                                    1, std::sqrt(std::max(E - best_v, 0.0)))};
                    const double T = section_return_time(pot, z0, dt, t_max);
                    rec.found = T > 0;
                    rec.period = T;
                    out.attempts.push_back(rec);
                }
            }
        } else {
            // launch on the energy shell along a fan of directions
            for (int id = 0; id < 8; ++id) {
                const double th = M_PI * id / 8.0;
                Eigen::VectorXd dir(2);
                dir << std::cos(th), std::sin(th);
                // find the point of minimal V along the ray, then set momentum
                double best_s = 0, best_v = pot.value(Eigen::VectorXd::Zero(2));
                for (int i = -64; i <= 64; ++i) {
                    const double s = pot.box * i / 64.0;
                    const double v = pot.value((s * dir).eval());
                    if (v < best_v) {
                        best_v = v;
                        best_s = s;
                    }
                }
                if (best_v >= E) continue;
                OrbitRecord rec;
                rec.energy = E;
                rec.launch_x = best_s * dir;
                Eigen::VectorXd xi = std::sqrt(E - best_v) * dir;
                PhasePoint z0{rec.launch_x, xi};
                const double T = section_return_time(pot, z0, dt, t_max);
                rec.found = T > 0;
                rec.period = T;
                out.attempts.push_back(rec);
            }
        }
    }
    for (const auto& r : out.attempts)
        if (r.found && (!out.shortest || r.period < *out.shortest)) out.shortest = r.period;
    return out;
}

void dump_trajectory_csv(const Trajectory& traj, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    if (traj.z.empty()) return;
    const int n = static_cast<int>(traj.z[0].x.size());
    out << "t";
    for (int d = 0; d < n; ++d) out << ",x" << d;
    for (int d = 0; d < n; ++d) out << ",xi" << d;
    out << '\n';
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        out << format_double(traj.t[i]);
        for (int d = 0; d < n; ++d) out << ',' << format_double(traj.z[i].x(d));
        for (int d = 0; d < n; ++d) out << ',' << format_double(traj.z[i].xi(d));
        out << '\n';
    }
}

}  // namespace probe
