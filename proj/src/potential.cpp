#include "probe/potential.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "probe/numerics.hpp"

namespace probe {

namespace {

/// gradient tolerance scale of the critical-point invariant
constexpr double kGradTol = 1e-10;
/// Hessian eigenvalue below this (times curvature scale) counts as degenerate
constexpr double kDegenTol = 1e-6;
constexpr int kNewtonIters = 80;

Eigen::VectorXd v1d(double x) {
    Eigen::VectorXd v(1);
    v << x;
    return v;
}

}  // namespace

double Potential::v1(double x) const { return value(v1d(x)); }

std::string to_string(CriticalClass c) {
    switch (c) {
        case CriticalClass::minimum: return "minimum";
        case CriticalClass::maximum: return "maximum";
        case CriticalClass::saddle: return "saddle";
        default: return "unresolved";
    }
}

std::vector<CriticalPoint> find_critical_points(const Potential& pot, int seeds_per_axis,
                                                bool* warning_flag) {
    if (seeds_per_axis < 3) throw std::invalid_argument("find_critical_points: seeds-per-axis >= 3");
    const int n = pot.n;
    const double L = pot.box;
    const double dedup = 1e-6 * L;

    std::vector<Eigen::VectorXd> roots;
    std::vector<Eigen::VectorXd> seeds;
    if (n == 1) {
        for (int i = 0; i < seeds_per_axis; ++i)
            seeds.push_back(v1d(-L + (2.0 * L) * (i + 0.5) / seeds_per_axis));
    } else {
        for (int i = 0; i < seeds_per_axis; ++i)
            for (int j = 0; j < seeds_per_axis; ++j) {
                Eigen::VectorXd s(2);
                s << -L + (2.0 * L) * (i + 0.5) / seeds_per_axis,
                    -L + (2.0 * L) * (j + 0.5) / seeds_per_axis;
                seeds.push_back(s);
            }
    }

    for (const auto& seed : seeds) {
        Eigen::VectorXd x = seed;
        bool ok = false;
        for (int it = 0; it < kNewtonIters; ++it) {
            const Eigen::VectorXd g = pot.gradient(x);
            const Eigen::MatrixXd H = pot.hessian(x);
            const double hs = 1.0 + H.norm();
            if (g.norm() <= kGradTol * hs) {
                ok = true;
                break;
            }
            Eigen::FullPivLU<Eigen::MatrixXd> lu(H);
            Eigen::VectorXd step;
            if (lu.isInvertible()) {
                step = lu.solve(g);
            } else {
                // fall back to gradient descent with a conservative step
                step = g / hs;
            }
            // damp large steps so iterates stay in the box
            const double ms = 0.25 * L;
            if (step.norm() > ms) step *= ms / step.norm();
            x -= step;
            if ((x.array().abs() > 1.5 * L).any()) break;
        }
        if (!ok) continue;
        bool dup = false;
        for (const auto& r : roots)
            if ((r - x).norm() < dedup) {
                dup = true;
                break;
            }
        if (!dup && (x.array().abs() <= L).all()) roots.push_back(x);
    }

    if (warning_flag) *warning_flag = roots.empty();

    std::vector<CriticalPoint> out;
    for (const auto& x : roots) {
        CriticalPoint cp;
        cp.x0 = x;
        cp.value = pot.value(x);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(pot.hessian(x));
        cp.hess_eigs = es.eigenvalues();
        const double scale = std::max(1.0, cp.hess_eigs.cwiseAbs().maxCoeff());
        cp.degenerate = (cp.hess_eigs.cwiseAbs().minCoeff() < kDegenTol * scale);
        if (cp.degenerate) {
            cp.cls = CriticalClass::unresolved;
        } else if ((cp.hess_eigs.array() > 0).all()) {
            cp.cls = CriticalClass::minimum;
        } else if ((cp.hess_eigs.array() < 0).all()) {
            cp.cls = CriticalClass::maximum;
        } else {
            cp.cls = CriticalClass::saddle;
        }
        out.push_back(std::move(cp));
    }
    std::sort(out.begin(), out.end(),
              [](const CriticalPoint& a, const CriticalPoint& b) { return a.value < b.value; });
    return out;
}

namespace {

/// limit of (V(x0 + t y) - Ec)/t^{2k} as t -> 0, Neville extrapolation in t over 4 dyadic nodes
double germ_limit(const Potential& pot, const Eigen::VectorXd& x0, double Ec, int k,
                  const Eigen::VectorXd& y) {
    const double yn = y.norm();
    if (yn == 0) return 0;
    const double t0 = 0.04 / std::max(1.0, yn);
    double t[4], g[4];
    for (int i = 0; i < 4; ++i) {
        t[i] = t0 / static_cast<double>(1 << i);
        g[i] = (pot.value(x0 + t[i] * y) - Ec) / std::pow(t[i], 2 * k);
    }
    // Neville for the value at t=0
    for (int lvl = 1; lvl < 4; ++lvl)
        for (int i = 0; i < 4 - lvl; ++i)
            g[i] = (g[i] * (0.0 - t[i + lvl]) - g[i + 1] * (0.0 - t[i])) / (t[i] - t[i + lvl]);
    return g[0];
}

std::vector<Eigen::VectorXd> sphere_directions(int n, int count) {
    std::vector<Eigen::VectorXd> dirs;
    if (n == 1) {
        dirs.push_back(v1d(1.0));
        dirs.push_back(v1d(-1.0));
    } else {
        for (int i = 0; i < count; ++i) {
            const double th = 2.0 * M_PI * i / count;
            Eigen::VectorXd d(2);
            d << std::cos(th), std::sin(th);
            dirs.push_back(d);
        }
    }
    return dirs;
}

}  // namespace

Germ extract_germ(const Potential& pot, const CriticalPoint& cp) {
    const int n = pot.n;
    const double Ec = cp.value;
    const auto dirs = sphere_directions(n, 16);

    // log-log slope of |V(x0 + r eta) - Ec| over r in [1e-3, 1e-1], averaged over eta
    const int nr = 15;
    Eigen::VectorXd lr(nr), ls(nr);
    double slope_sum = 0;
    int slope_cnt = 0;
    for (const auto& eta : dirs) {
        for (int i = 0; i < nr; ++i) {
            const double r = 1e-3 * std::pow(100.0, i / double(nr - 1));
            const double dv = std::abs(pot.value(cp.x0 + r * eta) - Ec);
            lr(i) = std::log(r);
            ls(i) = std::log(std::max(dv, 1e-300));
        }
        slope_sum += fit_line(lr, ls).slope;
        ++slope_cnt;
    }
    const double slope = slope_sum / slope_cnt;
    const int twok = static_cast<int>(std::lround(slope / 2.0)) * 2;
    if (twok < 2 || std::abs(slope - twok) > 0.1)
        throw std::runtime_error("non-homogeneous germ: log-log slope " + std::to_string(slope));
    const int k = twok / 2;

    // sign definiteness over sphere samples
    int sign = 0;
    for (const auto& eta : dirs) {
        const double v = germ_limit(pot, cp.x0, Ec, k, eta);
        const int s = (v > 0) - (v < 0);
        if (s == 0 || (sign != 0 && s != sign))
            throw std::runtime_error("not an extremum germ: mixed or vanishing sign on sphere");
        sign = s;
    }

    Germ g;
    g.x0 = cp.x0;
    g.k = k;
    g.sign = sign;
    const Potential p = pot;  // copy for capture
    const Eigen::VectorXd x0 = cp.x0;
    g.sample = [p, x0, Ec, k](const Eigen::VectorXd& y) {
        return germ_limit(p, x0, Ec, k, y);
    };
    return g;
}

double spherical_average(const Germ& g, int n) {
    const double expo = -static_cast<double>(n) / (2.0 * g.k);
    auto term = [&](const Eigen::VectorXd& eta) {
        const double v = std::abs(g.sample(eta));
        if (v < 1e-14) throw std::runtime_error("germ vanishes on sphere");
        return std::pow(v, expo);
    };
    if (n == 1) {
        return term(v1d(1.0)) + term(v1d(-1.0));
    }
    // periodic trapezoid, doubled until successive values agree to 1e-8 relative
    int m = 4096;
    double prev = 0;
    for (int pass = 0; pass < 6; ++pass) {
        double s = 0;
        for (int i = 0; i < m; ++i) {
            const double th = 2.0 * M_PI * i / m;
            Eigen::VectorXd eta(2);
            eta << std::cos(th), std::sin(th);
            s += term(eta);
        }
        s *= 2.0 * M_PI / m;
        if (pass > 0 && std::abs(s - prev) <= 1e-8 * std::abs(s)) return s;
        prev = s;
        m *= 2;
    }
    return prev;
}

double gamma_identity_check(const Germ& g, int n) {
    const int k = g.k;
    const double A = spherical_average(g, n);
    const double rhs = (1.0 / (2.0 * k)) * std::tgamma(n / (2.0 * k)) * A;

    double lhs = 0;
    if (n == 1) {
        for (double sgn : {1.0, -1.0}) {
            const double v = std::abs(g.sample(v1d(sgn)));
            const double R = std::pow(40.0 / v, 1.0 / (2 * k));
            lhs += integrate_adaptive(
                [&](double s) { return std::exp(-v * std::pow(s, 2 * k)); }, 0.0, R, 1e-10);
        }
    } else {
        // polar: integrate r e^{-|V(eta)| r^{2k}} per angle, then periodic trapezoid in theta
        const int mth = 2048;
        double s = 0;
        for (int i = 0; i < mth; ++i) {
            const double th = 2.0 * M_PI * i / mth;
            Eigen::VectorXd eta(2);
            eta << std::cos(th), std::sin(th);
            const double v = std::abs(g.sample(eta));
            const double R = std::pow(40.0 / v, 1.0 / (2 * k));
            s += integrate_adaptive(
                [&](double r) { return r * std::exp(-v * std::pow(r, 2 * k)); }, 0.0, R, 1e-10);
        }
        lhs = s * 2.0 * M_PI / mth;
    }
    return std::abs(lhs - rhs) / rhs;
}

// ---- catalog ----------------------------------------------------------

namespace {

Potential poly_potential(int n, std::vector<std::pair<std::vector<int>, double>> terms,
                         double box, std::string label) {
    for (const auto& [e, c] : terms) {
        (void)c;
        if (static_cast<int>(e.size()) != n)
            throw std::invalid_argument("polynomial term arity != dimension");
        for (int ei : e)
            if (ei < 0) throw std::invalid_argument("negative exponent");
    }
    Potential p;
    p.n = n;
    p.box = box;
    p.label = std::move(label);
    auto tp = std::make_shared<std::vector<std::pair<std::vector<int>, double>>>(std::move(terms));
    p.value = [tp, n](const Eigen::VectorXd& x) {
        double s = 0;
        for (const auto& [e, c] : *tp) {
            double t = c;
            for (int d = 0; d < n; ++d) t *= std::pow(x(d), e[d]);
            s += t;
        }
        return s;
    };
    p.gradient = [tp, n](const Eigen::VectorXd& x) {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
        for (const auto& [e, c] : *tp)
            for (int d = 0; d < n; ++d) {
                if (e[d] == 0) continue;
                double t = c * e[d] * std::pow(x(d), e[d] - 1);
                for (int q = 0; q < n; ++q)
                    if (q != d) t *= std::pow(x(q), e[q]);
                g(d) += t;
            }
        return g;
    };
    p.hessian = [tp, n](const Eigen::VectorXd& x) {
        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
        for (const auto& [e, c] : *tp)
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) {
                    int ea = e[a], eb = e[b];
                    double t = c;
                    if (a == b) {
                        if (ea < 2) continue;
                        t *= ea * (ea - 1) * std::pow(x(a), ea - 2);
                        for (int q = 0; q < n; ++q)
                            if (q != a) t *= std::pow(x(q), e[q]);
                    } else {
                        if (ea < 1 || eb < 1) continue;
                        t *= ea * eb * std::pow(x(a), ea - 1) * std::pow(x(b), eb - 1);
                        for (int q = 0; q < n; ++q)
                            if (q != a && q != b) t *= std::pow(x(q), e[q]);
                    }
                    H(a, b) += t;
                }
        return H;
    };
    return p;
}

}  // namespace

Potential make_polynomial(int n, const std::vector<std::pair<std::vector<int>, double>>& terms,
                          double box, const std::string& label) {
    return poly_potential(n, terms, box, label);
}

Potential make_harmonic(double c, double box) {
    return poly_potential(1, {{{2}, c}}, box, "harmonic(c=" + format_double(c) + ")");
}

Potential make_quartic(double box) { return poly_potential(1, {{{4}, 1.0}}, box, "quartic"); }

Potential make_double_well(double box) {
    return poly_potential(1, {{{4}, 1.0}, {{2}, -2.0}, {{0}, 1.0}}, box, "double_well");
}

Potential make_aniso2d(double c1, double c2, double box) {
    return poly_potential(2, {{{2, 0}, c1}, {{0, 2}, c2}}, box,
                          "aniso2d(" + format_double(c1) + "," + format_double(c2) + ")");
}

Potential make_barrier(double h0, double c, double d, double box) {
    if (d <= 0) throw std::invalid_argument("barrier: d must be positive");
    return poly_potential(1, {{{0}, h0}, {{2}, -c}, {{4}, d}},
                          box, "barrier(" + format_double(h0) + "," + format_double(c) + "," +
                                   format_double(d) + ")");
}

Potential load_polynomial(const std::string& path, double box) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open polynomial file: " + path);
    std::vector<std::pair<std::vector<int>, double>> terms;
    int n = -1;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::vector<double> nums;
        double v;
        while (ss >> v) nums.push_back(v);
        if (nums.size() < 2) throw std::runtime_error("bad polynomial line: " + line);
        const int arity = static_cast<int>(nums.size()) - 1;
        if (n < 0) n = arity;
        if (arity != n) throw std::runtime_error("inconsistent arity in polynomial file");
        std::vector<int> e(n);
        for (int i = 0; i < n; ++i) {
            e[i] = static_cast<int>(std::lround(nums[i]));
            if (std::abs(nums[i] - e[i]) > 1e-9 || e[i] < 0)
                throw std::runtime_error("exponents must be non-negative integers: " + line);
        }
        terms.emplace_back(std::move(e), nums.back());
    }
    if (terms.empty()) throw std::runtime_error("empty polynomial file: " + path);
    if (n > 2) throw std::runtime_error("polynomial dimension > 2 unsupported");
    return poly_potential(n, terms, box, "polyfile:" + path);
}

Potential make_catalog(const std::string& name, const std::vector<double>& p) {
    auto arg = [&](std::size_t i, double dflt) { return i < p.size() ? p[i] : dflt; };
    if (name == "harmonic") return make_harmonic(arg(0, 1.0), arg(1, 4.0));
    if (name == "quartic") return make_quartic(arg(0, 2.0));
    if (name == "double_well") return make_double_well(arg(0, 1.9));
    if (name == "aniso2d") return make_aniso2d(arg(0, 1.0), arg(1, 1.0), arg(2, 2.5));
    if (name == "barrier") return make_barrier(arg(0, 1.0), arg(1, 1.0), arg(2, 0.25), arg(3, 2.6));
    throw std::invalid_argument("unknown catalog potential: " + name);
}

}  // namespace probe
