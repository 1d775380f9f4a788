#include "probe/quantum.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "probe/numerics.hpp"

namespace probe {

void Window::validate() const {
    if (!(E1 <= E2)) throw std::invalid_argument("window: E1 <= E2 required");
    if (!(margin() > 0)) throw std::invalid_argument("window: eps > 0 required");
}

namespace {

/// Sturm sign-change count: eigenvalues of the symmetric tridiagonal (d, e) below sigma.
int sturm_count(const Eigen::VectorXd& d, const Eigen::VectorXd& e, double sigma) {
    const auto n = d.size();
    int cnt = 0;
    double q = d(0) - sigma;
    if (q < 0) ++cnt;
    for (Eigen::Index i = 1; i < n; ++i) {
        double den = q;
        if (std::abs(den) < 1e-300) den = den < 0 ? -1e-300 : 1e-300;
        q = d(i) - sigma - e(i - 1) * e(i - 1) / den;
        if (q < 0) ++cnt;
    }
    return cnt;
}

/// k-th eigenvalue (0-based) by bisection on the Sturm count.
double tridiag_eig_k(const Eigen::VectorXd& d, const Eigen::VectorXd& e, int k, double lo,
                     double hi) {
    while (sturm_count(d, e, lo) > k) lo -= (hi - lo);
    while (sturm_count(d, e, hi) <= k) hi += (hi - lo);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (sturm_count(d, e, mid) <= k)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-14 * (1.0 + std::abs(lo))) break;
    }
    return 0.5 * (lo + hi);
}

struct Tridiag {
    Eigen::VectorXd d, e;
};

Tridiag fd_matrix_1d(const Potential& pot, double hbar, int N, double L) {
    const double h = 2.0 * L / (N + 1);
    const double t = hbar * hbar / (h * h);
    Tridiag m;
    m.d.resize(N);
    m.e.setConstant(N - 1, -t);
    for (int i = 0; i < N; ++i) {
        Eigen::VectorXd x(1);
        x << -L + (i + 1) * h;
        m.d(i) = 2.0 * t + pot.value(x);
    }
    return m;
}

/// Eigenvalues with global indices [klo, khi) of the tridiagonal, bracketed inside [blo, bhi].
Eigen::VectorXd tridiag_eigs_by_index(const Tridiag& m, int klo, int khi, double blo,
                                      double bhi) {
    Eigen::VectorXd out(khi - klo);
    for (int k = klo; k < khi; ++k) out(k - klo) = tridiag_eig_k(m.d, m.e, k, blo, bhi);
    return out;
}

void check_boundary(const Potential& pot, const Window& win) {
    const double need = win.hi();
    bool ok = true;
    if (pot.n == 1) {
        Eigen::VectorXd x(1);
        x << pot.box;
        ok = pot.value(x) > need;
        x << -pot.box;
        ok = ok && pot.value(x) > need;
    } else {
        for (int i = 0; i <= 64 && ok; ++i) {
            const double s = -pot.box + 2.0 * pot.box * i / 64.0;
            for (double sgn : {-1.0, 1.0}) {
                Eigen::VectorXd x(2);
                x << s, sgn * pot.box;
                ok = ok && pot.value(x) > need;
                x << sgn * pot.box, s;
                ok = ok && pot.value(x) > need;
            }
        }
    }
    if (!ok)
        throw std::runtime_error("box too small: V on the boundary does not clear E2+eps");
}

double min_potential(const Potential& pot) {
    double vmin = std::numeric_limits<double>::max();
    const int m = 512;
    if (pot.n == 1) {
        for (int i = 0; i <= m; ++i) {
            Eigen::VectorXd x(1);
            x << -pot.box + 2.0 * pot.box * i / m;
            vmin = std::min(vmin, pot.value(x));
        }
    } else {
        for (int i = 0; i <= m; ++i)
            for (int j = 0; j <= m; ++j) {
                Eigen::VectorXd x(2);
                x << -pot.box + 2.0 * pot.box * i / m, -pot.box + 2.0 * pot.box * j / m;
                vmin = std::min(vmin, pot.value(x));
            }
    }
    return vmin;
}

// ---- n=2: sparse 5-point FD with shift-invert Lanczos ----------------

using SpMat = Eigen::SparseMatrix<double>;

SpMat assemble_2d(const Potential& pot, double hbar, int N, double L) {
    const double h = 2.0 * L / (N + 1);
    const double t = hbar * hbar / (h * h);
    SpMat A(N * N, N * N);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(5ull * N * N);
    auto idx = [N](int i, int j) { return i * N + j; };
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            Eigen::VectorXd x(2);
            x << -L + (i + 1) * h, -L + (j + 1) * h;
            trips.emplace_back(idx(i, j), idx(i, j), 4.0 * t + pot.value(x));
            if (i > 0) trips.emplace_back(idx(i, j), idx(i - 1, j), -t);
            if (i + 1 < N) trips.emplace_back(idx(i, j), idx(i + 1, j), -t);
            if (j > 0) trips.emplace_back(idx(i, j), idx(i, j - 1), -t);
            if (j + 1 < N) trips.emplace_back(idx(i, j), idx(i, j + 1), -t);
        }
    A.setFromTriplets(trips.begin(), trips.end());
    return A;
}

/// eigenvalue count below sigma via LDL^T inertia
int inertia_below(const SpMat& A, double sigma) {
    SpMat B = A;
    for (int k = 0; k < B.outerSize(); ++k)
        for (SpMat::InnerIterator it(B, k); it; ++it)
            if (it.row() == it.col()) it.valueRef() -= sigma;
    Eigen::SimplicialLDLT<SpMat> ldlt(B);
    if (ldlt.info() != Eigen::Success)
        throw std::runtime_error("inertia factorization failed");
    const auto& D = ldlt.vectorD();
    int cnt = 0;
    for (Eigen::Index i = 0; i < D.size(); ++i)
        if (D(i) < 0) ++cnt;
    return cnt;
}

/// Shift-invert Lanczos with full reorthogonalization and deflation restarts.
/// Returns all eigenvalues in [wlo, whi] (count must match the inertia count).
Eigen::VectorXd lanczos_window(const SpMat& A, double wlo, double whi, int want) {
    const double sigma = 0.5 * (wlo + whi);
    SpMat B = A;
    for (int k = 0; k < B.outerSize(); ++k)
        for (SpMat::InnerIterator it(B, k); it; ++it)
            if (it.row() == it.col()) it.valueRef() -= sigma;
    Eigen::SparseLU<SpMat> lu;
    lu.analyzePattern(B);
    lu.factorize(B);
    if (lu.info() != Eigen::Success) throw std::runtime_error("shift-invert factorization failed");

    const Eigen::Index dim = A.rows();
    std::mt19937_64 rng(0x9E3779B97F4A7C15ull);
    std::normal_distribution<double> gauss;

    std::vector<Eigen::VectorXd> deflated;   // converged eigenvectors (unit)
    std::vector<double> found;

    for (int restart = 0; restart < 12 && static_cast<int>(found.size()) < want; ++restart) {
        Eigen::VectorXd v(dim);
        for (Eigen::Index i = 0; i < dim; ++i) v(i) = gauss(rng);
        for (const auto& q : deflated) v -= q.dot(v) * q;
        const double nv = v.norm();
        if (nv < 1e-12) continue;
        v /= nv;

        const int mmax = std::min<Eigen::Index>(dim, std::max(80, 4 * want + 40));
        std::vector<Eigen::VectorXd> Q{v};
        Eigen::VectorXd alpha(mmax), beta(mmax);
        int m = 0;
        for (; m < mmax; ++m) {
            Eigen::VectorXd w = lu.solve(Q[m]);
            for (const auto& q : deflated) w -= q.dot(w) * q;
            alpha(m) = Q[m].dot(w);
            w -= alpha(m) * Q[m];
            if (m > 0) w -= beta(m - 1) * Q[m - 1];
            for (const auto& q : Q) w -= q.dot(w) * q;  // full reorthogonalization
            for (const auto& q : Q) w -= q.dot(w) * q;
            beta(m) = w.norm();
            if (beta(m) < 1e-13) {
                ++m;
                break;
            }
            Q.push_back(w / beta(m));
        }
        // Ritz values of the tridiagonal
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            T(i, i) = alpha(i);
            if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta(i);
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        for (int r = 0; r < m; ++r) {
            const double theta = es.eigenvalues()(r);
            if (std::abs(theta) < 1e-12) continue;
            const double lam = sigma + 1.0 / theta;
            if (lam < wlo || lam > whi) continue;
            // residual of the shift-inverted problem
            const double resid = std::abs(beta(m - 1) * es.eigenvectors()(m - 1, r));
            if (resid > 1e-9 * std::abs(theta)) continue;
            Eigen::VectorXd y = Eigen::VectorXd::Zero(dim);
            for (int i = 0; i < m; ++i) y += es.eigenvectors()(i, r) * Q[i];
            y.normalize();
            bool dup = false;
            for (std::size_t f = 0; f < found.size(); ++f)
                if (std::abs(y.dot(deflated[f])) > 0.9) dup = true;
            if (dup) continue;
            deflated.push_back(y);
            found.push_back(lam);
        }
    }
    if (static_cast<int>(found.size()) < want)
        throw std::runtime_error("lanczos_window: converged " + std::to_string(found.size()) +
                                 " of " + std::to_string(want));
    std::sort(found.begin(), found.end());
    return Eigen::Map<Eigen::VectorXd>(found.data(), found.size());
}

Eigen::VectorXd solve_2d_grid(const Potential& pot, double hbar, int N, double L, double wlo,
                              double whi) {
    const SpMat A = assemble_2d(pot, hbar, N, L);
    const int want = inertia_below(A, whi) - inertia_below(A, wlo);
    if (want == 0) return Eigen::VectorXd();
    return lanczos_window(A, wlo, whi, want);
}

}  // namespace

EigenSet discretize_and_solve(const Potential& pot, double hbar, const Window& win,
                              const ResolutionPolicy& policy) {
    if (hbar <= 0) throw std::invalid_argument("hbar > 0 required");
    win.validate();
    check_boundary(pot, win);

    const double vmin = min_potential(pot);
    const double pmax = std::sqrt(std::max(win.hi() - vmin, 1e-12));
    const double step = 2.0 * M_PI * hbar / (pmax * policy.points_per_wavelength);

    EigenSet es;
    es.hbar = hbar;
    es.n = pot.n;
    es.box = pot.box;
    es.provenance = pot.label;

    if (pot.n == 1) {
        int N1 = static_cast<int>(std::ceil(2.0 * pot.box / step)) - 1;
        N1 = std::clamp(N1, policy.min_points, policy.max_points_1d);
        const int N2 = 2 * N1 + 1;  // nested grid, exact step halving
        const Tridiag mc = fd_matrix_1d(pot, hbar, N1, pot.box);
        const Tridiag mf = fd_matrix_1d(pot, hbar, N2, pot.box);
        // global index range from the fine grid, then extract the same indices on
        // both grids so Richardson pairs exactly (Sturm indices are global)
        const int klo = sturm_count(mf.d, mf.e, win.lo());
        const int khi = sturm_count(mf.d, mf.e, win.hi());
        const double span = win.hi() - win.lo();
        const double blo = win.lo() - 0.5 * span - 1.0, bhi = win.hi() + 0.5 * span + 1.0;
        const Eigen::VectorXd c = tridiag_eigs_by_index(mc, klo, khi, blo, bhi);
        const Eigen::VectorXd f = tridiag_eigs_by_index(mf, klo, khi, blo, bhi);
        std::vector<double> lv, ev;
        for (Eigen::Index i = 0; i < f.size(); ++i) {
            const double rich = (4.0 * f(i) - c(i)) / 3.0;
            if (rich < win.lo() || rich > win.hi()) continue;
            lv.push_back(rich);
            ev.push_back(std::max(std::abs(f(i) - c(i)) / 3.0 * 0.1,
                                  1e-15 * (1.0 + std::abs(rich))));
        }
        es.lambda = Eigen::Map<Eigen::VectorXd>(lv.data(), lv.size());
        es.err_bound = Eigen::Map<Eigen::VectorXd>(ev.data(), ev.size());
        es.grid_points = N2;
    } else {
        int N1 = static_cast<int>(std::ceil(2.0 * pot.box / step)) - 1;
        N1 = std::clamp(N1, 24, policy.max_points_2d);
        const int N2 = std::min(2 * N1 + 1, 2 * policy.max_points_2d + 1);
        const Eigen::VectorXd c = solve_2d_grid(pot, hbar, N1, pot.box, win.lo(), win.hi());
        const Eigen::VectorXd f = solve_2d_grid(pot, hbar, N2, pot.box, win.lo(), win.hi());
        const Eigen::Index m = std::min(c.size(), f.size());
        std::vector<double> lv, ev;
        for (Eigen::Index i = 0; i < m; ++i) {
            const double rich = (4.0 * f(i) - c(i)) / 3.0;
            if (rich < win.lo() || rich > win.hi()) continue;
            lv.push_back(rich);
            ev.push_back(std::max(std::abs(f(i) - c(i)) / 3.0 * 0.1,
                                  1e-14 * (1.0 + std::abs(rich))));
        }
        es.lambda = Eigen::Map<Eigen::VectorXd>(lv.data(), lv.size());
        es.err_bound = Eigen::Map<Eigen::VectorXd>(ev.data(), ev.size());
        es.grid_points = N2;
    }

    if (es.lambda.size() > 0) {
        const double worst = es.err_bound.maxCoeff();
        if (worst > 0.01 * hbar) {
            const int suggest = 2 * es.grid_points;
            throw std::runtime_error("resolution insufficient for hbar: error bound " +
                                     format_double(worst) + ", suggest N >= " +
                                     std::to_string(suggest));
        }
    }
    return es;
}

EigenSet oscillator_oracle(double c, double hbar, const Window& win, int n) {
    if (c <= 0 || hbar <= 0) throw std::invalid_argument("oscillator_oracle: c, hbar > 0");
    win.validate();
    EigenSet es;
    es.hbar = hbar;
    es.n = n;
    es.provenance = "oracle:oscillator";
    es.grid_points = 0;
    std::vector<double> v;
    const double w = std::sqrt(c);
    if (n == 1) {
        for (long j = 0;; ++j) {
            const double lam = hbar * w * (2.0 * j + 1.0);
            if (lam > win.hi()) break;
            if (lam >= win.lo()) v.push_back(lam);
        }
    } else if (n == 2) {
        for (long j = 0;; ++j) {
            const double lam = 2.0 * hbar * w * (j + 1.0);
            if (lam > win.hi()) break;
            if (lam >= win.lo())
                for (long mult = 0; mult <= j; ++mult) v.push_back(lam);
        }
    } else {
        throw std::invalid_argument("oscillator_oracle: n in {1,2}");
    }
    es.lambda = Eigen::Map<Eigen::VectorXd>(v.data(), v.size());
    es.err_bound = Eigen::VectorXd::Zero(v.size());
    return es;
}

EigenSet oscillator2d_oracle(double c1, double c2, double hbar, const Window& win) {
    win.validate();
    EigenSet es;
    es.hbar = hbar;
    es.n = 2;
    es.provenance = "oracle:oscillator2d";
    std::vector<double> v;
    const double w1 = std::sqrt(c1), w2 = std::sqrt(c2);
    for (long j1 = 0;; ++j1) {
        const double base = hbar * w1 * (2.0 * j1 + 1.0);
        if (base + hbar * w2 > win.hi()) break;
        for (long j2 = 0;; ++j2) {
            const double lam = base + hbar * w2 * (2.0 * j2 + 1.0);
            if (lam > win.hi()) break;
            if (lam >= win.lo()) v.push_back(lam);
        }
    }
    std::sort(v.begin(), v.end());
    es.lambda = Eigen::Map<Eigen::VectorXd>(v.data(), v.size());
    es.err_bound = Eigen::VectorXd::Zero(v.size());
    return es;
}

double weyl_count_estimate(const Potential& pot, const Window& win, double hbar) {
    // phase-space volume of p^{-1}(J(eps)) / (2 pi hbar)^n
    const int m = 4096;
    double vol = 0;
    if (pot.n == 1) {
        const double h = 2.0 * pot.box / m;
        for (int i = 0; i <= m; ++i) {
            Eigen::VectorXd x(1);
            x << -pot.box + i * h;
            const double v = pot.value(x);
            const double hiX = std::max(win.hi() - v, 0.0);
            const double loX = std::max(win.lo() - v, 0.0);
            vol += (2.0 * std::sqrt(hiX) - 2.0 * std::sqrt(loX)) * h;
        }
        return vol / (2.0 * M_PI * hbar);
    }
    const int m2 = 512;
    const double h = 2.0 * pot.box / m2;
    for (int i = 0; i <= m2; ++i)
        for (int j = 0; j <= m2; ++j) {
            Eigen::VectorXd x(2);
            x << -pot.box + i * h, -pot.box + j * h;
            const double v = pot.value(x);
            vol += M_PI * (std::max(win.hi() - v, 0.0) - std::max(win.lo() - v, 0.0)) * h * h;
        }
    return vol / std::pow(2.0 * M_PI * hbar, 2);
}

void save_eigenset_csv(const EigenSet& es, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "hbar,lambda,err_bound\n";
    for (Eigen::Index i = 0; i < es.lambda.size(); ++i)
        out << format_double(es.hbar) << ',' << format_double(es.lambda(i)) << ','
            << format_double(es.err_bound(i)) << '\n';
}

EigenSet load_eigenset_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != "hbar,lambda,err_bound")
        throw std::runtime_error("bad EigenSet CSV header in " + path);
    std::vector<double> lv, ev;
    double hbar = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string tok;
        double vals[3];
        for (int i = 0; i < 3; ++i) {
            if (!std::getline(ss, tok, ',')) throw std::runtime_error("bad CSV row: " + line);
            vals[i] = std::strtod(tok.c_str(), nullptr);
        }
        hbar = vals[0];
        lv.push_back(vals[1]);
        ev.push_back(vals[2]);
    }
    EigenSet es;
    es.hbar = hbar;
    es.lambda = Eigen::Map<Eigen::VectorXd>(lv.data(), lv.size());
    es.err_bound = Eigen::Map<Eigen::VectorXd>(ev.data(), ev.size());
    es.provenance = "csv:" + path;
    return es;
}

}  // namespace probe
