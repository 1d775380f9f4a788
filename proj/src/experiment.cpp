#include "probe/experiment.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "probe/classical.hpp"
#include "probe/numerics.hpp"
#include "probe/plots.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace probe {

namespace {

/// tracks artifacts so a failed run can quarantine its partial output
class ArtifactSink {
  public:
    explicit ArtifactSink(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

    fs::path path(const std::string& name) {
        written_.push_back(dir_ / name);
        return dir_ / name;
    }
    const std::vector<fs::path>& written() const { return written_; }

    void quarantine() {
        const fs::path q = dir_ / "quarantine";
        fs::create_directories(q);
        for (const auto& p : written_)
            if (fs::exists(p)) fs::rename(p, q / p.filename());
    }

  private:
    fs::path dir_;
    std::vector<fs::path> written_;
};

std::string hash_hex(std::uint64_t h) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<EigenSet> solve_ladder(const ExperimentConfig& cfg, const Potential& pot,
                                   const Window& win) {
    const Ladder lad{cfg.ladder.hbar_max, cfg.ladder.rho, cfg.ladder.count};
    const auto hs = lad.values();
    std::vector<EigenSet> sets(hs.size());
    if (cfg.solver == "oracle") {
        if (cfg.potential_name == "harmonic") {
            const double c = cfg.potential_params.empty() ? 1.0 : cfg.potential_params[0];
            for (std::size_t i = 0; i < hs.size(); ++i)
                sets[i] = oscillator_oracle(c, hs[i], win, 1);
        } else if (cfg.potential_name == "aniso2d") {
            const double c1 = cfg.potential_params.size() > 0 ? cfg.potential_params[0] : 1.0;
            const double c2 = cfg.potential_params.size() > 1 ? cfg.potential_params[1] : 1.0;
            for (std::size_t i = 0; i < hs.size(); ++i)
                sets[i] = oscillator2d_oracle(c1, c2, hs[i], win);
        } else {
            throw std::runtime_error(
                "solver.kind=oracle requires a harmonic or aniso2d potential");
        }
        return sets;
    }
    ResolutionPolicy pol;
    pol.points_per_wavelength = cfg.ppw;
    parallel_for(hs.size(), [&](std::size_t i) {
        sets[i] = discretize_and_solve(pot, hs[i], win, pol);
    });
    return sets;
}

double resolve_auto_M(const ExperimentConfig& cfg, const Potential& pot, const Window& win) {
    if (!cfg.tf.auto_M) return cfg.tf.M;
    const PeriodBound pb = period_bound(pot, win);
    double m = pb.T;
    for (const auto& cp : find_critical_points(pot, 15)) {
        if (cp.cls != CriticalClass::minimum) continue;
        for (double Ti : linearized_periods(cp)) m = std::min(m, Ti);
    }
    return 0.9 * m;
}

void write_sweep_csv(const fs::path& p, const std::vector<double>& Es,
                     const std::vector<std::vector<GammaSample>>& rows) {
    std::ofstream out(p);
    out << "E,hbar,re_gamma,im_gamma,count,err_bound\n";
    for (std::size_t i = 0; i < Es.size(); ++i)
        for (const auto& g : rows[i])
            out << format_double(g.E) << ',' << format_double(g.hbar) << ','
                << format_double(g.value.real()) << ',' << format_double(g.value.imag()) << ','
                << g.count << ',' << format_double(g.err_bound) << '\n';
}

json report_json(const ExperimentConfig& cfg, const std::vector<SingularityReport>& reps) {
    json j;
    j["schema_version"] = 1;
    j["config_hash"] = hash_hex(cfg.hash());
    j["mode"] = to_string(cfg.mode);
    j["candidates"] = json::array();
    for (const auto& r : reps) {
        json c;
        c["Ec"] = r.Ec;
        c["alpha"] = r.alpha;
        c["logflag"] = r.logflag;
        c["k"] = r.k;
        c["class"] = to_string(r.cls);
        c["A"] = r.A;
        c["A_uncalibrated"] = r.A_uncalibrated;
        c["multi_point"] = r.multi_point;
        c["cos_min"] = r.cos_min;
        c["cos_max"] = r.cos_max;
        c["refine_width"] = r.refine_width;
        json coef = json::array();
        for (const auto& z : r.coefficients) coef.push_back({z.real(), z.imag()});
        c["coefficients"] = coef;
        if (!r.note.empty()) c["note"] = r.note;
        j["candidates"].push_back(c);
    }
    return j;
}

struct GroundTruthEntry {
    double Ec;
    int k;
    SingularityClass cls;
    double A_total;
    int points;
};

std::vector<GroundTruthEntry> ground_truth(const Potential& pot) {
    std::vector<GroundTruthEntry> out;
    for (const auto& cp : find_critical_points(pot, 15)) {
        if (cp.cls == CriticalClass::saddle) continue;
        Germ g;
        try {
            g = extract_germ(pot, cp);
        } catch (const std::exception&) {
            continue;  // non-homogeneous or mixed germ: outside scope
        }
        const double A = spherical_average(g, pot.n);
        const SingularityClass cls =
            g.sign > 0 ? SingularityClass::minimum : SingularityClass::maximum;
        bool merged = false;
        for (auto& e : out)
            if (std::abs(e.Ec - cp.value) < 1e-9) {
                e.A_total += A;
                e.points += 1;
                merged = true;
            }
        if (!merged) out.push_back({cp.value, g.k, cls, A, 1});
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.Ec < b.Ec; });
    return out;
}

}  // namespace

Potential potential_from_config(const ExperimentConfig& cfg) {
    Potential pot;
    if (!cfg.potential_file.empty()) {
        pot = load_polynomial(cfg.potential_file, cfg.potential_box > 0 ? cfg.potential_box : 3.0);
    } else {
        pot = make_catalog(cfg.potential_name, cfg.potential_params);
        if (cfg.potential_box > 0) pot.box = cfg.potential_box;
    }
    return pot;
}

DetectInputs detect_inputs_from_config(const ExperimentConfig& cfg, const Potential& pot) {
    const Window win{cfg.E1, cfg.E2, cfg.eps};
    win.validate();
    DetectInputs in;
    in.n = pot.n;
    in.ladder = solve_ladder(cfg, pot, win);
    const double M = resolve_auto_M(cfg, pot, win);
    TfGridSpec gs;
    gs.t_nodes = cfg.tf.t_nodes;
    gs.pad = cfg.tf.pad;
    in.tf_sweep = build_test_function(M, cfg.tf.j0, BumpShape::shifted, gs);
    in.tf_even = build_test_function(M, cfg.tf.j0, BumpShape::standard_even, gs);
    in.tf_odd = build_test_function(M, cfg.tf.j0, BumpShape::odd, gs);
    in.tf_log = build_test_function(cfg.detect_M_log, 0, BumpShape::standard_even, gs);
    in.delta_log = cfg.detect_delta_log;
    return in;
}

RunResult run_experiment(const ExperimentConfig& cfg) {
    RunResult res;
    ArtifactSink sink{fs::path(cfg.out_dir)};
    try {
        const Potential pot = potential_from_config(cfg);
        const Window win{cfg.E1, cfg.E2, cfg.eps};
        win.validate();

        // resolved config (auto values filled) goes first so reruns can replay it
        {
            ExperimentConfig resolved = cfg;
            resolved.tf.auto_M = false;
            resolved.tf.M = resolve_auto_M(cfg, pot, win);
            std::ofstream out(sink.path("resolved_config.ini"));
            out << "# config_hash = " << hash_hex(cfg.hash()) << '\n'
                << resolved.to_kv().serialize();
        }

        switch (cfg.mode) {
            case RunMode::classical: {
                const PeriodBound pb = period_bound(pot, win);
                json j;
                j["config_hash"] = hash_hex(cfg.hash());
                j["a"] = pb.a;
                j["b"] = pb.b;
                j["T"] = pb.T;
                j["region_radius"] = pb.region_radius;
                j["inflated"] = pb.inflated;
                json mins = json::array();
                for (const auto& cp : find_critical_points(pot, 15)) {
                    if (cp.cls != CriticalClass::minimum) continue;
                    json m;
                    m["Ec"] = cp.value;
                    m["periods"] = linearized_periods(cp);
                    mins.push_back(m);
                }
                j["linearized_minima"] = mins;
                const OrbitSearch search = shortest_orbit_search(pot, win);
                j["shortest_orbit"] = search.shortest ? json(*search.shortest) : json(nullptr);
                j["bound_respected"] =
                    !search.shortest || *search.shortest >= pb.T - 1e-9;
                std::ofstream(sink.path("classical.json")) << j.dump(2) << '\n';
                std::ofstream log(sink.path("orbit_search.csv"));
                log << "energy,found,period\n";
                for (const auto& r : search.attempts)
                    log << format_double(r.energy) << ',' << (r.found ? 1 : 0) << ','
                        << format_double(r.period) << '\n';
                break;
            }
            case RunMode::weyl: {
                std::vector<EigenSet> lad = solve_ladder(cfg, pot, win);
                TfGridSpec gs;
                gs.t_nodes = cfg.tf.t_nodes;
                gs.pad = cfg.tf.pad;
                const TestFunction tfw =
                    build_test_function(cfg.weyl_M, 0, BumpShape::standard_even, gs);
                const WeylReport rep = weyl_check(lad, tfw, pot, cfg.weyl_E, cfg.seed);
                json j;
                j["config_hash"] = hash_hex(cfg.hash());
                j["E"] = cfg.weyl_E;
                j["lvol"] = rep.lvol;
                j["hbars"] = rep.hbars;
                j["deviations"] = rep.deviations;
                j["deviation_at_smallest"] = rep.deviation_at_smallest;
                std::ofstream(sink.path("weyl.json")) << j.dump(2) << '\n';
                break;
            }
            case RunMode::sweep:
            case RunMode::detect:
            case RunMode::validate: {
                DetectInputs in = detect_inputs_from_config(cfg, pot);
                const double hmin =
                    Ladder{cfg.ladder.hbar_max, cfg.ladder.rho, cfg.ladder.count}.hbar_min();
                const double step = cfg.egrid_step > 0 ? cfg.egrid_step : hmin;

                std::vector<double> Es;
                for (double E = cfg.egrid_E1; E <= cfg.egrid_E2 + 1e-12; E += step)
                    Es.push_back(E);
                std::vector<std::vector<GammaSample>> rows(Es.size());
                parallel_for(Es.size(), [&](std::size_t i) {
                    rows[i].reserve(in.ladder.size());
                    for (const auto& es : in.ladder)
                        rows[i].push_back(gamma_sample(es, in.tf_sweep, Es[i]));
                });
                write_sweep_csv(sink.path("sweep.csv"), Es, rows);
                if (cfg.mode == RunMode::sweep) break;

                // per-E fits for the alpha-vs-E artifact
                {
                    std::ofstream out(sink.path("fits.csv"));
                    out << "E,alpha,logflag,re_C,im_C,residual,ambiguous\n";
                    for (std::size_t i = 0; i < Es.size(); ++i) {
                        try {
                            const OrderFit f = fit_order(rows[i]);
                            out << format_double(Es[i]) << ',' << format_double(f.alpha) << ','
                                << f.logflag << ',' << format_double(f.coefficient.real()) << ','
                                << format_double(f.coefficient.imag()) << ','
                                << format_double(f.residual) << ',' << (f.ambiguous ? 1 : 0)
                                << '\n';
                        } catch (const std::exception&) {
                            // below the error budget or oscillatory: no fit at this E
                        }
                    }
                }

                const auto cands =
                    detect_critical_energies(in, cfg.egrid_E1, cfg.egrid_E2, step);

                // calibration: validate mode may use its own maxima as reference
                CalibrationTable cal;
                std::vector<GroundTruthEntry> truth;
                if (cfg.mode == RunMode::validate) {
                    truth = ground_truth(pot);
                    for (const auto& t : truth) {
                        if (t.cls != SingularityClass::maximum || !tnk_resonant(pot.n, t.k))
                            continue;
                        for (double c : cands)
                            if (std::abs(c - t.Ec) < 5 * hmin) {
                                try {
                                    cal.set(pot.n, t.k,
                                            calibrate_max_constant(in, c, t.A_total, pot.n, t.k));
                                } catch (const std::exception&) {
                                    // reference not log-like: leave uncalibrated
                                }
                            }
                    }
                }

                std::vector<SingularityReport> reps;
                const auto cps = find_critical_points(pot, 15);
                for (double c : cands) {
                    SingularityReport r = invert_singularity(in, c, &cal);
                    r.refine_width = hmin / 8.0;
                    int at_level = 0;
                    for (const auto& cp : cps)
                        if (std::abs(cp.value - c) < std::max(5 * hmin, 1e-9)) ++at_level;
                    r.multi_point = at_level >= 2;
                    reps.push_back(r);
                }

                json j = report_json(cfg, reps);
                if (cfg.mode == RunMode::validate) {
                    json t = json::array();
                    for (const auto& g : truth) {
                        json e;
                        e["Ec"] = g.Ec;
                        e["k"] = g.k;
                        e["class"] = to_string(g.cls);
                        e["A_total"] = g.A_total;
                        e["points"] = g.points;
                        t.push_back(e);
                    }
                    j["ground_truth"] = t;
                    json cmp = json::array();
                    for (const auto& g : truth) {
                        json e;
                        e["Ec_true"] = g.Ec;
                        const SingularityReport* best = nullptr;
                        for (const auto& r : reps)
                            if (!best || std::abs(r.Ec - g.Ec) < std::abs(best->Ec - g.Ec))
                                best = &r;
                        if (best) {
                            e["Ec_detected"] = best->Ec;
                            e["dE"] = best->Ec - g.Ec;
                            e["k_ok"] = best->k == g.k;
                            e["class_ok"] = best->cls == g.cls;
                            e["A_rel_err"] =
                                g.A_total > 0 ? std::abs(best->A / g.A_total - 1.0) : 0.0;
                        } else {
                            e["Ec_detected"] = nullptr;
                        }
                        cmp.push_back(e);
                    }
                    j["comparison"] = cmp;
                }
                std::ofstream(sink.path("report.json")) << j.dump(2) << '\n';
                break;
            }
        }
    } catch (const std::exception& ex) {
        sink.quarantine();
        res.exit_code = 3;
        res.message = std::string("experiment failed: ") + ex.what() +
                      "; partial artifacts moved to quarantine/";
        return res;
    }
    for (const auto& p : sink.written()) res.artifacts.push_back(p.string());
    return res;
}

RunResult emit_plots(const std::string& dir) {
    RunResult res;
    const fs::path d{dir};
    const fs::path sweep = d / "sweep.csv";
    const fs::path fits = d / "fits.csv";
    const fs::path report = d / "report.json";

    if (!fs::exists(sweep)) {
        res.exit_code = 3;
        res.message = "missing sweep.csv, skipped";
        return res;
    }

    // parse sweep.csv
    std::map<double, std::vector<std::pair<double, double>>> byE;  // E -> (hbar, |gamma|)
    {
        std::ifstream in(sweep);
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            std::istringstream ss(line);
            std::string tok;
            double v[6];
            for (int i = 0; i < 6 && std::getline(ss, tok, ','); ++i)
                v[i] = std::strtod(tok.c_str(), nullptr);
            byE[v[0]].push_back({v[1], std::hypot(v[2], v[3])});
        }
    }
    if (byE.empty()) {
        res.exit_code = 3;
        res.message = "empty sweep, no plots";
        return res;
    }

    // plot (a): log-log |gamma| vs hbar for a spread of E values, fitted overlay
    {
        SvgPlot plot("spectral distribution vs hbar", "log10 hbar", "log10 |gamma|");
        const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
        std::vector<double> keys;
        for (const auto& [E, _] : byE) keys.push_back(E);
        std::vector<double> picks;
        for (int i = 0; i < 5 && i < static_cast<int>(keys.size()); ++i)
            picks.push_back(keys[keys.size() * i / std::min<std::size_t>(5, keys.size())]);
        int ci = 0;
        std::ofstream gp(d / "plots.gp");
        gp << "set logscale xy\nset xlabel 'hbar'\nset ylabel '|gamma|'\nplot \\\n";
        for (double E : picks) {
            std::vector<double> lx, ly;
            Eigen::VectorXd fx(byE[E].size()), fy(byE[E].size());
            int idx = 0;
            for (const auto& [h, g] : byE[E]) {
                if (g <= 0) continue;
                lx.push_back(std::log10(h));
                ly.push_back(std::log10(g));
                fx(idx) = std::log10(h);
                fy(idx) = std::log10(g);
                ++idx;
            }
            if (idx < 2) continue;
            const LineFit lf = fit_line(fx.head(idx), fy.head(idx));
            plot.add_markers(lx, ly, colors[ci % 5], "E=" + format_double(E));
            std::vector<double> ox{lx.front(), lx.back()};
            std::vector<double> oy{lf.intercept + lf.slope * lx.front(),
                                   lf.intercept + lf.slope * lx.back()};
            plot.add_line(ox, oy, colors[ci % 5],
                          "fit slope " + std::to_string(lf.slope).substr(0, 6), true);
            gp << "  '-' title 'E=" << format_double(E) << "' with points, \\\n";
            ++ci;
        }
        gp << "  1/0 notitle\n";
        for (double E : picks) {
            for (const auto& [h, g] : byE[E]) gp << format_double(h) << ' ' << format_double(g) << '\n';
            gp << "e\n";
        }
        plot.write((d / "gamma_vs_hbar.svg").string());
        res.artifacts.push_back((d / "gamma_vs_hbar.svg").string());
        res.artifacts.push_back((d / "plots.gp").string());
    }

    // plot (b): alpha vs E with detected markers
    if (fs::exists(fits)) {
        std::ifstream in(fits);
        std::string line;
        std::getline(in, line);
        std::vector<double> Es, alphas;
        while (std::getline(in, line)) {
            std::istringstream ss(line);
            std::string tok;
            double v[7];
            for (int i = 0; i < 7 && std::getline(ss, tok, ','); ++i)
                v[i] = std::strtod(tok.c_str(), nullptr);
            Es.push_back(v[0]);
            alphas.push_back(v[1]);
        }
        SvgPlot plot("fitted order vs energy", "E", "alpha");
        plot.add_line(Es, alphas, "#1f77b4", "alpha(E)");
        if (fs::exists(report)) {
            std::ifstream rin(report);
            json j;
            rin >> j;
            std::vector<double> mx, my;
            for (const auto& c : j["candidates"]) {
                mx.push_back(c["Ec"].get<double>());
                my.push_back(c["alpha"].get<double>());
            }
            plot.add_markers(mx, my, "#d62728", "detected E_c");
        }
        plot.write((d / "alpha_vs_E.svg").string());
        res.artifacts.push_back((d / "alpha_vs_E.svg").string());
    } else {
        res.message = "fits.csv missing, alpha plot skipped";
    }
    return res;
}

}  // namespace probe
