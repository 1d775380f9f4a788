#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "probe/scaling.hpp"

namespace probe {

/// One-sided power functionals <|t|_+-^{n(k+1)/2k - 1}, phi>.
struct TnkPair {
    Complex plus{0, 0};
    Complex minus{0, 0};
};
TnkPair tnk_functional(int n, int k, const TestFunction& tf);

/// beta = n(k+1)/2k - 1; the resonant (log) case has integer n(k+1)/2k.
double tnk_exponent(int n, int k);
bool tnk_resonant(int n, int k);

/// Leading minimum coefficient: [S(S^{n-1})/(2pi)^n] A Int phi(u^2+v^{2k}) u^{n-1} v^{n-1}.
Complex predict_min_coefficient(int n, int k, const TestFunction& tf, double A);

/// Finite-part companion of the resonant log term: Int phi(s) ln(1/|s|) ds.
Complex log_companion_functional(const TestFunction& tf);

/// Universal maximum constants keyed by (n, k); single writer, atomic snapshots.
class CalibrationTable {
  public:
    void set(int n, int k, Complex c);
    std::optional<Complex> get(int n, int k) const;

  private:
    using Map = std::map<std::pair<int, int>, Complex>;
    std::shared_ptr<const Map> snap_ = std::make_shared<Map>();
};

enum class SingularityClass { minimum, maximum, ambiguous };
std::string to_string(SingularityClass c);

struct SingularityReport {
    double Ec = 0;
    double alpha = 0;          // residual-weighted over test functions
    int logflag = 0;
    int k = 0;
    SingularityClass cls = SingularityClass::ambiguous;
    double A = 0;              // recovered spherical average (0 = unset)
    bool A_uncalibrated = false;
    bool multi_point = false;
    double cos_min = 0, cos_max = 0;  // classifier similarities
    std::vector<Complex> coefficients;  // per probe member (even, odd, shifted)
    double refine_width = 0;
    std::string note;
};

/// Everything the detector may evaluate gamma against. EigenSets are shared
/// across candidates; test functions are the flat scan/classify set plus the
/// non-flat log probe.
struct DetectInputs {
    int n = 1;
    std::vector<EigenSet> ladder;   // descending hbar
    TestFunction tf_sweep;          // flat, shifted bump: sees every extremum class
    TestFunction tf_even, tf_odd;   // flat parity pair
    TestFunction tf_log;            // j0 = 0, even: log probe
    double delta_log = 0.35;        // two-sided background subtraction offset
    double edge_guard = 0.05;       // candidate guard, fraction of the scan span
    double contrast_floor = 1e-4;   // relative floor at hbar_min
    int lower_points = 7;           // sub-ladder length for the decay predicate
};

struct CandidateInterval {
    double lo = 0, hi = 0;
};

/// Flagging pass over a precomputed sweep table (one row per E over the ladder).
std::vector<CandidateInterval> flag_candidates(const std::vector<double>& Es,
                                               const std::vector<std::vector<GammaSample>>& rows,
                                               const DetectInputs& in, double E1, double E2);

/// Scan [E1, E2] with step <= hbar_min, flag slow-decay energies, merge, and
/// refine each interval to a candidate via the combined-amplitude peak.
std::vector<double> detect_critical_energies(const DetectInputs& in, double E1, double E2,
                                             double step = 0);

/// Fits at the candidate, infers k, classifies minimum/maximum, recovers A.
SingularityReport invert_singularity(const DetectInputs& in, double Ec,
                                     const CalibrationTable* cal = nullptr);

/// Slope of the background-subtracted log probe at Ec (the log-term amplitude).
Complex log_probe_amplitude(const DetectInputs& in, double Ec, OrderFit* fit_out = nullptr);

/// Reference-run calibration of the universal maximum constant for (n, k).
Complex calibrate_max_constant(const DetectInputs& reference, double Ec_reference,
                               double A_known, int n, int k);

}  // namespace probe
