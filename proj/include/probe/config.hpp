#pragma once

#include <map>
#include <string>
#include <vector>

namespace probe {

/// Flat INI-style configuration: [section] lines with key = value pairs.
/// Keys are addressed as "section.key".
class KeyValueConfig {
  public:
    static KeyValueConfig parse_file(const std::string& path);
    static KeyValueConfig parse_string(const std::string& text);

    void set(const std::string& dotted_key, const std::string& value);
    bool has(const std::string& dotted_key) const;
    std::string get(const std::string& dotted_key, const std::string& dflt = "") const;
    double get_double(const std::string& dotted_key, double dflt) const;
    long get_long(const std::string& dotted_key, long dflt) const;

    std::string serialize() const;  // canonical ordering, round-trips exactly

  private:
    std::map<std::string, std::string> kv_;
};

enum class RunMode { sweep, detect, validate, weyl, classical };
RunMode parse_mode(const std::string& s);
std::string to_string(RunMode m);

struct LadderSpec {
    double hbar_max = 0.1;
    double rho = 0.75;
    int count = 10;
};

struct TestFnSpec {
    bool auto_M = false;
    double M = 1.0;
    int j0 = 3;
    int t_nodes = 8192;
    int pad = 128;
};

struct ExperimentConfig {
    RunMode mode = RunMode::sweep;
    std::string out_dir = "out";
    std::uint64_t seed = 12345;

    // potential
    std::string potential_name;          // catalog name, or empty when file set
    std::vector<double> potential_params;
    std::string potential_file;          // polynomial file path
    double potential_box = 0;            // 0 = catalog default
    std::string solver = "fd";           // fd | oracle
    double ppw = 32;

    double E1 = 0, E2 = 1, eps = 0;      // window; eps 0 = 10% of |J|
    LadderSpec ladder;
    double egrid_step = 0;               // 0 = hbar_min
    double egrid_E1 = 0, egrid_E2 = 0;   // 0/0 = window

    TestFnSpec tf;
    double detect_delta_log = 0.35;
    double detect_M_log = 1.2;
    double weyl_E = 1.0;
    double weyl_M = 2.0;

    std::string raw;                     // canonical serialized key-values
    std::uint64_t hash() const;

    static ExperimentConfig from_kv(const KeyValueConfig& kv);
    KeyValueConfig to_kv() const;        // resolved form (auto values filled in)
};

}  // namespace probe
