#include "probe/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "probe/numerics.hpp"

namespace probe {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::string tok;
    std::istringstream ss(s);
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (!tok.empty()) out.push_back(std::strtod(tok.c_str(), nullptr));
    }
    return out;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_string(const std::string& text) {
    KeyValueConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::runtime_error("config line " + std::to_string(lineno) +
                                         ": unterminated section");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw std::runtime_error("config line " + std::to_string(lineno) + ": empty key");
        cfg.kv_[section.empty() ? key : section + "." + key] = val;
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str());
}

void KeyValueConfig::set(const std::string& k, const std::string& v) { kv_[k] = v; }
bool KeyValueConfig::has(const std::string& k) const { return kv_.count(k) > 0; }

std::string KeyValueConfig::get(const std::string& k, const std::string& dflt) const {
    const auto it = kv_.find(k);
    return it == kv_.end() ? dflt : it->second;
}

double KeyValueConfig::get_double(const std::string& k, double dflt) const {
    const auto it = kv_.find(k);
    if (it == kv_.end()) return dflt;
    char* end = nullptr;
    const double v = std::strtod(it->second.c_str(), &end);
    if (end == it->second.c_str()) throw std::runtime_error("config: bad number for " + k);
    return v;
}

long KeyValueConfig::get_long(const std::string& k, long dflt) const {
    const auto it = kv_.find(k);
    if (it == kv_.end()) return dflt;
    return std::strtol(it->second.c_str(), nullptr, 10);
}

std::string KeyValueConfig::serialize() const {
    std::string cur_section;
    std::ostringstream out;
    for (const auto& [k, v] : kv_) {
        const auto dot = k.rfind('.');
        const std::string sec = dot == std::string::npos ? "" : k.substr(0, dot);
        const std::string key = dot == std::string::npos ? k : k.substr(dot + 1);
        if (sec != cur_section) {
            out << '[' << sec << "]\n";
            cur_section = sec;
        }
        out << key << " = " << v << '\n';
    }
    return out.str();
}

RunMode parse_mode(const std::string& s) {
    if (s == "sweep") return RunMode::sweep;
    if (s == "detect") return RunMode::detect;
    if (s == "validate") return RunMode::validate;
    if (s == "weyl") return RunMode::weyl;
    if (s == "classical") return RunMode::classical;
    throw std::runtime_error("unknown mode: " + s);
}

std::string to_string(RunMode m) {
    switch (m) {
        case RunMode::sweep: return "sweep";
        case RunMode::detect: return "detect";
        case RunMode::validate: return "validate";
        case RunMode::weyl: return "weyl";
        case RunMode::classical: return "classical";
    }
    return "?";
}

ExperimentConfig ExperimentConfig::from_kv(const KeyValueConfig& kv) {
    ExperimentConfig c;
    c.mode = parse_mode(kv.get("experiment.mode", "sweep"));
    c.out_dir = kv.get("experiment.out", "out");
    c.seed = static_cast<std::uint64_t>(kv.get_long("experiment.seed", 12345));

    c.potential_name = kv.get("potential.name", "");
    c.potential_file = kv.get("potential.file", "");
    if (c.potential_name.empty() && c.potential_file.empty())
        throw std::runtime_error("config: potential.name or potential.file required");
    if (kv.has("potential.params")) c.potential_params = parse_list(kv.get("potential.params"));
    c.potential_box = kv.get_double("potential.box", 0);
    c.solver = kv.get("solver.kind", "fd");
    if (c.solver != "fd" && c.solver != "oracle")
        throw std::runtime_error("config: solver.kind must be fd or oracle");
    c.ppw = kv.get_double("solver.ppw", 32);

    c.E1 = kv.get_double("window.E1", 0);
    c.E2 = kv.get_double("window.E2", 1);
    c.eps = kv.get_double("window.eps", 0);
    if (!(c.E1 <= c.E2)) throw std::runtime_error("config: window.E1 <= window.E2 required");

    c.ladder.hbar_max = kv.get_double("ladder.hbar_max", 0.1);
    c.ladder.rho = kv.get_double("ladder.rho", 0.75);
    c.ladder.count = static_cast<int>(kv.get_long("ladder.count", 10));
    if (c.ladder.count < 1 || c.ladder.rho <= 0 || c.ladder.rho >= 1 || c.ladder.hbar_max <= 0)
        throw std::runtime_error("config: bad ladder");

    c.egrid_step = kv.get_double("egrid.step", 0);
    c.egrid_E1 = kv.get_double("egrid.E1", c.E1);
    c.egrid_E2 = kv.get_double("egrid.E2", c.E2);

    const std::string M = kv.get("testfn.M", "1.0");
    if (M == "auto") {
        c.tf.auto_M = true;
    } else {
        c.tf.M = std::strtod(M.c_str(), nullptr);
        if (c.tf.M <= 0) throw std::runtime_error("config: testfn.M must be positive or auto");
    }
    c.tf.j0 = static_cast<int>(kv.get_long("testfn.j0", 3));
    c.tf.t_nodes = static_cast<int>(kv.get_long("testfn.t_nodes", 8192));
    c.tf.pad = static_cast<int>(kv.get_long("testfn.pad", 128));

    c.detect_delta_log = kv.get_double("detect.delta_log", 0.35);
    c.detect_M_log = kv.get_double("detect.M_log", 1.2);
    c.weyl_E = kv.get_double("weyl.E", 1.0);
    c.weyl_M = kv.get_double("weyl.M", 2.0);

    c.raw = kv.serialize();
    return c;
}

KeyValueConfig ExperimentConfig::to_kv() const {
    KeyValueConfig kv;
    kv.set("experiment.mode", to_string(mode));
    kv.set("experiment.out", out_dir);
    kv.set("experiment.seed", std::to_string(seed));
    if (!potential_name.empty()) kv.set("potential.name", potential_name);
    if (!potential_file.empty()) kv.set("potential.file", potential_file);
    if (!potential_params.empty()) {
        std::string s;
        for (std::size_t i = 0; i < potential_params.size(); ++i)
            s += (i ? "," : "") + format_double(potential_params[i]);
        kv.set("potential.params", s);
    }
    if (potential_box > 0) kv.set("potential.box", format_double(potential_box));
    kv.set("solver.kind", solver);
    kv.set("solver.ppw", format_double(ppw));
    kv.set("window.E1", format_double(E1));
    kv.set("window.E2", format_double(E2));
    if (eps > 0) kv.set("window.eps", format_double(eps));
    kv.set("ladder.hbar_max", format_double(ladder.hbar_max));
    kv.set("ladder.rho", format_double(ladder.rho));
    kv.set("ladder.count", std::to_string(ladder.count));
    if (egrid_step > 0) kv.set("egrid.step", format_double(egrid_step));
    kv.set("egrid.E1", format_double(egrid_E1));
    kv.set("egrid.E2", format_double(egrid_E2));
    kv.set("testfn.M", tf.auto_M ? "auto" : format_double(tf.M));
    kv.set("testfn.j0", std::to_string(tf.j0));
    kv.set("testfn.t_nodes", std::to_string(tf.t_nodes));
    kv.set("testfn.pad", std::to_string(tf.pad));
    kv.set("detect.delta_log", format_double(detect_delta_log));
    kv.set("detect.M_log", format_double(detect_M_log));
    kv.set("weyl.E", format_double(weyl_E));
    kv.set("weyl.M", format_double(weyl_M));
    return kv;
}

std::uint64_t ExperimentConfig::hash() const {
    return fnv1a64(to_kv().serialize() + "|seed:" + std::to_string(seed));
}

}  // namespace probe
