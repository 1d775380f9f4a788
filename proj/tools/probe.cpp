#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>

#include "probe/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"probe: spectral detection of critical points of a potential"};
    app.require_subcommand(1);

    std::string config_path, out_dir, ladder_spec;
    long seed = -1;
    std::vector<std::string> overrides;
    std::string plot_dir;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "experiment config file")->required();
        sub->add_option("--out", out_dir, "output directory (overrides config)");
        sub->add_option("--seed", seed, "random seed (overrides config)");
        sub->add_option("--hbar-ladder", ladder_spec, "h0,rho,count ladder override");
        sub->add_option("--override", overrides, "key=value config overrides")
            ->take_all();
    };

    for (const char* mode : {"sweep", "detect", "validate", "weyl", "classical"})
        add_common(app.add_subcommand(mode));
    auto* plots = app.add_subcommand("plots", "render SVG plots from artifacts");
    plots->add_option("dir", plot_dir, "artifact directory")->required();

    CLI11_PARSE(app, argc, argv);

    const auto* sub = app.get_subcommands().front();
    if (sub->get_name() == "plots") {
        const probe::RunResult r = probe::emit_plots(plot_dir);
        if (!r.message.empty()) std::cerr << r.message << '\n';
        for (const auto& a : r.artifacts) std::cout << a << '\n';
        return r.exit_code;
    }

    probe::ExperimentConfig cfg;
    try {
        probe::KeyValueConfig kv = probe::KeyValueConfig::parse_file(config_path);
        kv.set("experiment.mode", sub->get_name());
        if (!out_dir.empty()) kv.set("experiment.out", out_dir);
        if (seed >= 0) kv.set("experiment.seed", std::to_string(seed));
        if (!ladder_spec.empty()) {
            std::istringstream ss(ladder_spec);
            std::string h0, rho, count;
            if (!std::getline(ss, h0, ',') || !std::getline(ss, rho, ',') ||
                !std::getline(ss, count, ','))
                throw std::runtime_error("--hbar-ladder expects h0,rho,count");
            kv.set("ladder.hbar_max", h0);
            kv.set("ladder.rho", rho);
            kv.set("ladder.count", count);
        }
        for (const auto& ov : overrides) {
            const auto eq = ov.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error("--override expects key=value, got: " + ov);
            kv.set(ov.substr(0, eq), ov.substr(eq + 1));
        }
        cfg = probe::ExperimentConfig::from_kv(kv);
    } catch (const std::exception& ex) {
        std::cerr << "config error: " << ex.what() << '\n';
        return 2;
    }

    const probe::RunResult r = probe::run_experiment(cfg);
    if (!r.message.empty()) std::cerr << r.message << '\n';
    for (const auto& a : r.artifacts) std::cout << a << '\n';
    return r.exit_code;
}
