#include <iostream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "tasadm/cli/commands.hpp"

namespace {

using tasadm::cli::Command;

// (flag, config key, help)
const std::vector<std::pair<std::string, std::pair<std::string, std::string>>> kValueFlags = {
    {"--seed", {"seed", "RNG seed for instance generation"}},
    {"--seeds", {"seeds", "comma-separated seeds (compare, doa)"}},
    {"--tau", {"tau", "first dual step factor"}},
    {"--alpha", {"alpha", "relaxation factor"}},
    {"--beta0", {"beta0", "initial penalty"}},
    {"--epsilon", {"epsilon", "IRE stopping tolerance"}},
    {"--max-iter", {"max_iter", "iteration limit"}},
    {"--regularizer", {"regularizer", "l1 or lhalf"}},
    {"--out", {"out", "output directory"}},
    {"--fixed-beta", {"fixed_beta", "run with this penalty, adaptation off"}},
    {"--adaptive-beta", {"adaptive_beta", "on or off"}},
    {"--beta-cap", {"beta_cap", "on or off"}},
    {"--gamma", {"gamma", "nesterov, or a fixed value in [0, 0.5)"}},
    {"--start", {"start", "plain or consistent"}},
    {"--instance", {"instance", "sparse, logistic or file"}},
    {"--instance-file", {"instance_file", "instance container to load"}},
    {"--l", {"l", "rows of A (sparse recovery)"}},
    {"--m", {"m", "columns of A (sparse recovery)"}},
    {"--spikes", {"spikes", "nonzeros in the true signal"}},
    {"--noise-sigma", {"noise_sigma", "measurement noise level"}},
    {"--mu-factor", {"mu_factor", "mu as a fraction of ||A^T c||_inf"}},
    {"--pairs", {"pairs", "sweep grid, e.g. 0.65:0.32,0.3:0.32"}},
    {"--sizes", {"sizes", "compare sizes, e.g. 256:768:40"}},
    {"--sensors", {"sensors", "DOA array size M"}},
    {"--grid", {"grid", "DOA grid size L"}},
    {"--doas", {"doas", "true DOAs in radians, e.g. -pi/6,pi/4"}},
    {"--snr-db", {"snr_db", "DOA SNR in dB (inf for noiseless)"}},
    {"--doa-mu-factor", {"doa_mu_factor", "DOA mu as a fraction of its mu_max"}},
};

struct SubcommandArgs {
    std::string config_path;
    std::map<std::string, std::string> values;
    bool allow_outside = false;
    std::vector<std::string> extra;
};

void add_run_options(CLI::App* sub, SubcommandArgs& args) {
    sub->add_option("--config", args.config_path, "flat key = value config file");
    for (const auto& [flag, meta] : kValueFlags) {
        sub->add_option(flag, args.values[meta.first], meta.second);
    }
    sub->add_flag("--allow-outside-domain", args.allow_outside,
                  "let sweep run pairs with negative tau or alpha");
    sub->add_option("--set", args.extra, "extra key=value setting (repeatable)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tasadm: ADMM with Nesterov extrapolation and two multiplier updates per iteration"};
    app.require_subcommand(1);

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"solve", "solve one instance, write trace.csv and summary.txt"},
        {"sweep", "solve over a grid of (tau, alpha) pairs"},
        {"compare", "l1 vs l1/2 regularization on identical data"},
        {"doa", "single-snapshot DOA estimation, write spectrum.csv"},
        {"audit", "check descent and rate bounds on a fixed-penalty run"},
    };
    std::map<std::string, SubcommandArgs> args;
    for (const auto& [name, help] : commands) {
        add_run_options(app.add_subcommand(name, help), args[name]);
    }

    CLI11_PARSE(app, argc, argv);

    const std::string name = app.get_subcommands().front()->get_name();
    CLI::App* sub = app.get_subcommand(name);
    const SubcommandArgs& a = args[name];
    try {
        tasadm::cli::RunConfig cfg = tasadm::cli::default_config(tasadm::cli::parse_command(name));
        if (!a.config_path.empty()) tasadm::cli::load_config_file(cfg, a.config_path);
        for (const auto& [flag, meta] : kValueFlags) {
            if (sub->count(flag) > 0) tasadm::cli::apply_setting(cfg, meta.first, a.values.at(meta.first));
        }
        if (a.allow_outside) cfg.allow_outside_domain = true;
        for (const auto& kv : a.extra) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw tasadm::InvalidInput("--set expects key=value, got '" + kv + "'");
            tasadm::cli::apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
        }
        return tasadm::cli::run_command(cfg, std::cout, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << name << ": " << e.what() << '\n';
        return 1;
    }
}
