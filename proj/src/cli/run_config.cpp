#include "tasadm/cli/run_config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace tasadm::cli {

Command parse_command(const std::string& name) {
    if (name == "solve") return Command::solve;
    if (name == "sweep") return Command::sweep;
    if (name == "compare") return Command::compare;
    if (name == "doa") return Command::doa;
    if (name == "audit") return Command::audit;
    throw InvalidInput("unknown command '" + name + "'");
}

const char* to_string(Command c) noexcept {
    switch (c) {
        case Command::solve: return "solve";
        case Command::sweep: return "sweep";
        case Command::compare: return "compare";
        case Command::doa: return "doa";
        case Command::audit: return "audit";
    }
    return "?";
}

std::vector<std::uint64_t> RunConfig::seed_list() const {
    return seeds.empty() ? std::vector<std::uint64_t>{seed} : seeds;
}

RunConfig default_config(Command cmd) {
    RunConfig cfg;
    cfg.command = cmd;
    cfg.sparse.l = 256;
    cfg.sparse.m = 768;
    cfg.sparse.spikes = 40;
    switch (cmd) {
        case Command::solve:
            break;
        case Command::sweep:
            cfg.sweep_pairs = {{0.65, 0.32}, {0.3, 0.32}};
            break;
        case Command::compare:
            cfg.sparse.mu_factor = 0.01;
            cfg.compare_sizes = {{256, 768, 40}};
            break;
        case Command::doa:
            cfg.doa.sensors = 32;
            cfg.doa.grid = 90;
            cfg.doa.true_doas = {-std::numbers::pi / 6.0, std::numbers::pi / 4.0};
            cfg.doa.snr_db = 20.0;
            break;
        case Command::audit:
            cfg.sparse.l = 128;
            cfg.sparse.m = 384;
            cfg.sparse.spikes = 20;
            cfg.solver.adapt_beta = false;
            cfg.solver.start = StartMode::dual_consistent;
            cfg.solver.max_iter = 500;
            cfg.solver.epsilon = std::numeric_limits<double>::min();
            break;
    }
    return cfg;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) {
        cur = trim(cur);
        if (!cur.empty()) parts.push_back(cur);
    }
    return parts;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
    throw InvalidInput("bad value '" + value + "' for '" + key + "'");
}

double to_real(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    if (v == "inf" || v == "+inf") return std::numeric_limits<double>::infinity();
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) bad_value(key, value);
        return d;
    } catch (const std::logic_error&) {
        bad_value(key, value);
    }
}

std::uint64_t to_count(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    if (v.empty() || v[0] == '-') bad_value(key, value);
    try {
        std::size_t used = 0;
        const unsigned long long n = std::stoull(v, &used);
        if (used != v.size()) bad_value(key, value);
        return n;
    } catch (const std::logic_error&) {
        bad_value(key, value);
    }
}

bool to_flag(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
    if (v == "off" || v == "false" || v == "0" || v == "no") return false;
    bad_value(key, value);
}

// Accepts a plain number or a multiple of pi such as "-pi/6", "pi/4", "2*pi/9".
double to_angle(const std::string& key, const std::string& value) {
    std::string v = trim(value);
    const auto p = v.find("pi");
    if (p == std::string::npos) return to_real(key, v);
    double sign = 1.0;
    std::string head = v.substr(0, p);
    if (!head.empty() && head[0] == '-') {
        sign = -1.0;
        head.erase(0, 1);
    }
    double coef = 1.0;
    if (!head.empty()) {
        if (head.back() != '*') bad_value(key, value);
        head.pop_back();
        coef = to_real(key, head);
    }
    const std::string tail = v.substr(p + 2);
    double den = 1.0;
    if (!tail.empty()) {
        if (tail[0] != '/') bad_value(key, value);
        den = to_real(key, tail.substr(1));
    }
    return sign * coef * std::numbers::pi / den;
}

Regularizer to_regularizer(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    if (v == "l1") return Regularizer::l_one;
    if (v == "lhalf") return Regularizer::l_half;
    bad_value(key, value);
}

}  // namespace

void apply_setting(RunConfig& cfg, const std::string& raw_key, const std::string& value) {
    std::string key = trim(raw_key);
    for (auto& ch : key) {
        if (ch == '-') ch = '_';
    }
    SolverConfig& s = cfg.solver;

    if (key == "seed") {
        cfg.seed = to_count(key, value);
    } else if (key == "seeds") {
        cfg.seeds.clear();
        for (const auto& part : split(value, ',')) cfg.seeds.push_back(to_count(key, part));
    } else if (key == "tau") {
        s.tau = to_real(key, value);
    } else if (key == "alpha") {
        s.alpha = to_real(key, value);
    } else if (key == "beta0") {
        s.beta0 = to_real(key, value);
    } else if (key == "epsilon") {
        s.epsilon = to_real(key, value);
    } else if (key == "max_iter") {
        s.max_iter = to_count(key, value);
    } else if (key == "regularizer") {
        cfg.sparse.regularizer = to_regularizer(key, value);
    } else if (key == "out") {
        cfg.out_dir = trim(value);
    } else if (key == "allow_outside_domain") {
        cfg.allow_outside_domain = to_flag(key, value);
    } else if (key == "fixed_beta") {
        cfg.fixed_beta = to_real(key, value);
    } else if (key == "adaptive_beta") {
        s.adapt_beta = to_flag(key, value);
    } else if (key == "beta_cap") {
        s.beta_cap_enabled = to_flag(key, value);
    } else if (key == "gamma") {
        const std::string v = trim(value);
        if (v == "nesterov") {
            s.gamma_mode = GammaMode::nesterov;
        } else {
            s.gamma_mode = GammaMode::fixed;
            s.gamma_fixed = to_real(key, v);
        }
    } else if (key == "sigma_factor") {
        s.sigma_factor = to_real(key, value);
    } else if (key == "start") {
        const std::string v = trim(value);
        if (v == "plain" || v == "default") {
            s.start = StartMode::plain;
        } else if (v == "consistent") {
            s.start = StartMode::dual_consistent;
        } else {
            bad_value(key, value);
        }
    } else if (key == "lambda0_fill") {
        s.lambda0_fill = to_real(key, value);
    } else if (key == "nu") {
        s.adapt.nu = to_real(key, value);
    } else if (key == "eta_incr") {
        s.adapt.eta_incr = to_real(key, value);
    } else if (key == "eta_decr") {
        s.adapt.eta_decr = to_real(key, value);
    } else if (key == "instance") {
        const std::string v = trim(value);
        if (v == "sparse") {
            cfg.instance = InstanceKind::sparse;
        } else if (v == "logistic") {
            cfg.instance = InstanceKind::logistic;
        } else if (v == "file") {
            cfg.instance = InstanceKind::file;
        } else {
            bad_value(key, value);
        }
    } else if (key == "instance_file") {
        cfg.instance_file = trim(value);
        cfg.instance = InstanceKind::file;
    } else if (key == "l") {
        cfg.sparse.l = to_count(key, value);
    } else if (key == "m") {
        cfg.sparse.m = to_count(key, value);
    } else if (key == "spikes" || key == "T") {
        cfg.sparse.spikes = to_count(key, value);
    } else if (key == "noise_sigma") {
        cfg.sparse.noise_sigma = to_real(key, value);
    } else if (key == "mu_factor") {
        cfg.sparse.mu_factor = to_real(key, value);
    } else if (key == "logistic_n") {
        cfg.logistic_n = to_count(key, value);
    } else if (key == "logistic_dim") {
        cfg.logistic_dim = to_count(key, value);
    } else if (key == "logistic_mu") {
        cfg.logistic_mu = to_real(key, value);
    } else if (key == "sensors" || key == "M") {
        cfg.doa.sensors = to_count(key, value);
    } else if (key == "grid" || key == "L") {
        cfg.doa.grid = to_count(key, value);
    } else if (key == "doas") {
        cfg.doa.true_doas.clear();
        for (const auto& part : split(value, ',')) cfg.doa.true_doas.push_back(to_angle(key, part));
    } else if (key == "snr_db") {
        cfg.doa.snr_db = to_real(key, value);
    } else if (key == "doa_mu_factor") {
        cfg.doa.mu_factor = to_real(key, value);
    } else if (key == "pairs") {
        cfg.sweep_pairs.clear();
        for (const auto& part : split(value, ',')) {
            const auto ta = split(part, ':');
            if (ta.size() != 2) bad_value(key, value);
            cfg.sweep_pairs.emplace_back(to_real(key, ta[0]), to_real(key, ta[1]));
        }
    } else if (key == "sizes") {
        cfg.compare_sizes.clear();
        for (const auto& part : split(value, ',')) {
            const auto lmt = split(part, ':');
            if (lmt.size() != 3) bad_value(key, value);
            cfg.compare_sizes.push_back(
                {to_count(key, lmt[0]), to_count(key, lmt[1]), to_count(key, lmt[2])});
        }
    } else {
        throw InvalidInput("unknown setting '" + raw_key + "'");
    }
}

void load_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidInput("cannot read config file '" + path + "'");
    }
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw InvalidInput(path + ":" + std::to_string(lineno) + ": expected key = value");
        }
        try {
            apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
        } catch (const InvalidInput& e) {
            throw InvalidInput(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
}

void validate(const RunConfig& cfg) {
    if (cfg.command != Command::sweep) {
        cfg.solver.validate();
    }
    if (cfg.fixed_beta && !(*cfg.fixed_beta > 0.0)) {
        throw InvalidParameter("fixed_beta must be positive");
    }
    if (cfg.command == Command::sweep && cfg.sweep_pairs.empty()) {
        throw InvalidInput("sweep: empty (tau, alpha) grid");
    }
    if (cfg.command == Command::compare && cfg.compare_sizes.empty()) {
        throw InvalidInput("compare: empty sizes list");
    }
    if (cfg.instance == InstanceKind::file && cfg.instance_file.empty()) {
        throw InvalidInput("instance = file requires instance_file");
    }
    if (cfg.out_dir.empty()) {
        throw InvalidInput("output directory is empty");
    }
}

}  // namespace tasadm::cli
