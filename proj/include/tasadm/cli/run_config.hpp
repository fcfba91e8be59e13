#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tasadm/problems.hpp"
#include "tasadm/solver.hpp"

namespace tasadm::cli {

enum class Command { solve, sweep, compare, doa, audit };

Command parse_command(const std::string& name);
const char* to_string(Command c) noexcept;

enum class InstanceKind { sparse, logistic, file };

struct SizeTriple {
    std::size_t l = 0;
    std::size_t m = 0;
    std::size_t spikes = 0;
};

/**
 * Everything one CLI invocation needs. Built from per-command defaults,
 * then a flat `key = value` config file, then command-line overrides; all
 * three layers go through apply_setting so keys and flags share one
 * vocabulary.
 */
struct RunConfig {
    Command command = Command::solve;

    InstanceKind instance = InstanceKind::sparse;
    SparseRecoverySpec sparse;
    std::size_t logistic_n = 200;
    std::size_t logistic_dim = 50;
    double logistic_mu = 0.01;
    std::string instance_file;
    DoaSpec doa;
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> seeds;  // compare/doa: empty means {seed}

    SolverConfig solver;
    std::optional<double> fixed_beta;  // disables adaptation

    std::vector<std::pair<double, double>> sweep_pairs;
    bool allow_outside_domain = false;
    std::vector<SizeTriple> compare_sizes;

    std::string out_dir = "out";

    /// Seeds to iterate for multi-run commands.
    std::vector<std::uint64_t> seed_list() const;
};

/// Defaults for `cmd`: compare uses μ = 0.01·μ_max, audit runs 500 steps at
/// the compliant β from the dual-consistent start.
RunConfig default_config(Command cmd);

/// Applies one setting; throws InvalidInput on unknown keys or bad values.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Reads `key = value` lines; blank lines and `#` comments are skipped.
void load_config_file(RunConfig& cfg, const std::string& path);

/// Cross-field validation (solver invariants, non-empty lists).
void validate(const RunConfig& cfg);

}  // namespace tasadm::cli
