#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "tasadm/cli/run_config.hpp"

namespace tasadm::cli {

/// Trace columns, in file order.
extern const std::vector<std::string> kTraceColumns;

void write_trace_csv(std::ostream& os, const std::vector<TraceRecord>& trace);

/// Key-value summary: it, final_ire, final_equ, l2_error, terminated_by.
void write_summary(std::ostream& os, const SolveSummary& s);

struct SweepRow {
    double tau = 0.0;
    double alpha = 0.0;
    std::string status;  // converged | not_converged | failed | skipped
    std::size_t iterations = 0;
    double final_ire = 0.0;
    double final_equ = 0.0;
    double l2_error = 0.0;
    double wall_seconds = 0.0;
};

struct CompareRow {
    SizeTriple size;
    std::uint64_t seed = 0;
    SolveSummary l_one;
    SolveSummary l_half;
};

struct DoaReport {
    std::vector<double> true_angles;    // snapped grid angles, in input order
    std::vector<std::size_t> support;
    std::vector<std::size_t> peaks;     // by decreasing magnitude
    std::vector<double> peak_angles;
    bool support_recovered = false;
    bool off_grid_warning = false;
    SolveSummary summary;
};

/// Builds the instance named by cfg (sparse/logistic/file); x_orig if known.
StoredInstance build_instance(const RunConfig& cfg);

/// Applies fixed_beta to the solver config.
SolverConfig effective_solver(const RunConfig& cfg);

std::vector<SweepRow> run_sweep(const RunConfig& cfg);
std::vector<CompareRow> run_compare(const RunConfig& cfg);
DoaReport run_doa(const RunConfig& cfg, std::uint64_t seed, Vector* spectrum = nullptr,
                  SolveResult* result = nullptr);

// Each command writes its files under cfg.out_dir, prints a short report on
// `log`, and returns a process exit status. Errors are reported on `err`.
int cmd_solve(const RunConfig& cfg, std::ostream& log, std::ostream& err);
int cmd_sweep(const RunConfig& cfg, std::ostream& log, std::ostream& err);
int cmd_compare(const RunConfig& cfg, std::ostream& log, std::ostream& err);
int cmd_doa(const RunConfig& cfg, std::ostream& log, std::ostream& err);
int cmd_audit(const RunConfig& cfg, std::ostream& log, std::ostream& err);

int run_command(const RunConfig& cfg, std::ostream& log, std::ostream& err);

}  // namespace tasadm::cli
