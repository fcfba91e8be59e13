#include "tasadm/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

namespace tasadm::cli {

const std::vector<std::string> kTraceColumns = {"k",     "beta",    "gamma", "r_norm",
                                                "s_norm", "ire",     "L_beta", "L_tilde",
                                                "dx_G",  "dy",      "dlambda"};

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string short_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::ofstream open_output(const RunConfig& cfg, const std::string& name) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec) {
        throw Error("cannot create output directory '" + cfg.out_dir + "': " + ec.message());
    }
    const auto path = std::filesystem::path(cfg.out_dir) / name;
    std::ofstream os(path);
    if (!os) {
        throw Error("cannot write '" + path.string() + "'");
    }
    return os;
}

void finish(std::ofstream& os, const std::string& name) {
    os.flush();
    if (!os) {
        throw Error("write failed for '" + name + "'");
    }
}

void write_timing(const RunConfig& cfg, double seconds) {
    auto os = open_output(cfg, "timing.txt");
    os << "wall_seconds " << short_num(seconds) << '\n';
    finish(os, "timing.txt");
}

SolveResult solve_with(const StoredInstance& inst, const SolverConfig& scfg) {
    TasAdmm solver(inst.problem, scfg);
    SolveResult res = solver.solve(initial_state(inst.problem, scfg));
    if (inst.x_orig) {
        res.summary.l2_error = l2_error(res.summary.final_state.x, *inst.x_orig);
    }
    return res;
}

double median(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

template <typename Fn>
int guarded(std::ostream& err, const char* name, Fn&& fn) {
    try {
        return fn();
    } catch (const std::exception& e) {
        err << name << ": " << e.what() << '\n';
        return 1;
    }
}

}  // namespace

void write_trace_csv(std::ostream& os, const std::vector<TraceRecord>& trace) {
    for (std::size_t i = 0; i < kTraceColumns.size(); ++i) {
        os << kTraceColumns[i] << (i + 1 < kTraceColumns.size() ? ',' : '\n');
    }
    for (const auto& r : trace) {
        os << r.k << ',' << num(r.beta) << ',' << num(r.gamma) << ',' << num(r.r_norm) << ','
           << num(r.s_norm) << ',' << num(r.ire) << ',' << num(r.L_beta) << ',' << num(r.L_tilde)
           << ',' << num(r.dx_G) << ',' << num(r.dy) << ',' << num(r.dlambda) << '\n';
    }
}

void write_summary(std::ostream& os, const SolveSummary& s) {
    os << "it " << s.iterations << '\n';
    os << "final_ire " << num(s.final_ire) << '\n';
    os << "final_equ " << num(s.final_equ) << '\n';
    os << "l2_error " << (s.l2_error ? num(*s.l2_error) : std::string("none")) << '\n';
    os << "terminated_by " << to_string(s.terminated_by) << '\n';
    if (!s.message.empty()) os << "message " << s.message << '\n';
}

StoredInstance build_instance(const RunConfig& cfg) {
    StoredInstance out;
    switch (cfg.instance) {
        case InstanceKind::sparse: {
            SparseRecoverySpec spec = cfg.sparse;
            spec.seed = cfg.seed;
            SparseRecovery sr = gen_sparse_recovery(spec);
            out.problem = std::move(sr.problem);
            out.x_orig = std::move(sr.x_orig);
            break;
        }
        case InstanceKind::logistic:
            out.problem = gen_logistic_erm(cfg.logistic_n, cfg.logistic_dim, cfg.logistic_mu, cfg.seed);
            break;
        case InstanceKind::file: {
            std::ifstream in(cfg.instance_file);
            if (!in) throw InvalidInput("cannot read instance file '" + cfg.instance_file + "'");
            out = read_instance(in);
            break;
        }
    }
    return out;
}

SolverConfig effective_solver(const RunConfig& cfg) {
    SolverConfig s = cfg.solver;
    if (cfg.fixed_beta) {
        s.beta0 = *cfg.fixed_beta;
        s.adapt_beta = false;
    }
    return s;
}

int cmd_solve(const RunConfig& cfg, std::ostream& log, std::ostream& err) {
    return guarded(err, "solve", [&] {
        validate(cfg);
        const StoredInstance inst = build_instance(cfg);
        const SolveResult res = solve_with(inst, effective_solver(cfg));

        auto trace = open_output(cfg, "trace.csv");
        write_trace_csv(trace, res.trace);
        finish(trace, "trace.csv");
        auto summary = open_output(cfg, "summary.txt");
        write_summary(summary, res.summary);
        finish(summary, "summary.txt");
        write_timing(cfg, res.summary.wall_seconds);

        write_summary(log, res.summary);
        log << "wall_seconds " << short_num(res.summary.wall_seconds) << '\n';
        return res.summary.terminated_by == Termination::failure ? 2 : 0;
    });
}

std::vector<SweepRow> run_sweep(const RunConfig& cfg) {
    if (cfg.sweep_pairs.empty()) {
        throw InvalidInput("sweep: empty (tau, alpha) grid");
    }
    const StoredInstance inst = build_instance(cfg);
    std::vector<SweepRow> rows;
    for (const auto& [tau, alpha] : cfg.sweep_pairs) {
        SweepRow row;
        row.tau = tau;
        row.alpha = alpha;
        const double ta = tau + alpha;
        const bool in_domain = ta > 0.0 && ta < 1.0;
        const bool strict_ok = tau >= 0.0 && alpha >= 0.0;
        if (!in_domain || (!strict_ok && !cfg.allow_outside_domain)) {
            row.status = "skipped";
            rows.push_back(row);
            continue;
        }
        SolverConfig s = effective_solver(cfg);
        s.tau = tau;
        s.alpha = alpha;
        const SolveResult res = solve_with(inst, s);
        row.iterations = res.summary.iterations;
        row.final_ire = res.summary.final_ire;
        row.final_equ = res.summary.final_equ;
        row.l2_error = res.summary.l2_error.value_or(std::numeric_limits<double>::quiet_NaN());
        row.wall_seconds = res.summary.wall_seconds;
        switch (res.summary.terminated_by) {
            case Termination::converged: row.status = "converged"; break;
            case Termination::max_iter: row.status = "not_converged"; break;
            case Termination::failure: row.status = "failed"; break;
        }
        rows.push_back(row);
    }
    return rows;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& log, std::ostream& err) {
    return guarded(err, "sweep", [&] {
        validate(cfg);
        const auto rows = run_sweep(cfg);
        auto os = open_output(cfg, "sweep.csv");
        os << "tau,alpha,status,it,final_ire,final_equ,l2_error\n";
        double total = 0.0;
        for (const auto& r : rows) {
            os << num(r.tau) << ',' << num(r.alpha) << ',' << r.status << ',';
            if (r.status == "skipped") {
                os << "-,-,-,-\n";
            } else {
                os << r.iterations << ',' << num(r.final_ire) << ',' << num(r.final_equ) << ','
                   << num(r.l2_error) << '\n';
            }
            total += r.wall_seconds;
            log << "(" << short_num(r.tau) << ", " << short_num(r.alpha) << ") " << r.status;
            if (r.status != "skipped") {
                log << " it=" << r.iterations << " equ=" << short_num(r.final_equ)
                    << " l2=" << short_num(r.l2_error);
            }
            log << '\n';
        }
        finish(os, "sweep.csv");
        write_timing(cfg, total);
        return 0;
    });
}

std::vector<CompareRow> run_compare(const RunConfig& cfg) {
    std::vector<CompareRow> rows;
    const SolverConfig s = effective_solver(cfg);
    for (const auto& size : cfg.compare_sizes) {
        for (const auto seed : cfg.seed_list()) {
            SparseRecoverySpec spec = cfg.sparse;
            spec.l = size.l;
            spec.m = size.m;
            spec.spikes = size.spikes;
            spec.seed = seed;
            spec.regularizer = Regularizer::l_half;
            SparseRecovery sr = gen_sparse_recovery(spec);
            StoredInstance half{sr.problem, sr.x_orig};
            StoredInstance one{with_regularizer(sr.problem, Regularizer::l_one), sr.x_orig};
            CompareRow row;
            row.size = size;
            row.seed = seed;
            row.l_half = solve_with(half, s).summary;
            row.l_one = solve_with(one, s).summary;
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

int cmd_compare(const RunConfig& cfg, std::ostream& log, std::ostream& err) {
    return guarded(err, "compare", [&] {
        validate(cfg);
        const auto rows = run_compare(cfg);
        auto os = open_output(cfg, "compare.csv");
        os << "l,m,T,seed,it_l1,equ_l1,l2_l1,term_l1,it_lhalf,equ_lhalf,l2_lhalf,term_lhalf\n";
        double total = 0.0;
        std::vector<double> e1, eh;
        for (const auto& r : rows) {
            os << r.size.l << ',' << r.size.m << ',' << r.size.spikes << ',' << r.seed << ','
               << r.l_one.iterations << ',' << num(r.l_one.final_equ) << ','
               << num(*r.l_one.l2_error) << ',' << to_string(r.l_one.terminated_by) << ','
               << r.l_half.iterations << ',' << num(r.l_half.final_equ) << ','
               << num(*r.l_half.l2_error) << ',' << to_string(r.l_half.terminated_by) << '\n';
            total += r.l_one.wall_seconds + r.l_half.wall_seconds;
            e1.push_back(*r.l_one.l2_error);
            eh.push_back(*r.l_half.l2_error);
            log << r.size.l << 'x' << r.size.m << " seed " << r.seed << ": l1 it=" << r.l_one.iterations
                << " l2=" << short_num(*r.l_one.l2_error) << " | lhalf it=" << r.l_half.iterations
                << " l2=" << short_num(*r.l_half.l2_error) << '\n';
        }
        finish(os, "compare.csv");
        write_timing(cfg, total);
        log << "median l2_error l1=" << short_num(median(e1)) << " lhalf=" << short_num(median(eh))
            << '\n';
        return 0;
    });
}

DoaReport run_doa(const RunConfig& cfg, std::uint64_t seed, Vector* spectrum, SolveResult* result) {
    DoaSpec spec = cfg.doa;
    spec.seed = seed;
    DoaInstance inst = gen_doa(spec);
    const SolverConfig s = effective_solver(cfg);
    TasAdmm solver(inst.problem, s);
    SolveResult res = solver.solve(initial_state(inst.problem, s));

    DoaReport rep;
    rep.support = inst.support;
    rep.off_grid_warning = inst.off_grid_warning;
    for (auto idx : inst.support) rep.true_angles.push_back(inst.grid_angles[idx]);
    const Vector sp = doa_spectrum(res.summary.final_state.x);
    rep.peaks = spectrum_peaks(sp, inst.support.size());
    for (auto idx : rep.peaks) rep.peak_angles.push_back(inst.grid_angles[idx]);
    auto a = rep.peaks;
    auto b = rep.support;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    rep.support_recovered = a == b;
    rep.summary = res.summary;
    if (spectrum) *spectrum = sp;
    if (result) *result = std::move(res);
    return rep;
}

int cmd_doa(const RunConfig& cfg, std::ostream& log, std::ostream& err) {
    return guarded(err, "doa", [&] {
        validate(cfg);
        const auto seeds = cfg.seed_list();
        auto table = open_output(cfg, "doa.csv");
        table << "seed,recovered,peak_indices,peak_angles_rad,it,terminated_by\n";
        const auto grid = doa_grid(cfg.doa.grid);
        double total = 0.0;
        std::size_t hits = 0;
        for (std::size_t i = 0; i < seeds.size(); ++i) {
            Vector sp;
            SolveResult res;
            const DoaReport rep = run_doa(cfg, seeds[i], &sp, &res);
            if (i == 0) {
                auto os = open_output(cfg, "spectrum.csv");
                os << "angle_rad,magnitude\n";
                for (Eigen::Index j = 0; j < sp.size(); ++j) {
                    os << num(grid[static_cast<std::size_t>(j)]) << ',' << num(sp[j]) << '\n';
                }
                finish(os, "spectrum.csv");
                auto tr = open_output(cfg, "trace.csv");
                write_trace_csv(tr, res.trace);
                finish(tr, "trace.csv");
                auto sm = open_output(cfg, "summary.txt");
                write_summary(sm, rep.summary);
                finish(sm, "summary.txt");
            }
            std::string idx, ang;
            for (std::size_t p = 0; p < rep.peaks.size(); ++p) {
                idx += (p ? ";" : "") + std::to_string(rep.peaks[p]);
                ang += (p ? ";" : "") + num(rep.peak_angles[p]);
            }
            table << seeds[i] << ',' << (rep.support_recovered ? 1 : 0) << ',' << idx << ',' << ang
                  << ',' << rep.summary.iterations << ',' << to_string(rep.summary.terminated_by)
                  << '\n';
            total += rep.summary.wall_seconds;
            hits += rep.support_recovered ? 1 : 0;

            log << "seed " << seeds[i] << ": peaks";
            for (double a : rep.peak_angles) log << ' ' << short_num(a);
            log << " |";
            for (double t : rep.true_angles) {
                double best = std::numeric_limits<double>::infinity();
                for (double a : rep.peak_angles) best = std::min(best, std::abs(a - t));
                log << " dist(" << short_num(t) << ")=" << short_num(best);
            }
            log << (rep.support_recovered ? " recovered" : " missed");
            if (rep.off_grid_warning) log << " [true DOA off grid by more than half a cell]";
            log << '\n';
        }
        finish(table, "doa.csv");
        write_timing(cfg, total);
        log << "recovered " << hits << " of " << seeds.size() << '\n';
        return 0;
    });
}

int cmd_audit(const RunConfig& cfg, std::ostream& log, std::ostream& err) {
    return guarded(err, "audit", [&] {
        validate(cfg);
        const StoredInstance inst = build_instance(cfg);
        SolverConfig s = effective_solver(cfg);
        if (!cfg.fixed_beta) {
            s.beta0 = compliant_beta(inst.problem, s);
        }
        const SolveResult res = solve_with(inst, s);
        const AuditParams params{s.tau, s.alpha, inst.problem.lipschitz_g, inst.problem.sigma_b,
                                 res.summary.initial_L};
        const DescentAudit descent = audit_descent(res.trace, params);

        auto trace = open_output(cfg, "trace.csv");
        write_trace_csv(trace, res.trace);
        finish(trace, "trace.csv");

        auto os = open_output(cfg, "audit.txt");
        const ZetaConstants z =
            zeta_constants(0.0, s.tau, s.alpha, s.beta0, inst.problem.lipschitz_g, inst.problem.sigma_b);
        os << "beta " << num(s.beta0) << '\n';
        os << "adaptive_beta " << (s.adapt_beta ? "on" : "off") << '\n';
        os << "zeta2 " << num(z.zeta2) << '\n';
        os << "zeta3_printed " << num(z.zeta3) << '\n';
        os << "penalty_ok " << (descent.penalty_ok ? 1 : 0) << '\n';
        os << "steps " << descent.checked << '\n';
        os << "descent_violations " << descent.violations.size() << '\n';
        os << "descent_worst_margin " << num(descent.worst_margin) << '\n';
        if (!descent.violations.empty()) os << "descent_first_violation " << descent.violations.front() << '\n';
        if (inst.problem.lower_bound) {
            const RateBoundAudit printed = audit_rate_bounds(res.trace, params, inst.problem);
            const RateBoundAudit chained =
                audit_rate_bounds(res.trace, params, inst.problem, Zeta3Form::chained);
            os << "c0 " << num(printed.c0) << '\n';
            os << "rate_dx_violations " << printed.dx_violations.size() << '\n';
            os << "rate_dy_violations " << printed.dy_violations.size() << '\n';
            os << "rate_dlambda_violations " << printed.dlambda_violations.size() << '\n';
            os << "rate_dlambda_violations_chained " << chained.dlambda_violations.size() << '\n';
            log << "rate bounds: dx " << printed.dx_violations.size() << ", dy "
                << printed.dy_violations.size() << ", dlambda " << printed.dlambda_violations.size()
                << " (chained constant: " << chained.dlambda_violations.size() << ") violations\n";
        } else {
            os << "rate_bounds unsupported\n";
            log << "rate bounds: instance has no known lower bound\n";
        }
        finish(os, "audit.txt");
        write_timing(cfg, res.summary.wall_seconds);
        log << "descent: " << descent.violations.size() << " violations over " << descent.checked
            << " steps (beta " << short_num(s.beta0) << ", penalty bound " << (descent.penalty_ok ? "met" : "not met")
            << ")\n";
        return 0;
    });
}

int run_command(const RunConfig& cfg, std::ostream& log, std::ostream& err) {
    switch (cfg.command) {
        case Command::solve: return cmd_solve(cfg, log, err);
        case Command::sweep: return cmd_sweep(cfg, log, err);
        case Command::compare: return cmd_compare(cfg, log, err);
        case Command::doa: return cmd_doa(cfg, log, err);
        case Command::audit: return cmd_audit(cfg, log, err);
    }
    err << "unknown command\n";
    return 1;
}

}  // namespace tasadm::cli
