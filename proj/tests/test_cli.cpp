#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "tasadm/cli/commands.hpp"

using namespace tasadm;
using namespace tasadm::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("tasadm_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::map<std::string, std::string> read_summary(const fs::path& p) {
    std::map<std::string, std::string> kv;
    std::ifstream in(p);
    std::string k, v;
    while (in >> k >> v) kv[k] = v;
    return kv;
}

RunConfig tiny_solve(const fs::path& out) {
    RunConfig cfg = default_config(Command::solve);
    cfg.sparse.l = 24;
    cfg.sparse.m = 60;
    cfg.sparse.spikes = 4;
    cfg.solver.max_iter = 200;
    cfg.out_dir = out.string();
    return cfg;
}

std::size_t count_lines(const std::string& s) {
    std::size_t n = 0;
    for (char ch : s) n += ch == '\n';
    return n;
}

}  // namespace

TEST_CASE("command names") {
    for (auto c : {Command::solve, Command::sweep, Command::compare, Command::doa, Command::audit}) {
        CHECK(parse_command(to_string(c)) == c);
    }
    CHECK_THROWS_AS(parse_command("plot"), InvalidInput);
}

TEST_CASE("apply_setting") {
    RunConfig cfg = default_config(Command::solve);
    apply_setting(cfg, "tau", "0.5");
    apply_setting(cfg, "alpha", " 0.25 ");
    apply_setting(cfg, "max-iter", "17");
    apply_setting(cfg, "regularizer", "l1");
    apply_setting(cfg, "gamma", "0.1");
    apply_setting(cfg, "doas", "-pi/6, pi/4, 2*pi/9, 0.5");
    apply_setting(cfg, "snr_db", "inf");
    apply_setting(cfg, "pairs", "0.6:0.3, 0.1:0.2");
    apply_setting(cfg, "sizes", "10:20:3");
    apply_setting(cfg, "seeds", "3,4,5");
    apply_setting(cfg, "fixed_beta", "2.5");
    CHECK(cfg.solver.tau == 0.5);
    CHECK(cfg.solver.alpha == 0.25);
    CHECK(cfg.solver.max_iter == 17);
    CHECK(cfg.sparse.regularizer == Regularizer::l_one);
    CHECK(cfg.solver.gamma_mode == GammaMode::fixed);
    CHECK(cfg.solver.gamma_fixed == 0.1);
    REQUIRE(cfg.doa.true_doas.size() == 4);
    CHECK(cfg.doa.true_doas[0] == doctest::Approx(-std::numbers::pi / 6));
    CHECK(cfg.doa.true_doas[1] == doctest::Approx(std::numbers::pi / 4));
    CHECK(cfg.doa.true_doas[2] == doctest::Approx(2 * std::numbers::pi / 9));
    CHECK(cfg.doa.true_doas[3] == 0.5);
    CHECK(std::isinf(cfg.doa.snr_db));
    REQUIRE(cfg.sweep_pairs.size() == 2);
    CHECK(cfg.sweep_pairs[1].first == 0.1);
    REQUIRE(cfg.compare_sizes.size() == 1);
    CHECK(cfg.compare_sizes[0].spikes == 3);
    CHECK(cfg.seed_list() == std::vector<std::uint64_t>{3, 4, 5});
    CHECK(effective_solver(cfg).beta0 == 2.5);
    CHECK_FALSE(effective_solver(cfg).adapt_beta);

    CHECK_THROWS_AS(apply_setting(cfg, "bogus", "1"), InvalidInput);
    CHECK_THROWS_AS(apply_setting(cfg, "tau", "abc"), InvalidInput);
    CHECK_THROWS_AS(apply_setting(cfg, "max_iter", "-3"), InvalidInput);
    CHECK_THROWS_AS(apply_setting(cfg, "regularizer", "l2"), InvalidInput);
    CHECK_THROWS_AS(apply_setting(cfg, "pairs", "0.1"), InvalidInput);
}

TEST_CASE("config file layering") {
    const fs::path dir = scratch_dir("config");
    const fs::path file = dir / "run.cfg";
    {
        std::ofstream os(file);
        os << "# comment\n\ntau = 0.4   # trailing\nepsilon=1e-6\n";
    }
    RunConfig cfg = default_config(Command::solve);
    load_config_file(cfg, file.string());
    CHECK(cfg.solver.tau == 0.4);
    CHECK(cfg.solver.epsilon == 1e-6);
    {
        std::ofstream os(file);
        os << "tau = 0.4\nnot a pair\n";
    }
    try {
        load_config_file(cfg, file.string());
        FAIL("expected an error");
    } catch (const InvalidInput& e) {
        CHECK(std::string(e.what()).find(":2:") != std::string::npos);
    }
    CHECK_THROWS_AS(load_config_file(cfg, (dir / "missing.cfg").string()), InvalidInput);
}

TEST_CASE("defaults per command") {
    const RunConfig audit = default_config(Command::audit);
    CHECK_FALSE(audit.solver.adapt_beta);
    CHECK(audit.solver.start == StartMode::dual_consistent);
    const RunConfig doa = default_config(Command::doa);
    CHECK(doa.doa.grid == 90);
    CHECK(doa.doa.true_doas.size() == 2);
    CHECK_NOTHROW(validate(default_config(Command::sweep)));
    CHECK_NOTHROW(validate(default_config(Command::compare)));
}

TEST_CASE("solve writes trace and summary") {
    const fs::path out = scratch_dir("solve");
    const RunConfig cfg = tiny_solve(out);
    std::ostringstream log, err;
    CHECK(cmd_solve(cfg, log, err) == 0);
    CHECK(err.str().empty());
    const auto kv = read_summary(out / "summary.txt");
    for (const char* key : {"it", "final_ire", "final_equ", "l2_error", "terminated_by"}) {
        REQUIRE(kv.count(key) == 1);
    }
    for (const char* key : {"final_ire", "final_equ", "l2_error"}) CHECK(std::isfinite(std::stod(kv.at(key))));
    const std::string trace = slurp(out / "trace.csv");
    CHECK(trace.rfind("k,beta,gamma,r_norm,s_norm,ire,L_beta,L_tilde,dx_G,dy,dlambda\n", 0) == 0);
    CHECK(count_lines(trace) == std::stoul(kv.at("it")) + 1);
    CHECK(fs::exists(out / "timing.txt"));
}

TEST_CASE("solve with a huge epsilon stops after one iteration") {
    const fs::path out = scratch_dir("eps");
    RunConfig cfg = tiny_solve(out);
    cfg.solver.epsilon = 1e30;
    std::ostringstream log, err;
    REQUIRE(cmd_solve(cfg, log, err) == 0);
    const auto kv = read_summary(out / "summary.txt");
    CHECK(kv.at("it") == "1");
    CHECK(kv.at("terminated_by") == "converged");
}

TEST_CASE("repeated runs give byte-identical traces") {
    const fs::path a = scratch_dir("det_a");
    const fs::path b = scratch_dir("det_b");
    std::ostringstream log, err;
    REQUIRE(cmd_solve(tiny_solve(a), log, err) == 0);
    REQUIRE(cmd_solve(tiny_solve(b), log, err) == 0);
    CHECK(slurp(a / "trace.csv") == slurp(b / "trace.csv"));
    CHECK(slurp(a / "summary.txt") == slurp(b / "summary.txt"));
}

TEST_CASE("unwritable output directory fails") {
    const fs::path dir = scratch_dir("unwritable");
    const fs::path blocker = dir / "plain_file";
    std::ofstream(blocker) << "x";
    RunConfig cfg = tiny_solve(blocker / "sub");
    std::ostringstream log, err;
    CHECK(cmd_solve(cfg, log, err) != 0);
    CHECK_FALSE(err.str().empty());
}

TEST_CASE("invalid solver parameters fail before solving") {
    RunConfig cfg = tiny_solve(scratch_dir("invalid"));
    cfg.solver.tau = 0.9;
    std::ostringstream log, err;
    CHECK(cmd_solve(cfg, log, err) == 1);
    CHECK(err.str().find("solve:") == 0);
}

TEST_CASE("sweep domain handling") {
    RunConfig cfg = default_config(Command::sweep);
    cfg.sparse.l = 24;
    cfg.sparse.m = 60;
    cfg.sparse.spikes = 4;
    cfg.solver.max_iter = 100;
    cfg.sweep_pairs = {{-0.3, 0.32}, {0.65, 0.32}, {0.7, 0.4}};
    auto rows = run_sweep(cfg);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].status == "skipped");
    CHECK(rows[1].status != "skipped");
    CHECK(rows[2].status == "skipped");

    cfg.allow_outside_domain = true;
    rows = run_sweep(cfg);
    CHECK(rows[0].status != "skipped");
    CHECK(rows[2].status == "skipped");

    cfg.sweep_pairs = {{0.3, 0.32}};
    CHECK(run_sweep(cfg).size() == 1);

    cfg.sweep_pairs.clear();
    CHECK_THROWS_AS(run_sweep(cfg), InvalidInput);
    std::ostringstream log, err;
    cfg.out_dir = scratch_dir("sweep_empty").string();
    CHECK(cmd_sweep(cfg, log, err) == 1);
}

TEST_CASE("sweep writes one csv row per pair") {
    RunConfig cfg = default_config(Command::sweep);
    cfg.sparse.l = 24;
    cfg.sparse.m = 60;
    cfg.sparse.spikes = 4;
    cfg.solver.max_iter = 50;
    const fs::path out = scratch_dir("sweep");
    cfg.out_dir = out.string();
    std::ostringstream log, err;
    REQUIRE(cmd_sweep(cfg, log, err) == 0);
    CHECK(count_lines(slurp(out / "sweep.csv")) == 1 + cfg.sweep_pairs.size());
}

TEST_CASE("compare runs both regularizers on identical data") {
    RunConfig cfg = default_config(Command::compare);
    cfg.compare_sizes = {{24, 60, 4}};
    cfg.seeds = {0, 1};
    cfg.solver.max_iter = 100;
    const auto rows = run_compare(cfg);
    REQUIRE(rows.size() == 2);
    for (const auto& r : rows) {
        CHECK(r.l_one.l2_error.has_value());
        CHECK(r.l_half.l2_error.has_value());
    }
    const fs::path out = scratch_dir("compare");
    cfg.out_dir = out.string();
    std::ostringstream log, err;
    REQUIRE(cmd_compare(cfg, log, err) == 0);
    CHECK(count_lines(slurp(out / "compare.csv")) == 3);
    CHECK(log.str().find("median") != std::string::npos);
}

TEST_CASE("doa writes an L-row spectrum") {
    RunConfig cfg = default_config(Command::doa);
    cfg.doa.sensors = 16;
    cfg.doa.grid = 45;
    cfg.solver.max_iter = 200;
    const fs::path out = scratch_dir("doa");
    cfg.out_dir = out.string();
    std::ostringstream log, err;
    REQUIRE(cmd_doa(cfg, log, err) == 0);
    CHECK(count_lines(slurp(out / "spectrum.csv")) == 1 + 45);
    CHECK(count_lines(slurp(out / "doa.csv")) == 2);
    CHECK(log.str().find("recovered") != std::string::npos);
}

TEST_CASE("audit writes its report") {
    RunConfig cfg = default_config(Command::audit);
    cfg.sparse.l = 32;
    cfg.sparse.m = 96;
    cfg.sparse.spikes = 4;
    cfg.solver.max_iter = 100;
    const fs::path out = scratch_dir("audit");
    cfg.out_dir = out.string();
    std::ostringstream log, err;
    REQUIRE(cmd_audit(cfg, log, err) == 0);
    const auto kv = read_summary(out / "audit.txt");
    CHECK(kv.at("penalty_ok") == "1");
    CHECK(kv.at("steps") == "100");
    CHECK(kv.at("descent_violations") == "0");
    CHECK(kv.count("rate_dlambda_violations_chained") == 1);
}

TEST_CASE("file instances round-trip through the CLI") {
    const fs::path dir = scratch_dir("file");
    SparseRecoverySpec spec;
    spec.l = 24;
    spec.m = 60;
    spec.spikes = 4;
    const SparseRecovery sr = gen_sparse_recovery(spec);
    {
        std::ofstream os(dir / "inst.txt");
        write_instance(os, sr.problem, sr.x_orig);
    }
    RunConfig from_file = tiny_solve(dir / "a");
    apply_setting(from_file, "instance_file", (dir / "inst.txt").string());
    RunConfig generated = tiny_solve(dir / "b");
    std::ostringstream log, err;
    REQUIRE(cmd_solve(from_file, log, err) == 0);
    REQUIRE(cmd_solve(generated, log, err) == 0);
    CHECK(slurp(dir / "a" / "trace.csv") == slurp(dir / "b" / "trace.csv"));
}
