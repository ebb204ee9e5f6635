#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "sddem/cli.hpp"
#include "sddem/errors.hpp"

using namespace sddem;
using namespace sddem::cli;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream is(path);
    REQUIRE(is.good());
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream os(path);
    os << text;
}

int run_binary(const std::string& args) {
    const std::string cmd = std::string(SDDEM_CLI_BIN) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    return WEXITSTATUS(rc);
}

} // namespace

TEST_CASE("parse_config: fail-fast validation") {
    Overrides ov;
    CHECK_THROWS_AS(parse_config("not json", ov), ConfigError);
    CHECK_THROWS_AS(parse_config("{}", ov), ConfigError); // no problem
    CHECK_THROWS_AS(parse_config(R"({"problem":"nope"})", ov), ConfigError);
    // 0.3 is not a fraction of tau = 1.
    CHECK_THROWS_AS(
        parse_config(R"({"problem":"example1","solver":{"step":0.3}})", ov),
        ConfigError);
    // horizon not a multiple of the step.
    CHECK_THROWS_AS(
        parse_config(
            R"({"problem":"example1","solver":{"step":0.125,"horizon":1.03}})", ov),
        ConfigError);
    // partial mode without split coefficients.
    CHECK_THROWS_AS(
        parse_config(R"({"problem":"example1","solver":{"mode":"partial"}})", ov),
        ConfigError);
    // steps not decreasing.
    CHECK_THROWS_AS(
        parse_config(
            R"({"problem":"example1","converge":{"steps":[1e-3,1e-2],"reference_step":1e-4}})",
            ov),
        ConfigError);
    // broken policy override.
    CHECK_THROWS_AS(
        parse_config(
            R"({"problem":"example1","policy":{"mu_coeff":10,"mu_power":2,"phi_coeff":10,"phi_power":0.25,"h_hat":3}})",
            ov),
        PolicyError);

    // A valid minimal config resolves with the example defaults.
    auto cfg = parse_config(R"({"problem":"example2"})", ov);
    CHECK(cfg.bundle.name == "example2");
    CHECK(cfg.mode == TruncationMode::partial);
    CHECK(cfg.solver.step == 1e-4);
    CHECK(cfg.n_paths == 2000);
    CHECK(cfg.delta_list.size() == 6);
    CHECK(cfg.window_lo == doctest::Approx(2.0));
    CHECK(cfg.window_hi == doctest::Approx(8.0));

    // Overrides win over file values.
    Overrides ov2;
    ov2.seed = 999;
    ov2.delta_list = std::vector<double>{1e-4};
    auto cfg2 = parse_config(R"({"problem":"example2","solver":{"seed":1}})", ov2);
    CHECK(cfg2.seed == 999);
    CHECK(cfg2.delta_list.size() == 1);
}

TEST_CASE("cmd_simulate: determinism and the zero problem") {
    std::ostringstream log;
    const std::string cfg_text = R"({
        "problem": "example2",
        "solver": {"step": 1e-3, "horizon": 0.5, "seed": 7, "record_stride": 1},
        "out": "/tmp/sddem_cli_sim1.csv"
    })";
    Overrides ov;
    auto cfg = parse_config(cfg_text, ov);
    CHECK(cmd_simulate(cfg, log) == kExitOk);
    cfg.out = "/tmp/sddem_cli_sim2.csv";
    CHECK(cmd_simulate(cfg, log) == kExitOk);
    CHECK(slurp("/tmp/sddem_cli_sim1.csv") == slurp("/tmp/sddem_cli_sim2.csv"));

    const std::string zero_cfg = R"({
        "problem": {"family": "affine",
                    "delay": {"type": "constant", "tau": 0.1},
                    "initial": {"constant": 2.5}},
        "solver": {"step": 0.05, "horizon": 0.5},
        "out": "/tmp/sddem_cli_zero.csv"
    })";
    auto zcfg = parse_config(zero_cfg, ov);
    CHECK(cmd_simulate(zcfg, log) == kExitOk);
    std::ifstream is("/tmp/sddem_cli_zero.csv");
    std::string line;
    std::getline(is, line);
    CHECK(line == "t,y_1");
    int rows = 0;
    while (std::getline(is, line)) {
        CHECK(line.substr(line.find(',') + 1) == "2.5");
        ++rows;
    }
    CHECK(rows == 13); // k = -2..10
    std::remove("/tmp/sddem_cli_sim1.csv");
    std::remove("/tmp/sddem_cli_sim2.csv");
    std::remove("/tmp/sddem_cli_zero.csv");
}

TEST_CASE("cmd_converge: linear ODE order and degenerate fit warning") {
    std::ostringstream log;
    const std::string cfg_text = R"({
        "problem": {"family": "affine", "a_x": -1.0,
                    "initial": {"constant": 1.0}},
        "solver": {"horizon": 1.0},
        "converge": {"steps": [1e-2, 1e-3], "reference_step": 1e-5, "n_paths": 1},
        "out": "/tmp/sddem_cli_conv.csv"
    })";
    Overrides ov;
    auto cfg = parse_config(cfg_text, ov);
    CHECK(cmd_converge(cfg, log) == kExitOk);
    const std::string csv = slurp("/tmp/sddem_cli_conv.csv");
    CHECK(csv.find("delta,rms_error") == 0);
    const auto pos = csv.find("order=");
    REQUIRE(pos != std::string::npos);
    const double order = std::strtod(csv.c_str() + pos + 6, nullptr);
    CHECK(order > 0.95);
    CHECK(order < 1.05);

    const std::string single = R"({
        "problem": {"family": "affine", "a_x": -1.0,
                    "initial": {"constant": 1.0}},
        "solver": {"horizon": 1.0},
        "converge": {"steps": [1e-2], "reference_step": 1e-4, "n_paths": 1},
        "out": "/tmp/sddem_cli_conv1.csv"
    })";
    std::ostringstream log2;
    auto cfg2 = parse_config(single, ov);
    CHECK(cmd_converge(cfg2, log2) == kExitOk);
    CHECK(log2.str().find("warning") != std::string::npos);
    std::remove("/tmp/sddem_cli_conv.csv");
    std::remove("/tmp/sddem_cli_conv1.csv");
}

TEST_CASE("cmd_stability_table: the paper's rate table to 1e-3") {
    std::ostringstream log;
    Overrides ov;
    auto cfg = parse_config(
        R"({"problem":"example2","out":"/tmp/sddem_cli_table.csv"})", ov);
    CHECK(cmd_stability_table(cfg, log) == kExitOk);
    const std::string csv = slurp("/tmp/sddem_cli_table.csv");
    CHECK(csv.find("# kappa_bar=2") != std::string::npos);

    // Parse rows: delta,epsilon,gamma_star_delta.
    const struct {
        double eps, gamma;
    } expect[] = {{0.3220, 0.6982}, {0.1014, 1.1728}, {0.0320, 1.3272},
                  {0.0101, 1.3764}, {0.0032, 1.3920}, {0.0010, 1.3970}};
    std::istringstream rows(csv);
    std::string line;
    int found = 0;
    while (std::getline(rows, line)) {
        if (line.empty() || line[0] == '#' || line[0] == 'd') continue;
        double d, e, g;
        REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf", &d, &e, &g) == 3);
        CHECK(std::abs(e - expect[found].eps) < 1e-3);
        CHECK(std::abs(g - expect[found].gamma) < 1e-3);
        ++found;
    }
    CHECK(found == 6);

    // gamma_star and delta_star header lines carry the paper values.
    CHECK(csv.find("# gamma_star=1.399249") != std::string::npos);
    CHECK(csv.find("# delta_star=0.000423079") != std::string::npos);
    std::remove("/tmp/sddem_cli_table.csv");

    // A step at/above delta_star is flagged infeasible in the output.
    std::ostringstream log2;
    Overrides ov2;
    ov2.delta_list = std::vector<double>{1.0};
    ov2.out = "/tmp/sddem_cli_table2.csv";
    auto cfg2 = parse_config(R"({"problem":"example2"})", ov2);
    CHECK(cmd_stability_table(cfg2, log2) == kExitOk);
    CHECK(slurp("/tmp/sddem_cli_table2.csv").find("infeasible") != std::string::npos);
    std::remove("/tmp/sddem_cli_table2.csv");

    // lambda1 below the margin: infeasible parameters, config-style failure.
    std::ostringstream log3;
    auto cfg3 = parse_config(
        R"({"problem":"example2","stability":{"lambda1":3.0}})", Overrides{});
    CHECK_THROWS_AS(cmd_stability_table(cfg3, log3), InfeasibleError);
}

TEST_CASE("cmd_check: certified constants pass, corrupted constants fail") {
    std::ostringstream log;
    Overrides ov;
    auto cfg = parse_config(R"({"problem":"example1"})", ov);
    CHECK(cmd_check(cfg, log) == kExitOk);
    CHECK(log.str().find("all checks passed") != std::string::npos);

    // Super-linear drift with no compensating K2: the raw certification
    // scan catches it (LHS ~ x^4 against a quadratic bound), exit 1.
    std::ostringstream log2;
    auto bad = parse_config(R"({
        "problem": {"family": "cubic", "s1": 1.0,
                    "delay": {"type": "constant", "tau": 0.5},
                    "initial": {"constant": 1.0}},
        "solver": {"step": 0.125, "horizon": 1.0},
        "check": {"k2": 0.0}
    })", ov);
    CHECK(cmd_check(bad, log2) == kExitViolation);
    CHECK(log2.str().find("khasminskii raw certification: FAIL") !=
          std::string::npos);

    // Overstated dissipation on the same drift also fails, now in the
    // preserved inequality as well.
    std::ostringstream log2b;
    auto bad2 = parse_config(R"({
        "problem": {"family": "cubic", "s1": 1.0,
                    "delay": {"type": "constant", "tau": 0.5},
                    "initial": {"constant": 1.0}},
        "solver": {"step": 0.125, "horizon": 1.0},
        "check": {"k1": 0.1, "k2": 1000.0}
    })", ov);
    CHECK(cmd_check(bad2, log2b) == kExitViolation);
    CHECK(log2b.str().find("khasminskii preservation: FAIL") != std::string::npos);

    // example2's certified constants pass end to end (split + stability).
    std::ostringstream log2c;
    auto e2 = parse_config(R"({"problem":"example2"})", ov);
    CHECK(cmd_check(e2, log2c) == kExitOk);
    CHECK(log2c.str().find("split consistency: ok") != std::string::npos);

    // K2 below kappa_bar * K3 is flagged.
    std::ostringstream log2d;
    auto badk3 = parse_config(
        R"({"problem":"example1","check":{"k3":8.0}})", ov);
    CHECK(cmd_check(badk3, log2d) == kExitViolation);
    CHECK(log2d.str().find("K2 >= kappa_bar * K3: FAIL") != std::string::npos);

    // Constant delay: multiplicity 1 reported.
    std::ostringstream log3;
    auto cdel = parse_config(R"({
        "problem": {"family": "affine", "a_x": -1.0,
                    "delay": {"type": "constant", "tau": 0.5},
                    "initial": {"constant": 1.0}},
        "solver": {"step": 0.125, "horizon": 1.0}
    })", ov);
    CHECK(cmd_check(cdel, log3) == kExitOk);
    CHECK(log3.str().find("max 1 <= bound 2") != std::string::npos);
}

TEST_CASE("run_command maps exceptions to exit codes") {
    std::ostringstream log;
    Overrides ov;
    CHECK(run_command("simulate", std::string("/nonexistent.json"), ov, log) ==
          kExitConfig);
    CHECK(run_command("bogus", std::nullopt, ov, log) == kExitConfig);

    spit("/tmp/sddem_cli_bad.json", R"({"problem":"example1","solver":{"step":0.3}})");
    std::ostringstream log2;
    CHECK(run_command("simulate", std::string("/tmp/sddem_cli_bad.json"), ov, log2) ==
          kExitConfig);
    CHECK(log2.str().find("fraction") != std::string::npos);
    std::remove("/tmp/sddem_cli_bad.json");

    // Overflow maps to its own exit code: a huge linear drift under a
    // deliberately wide policy blows up on the second step.
    spit("/tmp/sddem_cli_ovf.json", R"({
        "problem": {"family": "affine", "a_x": 1e250,
                    "initial": {"constant": 1.0}},
        "policy": {"mu_coeff": 1, "mu_power": 2, "phi_coeff": 1e150,
                   "phi_power": 0.25, "h_hat": 1e150},
        "solver": {"step": 1e-3, "horizon": 1.0},
        "out": "/tmp/sddem_cli_ovf.csv"
    })");
    std::ostringstream log3;
    CHECK(run_command("simulate", std::string("/tmp/sddem_cli_ovf.json"), ov, log3) ==
          kExitOverflow);
    std::remove("/tmp/sddem_cli_ovf.json");
    std::remove("/tmp/sddem_cli_ovf.csv");
}

TEST_CASE("binary: end-to-end subcommands and exit codes") {
    spit("/tmp/sddem_bin_sim.json", R"({
        "problem": "example2",
        "solver": {"step": 1e-3, "horizon": 0.2, "seed": 3},
        "out": "/tmp/sddem_bin_sim.csv"
    })");
    CHECK(run_binary("simulate --config /tmp/sddem_bin_sim.json") == 0);
    const std::string first = slurp("/tmp/sddem_bin_sim.csv");
    CHECK(run_binary("simulate --config /tmp/sddem_bin_sim.json") == 0);
    CHECK(first == slurp("/tmp/sddem_bin_sim.csv")); // byte-identical rerun
    CHECK(run_binary("simulate --config /tmp/sddem_bin_sim.json --seed 4") == 0);
    CHECK(first != slurp("/tmp/sddem_bin_sim.csv")); // seed actually used

    CHECK(run_binary("stability-table --problem example2 "
                     "--out /tmp/sddem_bin_table.csv") == 0);
    CHECK(run_binary("check --problem example1") == 0);
    CHECK(run_binary("simulate") == 2);        // no problem anywhere
    CHECK(run_binary("simulate --config /nonexistent.json") == 2);
    std::remove("/tmp/sddem_bin_sim.json");
    std::remove("/tmp/sddem_bin_sim.csv");
    std::remove("/tmp/sddem_bin_table.csv");
}
