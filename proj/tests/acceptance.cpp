// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.  Heavier than the unit tests; expect a few minutes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sddem/analysis.hpp"
#include "sddem/builtin.hpp"
#include "sddem/cli.hpp"

using namespace sddem;

namespace {

int g_failures = 0;

void report(const std::string& name, bool ok, const std::string& detail) {
    std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

// --- criterion 1: the rate table through the CLI command ------------------

void criterion_table() {
    const auto t0 = std::chrono::steady_clock::now();
    cli::Overrides ov;
    ov.out = "/tmp/sddem_acceptance_table.csv";
    std::ostringstream log;
    int rc = 2;
    try {
        auto cfg = cli::parse_config(R"({"problem":"example2"})", ov);
        rc = cli::cmd_stability_table(cfg, log);
    } catch (const std::exception& e) {
        report("table-reproduction", false, std::string("exception: ") + e.what());
        return;
    }
    const double secs = elapsed_s(t0);

    const struct {
        double eps, gamma;
    } expect[] = {{0.3220, 0.6982}, {0.1014, 1.1728}, {0.0320, 1.3272},
                  {0.0101, 1.3764}, {0.0032, 1.3920}, {0.0010, 1.3970}};
    std::ifstream is("/tmp/sddem_acceptance_table.csv");
    std::string line;
    int found = 0;
    double worst = 0.0;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#' || line[0] == 'd') continue;
        double d, e, g;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &d, &e, &g) != 3) continue;
        if (found < 6) {
            worst = std::max({worst, std::abs(e - expect[found].eps),
                              std::abs(g - expect[found].gamma)});
        }
        ++found;
    }
    std::remove("/tmp/sddem_acceptance_table.csv");
    const bool ok = rc == 0 && found == 6 && worst <= 1e-3 && secs < 1.0;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "6 rows, worst |err| = %.2e (tol 1e-3), %.3f s (limit 1 s)",
                  worst, secs);
    report("table-reproduction", ok, buf);
}

// --- criterion 2: gamma_star and delta_star --------------------------------

void criterion_rates() {
    auto b = make_example2();
    bool ok = true;
    std::string detail;
    try {
        const double gs = solve_gamma_star(*b.stability, 2, 0.1).gamma;
        const auto ds = solve_delta_star(*b.stability, b.policy, 2);
        ok = std::abs(gs - 1.3992) <= 1e-3 &&
             std::abs(ds.delta_star - 4.2308e-4) <= 1e-6 && !ds.saturated;
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "gamma_star = %.6f (want 1.3992 +- 1e-3), delta_star = "
                      "%.6e (want 4.2308e-4 +- 1e-6)",
                      gs, ds.delta_star);
        detail = buf;
    } catch (const std::exception& e) {
        ok = false;
        detail = std::string("exception: ") + e.what();
    }
    report("gamma-and-delta-star", ok, detail);
}

// --- criterion 3: strong convergence order on the nonlinear example --------

void criterion_convergence() {
    const auto t0 = std::chrono::steady_clock::now();
    auto b = make_example1();
    std::vector<double> steps;
    for (int k = 7; k <= 11; ++k) steps.push_back(std::pow(2.0, -k));
    try {
        const auto rep = strong_error(b.problem, b.policy, steps,
                                      std::pow(2.0, -14), 10.0, 500, 20240817);
        bool decreasing = true;
        for (size_t i = 1; i < rep.rms_errors.size(); ++i)
            if (!(rep.rms_errors[i] < rep.rms_errors[i - 1])) decreasing = false;
        long excluded = 0;
        for (long e : rep.excluded) excluded += e;
        const bool ok = rep.fitted_order >= 0.40 && rep.fitted_order <= 0.65 &&
                        decreasing && excluded == 0;
        char buf[240];
        std::snprintf(buf, sizeof(buf),
                      "order = %.4f (want [0.40, 0.65]), errors %s, %ld paths "
                      "excluded, %.0f s",
                      rep.fitted_order,
                      decreasing ? "strictly decreasing" : "NOT monotone",
                      excluded, elapsed_s(t0));
        report("convergence-order", ok, buf);
        for (size_t i = 0; i < steps.size(); ++i)
            std::printf("  delta = 2^-%d  rms = %.6e\n", 7 + int(i),
                        rep.rms_errors[i]);
    } catch (const std::exception& e) {
        report("convergence-order", false, std::string("exception: ") + e.what());
    }
}

// --- criterion 4: deterministic oracle for the error harness ---------------

void criterion_deterministic_oracle() {
    auto lin = make_affine(-1, 0, 0, 0, 0, 0, DelayFunction::none(),
                           InitialPath::constant({1.0}));
    try {
        const auto rep =
            strong_error(lin.problem, lin.policy, {1e-2, 1e-3}, 1e-6, 1.0, 1, 1);
        // Independent flat-loop Euler oracle, written update-style so its
        // rounding sequence matches a y + f*h recursion exactly.
        auto euler_end = [](double h) {
            double y = 1.0;
            for (long i = 0, n = std::lround(1.0 / h); i < n; ++i) y += -y * h;
            return y;
        };
        const double ref = euler_end(1e-6);
        const double e1 = std::abs(euler_end(1e-2) - ref);
        const double e2 = std::abs(euler_end(1e-3) - ref);
        const bool harness_exact =
            std::abs(rep.rms_errors[0] - e1) <= 1e-12 * e1 &&
            std::abs(rep.rms_errors[1] - e2) <= 1e-12 * e2;
        const bool ok =
            std::abs(rep.fitted_order - 1.0) <= 0.02 && harness_exact;
        char buf[200];
        std::snprintf(buf, sizeof(buf),
                      "order = %.4f (want 1.00 +- 0.02), harness errors match "
                      "closed form to 1e-12: %s",
                      rep.fitted_order, harness_exact ? "yes" : "NO");
        report("deterministic-oracle", ok, buf);
    } catch (const std::exception& e) {
        report("deterministic-oracle", false, std::string("exception: ") + e.what());
    }
}

// --- criterion 5: mean-square stability of the partial scheme --------------

void criterion_stability() {
    const auto t0 = std::chrono::steady_clock::now();
    auto b = make_example2();
    try {
        SolverConfig cfg10{1e-4, 10.0, 10};
        SolverConfig cfg20{1e-4, 20.0, 10};
        const auto m10 = run_ensemble(*b.split, b.policy, cfg10, 2000, 7);
        const auto m20 = run_ensemble(*b.split, b.policy, cfg20, 2000, 7);
        const double slope = fit_decay_rate(m10, 2.0, 8.0);
        const double ratio = m10.mean_sq.back() / m10.mean_sq.front();
        const double s10 = h_infinity_partial_sum(m10);
        const double s20 = h_infinity_partial_sum(m20);
        const double tail_change = std::abs(s20 - s10) / s10;
        const bool ok = slope <= -0.5 && ratio <= 1e-2 && tail_change < 0.01 &&
                        m10.n_failed == 0 && m20.n_failed == 0;
        char buf[240];
        std::snprintf(buf, sizeof(buf),
                      "decay slope = %.3f (want <= -0.5), mean_sq(10)/mean_sq(0) "
                      "= %.2e (want <= 1e-2), partial-sum change = %.3e%% "
                      "(want < 1%%), %.0f s",
                      slope, ratio, 100.0 * tail_change, elapsed_s(t0));
        report("partial-truncation-stability", ok, buf);
    } catch (const std::exception& e) {
        report("partial-truncation-stability", false,
               std::string("exception: ") + e.what());
    }
}

// --- criterion 6: property suites -------------------------------------------

void criterion_properties() {
    const auto t0 = std::chrono::steady_clock::now();
    std::string fail;

    // Truncation contraction/idempotence/non-expansiveness, 1e4 pairs.
    {
        std::mt19937_64 rng(1234);
        std::uniform_real_distribution<double> u(-1e6, 1e6);
        std::uniform_real_distribution<double> ur(0.5, 100.0);
        for (int i = 0; i < 10000; ++i) {
            Vec x{u(rng), u(rng)};
            Vec y{u(rng), u(rng)};
            const double r = ur(rng);
            const Vec px = truncate_point(x, r);
            const Vec py = truncate_point(y, r);
            if (norm2(px) > std::min(norm2(x), r) * (1 + 1e-14))
                fail = "contraction";
            const Vec ppx = truncate_point(px, r);
            if (ppx != px) fail = "idempotence";
            Vec d1{x[0] - y[0], x[1] - y[1]};
            Vec d2{px[0] - py[0], px[1] - py[1]};
            if (norm2(d2) > norm2(d1) + 1e-12) fail = "non-expansiveness";
        }
    }

    // Linear growth for both examples, 1e4 samples each.
    if (fail.empty()) {
        auto b1 = make_example1();
        auto b2 = make_example2();
        std::mt19937_64 rng(77);
        std::uniform_real_distribution<double> u(-1e6, 1e6);
        const double step = 1.0 / 128;
        const double ph1 = b1.policy.phi(step);
        const double ph2 = b2.policy.phi(step);
        for (int i = 0; i < 10000 && fail.empty(); ++i) {
            const Vec x{u(rng)}, y{u(rng)};
            const double bound = 1.0 + std::abs(x[0]) + std::abs(y[0]);
            if (std::abs(truncated_drift(b1.problem, b1.policy, step, x, y)[0]) >
                    ph1 * bound * (1 + 1e-12) ||
                frobenius(truncated_diffusion(b1.problem, b1.policy, step, x, y)) >
                    ph1 * bound * (1 + 1e-12))
                fail = "linear-growth-example1";
            if (std::abs(truncated_drift(b2.problem, b2.policy, step, x, y)[0]) >
                    ph2 * bound * (1 + 1e-12) ||
                frobenius(truncated_diffusion(b2.problem, b2.policy, step, x, y)) >
                    ph2 * bound * (1 + 1e-12))
                fail = "linear-growth-example2";
        }
    }

    // Khasminskii preservation for example1 with certified constants.
    if (fail.empty()) {
        auto b1 = make_example1();
        const auto grid = scalar_sample_grid(50.0, 200);
        if (!check_khasminskii_raw(b1.problem, b1.khasminskii, grid).ok)
            fail = "khasminskii-raw-certification";
        for (double step : {1.0, 1.0 / 128, 1e-4})
            if (!check_khasminskii_preservation(b1.problem, b1.policy, step,
                                                b1.khasminskii, grid)
                     .ok)
                fail = "khasminskii-preservation";
    }

    // Multiplicity bound over k <= 1e5 for both example delays.
    if (fail.empty()) {
        auto r1 = check_multiplicity_bound(DelayFunction::sinusoid(0.5, 0.5, 1.0),
                                           std::pow(2.0, -7), 100000);
        auto r2 = check_multiplicity_bound(
            DelayFunction::sinusoid(0.05, 0.05, 0.1), 1e-3, 100000);
        if (r1.max_multiplicity > r1.bound || r2.max_multiplicity > r2.bound)
            fail = "multiplicity-bound";
    }

    // gamma_star_delta climbs monotonically to gamma_star as the step drops.
    if (fail.empty()) {
        auto b2 = make_example2();
        const double gs = solve_gamma_star(*b2.stability, 2, 0.1).gamma;
        double prev = 0.0;
        for (double step : {1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9, 1e-10, 1e-11}) {
            const double eps = epsilon_delta(*b2.stability, b2.policy, step);
            const double g =
                solve_gamma_star_delta(*b2.stability, 2, 0.1, step, eps).gamma;
            if (!(g > prev) || !(g < gs)) fail = "gamma-delta-monotone";
            prev = g;
        }
        if (gs - prev > 1e-3) fail = "gamma-delta-limit";
    }

    const double secs = elapsed_s(t0);
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%s%s(%.1f s, limit 10 s)",
                  fail.empty() ? "all properties hold " : ("violated: " + fail + " ").c_str(),
                  "", secs);
    report("property-suites", fail.empty() && secs < 10.0, buf);
}

} // namespace

int main() {
    std::printf("acceptance suite (workers = hardware)\n");
    criterion_table();
    criterion_rates();
    criterion_deterministic_oracle();
    criterion_properties();
    criterion_convergence();
    criterion_stability();
    if (g_failures == 0)
        std::printf("acceptance: all criteria passed\n");
    else
        std::printf("acceptance: %d criterion(s) FAILED\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
