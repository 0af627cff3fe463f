// Acceptance gate for the release: every criterion is exercised end to end
// and reported as a single PASS/FAIL line. Exit code = number of failures.
//
// Usage: ackpace_acceptance <ackpace binary> <scenarios dir> <scratch dir>

#include "ackhold/netsim.hpp"
#include "ackhold/pacing_scheduler.hpp"
#include "ackhold/rtt_estimator.hpp"
#include "ackhold/scenario.hpp"

#include "schedule_replay.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace fs = std::filesystem;
using namespace ackhold;

namespace {

std::string g_cli, g_scenarios, g_scratch;
int g_failures = 0;

void report(int idx, const char* name, bool pass, const std::string& detail) {
    std::printf("%s  %d. %s%s%s\n", pass ? "PASS" : "FAIL", idx, name,
                detail.empty() ? "" : ": ", detail.c_str());
    if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

bool rel_close(double a, double b, double tol) {
    return std::fabs(a - b) <= tol * std::max({std::fabs(a), std::fabs(b), 1.0});
}

struct CliResult {
    int exit_code = -1;
    std::string out;
};

CliResult run_cli(const std::string& args) {
    std::string cmd = g_cli + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    CliResult r;
    if (!pipe) return r;
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, got);
    int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// --- criterion 1: closed forms against the iterative estimator ------------

void criterion_closed_forms() {
    auto t0 = std::chrono::steady_clock::now();
    const double mu0s[] = {0.01, 0.1, 1.0, 5.0, 10.0};
    const double sigma0s[] = {0.0, 0.1, 1.0, 2.5, 5.0};
    const double thetas[] = {0.05, 1.0, 10.0, 40.0};
    const double tol = 1e-9;

    bool pass = true;
    std::string detail;
    for (double mu0 : mu0s) {
        for (double sigma0 : sigma0s) {
            RttEstimate est{mu0, sigma0};
            for (int n = 0; n <= 50; ++n) {
                PhaseOneResult cf = phase1_closed_form(n, mu0, sigma0);
                if (!rel_close(cf.mu_n, est.mu, tol) ||
                    !rel_close(cf.sigma_n, est.sigma, tol) ||
                    !rel_close(cf.rto_n, est.rto(), tol)) {
                    pass = false;
                }
                if (n < 50) est = update(est, est.rto());
            }
            for (double theta : thetas) {
                RttEstimate dec{mu0, sigma0};
                for (int k = 0; k <= 200; ++k) {
                    PhaseTwoResult cf =
                        phase2_closed_form(k, theta, mu0, sigma0);
                    if (!rel_close(cf.mu_N, dec.mu, tol) ||
                        !rel_close(cf.sigma_N, dec.sigma, tol) ||
                        !rel_close(cf.rto_N, dec.rto(), tol)) {
                        pass = false;
                    }
                    if (k < 200) dec = update(dec, theta);
                }
            }
        }
    }
    double elapsed = seconds_since(t0);
    if (elapsed >= 1.0) pass = false;
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "100-point grid, n<=50, k<=200, rel 1e-9, %.3f s", elapsed);
    report(1, "closed forms match the iterative estimator", pass, buf);
}

// --- criterion 2: coefficient spot checks ---------------------------------

void criterion_coefficients() {
    bool pass = true;

    RttEstimate est{1.0, 0.3};
    double s2 = 0.0;
    for (int i = 0; i < 2; ++i) {
        double gap = est.rto();
        s2 += gap;
        est = update(est, gap);
    }
    if (!rel_close(est.rto(), 5.0875, 1e-12)) pass = false;
    if (!rel_close(est.rto(), 1.0 + (109.0 / 8.0) * 0.3, 1e-12)) pass = false;
    if (!rel_close(s2, 5.45, 1e-12)) pass = false;

    // sigma_n doubles by 7/4 each inflation step, any starting point.
    for (double sigma0 : {0.3, 1.0, 2.0}) {
        RttEstimate e{1.0, sigma0};
        double expect = sigma0;
        for (int n = 1; n <= 20; ++n) {
            e = update(e, e.rto());
            expect *= 1.75;
            if (!rel_close(e.sigma, expect, 1e-12)) pass = false;
        }
    }
    report(2, "coefficient spot checks (RTO2, S(2), sigma growth)", pass,
           "RTO2 = mu0 + (109/8) sigma0 at 1e-12");
}

// --- criteria 3 and 4: optimizer and schedule constraints -----------------

// Feasible-split scan using nothing but the iterative estimator.
struct IndependentCurve {
    std::vector<int> feasible_n;
    std::vector<double> final_rto;
    int argmin_n = -1;
};

IndependentCurve scan_curve(const SchedulerInput& in) {
    IndependentCurve c;
    for (int n = 0; n < in.total_acks_N; ++n) {
        RttEstimate est{in.mu0, in.sigma0};
        double spent = 0.0;
        for (int i = 0; i < n; ++i) {
            double gap = est.rto();
            spent += gap;
            est = update(est, gap);
        }
        if (spent > in.outage_T) break;
        double theta = (in.outage_T - spent) / (in.total_acks_N - n);
        for (int k = 0; k < in.total_acks_N - n; ++k) est = update(est, theta);
        c.feasible_n.push_back(n);
        c.final_rto.push_back(est.rto());
        if (c.argmin_n < 0 || est.rto() < c.final_rto[c.argmin_n]) {
            // strict <: ties keep the smallest n
            c.argmin_n = static_cast<int>(c.final_rto.size()) - 1;
        }
    }
    if (c.argmin_n >= 0) c.argmin_n = c.feasible_n[c.argmin_n];
    return c;
}

std::vector<SchedulerInput> random_instances(int count) {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> T(1.0, 2000.0);
    std::uniform_int_distribution<int> N(1, 64);
    std::uniform_real_distribution<double> mu(0.01, 10.0);
    std::uniform_real_distribution<double> sigma(0.0, 5.0);
    std::vector<SchedulerInput> v(count);
    for (SchedulerInput& in : v) {
        in.outage_T = T(rng);
        in.total_acks_N = N(rng);
        in.mu0 = mu(rng);
        in.sigma0 = sigma(rng);
    }
    return v;
}

void criterion_optimizer(const std::vector<SchedulerInput>& instances) {
    auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    int mismatches = 0;
    for (const SchedulerInput& in : instances) {
        IndependentCurve c = scan_curve(in);
        if (c.argmin_n < 0) continue; // no feasible split exists
        if (optimal_split(in) != c.argmin_n) ++mismatches;
    }
    if (mismatches > 0) pass = false;

    // Reference curve: feasible splits are exactly 0..11 with one interior
    // local minimum.
    SchedulerInput ref;
    ref.outage_T = 1000.0;
    ref.total_acks_N = 30;
    ref.mu0 = 1.0;
    ref.sigma0 = 0.3;
    IndependentCurve c = scan_curve(ref);
    if (c.feasible_n.size() != 12 || c.feasible_n.front() != 0 ||
        c.feasible_n.back() != 11)
        pass = false;
    int interior_minima = 0;
    for (std::size_t i = 1; i + 1 < c.final_rto.size(); ++i) {
        if (c.final_rto[i] < c.final_rto[i - 1] &&
            c.final_rto[i] < c.final_rto[i + 1])
            ++interior_minima;
    }
    if (interior_minima != 1) pass = false;
    if (c.argmin_n != 9 || optimal_split(ref) != 9) pass = false;

    double elapsed = seconds_since(t0);
    if (elapsed >= 5.0) pass = false;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "%d/%zu argmin mismatches, reference curve argmin n=9, "
                  "%d interior local min, %.3f s",
                  mismatches, instances.size(), interior_minima, elapsed);
    report(3, "optimizer equals the independent exhaustive argmin", pass, buf);
}

void criterion_schedule_constraints(
    const std::vector<SchedulerInput>& instances) {
    bool pass = true;
    int bad = 0;
    for (const SchedulerInput& in : instances) {
        PacingSchedule s = build_schedule(in);
        replaycheck::Result r = replaycheck::validate(s, in);
        if (!r.ok()) {
            ++bad;
            pass = false;
        }
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf),
                  "%d/%zu schedules violated replayed constraints", bad,
                  instances.size());
    report(4, "schedules keep every gap, coverage, and duplicate promise",
           pass, buf);
}

// --- criterion 5: fade experiments ----------------------------------------

void criterion_experiments() {
    bool pass = true;
    std::string detail;

    Scenario single =
        parse_scenario_file((fs::path(g_scenarios) / "single_fade.ini").string());
    auto t0 = std::chrono::steady_clock::now();
    RunReport rs = run_pair(single);
    double t_single = seconds_since(t0);

    if (!(rs.improvement_ratio >= 1.1)) pass = false;
    if (rs.holding.timeout_count != 0) pass = false;
    if (rs.holding.held_phase_timeout_count != 0) pass = false;
    if (!(rs.holding.min_cwnd_during_fades > 1.0)) pass = false;
    if (rs.baseline.timeout_count < 1) pass = false;
    if (t_single >= 10.0) pass = false;

    Scenario dbl =
        parse_scenario_file((fs::path(g_scenarios) / "double_fade.ini").string());
    t0 = std::chrono::steady_clock::now();
    RunReport rd = run_pair(dbl);
    double t_double = seconds_since(t0);

    if (!(rd.improvement_ratio > rs.improvement_ratio)) pass = false;
    if (!(rd.improvement_ratio >= 2.0)) pass = false;
    if (t_double >= 10.0) pass = false;

    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "single ratio %.4f (%.2f s), double ratio %.4f (%.2f s), "
                  "holding timeouts %lld",
                  rs.improvement_ratio, t_single, rd.improvement_ratio,
                  t_double, static_cast<long long>(rs.holding.timeout_count +
                                                   rd.holding.timeout_count));
    report(5, "fade experiments: holding rides out what stalls the baseline",
           pass, buf);
}

// --- criterion 6: schedule shape through the CLI --------------------------

struct ScheduleCsv {
    int split_n = -1;
    double theta = 0.0;
    std::vector<double> gaps;
    std::vector<double> predicted;
};

std::optional<ScheduleCsv> parse_schedule_csv(const std::string& text) {
    ScheduleCsv out;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.rfind("# split_n = ", 0) == 0) {
            std::sscanf(line.c_str(), "# split_n = %d, theta = %lf",
                        &out.split_n, &out.theta);
            continue;
        }
        if (line.empty() || line[0] == '#' || line[0] == 'i') continue;
        int index = 0;
        double offset = 0.0, gap = 0.0, rto = 0.0;
        if (std::sscanf(line.c_str(), "%d,%lf,%lf,%lf", &index, &offset, &gap,
                        &rto) != 4)
            return std::nullopt;
        out.gaps.push_back(gap);
        out.predicted.push_back(rto);
    }
    if (out.split_n < 0 || out.gaps.empty()) return std::nullopt;
    return out;
}

bool shape_ok(const ScheduleCsv& s, std::string& why) {
    const int n = s.split_n;
    if (static_cast<int>(s.gaps.size()) <= n) {
        why = "no uniform phase";
        return false;
    }
    for (int i = 1; i < n; ++i) {
        if (!(s.gaps[i] > s.gaps[i - 1])) {
            why = "inflation gaps not strictly increasing";
            return false;
        }
    }
    for (std::size_t i = n; i < s.gaps.size(); ++i) {
        if (!rel_close(s.gaps[i], s.theta, 1e-6)) {
            why = "uniform phase gap drifts from theta";
            return false;
        }
    }
    for (int i = 1; i < n; ++i) {
        if (!(s.predicted[i] > s.predicted[i - 1])) {
            why = "predicted timeout not rising over inflation";
            return false;
        }
    }
    double peak = s.predicted[n - 1];
    for (std::size_t i = n; i < s.predicted.size(); ++i) {
        if (!(s.predicted[i] < s.predicted[i - 1])) {
            why = "predicted timeout not falling after the peak";
            return false;
        }
    }
    double last = s.predicted.back();
    double prev = s.predicted[s.predicted.size() - 2];
    if (!(last < 0.5 * peak)) {
        why = "final timeout not well below the peak";
        return false;
    }
    if (!(prev - last <= 0.05 * (peak - last))) {
        why = "tail not stabilized";
        return false;
    }
    return true;
}

void criterion_schedule_shapes() {
    bool pass = true;
    std::string detail;
    for (const char* args :
         {"schedule --T 500 --N 20", "schedule --T 250 --N 20"}) {
        CliResult r = run_cli(args);
        if (r.exit_code != 0) {
            pass = false;
            detail = "CLI failed";
            continue;
        }
        std::optional<ScheduleCsv> csv = parse_schedule_csv(r.out);
        if (!csv) {
            pass = false;
            detail = "unparseable CSV";
            continue;
        }
        std::string why;
        if (!shape_ok(*csv, why)) {
            pass = false;
            detail = std::string(args) + ": " + why;
        }
    }
    if (detail.empty())
        detail = "gaps rise then hold; predicted timeout rises, falls, "
                 "stabilizes";
    report(6, "timetable shapes for T=500 and T=250", pass, detail);
}

// --- criterion 7: prediction robustness -----------------------------------

void criterion_robustness() {
    bool pass = true;
    Scenario base =
        parse_scenario_file((fs::path(g_scenarios) / "single_fade.ini").string());

    RunReport exact = run_pair(base);
    double reference = exact.holding.throughput;

    double worst_dev = 0.0;
    for (double f : {1.25, 1.5}) {
        Scenario s = base;
        s.prediction_error_factor = f;
        RunReport r = run_pair(s);
        double dev = std::fabs(r.holding.throughput - reference) / reference;
        worst_dev = std::max(worst_dev, dev);
        if (dev > 0.10) pass = false;
    }

    Scenario under = base;
    under.prediction_error_factor = 0.5;
    RunReport ru = run_pair(under);
    if (!(ru.holding.throughput >= ru.baseline.throughput)) pass = false;

    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "over-estimates within %.1f%%, factor 0.5 ratio %.4f",
                  worst_dev * 100.0, ru.improvement_ratio);
    report(7, "over-estimated outages cost <= 10%, under-estimate never loses",
           pass, buf);
}

// --- criterion 8: byte-identical reruns -----------------------------------

void criterion_determinism() {
    fs::path a = fs::path(g_scratch) / "determinism_a";
    fs::path b = fs::path(g_scratch) / "determinism_b";
    fs::remove_all(a);
    fs::remove_all(b);

    std::string base = "run --scenario " +
                       (fs::path(g_scenarios) / "single_fade.ini").string() +
                       " --seed 1 --out ";
    bool pass = run_cli(base + a.string()).exit_code == 0 &&
                run_cli(base + b.string()).exit_code == 0;
    int identical = 0;
    if (pass) {
        for (const char* name :
             {"report.csv", "cwnd_baseline.csv", "cwnd_holding.csv",
              "holder_trace.csv"}) {
            std::string fa = slurp(a / name), fb = slurp(b / name);
            if (!fa.empty() && fa == fb)
                ++identical;
            else
                pass = false;
        }
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%d/4 output files byte-identical",
                  identical);
    report(8, "repeated runs are byte-identical", pass, buf);
}

} // namespace

int main(int argc, char** argv) {
    if (argc != 4) {
        std::fprintf(stderr,
                     "usage: %s <ackpace binary> <scenarios dir> <scratch "
                     "dir>\n",
                     argv[0]);
        return 99;
    }
    g_cli = argv[1];
    g_scenarios = argv[2];
    g_scratch = argv[3];
    fs::create_directories(g_scratch);

    criterion_closed_forms();
    criterion_coefficients();
    std::vector<SchedulerInput> instances = random_instances(500);
    criterion_optimizer(instances);
    criterion_schedule_constraints(instances);
    criterion_experiments();
    criterion_schedule_shapes();
    criterion_robustness();
    criterion_determinism();

    std::printf("%d of 8 criteria passed\n", 8 - g_failures);
    return g_failures;
}
