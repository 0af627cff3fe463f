#include "ackhold/netsim.hpp"
#include "ackhold/pacing_scheduler.hpp"
#include "ackhold/scenario.hpp"
#include "ackhold/traces.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace ackhold;

namespace {

// Anything the caller can fix: bad flags, bad files, bad values. Exit 1.
// Everything else that throws is an internal failure. Exit 2.
class input_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

void write_file(const fs::path& dir, const std::string& name,
                const std::string& content) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    fs::path full = dir / name;
    std::ofstream out(full, std::ios::binary);
    if (!out) throw input_error("cannot open output file: " + full.string());
    out << content;
    if (!out) throw input_error("cannot write output file: " + full.string());
}

// Emits to <out dir>/<name> when a directory was given, stdout otherwise.
void emit(const std::optional<std::string>& out_dir, const std::string& name,
          const std::string& content) {
    if (out_dir)
        write_file(*out_dir, name, content);
    else
        std::cout << content;
}

std::vector<double> parse_values(const std::string& csv) {
    std::vector<double> values;
    if (csv.empty()) return values;
    std::istringstream in(csv);
    std::string field;
    while (std::getline(in, field, ',')) {
        try {
            std::size_t used = 0;
            double v = std::stod(field, &used);
            if (used != field.size())
                throw input_error("bad value in --values: `" + field + "`");
            values.push_back(v);
        } catch (const input_error&) {
            throw;
        } catch (const std::exception&) {
            throw input_error("bad value in --values: `" + field + "`");
        }
    }
    return values;
}

Scenario load_scenario(const std::string& path, std::optional<int> seed) {
    Scenario sc;
    try {
        sc = parse_scenario_file(path);
    } catch (const scenario_parse_error& e) {
        throw input_error(path + ": " + e.what());
    } catch (const std::runtime_error& e) {
        throw input_error(e.what());
    }
    if (seed) sc.rng_seed = *seed;
    return sc;
}

RunReport run_checked(const Scenario& sc) {
    try {
        return run_pair(sc);
    } catch (const std::invalid_argument& e) {
        throw input_error(e.what());
    }
}

struct ScheduleArgs {
    double T = 0.0;
    int N = 0;
    double mu0 = 1.0;
    double sigma0 = 2.0;
    double R = 0.0;
    double r = 0.0;
    int max_dups = 2;
    double guard = 0.1;
    std::optional<std::string> out_dir;
};

SchedulerInput to_input(const ScheduleArgs& a) {
    if (a.T <= 0.0) throw input_error("--T must be positive");
    if (a.N < 1) throw input_error("--N must be at least 1");
    if (a.mu0 < 0.0 || a.sigma0 < 0.0)
        throw input_error("--mu0 and --sigma0 must be nonnegative");
    if (a.guard < 0.0 || a.guard >= 1.0)
        throw input_error("--guard must lie in [0, 1)");
    if (a.max_dups < 0) throw input_error("--max-dups must be nonnegative");
    SchedulerInput in;
    in.total_acks_N = a.N;
    in.outage_T = a.T;
    in.mu0 = a.mu0;
    in.sigma0 = a.sigma0;
    in.rtt_fixed_R = a.R;
    in.rtt_mobile_r = a.r;
    in.max_duplicates_per_ack = a.max_dups;
    in.guard_fraction = a.guard;
    return in;
}

void cmd_schedule(const ScheduleArgs& a) {
    PacingSchedule sched = build_schedule(to_input(a));
    std::ostringstream out;
    write_schedule_csv(out, sched);
    emit(a.out_dir, "schedule.csv", out.str());
}

void cmd_rto_curve(const ScheduleArgs& a) {
    SchedulerInput in = to_input(a);
    std::vector<RtoCurvePoint> points;
    for (int n = 0; n < in.total_acks_N; ++n) {
        try {
            points.push_back({n, final_rto(n, in)});
        } catch (const infeasible_split&) {
            break; // S(n) grows with n, nothing past here is feasible
        }
    }
    std::ostringstream out;
    write_rto_curve_csv(out, points, optimal_split(in));
    emit(a.out_dir, "rto_curve.csv", out.str());
}

void cmd_run(const std::string& scenario_path, const std::string& out_dir,
             std::optional<int> seed) {
    Scenario sc = load_scenario(scenario_path, seed);
    RunReport rep = run_checked(sc);

    std::ostringstream report, cwnd_base, cwnd_hold, holder;
    write_report_csv(report, rep);
    write_cwnd_trace_csv(cwnd_base, rep.baseline.cwnd_trace);
    write_cwnd_trace_csv(cwnd_hold, rep.holding.cwnd_trace);
    write_holder_trace_csv(holder, rep.holding.holder_trace);

    fs::path dir(out_dir);
    write_file(dir, "report.csv", report.str());
    write_file(dir, "cwnd_baseline.csv", cwnd_base.str());
    write_file(dir, "cwnd_holding.csv", cwnd_hold.str());
    write_file(dir, "holder_trace.csv", holder.str());
}

void apply_sweep_value(Scenario& sc, const std::string& param, double value) {
    if (param == "prediction_error_factor") {
        sc.prediction_error_factor = value;
    } else if (param == "fade_duration") {
        for (FadeWindow& w : sc.fade_windows) w.duration = value;
    } else if (param == "prediction_lead") {
        sc.prediction_lead = value;
    } else {
        throw input_error("unknown sweep parameter: `" + param + "`");
    }
}

void cmd_sweep(const std::string& scenario_path, const std::string& param,
               const std::string& values_csv,
               const std::optional<std::string>& out_dir,
               std::optional<int> seed) {
    Scenario base = load_scenario(scenario_path, seed);
    std::vector<double> values = parse_values(values_csv);

    std::vector<SweepRow> rows;
    for (double v : values) {
        Scenario sc = base;
        apply_sweep_value(sc, param, v);
        RunReport rep = run_checked(sc);
        rows.push_back({param, v, rep.baseline.throughput,
                        rep.holding.throughput, rep.improvement_ratio});
    }

    std::ostringstream out;
    write_sweep_csv(out, rows);
    emit(out_dir, "sweep.csv", out.str());
}

void add_format_flag(CLI::App* cmd, std::string& format) {
    cmd->add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"csv"}));
}

void add_schedule_flags(CLI::App* cmd, ScheduleArgs& a) {
    cmd->add_option("--T", a.T, "Outage length to cover, seconds")->required();
    cmd->add_option("--N", a.N, "Held ACKs to release")->required();
    cmd->add_option("--mu0", a.mu0, "Initial smoothed RTT attributed to the sender");
    cmd->add_option("--sigma0", a.sigma0, "Initial RTT deviation");
    cmd->add_option("--R", a.R, "Round trip to the fixed host, seconds");
    cmd->add_option("--r", a.r, "Round trip to the mobile host, seconds");
    cmd->add_option("--max-dups", a.max_dups, "Duplicate copies allowed per ACK");
    cmd->add_option("--guard", a.guard, "Clamp margin below the live timeout");
    cmd->add_option("--out", a.out_dir, "Output directory (stdout if omitted)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ACK pacing planner and fading-link transfer simulator"};
    app.require_subcommand(1);

    ScheduleArgs sched_args;
    std::string sched_format = "csv";
    CLI::App* sched = app.add_subcommand(
        "schedule", "Plan the timed release of held ACKs over an outage");
    add_schedule_flags(sched, sched_args);
    add_format_flag(sched, sched_format);

    ScheduleArgs curve_args;
    std::string curve_format = "csv";
    CLI::App* curve = app.add_subcommand(
        "rto-curve", "Tabulate the final sender timeout per inflation split");
    add_schedule_flags(curve, curve_args);
    add_format_flag(curve, curve_format);

    std::string run_scenario, run_out;
    std::optional<int> run_seed;
    std::string run_format = "csv";
    CLI::App* run_cmd = app.add_subcommand(
        "run", "Run a scenario under both sender variants and write traces");
    run_cmd->add_option("--scenario", run_scenario, "Scenario file")->required();
    run_cmd->add_option("--out", run_out, "Output directory")->required();
    run_cmd->add_option("--seed", run_seed, "Override the scenario RNG seed");
    add_format_flag(run_cmd, run_format);

    std::string sweep_scenario, sweep_param, sweep_values;
    std::optional<std::string> sweep_out;
    std::optional<int> sweep_seed;
    std::string sweep_format = "csv";
    CLI::App* sweep = app.add_subcommand(
        "sweep", "Re-run a scenario over a range of one parameter");
    sweep->add_option("--scenario", sweep_scenario, "Base scenario file")
        ->required();
    sweep->add_option("--param", sweep_param,
                      "One of: prediction_error_factor, fade_duration, "
                      "prediction_lead")
        ->required();
    sweep->add_option("--values", sweep_values,
                      "Comma-separated values (empty sweeps nothing)");
    sweep->add_option("--out", sweep_out, "Output directory (stdout if omitted)");
    sweep->add_option("--seed", sweep_seed, "Override the scenario RNG seed");
    add_format_flag(sweep, sweep_format);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (sched->parsed()) cmd_schedule(sched_args);
        if (curve->parsed()) cmd_rto_curve(curve_args);
        if (run_cmd->parsed()) cmd_run(run_scenario, run_out, run_seed);
        if (sweep->parsed())
            cmd_sweep(sweep_scenario, sweep_param, sweep_values, sweep_out,
                      sweep_seed);
    } catch (const input_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
