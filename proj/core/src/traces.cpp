#include "ackhold/traces.hpp"

#include <cstdio>
#include <ostream>

namespace ackhold {

std::string fmt_g9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

void write_cwnd_trace_csv(std::ostream& out,
                          const std::vector<CwndTraceRow>& rows) {
    out << "# sender congestion state over time: window, threshold, timeout,"
           " phase\n";
    out << "time_s,cwnd_segments,ssthresh_segments,rto_s,sender_state\n";
    for (const CwndTraceRow& r : rows) {
        out << fmt_g9(r.time) << ',' << fmt_g9(r.cwnd) << ','
            << fmt_g9(r.ssthresh) << ',' << fmt_g9(r.rto) << ','
            << to_string(r.state) << '\n';
    }
}

void write_holder_trace_csv(std::ostream& out,
                            const std::vector<HolderTraceRow>& rows) {
    out << "# base-station holder transitions and emissions\n";
    out << "time_s,connection_id,event,mode,emitted_count\n";
    for (const HolderTraceRow& r : rows) {
        out << fmt_g9(r.time) << ',' << r.connection_id << ',' << r.event
            << ',' << to_string(r.mode) << ',' << r.emitted_count << '\n';
    }
}

void write_schedule_csv(std::ostream& out, const PacingSchedule& schedule) {
    out << "# ACK release timetable: inter-release gap and the modeled sender"
           " timeout after each release\n";
    out << "# split_n = " << schedule.split_n
        << ", theta = " << fmt_g9(schedule.theta)
        << ", covered_time = " << fmt_g9(schedule.covered_time)
        << ", truncated_coverage = " << (schedule.truncated ? "true" : "false")
        << '\n';
    out << "index,release_offset,gap,predicted_rto_after\n";
    double prev = 0.0;
    int index = 0;
    for (const ReleaseSlot& s : schedule.slots) {
        ++index;
        out << index << ',' << fmt_g9(s.offset) << ','
            << fmt_g9(s.offset - prev) << ',' << fmt_g9(s.predicted_rto)
            << '\n';
        prev = s.offset;
    }
}

void write_rto_curve_csv(std::ostream& out,
                         const std::vector<RtoCurvePoint>& points,
                         int argmin_n) {
    out << "# final sender timeout as a function of the inflation split n\n";
    out << "n,final_rto,argmin\n";
    for (const RtoCurvePoint& p : points) {
        out << p.split_n << ',' << fmt_g9(p.final_rto) << ','
            << (p.split_n == argmin_n ? 1 : 0) << '\n';
    }
}

namespace {

void report_row(std::ostream& out, const char* variant, const Metrics& m,
                double ratio) {
    out << variant << ',' << m.segments_delivered << ','
        << fmt_g9(m.throughput) << ',' << m.timeout_count << ','
        << m.held_phase_timeout_count << ','
        << fmt_g9(m.min_cwnd_during_fades) << ',' << m.overflow_drops << ','
        << fmt_g9(ratio) << '\n';
}

} // namespace

void write_report_csv(std::ostream& out, const RunReport& report) {
    out << "# per-variant transfer summary";
    if (!report.description.empty()) out << ": " << report.description;
    out << '\n';
    out << "variant,segments_delivered,throughput_segments_per_s,"
           "timeout_count,held_phase_timeout_count,min_cwnd_during_fades,"
           "overflow_drops,improvement_ratio\n";
    report_row(out, "reno_baseline", report.baseline,
               report.improvement_ratio);
    report_row(out, "ack_holding", report.holding, report.improvement_ratio);
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "# both variants' throughput per swept parameter value\n";
    out << "parameter,value,baseline_throughput,holding_throughput,"
           "improvement_ratio\n";
    for (const SweepRow& r : rows) {
        out << r.parameter << ',' << fmt_g9(r.value) << ','
            << fmt_g9(r.baseline_throughput) << ','
            << fmt_g9(r.holding_throughput) << ','
            << fmt_g9(r.improvement_ratio) << '\n';
    }
}

} // namespace ackhold
