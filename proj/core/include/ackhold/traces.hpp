#ifndef ACKHOLD_TRACES_HPP
#define ACKHOLD_TRACES_HPP

#include "ackhold/netsim.hpp"
#include "ackhold/pacing_scheduler.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace ackhold {

// CSV emission for every table the tooling produces. All floats go through
// fmt_g9, so identical inputs yield byte-identical files.

// Shortest round-trippable decimal at 9 significant digits, locale-free.
std::string fmt_g9(double v);

// Columns: time_s,cwnd_segments,ssthresh_segments,rto_s,sender_state
void write_cwnd_trace_csv(std::ostream& out,
                          const std::vector<CwndTraceRow>& rows);

// Columns: time_s,connection_id,event,mode,emitted_count
void write_holder_trace_csv(std::ostream& out,
                            const std::vector<HolderTraceRow>& rows);

// One row per release, in emission order.
// Columns: index,release_offset,gap,predicted_rto_after
void write_schedule_csv(std::ostream& out, const PacingSchedule& schedule);

struct RtoCurvePoint {
    int split_n = 0;
    double final_rto = 0.0;
};

// One row per feasible split; the optimizer's pick carries argmin = 1.
// Columns: n,final_rto,argmin
void write_rto_curve_csv(std::ostream& out,
                         const std::vector<RtoCurvePoint>& points,
                         int argmin_n);

// Two rows (baseline, holding) of summary metrics; the ratio column holds
// holding throughput over baseline throughput on both rows.
void write_report_csv(std::ostream& out, const RunReport& report);

struct SweepRow {
    std::string parameter;
    double value = 0.0;
    double baseline_throughput = 0.0;
    double holding_throughput = 0.0;
    double improvement_ratio = 0.0;
};

// Columns: parameter,value,baseline_throughput,holding_throughput,improvement_ratio
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

} // namespace ackhold

#endif
