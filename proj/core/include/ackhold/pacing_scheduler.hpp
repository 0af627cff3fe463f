#ifndef ACKHOLD_PACING_SCHEDULER_HPP
#define ACKHOLD_PACING_SCHEDULER_HPP

#include "ackhold/rtt_estimator.hpp"

#include <stdexcept>
#include <utility>
#include <vector>

namespace ackhold {

// Inputs for planning the release of N held ACKs over an outage of T seconds.
// (mu0, sigma0) is the estimator state attributed to the sending host at the
// moment pacing begins; R and r are the measured round trips to the fixed
// and mobile side, carried for callers that derive (mu0, sigma0) from them.
struct SchedulerInput {
    int total_acks_N = 0;
    double outage_T = 0.0;
    double mu0 = 0.0;
    double sigma0 = 0.0;
    double rtt_fixed_R = 0.0;
    double rtt_mobile_r = 0.0;
    int max_duplicates_per_ack = 2; // 3 copies trigger fast retransmit
    double guard_fraction = 0.1;    // clamp ladder margin below the live RTO
    double min_final_rto = 0.0;     // optional floor on the planned final RTO
};

// Split n with S(n) > T (or n = N, where theta is undefined).
class infeasible_split : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// One scheduled release. Offsets are measured from schedule start; the first
// release does NOT sit at offset zero, its offset is the first gap.
struct ReleaseSlot {
    double offset = 0.0;
    int ack_index = 0;          // 1-based position in the held-ACK sequence
    bool duplicate = false;     // marked copy of an already released ACK
    double predicted_rto = 0.0; // modeled sender timeout after this release
};

struct PacingSchedule {
    int split_n = 0;
    double theta = 0.0; // uniform gap used after the first split_n releases
    std::vector<ReleaseSlot> slots;
    double predicted_final_rto = 0.0;
    double covered_time = 0.0; // last offset; equals T unless truncated
    bool truncated = false;    // coverage fell short of T (clamp ladder ran)

    std::vector<double> release_offsets() const;
    // (ack index, duplicate copies) for every ACK released more than once.
    std::vector<std::pair<int, int>> duplicated_acks() const;
};

// theta(n) = (T - S(n)) / (N - n): the uniform gap that spends the remaining
// outage on the remaining ACKs. Throws infeasible_split when S(n) > T or
// n = N.
double theta_for(int n, const SchedulerInput& input);

// Sender timeout after the whole plan for split n: n inflation steps, then
// N - n samples of theta(n).
double final_rto(int n, const SchedulerInput& input);

// Exhaustive scan over feasible n in [0, N): the n minimizing final_rto
// (smallest n on ties). With min_final_rto set, the minimum is taken over
// splits whose final RTO clears the floor; if none do, the split closest to
// the floor from below is returned.
int optimal_split(const SchedulerInput& input);

// The single-step scan that stops at the first non-descent. Kept as a
// diagnostic: it can stop at a local plateau well away from the optimum, so
// schedules are always built from optimal_split.
int first_descent_split(const SchedulerInput& input);

// Full plan: n* = optimal_split, inflation gaps equal to the running timeout
// for the first n* releases, then the remaining outage spread uniformly.
// If the uniform gap would overrun the timeout at phase-2 entry, duplicate
// copies (round-robin, at most max_duplicates_per_ack each) are added to
// shrink it; if even maximal duplication is not enough, gaps are clamped to
// guard_fraction below the live timeout and the schedule is returned with
// truncated = true and covered_time < T. Never fails silently.
PacingSchedule build_schedule(const SchedulerInput& input);

} // namespace ackhold

#endif
