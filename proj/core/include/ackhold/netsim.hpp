#ifndef ACKHOLD_NETSIM_HPP
#define ACKHOLD_NETSIM_HPP

#include "ackhold/ack_holder.hpp"
#include "ackhold/scenario.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ackhold {

// Deterministic single-flow simulation: a Reno-style sender on a fixed host,
// a base station (pure forwarder, or embedding the ACK holder), a scripted
// fading wireless hop, and a mobile receiver that ACKs cumulatively.

enum class SenderPhase { SLOW_START, CONG_AVOID, FAST_RECOVERY };

const char* to_string(SenderPhase phase);

struct CwndTraceRow {
    double time = 0.0;
    double cwnd = 0.0;     // segments
    double ssthresh = 0.0; // segments
    double rto = 0.0;      // seconds, after backoff and any clamp
    SenderPhase state = SenderPhase::SLOW_START;
};

struct Metrics {
    std::int64_t segments_delivered = 0; // in-order at the mobile
    double throughput = 0.0;             // segments per second of transfer
    std::int64_t timeout_count = 0;
    // Timeouts that fired while the base station was holding or pacing;
    // zero whenever the outage prediction is honest.
    std::int64_t held_phase_timeout_count = 0;
    // Smallest congestion window observed at any event inside a fade
    // window; 0 when the scenario has no fades.
    double min_cwnd_during_fades = 0.0;
    std::int64_t overflow_drops = 0;
    std::int64_t held_ack_count = 0;
    std::int64_t released_original_count = 0;
    std::int64_t released_duplicate_count = 0;
    std::int64_t flushed_ack_count = 0;
    std::vector<CwndTraceRow> cwnd_trace;
    std::vector<HolderTraceRow> holder_trace;
};

// Runs the scenario with its own sender_variant. Deterministic: identical
// scenarios produce identical Metrics, traces included.
Metrics run(const Scenario& scenario);

struct RunReport {
    std::string description;
    Metrics baseline; // RENO_BASELINE
    Metrics holding;  // ACK_HOLDING
    double improvement_ratio = 0.0; // holding throughput / baseline throughput
};

// Runs both variants on the same scenario and compares.
RunReport run_pair(const Scenario& scenario);

} // namespace ackhold

#endif
