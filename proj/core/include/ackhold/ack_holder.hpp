#ifndef ACKHOLD_ACK_HOLDER_HPP
#define ACKHOLD_ACK_HOLDER_HPP

#include "ackhold/pacing_scheduler.hpp"
#include "ackhold/rtt_estimator.hpp"

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ackhold {

// Base-station ACK holding: on a link-loss warning the station stops
// forwarding, banks ACKs from the mobile and data for the mobile, releases
// the banked ACKs on a computed timetable while the link is out, and
// flushes everything when the link returns.

enum class HolderMode { NORMAL, HOLD_ACK, PACE_ACK, FLUSH_ACK };

const char* to_string(HolderMode mode);

// Cumulative acknowledgment as seen on the wire (abstracted).
struct AckRecord {
    std::int64_t ack_number = 0;        // highest in-order sequence
    std::int64_t advertised_window = 0; // bytes
    double timestamp_echo = 0.0;        // echoed send timestamp, seconds
    double arrival_time = 0.0;
};

// Data segment headed for the mobile (abstracted).
struct SegmentRecord {
    std::int64_t seq = 0;
    double send_timestamp = 0.0;
    std::int64_t size_bytes = 0;
    double arrival_time = 0.0;
};

struct CrossLayerEvent {
    enum class Kind { LinkGoingDown, LinkGone, LinkUp };
    Kind kind = Kind::LinkGoingDown;
    double rtt_mobile_r = 0.0;       // LinkGoingDown only
    double est_down_duration_d = 0.0; // LinkGoingDown only
    int connection_id = 0;
};

struct HolderConfig {
    double guard_fraction = 0.1;
    int max_duplicates_per_ack = 2;
    // The planning inputs are shaded this fraction below the measured path
    // estimate so every release lands strictly inside the sender's deadline
    // instead of exactly on it.
    double pace_margin = 0.02;
    // Keep the planned final timeout at or above the path round trip, so
    // the plan cannot aim below the latency of the first post-outage ACK.
    bool floor_final_rto_at_path_rtt = true;
};

// One row of the holder activity log: every mode transition and every
// emission producing output, with the mode after the event.
struct HolderTraceRow {
    double time = 0.0;
    int connection_id = 0;
    std::string event;
    HolderMode mode = HolderMode::NORMAL;
    int emitted_count = 0;
};

struct ReleasedAck {
    AckRecord ack;
    bool duplicate = false;
};

struct FlushResult {
    std::vector<ReleasedAck> acks;
    std::vector<SegmentRecord> segments;
};

// Outcome of feeding an ACK in: a pass-through ACK to forward (NORMAL mode
// only) and whether the release timetable was rebuilt.
struct MobileAckOutcome {
    std::optional<AckRecord> forward;
    bool schedule_changed = false;
};

enum class HolderError {
    None,
    ProtocolOrder, // event legal only in another mode; state unchanged
    InvalidEvent,  // malformed event payload; state unchanged
};

struct HolderState {
    HolderMode mode = HolderMode::NORMAL;
    // ACKs banked and not yet emitted as originals, in arrival order.
    std::deque<AckRecord> held_acks;
    std::deque<SegmentRecord> cached_segments;
    std::int64_t reserved_window_w = 0; // bytes; valid once reserved
    bool reserved = false;
    std::optional<PacingSchedule> active_schedule;
    std::size_t next_release_index = 0;

    // Timetable anchoring.
    double schedule_start = 0.0;
    double elapsed_at_build = 0.0;

    // Outage bookkeeping from the cross-layer events.
    double going_down_time = 0.0;
    double est_down_duration = 0.0;
    double mobile_rtt = 0.0;

    // Counters (cumulative over the holder's lifetime).
    std::int64_t overflow_drops = 0;
    std::int64_t protocol_order_errors = 0;
    std::int64_t spurious_up_events = 0;
    std::int64_t held_total = 0;
    std::int64_t released_original_total = 0;
    std::int64_t released_duplicate_total = 0;
    std::int64_t flushed_ack_total = 0;
    std::int64_t forwarded_segment_total = 0;
};

class AckHolder {
  public:
    explicit AckHolder(int connection_id = 0, HolderConfig config = {});

    const HolderState& state() const { return state_; }
    HolderMode mode() const { return state_.mode; }
    const HolderConfig& config() const { return config_; }

    void set_trace_sink(std::function<void(const HolderTraceRow&)> sink);

    // Round-trip sample for the base-station-to-fixed-host path; feeds the
    // estimator that seeds the pacing plan.
    void record_path_sample(double rtt_sample, double now);
    bool has_path_estimate() const { return path_initialized_; }
    RttEstimate path_estimate() const { return path_; }

    HolderError on_link_going_down(const CrossLayerEvent& ev, double now);

    // NORMAL: returns the ACK for immediate forwarding. While holding, the
    // ACK is banked; if a timetable is already running it is rebuilt over
    // the not-yet-released ACKs from the current instant.
    MobileAckOutcome on_ack_from_mobile(const AckRecord& ack, double now);

    // NORMAL: returns the segment for immediate forwarding. While holding,
    // the segment is cached, or dropped (counted) once the reservation is
    // full; the fixed host retransmits dropped segments later.
    std::optional<SegmentRecord> on_data_from_fixed(const SegmentRecord& seg,
                                                    double now);

    // Builds the release timetable over the banked ACKs for the remaining
    // estimated outage and reserves cache space equal to the largest
    // advertised window seen.
    HolderError on_link_gone(const CrossLayerEvent& ev, double now);

    // Emits every scheduled release due by `now`. Idempotent: a second call
    // with the same `now` emits nothing.
    std::vector<ReleasedAck> release_due(double now);

    // Emits all unreleased ACKs and all cached segments, then returns to
    // NORMAL. A LinkUp in NORMAL is counted and ignored (the monitor may
    // re-announce).
    FlushResult on_link_up(const CrossLayerEvent& ev, double now);

    // Wall-clock times of the releases still pending, for the event loop.
    std::vector<double> pending_release_times() const;

  private:
    void trace(double now, const char* event, int emitted);
    double release_time(const ReleaseSlot& slot) const;
    void build_timetable(double now);

    HolderState state_;
    HolderConfig config_;
    int connection_id_ = 0;

    RttEstimate path_{0.0, 0.0};
    bool path_initialized_ = false;

    std::optional<double> last_forward_time_;
    std::optional<double> last_release_time_;
    std::size_t originals_emitted_ = 0;

    std::function<void(const HolderTraceRow&)> sink_;
};

} // namespace ackhold

#endif
