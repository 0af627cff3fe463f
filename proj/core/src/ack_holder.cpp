#include "ackhold/ack_holder.hpp"

#include <algorithm>
#include <cassert>

namespace ackhold {

namespace {

// Slack when comparing a release time against the clock, so a tick scheduled
// at exactly the release instant always fires the release.
constexpr double kDueEps = 1e-12;

} // namespace

const char* to_string(HolderMode mode) {
    switch (mode) {
    case HolderMode::NORMAL: return "NORMAL";
    case HolderMode::HOLD_ACK: return "HOLD_ACK";
    case HolderMode::PACE_ACK: return "PACE_ACK";
    case HolderMode::FLUSH_ACK: return "FLUSH_ACK";
    }
    return "?";
}

AckHolder::AckHolder(int connection_id, HolderConfig config)
    : config_(config), connection_id_(connection_id) {}

void AckHolder::set_trace_sink(std::function<void(const HolderTraceRow&)> sink) {
    sink_ = std::move(sink);
}

void AckHolder::trace(double now, const char* event, int emitted) {
    if (!sink_) return;
    sink_({now, connection_id_, event, state_.mode, emitted});
}

void AckHolder::record_path_sample(double rtt_sample, double now) {
    (void)now;
    if (rtt_sample < 0.0) return;
    if (!path_initialized_) {
        // Conventional seeding: first sample becomes the mean, half of it
        // the deviation.
        path_ = RttEstimate{rtt_sample, rtt_sample / 2.0};
        path_initialized_ = true;
        return;
    }
    path_ = update(path_, rtt_sample);
}

HolderError AckHolder::on_link_going_down(const CrossLayerEvent& ev, double now) {
    if (ev.kind != CrossLayerEvent::Kind::LinkGoingDown ||
        ev.est_down_duration_d <= 0.0 || ev.rtt_mobile_r < 0.0) {
        ++state_.protocol_order_errors;
        return HolderError::InvalidEvent;
    }
    if (state_.mode != HolderMode::NORMAL) {
        ++state_.protocol_order_errors;
        return HolderError::ProtocolOrder;
    }
    state_.mode = HolderMode::HOLD_ACK;
    state_.going_down_time = now;
    state_.est_down_duration = ev.est_down_duration_d;
    state_.mobile_rtt = ev.rtt_mobile_r;
    trace(now, "going_down", 0);
    return HolderError::None;
}

MobileAckOutcome AckHolder::on_ack_from_mobile(const AckRecord& ack, double now) {
    MobileAckOutcome out;
    switch (state_.mode) {
    case HolderMode::NORMAL:
    case HolderMode::FLUSH_ACK:
        last_forward_time_ = now;
        out.forward = ack;
        return out;
    case HolderMode::HOLD_ACK:
        state_.held_acks.push_back(ack);
        ++state_.held_total;
        trace(now, "hold_ack", 0);
        return out;
    case HolderMode::PACE_ACK:
        // A straggler that beat the outage: fold it in and replan the
        // remaining releases from this instant.
        state_.held_acks.erase(state_.held_acks.begin(),
                               state_.held_acks.begin() +
                                   static_cast<std::ptrdiff_t>(originals_emitted_));
        originals_emitted_ = 0;
        state_.held_acks.push_back(ack);
        ++state_.held_total;
        build_timetable(now);
        out.schedule_changed = true;
        trace(now, "hold_ack_rebuild", 0);
        return out;
    }
    return out;
}

std::optional<SegmentRecord> AckHolder::on_data_from_fixed(const SegmentRecord& seg,
                                                           double now) {
    if (state_.mode == HolderMode::NORMAL || state_.mode == HolderMode::FLUSH_ACK) {
        ++state_.forwarded_segment_total;
        return seg;
    }
    std::int64_t cached_bytes = 0;
    for (const SegmentRecord& s : state_.cached_segments) cached_bytes += s.size_bytes;
    if (state_.reserved && cached_bytes + seg.size_bytes > state_.reserved_window_w) {
        ++state_.overflow_drops;
        trace(now, "drop_data", 0);
        return std::nullopt;
    }
    state_.cached_segments.push_back(seg);
    trace(now, "cache_data", 0);
    return std::nullopt;
}

void AckHolder::build_timetable(double now) {
    const int n_acks = static_cast<int>(state_.held_acks.size());
    assert(n_acks >= 1);

    // Reservation: enough cache for the largest window the sender has
    // advertised, so nothing the window permits in flight is lost.
    std::int64_t w = state_.reserved ? state_.reserved_window_w : 0;
    for (const AckRecord& a : state_.held_acks)
        w = std::max(w, a.advertised_window);
    state_.reserved_window_w = w;
    state_.reserved = true;

    // Pace over what is left of the estimated outage, never collapsing
    // below an even spread of the full estimate.
    const double remaining =
        state_.going_down_time + state_.est_down_duration - now;
    const double horizon =
        std::max(remaining, state_.est_down_duration / n_acks);

    const double shade = 1.0 - config_.pace_margin;
    double mu0 = (path_initialized_ ? path_.mu : 0.0) + state_.mobile_rtt;
    double sigma0 = path_initialized_ ? path_.sigma : 0.0;
    const double resume_rtt = mu0;
    if (mu0 == 0.0 && sigma0 == 0.0) {
        // No path estimate at all: fall back to an even spread.
        mu0 = horizon / n_acks;
    }

    SchedulerInput in;
    in.total_acks_N = n_acks;
    in.outage_T = horizon;
    in.mu0 = shade * mu0;
    in.sigma0 = shade * sigma0;
    in.rtt_fixed_R = path_initialized_ ? path_.mu : 0.0;
    in.rtt_mobile_r = state_.mobile_rtt;
    in.max_duplicates_per_ack = config_.max_duplicates_per_ack;
    in.guard_fraction = config_.guard_fraction;
    in.min_final_rto = config_.floor_final_rto_at_path_rtt ? resume_rtt : 0.0;

    state_.active_schedule = build_schedule(in);
    state_.next_release_index = 0;
    state_.schedule_start = now;

    // Anchor the timetable on the sender's last perceived ACK, so the gap
    // it observes before the first release matches the planned offset.
    double last_perceived = -1.0;
    if (last_forward_time_) last_perceived = *last_forward_time_;
    if (last_release_time_)
        last_perceived = std::max(last_perceived, *last_release_time_);
    state_.elapsed_at_build = last_perceived >= 0.0 ? now - last_perceived : 0.0;
}

HolderError AckHolder::on_link_gone(const CrossLayerEvent& ev, double now) {
    if (ev.kind != CrossLayerEvent::Kind::LinkGone) {
        ++state_.protocol_order_errors;
        return HolderError::InvalidEvent;
    }
    if (state_.mode != HolderMode::HOLD_ACK) {
        ++state_.protocol_order_errors;
        return HolderError::ProtocolOrder;
    }
    state_.mode = HolderMode::PACE_ACK;
    if (state_.held_acks.empty()) {
        // Nothing to pace; keep caching data until the link returns.
        trace(now, "gone", 0);
        return HolderError::None;
    }
    build_timetable(now);
    trace(now, "gone", 0);
    return HolderError::None;
}

double AckHolder::release_time(const ReleaseSlot& slot) const {
    return state_.schedule_start +
           std::max(0.0, slot.offset - state_.elapsed_at_build);
}

std::vector<ReleasedAck> AckHolder::release_due(double now) {
    std::vector<ReleasedAck> out;
    if (state_.mode != HolderMode::PACE_ACK || !state_.active_schedule)
        return out;
    const PacingSchedule& plan = *state_.active_schedule;
    while (state_.next_release_index < plan.slots.size()) {
        const ReleaseSlot& slot = plan.slots[state_.next_release_index];
        if (release_time(slot) > now + kDueEps) break;
        const AckRecord& rec =
            state_.held_acks[static_cast<std::size_t>(slot.ack_index - 1)];
        out.push_back({rec, slot.duplicate});
        if (slot.duplicate) {
            ++state_.released_duplicate_total;
        } else {
            ++originals_emitted_;
            ++state_.released_original_total;
        }
        last_release_time_ = now;
        ++state_.next_release_index;
    }
    if (!out.empty()) trace(now, "release", static_cast<int>(out.size()));
    return out;
}

FlushResult AckHolder::on_link_up(const CrossLayerEvent& ev, double now) {
    FlushResult out;
    if (ev.kind != CrossLayerEvent::Kind::LinkUp) {
        ++state_.protocol_order_errors;
        return out;
    }
    if (state_.mode == HolderMode::NORMAL) {
        ++state_.spurious_up_events;
        trace(now, "up_ignored", 0);
        return out;
    }
    state_.mode = HolderMode::FLUSH_ACK;

    for (std::size_t i = originals_emitted_; i < state_.held_acks.size(); ++i) {
        out.acks.push_back({state_.held_acks[i], false});
        ++state_.flushed_ack_total;
    }
    trace(now, "up", static_cast<int>(out.acks.size()));

    out.segments.assign(state_.cached_segments.begin(),
                        state_.cached_segments.end());
    state_.forwarded_segment_total +=
        static_cast<std::int64_t>(out.segments.size());

    state_.held_acks.clear();
    state_.cached_segments.clear();
    state_.reserved = false;
    state_.reserved_window_w = 0;
    state_.active_schedule.reset();
    state_.next_release_index = 0;
    originals_emitted_ = 0;
    last_forward_time_ = now;
    last_release_time_.reset();

    state_.mode = HolderMode::NORMAL;
    trace(now, "flush_done", static_cast<int>(out.segments.size()));
    return out;
}

std::vector<double> AckHolder::pending_release_times() const {
    std::vector<double> out;
    if (state_.mode != HolderMode::PACE_ACK || !state_.active_schedule)
        return out;
    const PacingSchedule& plan = *state_.active_schedule;
    for (std::size_t i = state_.next_release_index; i < plan.slots.size(); ++i)
        out.push_back(release_time(plan.slots[i]));
    return out;
}

} // namespace ackhold
