#include "ackhold/netsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>

namespace ackhold {

const char* to_string(SenderPhase phase) {
    switch (phase) {
    case SenderPhase::SLOW_START: return "SLOW_START";
    case SenderPhase::CONG_AVOID: return "CONG_AVOID";
    case SenderPhase::FAST_RECOVERY: return "FAST_RECOVERY";
    }
    return "?";
}

namespace {

struct Event {
    enum class Kind {
        SegArriveBS,     // data from the fixed host reaches the station
        SegArriveMobile, // data reaches the mobile, if the air was clear
        AckArriveBS,     // ack from the mobile reaches the station
        AckArriveFixed,  // ack reaches the sender
        SenderTimeout,
        Monitor,     // scripted cross-layer indication
        ReleaseTick, // scheduled ack release instant
    };
    double time = 0.0;
    std::uint64_t order = 0;
    Kind kind = Kind::SegArriveBS;
    SegmentRecord seg;
    AckRecord ack;
    double air_begin = 0.0; // wireless occupancy start, for fade checks
    std::int64_t timer_gen = 0;
    CrossLayerEvent cross;
};

// Timer expiries yield to deliveries at the same instant, like a stack that
// services input before firing timers.
int kind_rank(Event::Kind k) {
    return k == Event::Kind::SenderTimeout ? 1 : 0;
}

struct EventAfter {
    bool operator()(const Event& a, const Event& b) const {
        if (a.time != b.time) return a.time > b.time;
        const int ra = kind_rank(a.kind);
        const int rb = kind_rank(b.kind);
        if (ra != rb) return ra > rb;
        return a.order > b.order;
    }
};

class Simulation {
  public:
    explicit Simulation(const Scenario& sc)
        : sc_(sc), holding_(sc.sender_variant == SenderVariant::ACK_HOLDING),
          ssthresh_(static_cast<double>(sc.advertised_window_segments)),
          peer_window_segs_(sc.advertised_window_segments) {
        if (holding_) {
            holder_.set_trace_sink([this](const HolderTraceRow& row) {
                metrics_.holder_trace.push_back(row);
            });
        }
    }

    Metrics run() {
        validate_scenario(sc_);
        for (std::size_t i = 0; i < sc_.fade_windows.size(); ++i) {
            const FadeWindow& w = sc_.fade_windows[i];
            schedule_monitor(w.start - sc_.prediction_lead,
                             CrossLayerEvent::Kind::LinkGoingDown,
                             w.duration * sc_.prediction_error_factor);
            schedule_monitor(w.start, CrossLayerEvent::Kind::LinkGone, 0.0);
            schedule_monitor(w.end(), CrossLayerEvent::Kind::LinkUp, 0.0);
        }
        trace_sender();
        try_send();
        while (!queue_.empty()) {
            Event ev = queue_.top();
            if (ev.time > sc_.transfer_duration) break;
            queue_.pop();
            now_ = ev.time;
            sample_fade_cwnd();
            dispatch(ev);
            sample_fade_cwnd();
        }
        finalize();
        return std::move(metrics_);
    }

  private:
    // --- plumbing ---

    void schedule(Event ev) {
        ev.order = ++order_counter_;
        queue_.push(ev);
    }

    void schedule_monitor(double t, CrossLayerEvent::Kind kind, double d_est) {
        Event ev;
        ev.time = t;
        ev.kind = Event::Kind::Monitor;
        ev.cross.kind = kind;
        ev.cross.est_down_duration_d = d_est;
        // The monitor reads the true mobile round trip off the air
        // interface: both propagation legs plus one serialization slot.
        ev.cross.rtt_mobile_r =
            2.0 * sc_.wireless_delay + 1.0 / sc_.bottleneck_rate;
        schedule(ev);
    }

    bool in_fade(double t) const {
        for (const FadeWindow& w : sc_.fade_windows)
            if (t >= w.start && t < w.end()) return true;
        return false;
    }

    bool air_faded(double begin, double end) const {
        for (const FadeWindow& w : sc_.fade_windows)
            if (begin < w.end() && w.start < end) return true;
        return false;
    }

    void sample_fade_cwnd() {
        if (in_fade(now_))
            min_fade_cwnd_ = std::min(min_fade_cwnd_, cwnd_);
    }

    // --- sender ---

    double sender_rto() const {
        double rto = have_sample_ ? est_.rto() : 3.0;
        rto = std::ldexp(rto, backoff_);
        if (sc_.rto_clamp)
            rto = std::clamp(rto, sc_.rto_clamp->first, sc_.rto_clamp->second);
        return rto;
    }

    bool outstanding() const { return snd_nxt_ - 1 > highest_acked_; }

    void arm_timer() {
        timer_armed_ = true;
        ++timer_gen_;
        Event ev;
        ev.time = now_ + sender_rto();
        ev.kind = Event::Kind::SenderTimeout;
        ev.timer_gen = timer_gen_;
        schedule(ev);
    }

    void disarm_timer() {
        timer_armed_ = false;
        ++timer_gen_;
    }

    void emit_segment(std::int64_t seq) {
        Event ev;
        ev.time = now_ + sc_.wired_delay;
        ev.kind = Event::Kind::SegArriveBS;
        ev.seg = SegmentRecord{seq, now_, sc_.segment_size, 0.0};
        schedule(ev);
    }

    void try_send() {
        const std::int64_t win =
            std::min(static_cast<std::int64_t>(cwnd_), peer_window_segs_);
        while (snd_nxt_ <= highest_acked_ + win) {
            emit_segment(snd_nxt_);
            ++snd_nxt_;
            if (!timer_armed_) arm_timer();
        }
    }

    void trace_sender() {
        metrics_.cwnd_trace.push_back(
            {now_, cwnd_, ssthresh_, sender_rto(), phase_});
    }

    void sender_on_ack(const AckRecord& a) {
        peer_window_segs_ =
            std::max<std::int64_t>(1, a.advertised_window / sc_.segment_size);
        if (a.ack_number > highest_acked_) {
            highest_acked_ = a.ack_number;
            backoff_ = 0;
            const double x = now_ - a.timestamp_echo;
            if (x >= 0.0) {
                if (!have_sample_) {
                    est_ = RttEstimate{x, x / 2.0};
                    have_sample_ = true;
                } else {
                    est_ = update(est_, x);
                }
            }
            dup_count_ = 0;
            if (phase_ == SenderPhase::FAST_RECOVERY) {
                cwnd_ = ssthresh_;
                phase_ = SenderPhase::CONG_AVOID;
            } else if (phase_ == SenderPhase::SLOW_START) {
                cwnd_ += 1.0;
                if (cwnd_ >= ssthresh_) phase_ = SenderPhase::CONG_AVOID;
            } else {
                cwnd_ += 1.0 / cwnd_;
            }
        } else if (a.ack_number == highest_acked_) {
            ++dup_count_;
            if (phase_ == SenderPhase::FAST_RECOVERY) {
                cwnd_ += 1.0;
            } else if (dup_count_ == 3) {
                ssthresh_ = std::max(cwnd_ / 2.0, 2.0);
                cwnd_ = ssthresh_ + 3.0;
                phase_ = SenderPhase::FAST_RECOVERY;
                emit_segment(highest_acked_ + 1); // fast retransmit
            }
        }
        if (outstanding())
            arm_timer();
        else
            disarm_timer();
        try_send();
        trace_sender();
    }

    void sender_on_timeout() {
        timer_armed_ = false;
        ++metrics_.timeout_count;
        if (holding_ && holder_.mode() != HolderMode::NORMAL)
            ++metrics_.held_phase_timeout_count;
        ssthresh_ = std::max(cwnd_ / 2.0, 2.0);
        cwnd_ = 1.0;
        phase_ = SenderPhase::SLOW_START;
        dup_count_ = 0;
        backoff_ = std::min(backoff_ + 1, 16);
        snd_nxt_ = highest_acked_ + 1; // go-back-N from the hole
        try_send();
        trace_sender();
    }

    // --- base station ---

    void wireless_send_data(const SegmentRecord& seg) {
        const double depart = std::max(now_, wireless_free_);
        wireless_free_ = depart + 1.0 / sc_.bottleneck_rate;
        Event ev;
        ev.time = depart + 1.0 / sc_.bottleneck_rate + sc_.wireless_delay;
        ev.kind = Event::Kind::SegArriveMobile;
        ev.seg = seg;
        ev.air_begin = depart;
        schedule(ev);
    }

    void forward_ack_to_fixed(const AckRecord& ack) {
        Event ev;
        ev.time = now_ + sc_.wired_delay;
        ev.kind = Event::Kind::AckArriveFixed;
        ev.ack = ack;
        schedule(ev);
    }

    void enqueue_release_ticks() {
        for (double t : holder_.pending_release_times()) {
            Event ev;
            ev.time = t;
            ev.kind = Event::Kind::ReleaseTick;
            schedule(ev);
        }
    }

    // --- mobile ---

    void mobile_receive(const SegmentRecord& seg) {
        if (seg.seq == rcv_nxt_) {
            ++rcv_nxt_;
            while (ooo_.erase(rcv_nxt_) > 0) ++rcv_nxt_;
        } else if (seg.seq > rcv_nxt_) {
            ooo_.insert(seg.seq);
        }
        AckRecord ack;
        ack.ack_number = rcv_nxt_ - 1;
        ack.advertised_window =
            sc_.advertised_window_segments * sc_.segment_size;
        ack.timestamp_echo = seg.send_timestamp;
        ack.arrival_time = now_;
        Event ev;
        ev.time = now_ + sc_.wireless_delay;
        ev.kind = Event::Kind::AckArriveBS;
        ev.ack = ack;
        ev.air_begin = now_;
        schedule(ev);
    }

    // --- dispatch ---

    void dispatch(const Event& ev) {
        switch (ev.kind) {
        case Event::Kind::SegArriveBS: {
            if (holding_) {
                // The station reads the wired-path round trip off the
                // segment's own timestamp: twice the observed one-way
                // latency, legs being symmetric.
                holder_.record_path_sample(
                    2.0 * (now_ - ev.seg.send_timestamp), now_);
                std::optional<SegmentRecord> fwd =
                    holder_.on_data_from_fixed(ev.seg, now_);
                if (fwd) wireless_send_data(*fwd);
            } else {
                wireless_send_data(ev.seg);
            }
            break;
        }
        case Event::Kind::SegArriveMobile:
            if (air_faded(ev.air_begin, ev.time)) break;
            mobile_receive(ev.seg);
            break;
        case Event::Kind::AckArriveBS: {
            if (air_faded(ev.air_begin, ev.time)) break;
            AckRecord ack = ev.ack;
            ack.arrival_time = now_;
            if (holding_) {
                MobileAckOutcome out = holder_.on_ack_from_mobile(ack, now_);
                if (out.forward) forward_ack_to_fixed(*out.forward);
                if (out.schedule_changed) enqueue_release_ticks();
            } else {
                forward_ack_to_fixed(ack);
            }
            break;
        }
        case Event::Kind::AckArriveFixed:
            sender_on_ack(ev.ack);
            break;
        case Event::Kind::SenderTimeout:
            if (!timer_armed_ || ev.timer_gen != timer_gen_) break;
            sender_on_timeout();
            break;
        case Event::Kind::Monitor: {
            if (!holding_) break; // baseline station ignores the monitor
            switch (ev.cross.kind) {
            case CrossLayerEvent::Kind::LinkGoingDown:
                holder_.on_link_going_down(ev.cross, now_);
                break;
            case CrossLayerEvent::Kind::LinkGone:
                holder_.on_link_gone(ev.cross, now_);
                enqueue_release_ticks();
                break;
            case CrossLayerEvent::Kind::LinkUp: {
                FlushResult fl = holder_.on_link_up(ev.cross, now_);
                for (const ReleasedAck& r : fl.acks)
                    forward_ack_to_fixed(r.ack);
                for (const SegmentRecord& s : fl.segments)
                    wireless_send_data(s);
                break;
            }
            }
            break;
        }
        case Event::Kind::ReleaseTick:
            for (const ReleasedAck& r : holder_.release_due(now_))
                forward_ack_to_fixed(r.ack);
            break;
        }
    }

    void finalize() {
        metrics_.segments_delivered = rcv_nxt_ - 1;
        metrics_.throughput =
            static_cast<double>(metrics_.segments_delivered) /
            sc_.transfer_duration;
        metrics_.min_cwnd_during_fades =
            min_fade_cwnd_ == std::numeric_limits<double>::infinity()
                ? 0.0
                : min_fade_cwnd_;
        if (holding_) {
            const HolderState& hs = holder_.state();
            metrics_.overflow_drops = hs.overflow_drops;
            metrics_.held_ack_count = hs.held_total;
            metrics_.released_original_count = hs.released_original_total;
            metrics_.released_duplicate_count = hs.released_duplicate_total;
            metrics_.flushed_ack_count = hs.flushed_ack_total;
        }
    }

    const Scenario& sc_;
    const bool holding_;

    std::priority_queue<Event, std::vector<Event>, EventAfter> queue_;
    std::uint64_t order_counter_ = 0;
    double now_ = 0.0;
    Metrics metrics_;

    // Sender.
    double cwnd_ = 2.0;
    double ssthresh_;
    SenderPhase phase_ = SenderPhase::SLOW_START;
    RttEstimate est_{0.0, 0.0};
    bool have_sample_ = false;
    int dup_count_ = 0;
    int backoff_ = 0;
    std::int64_t highest_acked_ = 0;
    std::int64_t snd_nxt_ = 1;
    std::int64_t peer_window_segs_;
    bool timer_armed_ = false;
    std::int64_t timer_gen_ = 0;

    // Base station.
    AckHolder holder_{0, HolderConfig{}};
    double wireless_free_ = 0.0;

    // Mobile receiver.
    std::int64_t rcv_nxt_ = 1;
    std::set<std::int64_t> ooo_;

    double min_fade_cwnd_ = std::numeric_limits<double>::infinity();
};

} // namespace

Metrics run(const Scenario& scenario) { return Simulation(scenario).run(); }

RunReport run_pair(const Scenario& scenario) {
    RunReport report;
    report.description = scenario.description;
    Scenario base = scenario;
    base.sender_variant = SenderVariant::RENO_BASELINE;
    report.baseline = run(base);
    Scenario hold = scenario;
    hold.sender_variant = SenderVariant::ACK_HOLDING;
    report.holding = run(hold);
    report.improvement_ratio =
        report.baseline.throughput > 0.0
            ? report.holding.throughput / report.baseline.throughput
            : std::numeric_limits<double>::infinity();
    return report;
}

} // namespace ackhold
