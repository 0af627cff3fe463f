#include "ackhold/pacing_scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace ackhold {

namespace {

// Relative slack for "gap fits inside the timeout" comparisons: the edge
// case gap == RTO is legal (arrival on the deadline), only a real overrun
// counts.
constexpr double kRelEps = 1e-12;

void validate(const SchedulerInput& in) {
    if (in.total_acks_N < 1)
        throw std::invalid_argument("need at least one held ACK");
    if (!(in.outage_T > 0.0))
        throw std::invalid_argument("outage duration must be positive");
    if (in.mu0 < 0.0 || in.sigma0 < 0.0)
        throw std::invalid_argument("estimator state must be nonnegative");
    if (in.mu0 == 0.0 && in.sigma0 == 0.0)
        throw std::invalid_argument(
            "estimator state must not be identically zero");
    if (in.rtt_fixed_R < 0.0 || in.rtt_mobile_r < 0.0)
        throw std::invalid_argument("round-trip times must be nonnegative");
    if (in.max_duplicates_per_ack < 0 || in.max_duplicates_per_ack > 2)
        throw std::invalid_argument("duplicate cap must be 0, 1 or 2");
    if (in.guard_fraction < 0.0 || in.guard_fraction >= 1.0)
        throw std::invalid_argument("guard fraction must lie in [0,1)");
    if (in.min_final_rto < 0.0)
        throw std::invalid_argument("final-RTO floor must be nonnegative");
}

bool is_feasible(int n, const SchedulerInput& in) {
    if (n < 0 || n >= in.total_acks_N)
        return false;
    return phase1_closed_form(n, in.mu0, in.sigma0).elapsed_S_n <=
           in.outage_T;
}

} // namespace

std::vector<double> PacingSchedule::release_offsets() const {
    std::vector<double> out;
    out.reserve(slots.size());
    for (const ReleaseSlot& s : slots)
        out.push_back(s.offset);
    return out;
}

std::vector<std::pair<int, int>> PacingSchedule::duplicated_acks() const {
    std::map<int, int> copies;
    for (const ReleaseSlot& s : slots)
        if (s.duplicate)
            ++copies[s.ack_index];
    return {copies.begin(), copies.end()};
}

double theta_for(int n, const SchedulerInput& in) {
    validate(in);
    if (n < 0)
        throw std::invalid_argument("split must be >= 0");
    if (n >= in.total_acks_N) {
        std::ostringstream msg;
        msg << "split n=" << n << " leaves no ACKs for the uniform phase"
            << " (N=" << in.total_acks_N << ")";
        throw infeasible_split(msg.str());
    }
    const double S_n = phase1_closed_form(n, in.mu0, in.sigma0).elapsed_S_n;
    if (S_n > in.outage_T) {
        std::ostringstream msg;
        msg << "split n=" << n << " infeasible: inflation alone takes S(n)="
            << S_n << " > T=" << in.outage_T;
        throw infeasible_split(msg.str());
    }
    return (in.outage_T - S_n) / (in.total_acks_N - n);
}

double final_rto(int n, const SchedulerInput& in) {
    const double theta = theta_for(n, in);
    const PhaseOneResult p1 = phase1_closed_form(n, in.mu0, in.sigma0);
    return phase2_closed_form(in.total_acks_N - n, theta, p1.mu_n, p1.sigma_n)
        .rto_N;
}

int optimal_split(const SchedulerInput& in) {
    validate(in);
    // S(n) is nondecreasing, so feasibility is a prefix of [0, N).
    int best = -1, best_below = -1;
    double best_rto = 0.0, best_below_rto = -1.0;
    for (int n = 0; n < in.total_acks_N && is_feasible(n, in); ++n) {
        const double r = final_rto(n, in);
        if (r >= in.min_final_rto) {
            if (best < 0 || r < best_rto) {
                best = n;
                best_rto = r;
            }
        } else if (best_below < 0 || r > best_below_rto) {
            best_below = n;
            best_below_rto = r;
        }
    }
    if (best >= 0)
        return best;
    return best_below; // every split lands under the floor: take the closest
}

int first_descent_split(const SchedulerInput& in) {
    validate(in);
    double prev = final_rto(0, in);
    for (int n = 1; n < in.total_acks_N && is_feasible(n, in); ++n) {
        const double r = final_rto(n, in);
        if (r >= prev)
            return n - 1;
        prev = r;
    }
    // Descent never stopped inside the feasible range.
    int last = 0;
    while (last + 1 < in.total_acks_N && is_feasible(last + 1, in))
        ++last;
    return last;
}

PacingSchedule build_schedule(const SchedulerInput& in) {
    validate(in);
    const int n_star = optimal_split(in);
    const int N = in.total_acks_N;
    const int K = N - n_star;

    PacingSchedule sched;
    sched.split_n = n_star;
    sched.predicted_final_rto = final_rto(n_star, in);

    // Inflation phase: each gap equals the running timeout, which is the
    // fastest spacing that still arrives inside it.
    RttEstimate est{in.mu0, in.sigma0};
    double offset = 0.0;
    for (int i = 1; i <= n_star; ++i) {
        const double gap = est.rto();
        offset += gap;
        est = update(est, gap);
        sched.slots.push_back({offset, i, false, est.rto()});
    }
    const double base = offset; // == S(n*) up to float noise
    const double entry_rto = est.rto();
    const double budget = entry_rto * (1.0 + kRelEps);

    // Uniform phase: try the plain gap first, then shrink it by releasing
    // duplicate copies (more slots over the same remaining time).
    int dups = 0;
    double theta = (in.outage_T - base) / K;
    while (theta > budget && dups < in.max_duplicates_per_ack * K) {
        ++dups;
        theta = (in.outage_T - base) / (K + dups);
    }
    const bool clamp = theta > budget;
    if (clamp)
        dups = in.max_duplicates_per_ack * K;
    const int M = K + dups;

    // Copies go to the earliest uniform-phase ACKs first, one round at a
    // time, and each copy is released right after its original so the
    // sender never sees more than max_duplicates_per_ack repeats in a row.
    std::vector<int> copies(K, dups / K);
    for (int j = 0; j < dups % K; ++j)
        ++copies[j];

    const double target = (in.outage_T - base) / M;
    sched.theta = target;

    double last_sample_offset = base;
    int slot_pos = 0;
    for (int j = 0; j < K; ++j) {
        const int ack_index = n_star + 1 + j;
        for (int c = 0; c <= copies[j]; ++c) {
            ++slot_pos;
            if (clamp) {
                const double gap =
                    std::min(target, (1.0 - in.guard_fraction) * est.rto());
                offset += gap;
            } else {
                offset = (slot_pos == M)
                             ? in.outage_T
                             : base + (in.outage_T - base) *
                                          (static_cast<double>(slot_pos) / M);
            }
            const bool duplicate = c > 0;
            if (!duplicate) {
                // Only originals advance the sender's window and carry a
                // usable echo, so only they feed the modeled estimator; the
                // sample is the spacing since the previous original.
                est = update(est, offset - last_sample_offset);
                last_sample_offset = offset;
            }
            sched.slots.push_back({offset, ack_index, duplicate, est.rto()});
        }
    }

    sched.covered_time = sched.slots.empty() ? 0.0 : sched.slots.back().offset;
    sched.truncated = clamp;
    return sched;
}

} // namespace ackhold
