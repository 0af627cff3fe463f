#ifndef ACKHOLD_RTT_ESTIMATOR_HPP
#define ACKHOLD_RTT_ESTIMATOR_HPP

namespace ackhold {

// Smoothed RTT tracker: mean mu and mean deviation sigma, updated per sample
// with gains g and h. The timeout is always derived, never cached.
struct RttEstimate {
    double mu = 0.0;     // seconds
    double sigma = 0.0;  // seconds, >= 0
    double gain_g = 0.125;
    double gain_h = 0.25;

    double rto() const { return mu + 4.0 * sigma; }
};

// One estimator iteration for sample_x:
//   delta = x - mu; mu += g*delta; sigma += h*(|delta| - sigma).
// sigma stays >= 0 for h in (0,1]. Throws std::invalid_argument on a
// negative sample or gains outside (0,1).
RttEstimate update(const RttEstimate& est, double sample_x);

// State after n pacing steps where each sample equals the previous timeout
// (the fastest inflation that cannot fire the timer).
struct PhaseOneResult {
    double mu_n = 0.0;
    double sigma_n = 0.0;
    double rto_n = 0.0;       // mu_n + 4*sigma_n
    double elapsed_S_n = 0.0; // sum of the n inflation gaps
};

// Closed form of the inflation recursion, valid only for the default gains
// (every coefficient below depends on g=1/8, h=1/4; other gains are rejected):
//   sigma_n = (7/4)^n sigma0
//   mu_n    = mu0 + (2/3) sigma0 ((7/4)^n - 1)
//   rto_n   = mu0 + sigma0 ((14/3)(7/4)^n - 2/3)
//   S(n)    = n mu0 + sigma0 ((56/9)((7/4)^n - 1) - 2n/3)
PhaseOneResult phase1_closed_form(int n, double mu0, double sigma0,
                                  double gain_g = 0.125, double gain_h = 0.25);

// State after steps_k identical samples of value theta, starting from
// (mu_n, sigma_n).
struct PhaseTwoResult {
    double mu_N = 0.0;
    double sigma_N = 0.0;
    double rto_N = 0.0;
};

// Closed form of the constant-sample decay, same gain restriction:
//   mu_N    = (7/8)^k (mu_n - theta) + theta
//   sigma_N = (3/4)^k sigma_n + 2 ((7/8)^k - (3/4)^k) |mu_n - theta|
// The sign of (theta - mu) never flips along the way, which is what the
// |mu_n - theta| factoring relies on.
PhaseTwoResult phase2_closed_form(int steps_k, double theta, double mu_n,
                                  double sigma_n, double gain_g = 0.125,
                                  double gain_h = 0.25);

} // namespace ackhold

#endif
