#include "ackhold/rtt_estimator.hpp"

#include <cmath>
#include <stdexcept>

namespace ackhold {

namespace {

void check_gains(double g, double h) {
    if (!(g > 0.0 && g < 1.0) || !(h > 0.0 && h < 1.0))
        throw std::invalid_argument("estimator gains must lie in (0,1)");
}

void check_default_gains(double g, double h) {
    // Every closed-form coefficient is a function of the default gains:
    // 7/4 = 1+3h, 7/8 = 1-g, 3/4 = 1-h, and the rest follow from those.
    // Other gains would silently invalidate the formulas, so refuse them.
    if (g != 0.125 || h != 0.25)
        throw std::invalid_argument(
            "closed forms require the default gains g=1/8, h=1/4");
}

} // namespace

RttEstimate update(const RttEstimate& est, double sample_x) {
    check_gains(est.gain_g, est.gain_h);
    if (sample_x < 0.0)
        throw std::invalid_argument("negative RTT sample rejected");
    const double delta = sample_x - est.mu;
    RttEstimate next = est;
    next.mu = est.mu + est.gain_g * delta;
    next.sigma = est.sigma + est.gain_h * (std::fabs(delta) - est.sigma);
    return next;
}

PhaseOneResult phase1_closed_form(int n, double mu0, double sigma0,
                                  double gain_g, double gain_h) {
    check_default_gains(gain_g, gain_h);
    if (n < 0)
        throw std::invalid_argument("step count must be >= 0");
    if (mu0 < 0.0 || sigma0 < 0.0)
        throw std::invalid_argument("estimator state must be nonnegative");
    const double growth = std::pow(1.75, n); // (7/4)^n
    PhaseOneResult r;
    r.sigma_n = growth * sigma0;
    r.mu_n = mu0 + (2.0 / 3.0) * sigma0 * (growth - 1.0);
    r.rto_n = mu0 + sigma0 * ((14.0 / 3.0) * growth - 2.0 / 3.0);
    r.elapsed_S_n =
        n * mu0 + sigma0 * ((56.0 / 9.0) * (growth - 1.0) - 2.0 * n / 3.0);
    return r;
}

PhaseTwoResult phase2_closed_form(int steps_k, double theta, double mu_n,
                                  double sigma_n, double gain_g,
                                  double gain_h) {
    check_default_gains(gain_g, gain_h);
    if (steps_k < 0)
        throw std::invalid_argument("step count must be >= 0");
    if (theta < 0.0)
        throw std::invalid_argument("pacing interval must be >= 0");
    const double a = std::pow(0.875, steps_k); // (7/8)^k
    const double b = std::pow(0.75, steps_k);  // (3/4)^k
    PhaseTwoResult r;
    r.mu_N = a * (mu_n - theta) + theta;
    r.sigma_N = b * sigma_n + 2.0 * (a - b) * std::fabs(mu_n - theta);
    r.rto_N = r.mu_N + 4.0 * r.sigma_N;
    return r;
}

} // namespace ackhold
