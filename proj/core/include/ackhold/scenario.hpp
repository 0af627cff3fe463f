#ifndef ACKHOLD_SCENARIO_HPP
#define ACKHOLD_SCENARIO_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ackhold {

enum class SenderVariant { RENO_BASELINE, ACK_HOLDING };

const char* to_string(SenderVariant v);

struct FadeWindow {
    double start = 0.0;    // seconds from transfer start
    double duration = 0.0; // seconds
    double end() const { return start + duration; }
};

// A complete experiment description. Defaults give the reference topology:
// 50 ms wired one-way delay, 10 ms wireless one-way delay, a 1000 segment/s
// wireless bottleneck, 1000-byte segments, a 64-segment receiver window.
struct Scenario {
    double transfer_duration = 40.0;
    std::vector<FadeWindow> fade_windows;

    // The link monitor announces a fade this long before it starts, with an
    // estimated duration of true duration times the error factor.
    double prediction_lead = 0.05;
    double prediction_error_factor = 1.0;

    double wired_delay = 0.05;
    double wireless_delay = 0.01;
    double bottleneck_rate = 1000.0; // segments per second
    std::int64_t segment_size = 1000; // bytes
    std::int64_t advertised_window_segments = 64;

    SenderVariant sender_variant = SenderVariant::ACK_HOLDING;
    std::optional<std::pair<double, double>> rto_clamp; // (min, max) seconds
    std::uint64_t rng_seed = 1;

    std::string description;
};

class scenario_parse_error : public std::runtime_error {
  public:
    scenario_parse_error(int line, const std::string& what_arg);
    int line() const { return line_; }

  private:
    int line_;
};

// Parses the flat key/value scenario format:
//
//   format = 1
//   [topology]
//   wired_delay = 0.05
//   ...
//   [fades]
//   window = 15 10
//
// Sections: topology, transfer, fades, prediction, sender. `window` lines
// repeat, one fade each. `#` starts a comment. The leading `format = 1`
// is mandatory. Errors carry the offending line number.
Scenario parse_scenario_text(const std::string& text);
Scenario parse_scenario_file(const std::string& path);

// Cross-field checks: positive duration and rate, nonnegative delays and
// lead, positive error factor, fades sorted and separated widely enough
// that each fade's warning fires after the previous fade ends.
void validate_scenario(const Scenario& s);

} // namespace ackhold

#endif
