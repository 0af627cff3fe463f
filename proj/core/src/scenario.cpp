#include "ackhold/scenario.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace ackhold {

const char* to_string(SenderVariant v) {
    switch (v) {
    case SenderVariant::RENO_BASELINE: return "reno_baseline";
    case SenderVariant::ACK_HOLDING: return "ack_holding";
    }
    return "?";
}

scenario_parse_error::scenario_parse_error(int line, const std::string& what_arg)
    : std::runtime_error("line " + std::to_string(line) + ": " + what_arg),
      line_(line) {}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_double(const std::string& tok, int line, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(tok, &pos);
        if (pos != tok.size())
            throw scenario_parse_error(line, "trailing characters after number in `" + key + "`");
        return v;
    } catch (const scenario_parse_error&) {
        throw;
    } catch (const std::exception&) {
        throw scenario_parse_error(line, "`" + key + "` expects a number, got `" + tok + "`");
    }
}

std::int64_t parse_int(const std::string& tok, int line, const std::string& key) {
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
        throw scenario_parse_error(line, "`" + key + "` expects an integer, got `" + tok + "`");
    return v;
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

} // namespace

Scenario parse_scenario_text(const std::string& text) {
    Scenario sc;
    sc.fade_windows.clear();

    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    bool format_seen = false;
    std::string section;

    while (std::getline(in, raw)) {
        ++lineno;
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw scenario_parse_error(lineno, "unterminated section header");
            if (!format_seen)
                throw scenario_parse_error(lineno, "`format = 1` must precede any section");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "topology" && section != "transfer" &&
                section != "fades" && section != "prediction" &&
                section != "sender")
                throw scenario_parse_error(lineno, "unknown section [" + section + "]");
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw scenario_parse_error(lineno, "expected `key = value`");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw scenario_parse_error(lineno, "empty key");

        if (!format_seen) {
            if (key != "format")
                throw scenario_parse_error(lineno, "first entry must be `format = 1`");
            if (value != "1")
                throw scenario_parse_error(lineno, "unsupported format version `" + value + "`");
            format_seen = true;
            continue;
        }
        if (key == "format")
            throw scenario_parse_error(lineno, "duplicate `format` entry");
        if (section.empty())
            throw scenario_parse_error(lineno, "`" + key + "` outside any section");

        if (section == "topology") {
            if (key == "wired_delay") sc.wired_delay = parse_double(value, lineno, key);
            else if (key == "wireless_delay") sc.wireless_delay = parse_double(value, lineno, key);
            else if (key == "bottleneck_rate") sc.bottleneck_rate = parse_double(value, lineno, key);
            else if (key == "segment_size") sc.segment_size = parse_int(value, lineno, key);
            else if (key == "advertised_window") sc.advertised_window_segments = parse_int(value, lineno, key);
            else throw scenario_parse_error(lineno, "unknown key `" + key + "` in [topology]");
        } else if (section == "transfer") {
            if (key == "duration") sc.transfer_duration = parse_double(value, lineno, key);
            else if (key == "rng_seed") sc.rng_seed = static_cast<std::uint64_t>(parse_int(value, lineno, key));
            else if (key == "description") sc.description = value;
            else throw scenario_parse_error(lineno, "unknown key `" + key + "` in [transfer]");
        } else if (section == "fades") {
            if (key != "window")
                throw scenario_parse_error(lineno, "unknown key `" + key + "` in [fades]");
            const std::vector<std::string> toks = split_ws(value);
            if (toks.size() != 2)
                throw scenario_parse_error(lineno, "`window` expects `<start> <duration>`");
            FadeWindow w;
            w.start = parse_double(toks[0], lineno, "window start");
            w.duration = parse_double(toks[1], lineno, "window duration");
            sc.fade_windows.push_back(w);
        } else if (section == "prediction") {
            if (key == "lead") sc.prediction_lead = parse_double(value, lineno, key);
            else if (key == "error_factor") sc.prediction_error_factor = parse_double(value, lineno, key);
            else throw scenario_parse_error(lineno, "unknown key `" + key + "` in [prediction]");
        } else { // sender
            if (key == "variant") {
                if (value == "reno_baseline") sc.sender_variant = SenderVariant::RENO_BASELINE;
                else if (value == "ack_holding") sc.sender_variant = SenderVariant::ACK_HOLDING;
                else throw scenario_parse_error(lineno, "unknown variant `" + value + "`");
            } else if (key == "rto_clamp") {
                if (value == "off") {
                    sc.rto_clamp.reset();
                } else {
                    const std::vector<std::string> toks = split_ws(value);
                    if (toks.size() != 2)
                        throw scenario_parse_error(lineno, "`rto_clamp` expects `off` or `<min> <max>`");
                    sc.rto_clamp = std::make_pair(parse_double(toks[0], lineno, "rto_clamp min"),
                                                  parse_double(toks[1], lineno, "rto_clamp max"));
                }
            } else {
                throw scenario_parse_error(lineno, "unknown key `" + key + "` in [sender]");
            }
        }
    }

    if (!format_seen)
        throw scenario_parse_error(lineno == 0 ? 1 : lineno, "missing `format = 1`");
    validate_scenario(sc);
    return sc;
}

Scenario parse_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str());
}

void validate_scenario(const Scenario& s) {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("scenario: " + msg); };
    if (!(s.transfer_duration > 0.0)) fail("transfer duration must be positive");
    if (s.wired_delay < 0.0 || s.wireless_delay < 0.0) fail("delays must be nonnegative");
    if (!(s.bottleneck_rate > 0.0)) fail("bottleneck rate must be positive");
    if (s.segment_size < 1) fail("segment size must be at least 1 byte");
    if (s.advertised_window_segments < 1) fail("advertised window must be at least 1 segment");
    if (s.prediction_lead < 0.0) fail("prediction lead must be nonnegative");
    if (!(s.prediction_error_factor > 0.0)) fail("prediction error factor must be positive");
    if (s.rto_clamp) {
        if (!(s.rto_clamp->first > 0.0) || !(s.rto_clamp->second > s.rto_clamp->first))
            fail("rto clamp needs 0 < min < max");
    }
    for (std::size_t i = 0; i < s.fade_windows.size(); ++i) {
        const FadeWindow& w = s.fade_windows[i];
        if (w.start < 0.0) fail("fade start must be nonnegative");
        if (!(w.duration > 0.0)) fail("fade duration must be positive");
        if (i == 0 && w.start - s.prediction_lead < 0.0)
            fail("first fade starts before its warning could fire");
        if (i > 0) {
            const FadeWindow& prev = s.fade_windows[i - 1];
            if (w.start <= prev.start) fail("fade windows must be sorted by start");
            // Each warning must fire after the previous fade has ended, so
            // the per-fade event sequence stays GoingDown, Gone, Up.
            if (w.start - s.prediction_lead <= prev.end())
                fail("fade windows too close: warning would overlap the previous fade");
        }
    }
}

} // namespace ackhold
