#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace dsrc {

/// Everything an experiment needs to know about one operating point.
/// SI units throughout: seconds, bits per second, bytes.
struct ScenarioParams {
    double lambda = 10.0;            ///< packet generation rate, packets/s
    int n_vehicles = 10;             ///< vehicles in the fully connected network
    int cw = 16;                     ///< fixed contention window (802.11p backoff draw range)
    double slot = 16e-6;             ///< backoff slot duration, s
    double difs = 64e-6;             ///< DIFS, s; must be an integer multiple of slot
    double payload_bytes = 200.0;    ///< mean payload length, bytes (MAC header excluded)
    double data_rate = 6e6;          ///< channel rate, bit/s
    double phy_preamble = 28e-6;     ///< s
    double plcp_header = 4e-6;       ///< s
    double mac_header_bytes = 50.0;  ///< bytes, transmitted at data_rate
    double prop_delay = 0.0;         ///< propagation delay, s
    double spcdc_c = 3.0;            ///< SpCDC backoff multiplier C
    double spcdc_period = 1.0;       ///< semi-persistent period, s
};

struct DerivedTiming {
    double t_header = 0.0;          ///< header airtime, s
    double t_tr = 0.0;              ///< full transmission delay, s
    std::int64_t slots_per_tx = 0;  ///< slots a transmission occupies on the grid
};

/// Throws InvalidParams naming the first violated field.
void validate(const ScenarioParams& p);

/// Header airtime = PHY preamble + PLCP header + MAC header bits at the data
/// rate; t_tr = payload airtime + header airtime + propagation delay;
/// slots_per_tx = ceil(t_tr / slot). Validates `p` first.
DerivedTiming derive_timing(const ScenarioParams& p);

using KeyValues = std::map<std::string, std::string>;

/// Flat `key value` / `key = value` text, one entry per line, '#' comments.
KeyValues parse_kv_text(const std::string& text);
/// JSON object rendered to the same string map.
KeyValues parse_json_object(const std::string& text);

/// Builds params from a key-value map on top of `defaults`. Unknown keys are
/// ignored (the sweep loader owns those). Throws InvalidParams on bad values.
ScenarioParams scenario_from_kv(const KeyValues& kv, const ScenarioParams& defaults = {});

/// Reads a scenario file; accepts key-value text or a JSON object
/// interchangeably (sniffs the first non-space character).
ScenarioParams load_scenario_file(const std::string& path);
KeyValues load_kv_file(const std::string& path);

std::string scenario_to_kv_text(const ScenarioParams& p);

}  // namespace dsrc
