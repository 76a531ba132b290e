#include "dsrc/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dsrc/errors.hpp"

namespace dsrc {

void validate(const ScenarioParams& p) {
    if (!(p.lambda > 0)) throw InvalidParams("lambda", "lambda must be > 0");
    if (p.n_vehicles < 1) throw InvalidParams("n_vehicles", "n_vehicles must be >= 1");
    if (p.cw < 1) throw InvalidParams("cw", "cw must be >= 1");
    if (!(p.slot > 0)) throw InvalidParams("slot", "slot must be > 0");
    if (!(p.difs > 0)) throw InvalidParams("difs", "difs must be > 0");
    if (!(p.data_rate > 0)) throw InvalidParams("data_rate", "data_rate must be > 0");
    if (p.payload_bytes < 0) throw InvalidParams("payload_bytes", "payload_bytes must be >= 0");
    if (p.mac_header_bytes < 0) throw InvalidParams("mac_header_bytes", "mac_header_bytes must be >= 0");
    if (p.phy_preamble < 0) throw InvalidParams("phy_preamble", "phy_preamble must be >= 0");
    if (p.plcp_header < 0) throw InvalidParams("plcp_header", "plcp_header must be >= 0");
    if (p.prop_delay < 0) throw InvalidParams("prop_delay", "prop_delay must be >= 0");
    if (!(p.spcdc_c >= 1)) throw InvalidParams("spcdc_c", "spcdc_c must be >= 1");
    if (!(p.spcdc_period > 0)) throw InvalidParams("spcdc_period", "spcdc_period must be > 0");

    // The slotted channel needs DIFS on the slot grid.
    const double ratio = p.difs / p.slot;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio)) {
        throw InvalidParams("difs", "difs must be an integer multiple of slot");
    }

    // Transmission delay checks live in derive_timing (they need t_tr).
    const double t_header =
        p.phy_preamble + p.plcp_header + p.mac_header_bytes * 8.0 / p.data_rate;
    const double t_tr = p.payload_bytes * 8.0 / p.data_rate + t_header + p.prop_delay;
    if (!(t_tr > 0)) {
        throw InvalidParams("t_tr",
                            "derived transmission delay is zero; slots_per_tx >= 1 unsatisfiable");
    }
    if (!(1.0 / p.lambda > t_tr)) {
        throw InvalidParams(
            "lambda", "1/lambda must exceed the transmission delay (no packet replacement)");
    }
}

DerivedTiming derive_timing(const ScenarioParams& p) {
    validate(p);
    DerivedTiming t;
    t.t_header = p.phy_preamble + p.plcp_header + p.mac_header_bytes * 8.0 / p.data_rate;
    t.t_tr = p.payload_bytes * 8.0 / p.data_rate + t.t_header + p.prop_delay;
    const double r = t.t_tr / p.slot;
    auto n = static_cast<std::int64_t>(std::ceil(r));
    // Guard against an upward rounding fuzz when t_tr is an exact multiple.
    if (n > 1 && static_cast<double>(n - 1) * p.slot >= t.t_tr) --n;
    t.slots_per_tx = std::max<std::int64_t>(n, 1);
    return t;
}

KeyValues parse_kv_text(const std::string& text) {
    KeyValues kv;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        for (auto& ch : line) {
            if (ch == '=') ch = ' ';
        }
        std::istringstream ls(line);
        std::string key, value, tok;
        if (!(ls >> key)) continue;  // blank
        // join remaining tokens so comma lists may be written with spaces
        while (ls >> tok) value += tok;
        kv[key] = value;
    }
    return kv;
}

KeyValues parse_json_object(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    if (!j.is_object()) throw InvalidParams("scenario", "JSON scenario must be an object");
    KeyValues kv;
    for (const auto& [key, value] : j.items()) {
        if (value.is_string()) kv[key] = value.get<std::string>();
        else kv[key] = value.dump();
    }
    return kv;
}

namespace {

double to_double(const std::string& key, const std::string& s) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw InvalidParams(key, "cannot parse numeric value '" + s + "' for " + key);
    }
}

}  // namespace

ScenarioParams scenario_from_kv(const KeyValues& kv, const ScenarioParams& defaults) {
    ScenarioParams p = defaults;
    for (const auto& [key, value] : kv) {
        if (key == "lambda") p.lambda = to_double(key, value);
        else if (key == "n_vehicles") p.n_vehicles = static_cast<int>(std::llround(to_double(key, value)));
        else if (key == "cw") p.cw = static_cast<int>(std::llround(to_double(key, value)));
        else if (key == "slot") p.slot = to_double(key, value);
        else if (key == "difs") p.difs = to_double(key, value);
        else if (key == "payload_bytes") p.payload_bytes = to_double(key, value);
        else if (key == "data_rate") p.data_rate = to_double(key, value);
        else if (key == "phy_preamble") p.phy_preamble = to_double(key, value);
        else if (key == "plcp_header") p.plcp_header = to_double(key, value);
        else if (key == "mac_header_bytes") p.mac_header_bytes = to_double(key, value);
        else if (key == "prop_delay") p.prop_delay = to_double(key, value);
        else if (key == "spcdc_c") p.spcdc_c = to_double(key, value);
        else if (key == "spcdc_period") p.spcdc_period = to_double(key, value);
        // other keys belong to the sweep layer
    }
    return p;
}

KeyValues load_kv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidParams("scenario", "cannot open scenario file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') return parse_json_object(text);
    return parse_kv_text(text);
}

ScenarioParams load_scenario_file(const std::string& path) {
    return scenario_from_kv(load_kv_file(path));
}

std::string scenario_to_kv_text(const ScenarioParams& p) {
    std::ostringstream out;
    out.precision(17);
    out << "lambda " << p.lambda << "\n"
        << "n_vehicles " << p.n_vehicles << "\n"
        << "cw " << p.cw << "\n"
        << "slot " << p.slot << "\n"
        << "difs " << p.difs << "\n"
        << "payload_bytes " << p.payload_bytes << "\n"
        << "data_rate " << p.data_rate << "\n"
        << "phy_preamble " << p.phy_preamble << "\n"
        << "plcp_header " << p.plcp_header << "\n"
        << "mac_header_bytes " << p.mac_header_bytes << "\n"
        << "prop_delay " << p.prop_delay << "\n"
        << "spcdc_c " << p.spcdc_c << "\n"
        << "spcdc_period " << p.spcdc_period << "\n";
    return out.str();
}

}  // namespace dsrc
