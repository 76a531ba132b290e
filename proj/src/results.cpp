#include "dsrc/results.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dsrc/errors.hpp"

namespace dsrc {

const char* const kResultCsvHeader =
    "case_id,n_vehicles,policy,source,pdr,pdr_ci,mean_delay_s,mean_reception_delay_s,"
    "contention_density,overload_drops,runtime_s,seed,error";

namespace {

// Shortest round-trip decimal form; parsing it back restores the exact bits,
// which is what makes the write-read-write cycle byte-identical.
std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view s, const char* what) {
    double v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw std::runtime_error(std::string("bad numeric CSV field for ") + what + ": '" +
                                 std::string(s) + "'");
    }
    return v;
}

bool needs_quoting(const std::string& s) {
    return s.find_first_of(",\"\n") != std::string::npos;
}

std::string quote(const std::string& s) {
    if (!needs_quoting(s)) return s;
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

}  // namespace

std::string result_row_to_csv(const ResultRow& r) {
    std::ostringstream out;
    out << quote(r.case_id) << ',' << r.n_vehicles << ',' << quote(r.policy) << ','
        << quote(r.source) << ',' << fmt(r.pdr) << ','
        << (r.pdr_ci ? fmt(*r.pdr_ci) : std::string()) << ',' << fmt(r.mean_delay_s) << ','
        << fmt(r.mean_reception_delay_s) << ',' << fmt(r.contention_density) << ','
        << r.overload_drops << ',' << fmt(r.runtime_s) << ',' << r.seed << ','
        << quote(r.error);
    return out.str();
}

ResultRow result_row_from_csv(const std::string& line) {
    const auto f = split_csv(line);
    if (f.size() != 13) {
        throw std::runtime_error("result CSV line has " + std::to_string(f.size()) +
                                 " fields, expected 13");
    }
    ResultRow r;
    r.case_id = f[0];
    r.n_vehicles = static_cast<int>(parse_double(f[1], "n_vehicles"));
    r.policy = f[2];
    r.source = f[3];
    r.pdr = parse_double(f[4], "pdr");
    if (!f[5].empty()) r.pdr_ci = parse_double(f[5], "pdr_ci");
    r.mean_delay_s = parse_double(f[6], "mean_delay_s");
    r.mean_reception_delay_s = parse_double(f[7], "mean_reception_delay_s");
    r.contention_density = parse_double(f[8], "contention_density");
    r.overload_drops = static_cast<std::uint64_t>(parse_double(f[9], "overload_drops"));
    r.runtime_s = parse_double(f[10], "runtime_s");
    r.seed = static_cast<std::uint64_t>(parse_double(f[11], "seed"));
    r.error = f[12];
    return r;
}

void write_results_csv(const std::string& path, const std::vector<ResultRow>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << kResultCsvHeader << '\n';
    for (const auto& r : rows) out << result_row_to_csv(r) << '\n';
}

std::vector<ResultRow> read_results_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + " is empty");
    if (line != kResultCsvHeader) throw std::runtime_error(path + " has an unexpected header");
    std::vector<ResultRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        rows.push_back(result_row_from_csv(line));
    }
    return rows;
}

void write_results_json(const std::string& path, const std::vector<ResultRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json j{{"case_id", r.case_id},
                         {"n_vehicles", r.n_vehicles},
                         {"policy", r.policy},
                         {"source", r.source},
                         {"pdr", r.pdr},
                         {"mean_delay_s", r.mean_delay_s},
                         {"mean_reception_delay_s", r.mean_reception_delay_s},
                         {"contention_density", r.contention_density},
                         {"overload_drops", r.overload_drops},
                         {"runtime_s", r.runtime_s},
                         {"seed", r.seed},
                         {"error", r.error}};
        if (r.pdr_ci) j["pdr_ci"] = *r.pdr_ci;
        else j["pdr_ci"] = nullptr;
        arr.push_back(std::move(j));
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << arr.dump(2) << '\n';
}

}  // namespace dsrc
