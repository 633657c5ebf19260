#include "freqlab/harness/emit.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "freqlab/error.hpp"
#include "freqlab/harness/json_text.hpp"

namespace freqlab::harness {

namespace {

void dump(std::string& out, const nlohmann::json& v, int indent, int depth) {
    auto newline = [&](int d) {
        if (indent < 0) return;
        out += '\n';
        out.append(static_cast<std::size_t>(indent * d), ' ');
    };
    switch (v.type()) {
        case nlohmann::json::value_t::object: {
            if (v.empty()) {
                out += "{}";
                return;
            }
            out += '{';
            bool first = true;
            // nlohmann's default object is an ordered std::map, so keys come out sorted.
            for (auto it = v.begin(); it != v.end(); ++it) {
                if (!first) out += ',';
                first = false;
                newline(depth + 1);
                out += nlohmann::json(it.key()).dump();
                out += indent < 0 ? ":" : ": ";
                dump(out, it.value(), indent, depth + 1);
            }
            newline(depth);
            out += '}';
            return;
        }
        case nlohmann::json::value_t::array: {
            if (v.empty()) {
                out += "[]";
                return;
            }
            out += '[';
            bool first = true;
            for (const auto& e : v) {
                if (!first) out += ',';
                first = false;
                newline(depth + 1);
                dump(out, e, indent, depth + 1);
            }
            newline(depth);
            out += ']';
            return;
        }
        case nlohmann::json::value_t::number_float: {
            const double d = v.get<double>();
            out += std::isfinite(d) ? format_real(d) : "null";
            return;
        }
        default:
            out += v.dump();
    }
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

}  // namespace

std::string format_real(double v) {
    if (!std::isfinite(v)) return {};
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string dump_json(const nlohmann::json& value, int indent) {
    std::string out;
    dump(out, value, indent, 0);
    return out;
}

void write_csv(std::ostream& out, std::span<const ResultRecord> records) {
    out << kCsvHeader << '\n';
    for (const auto& r : records) {
        const std::string tail = csv_field(r.grid) + ',' + format_real(r.dt) + ',' + format_real(r.M) + ',' +
                                 format_real(r.T) + ',' + format_real(r.lambda) + ',' + format_real(r.gamma);
        for (const auto& c : r.checks) {
            out << r.scenario_id << ',' << csv_field(c.name) << ',' << to_string(c.status) << ','
                << format_real(c.margin) << ',' << format_real(c.fitted_constant) << ',' << tail << '\n';
        }
    }
}

void write_json(std::ostream& out, std::span<const ResultRecord> records, bool include_timing) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : records) arr.push_back(to_json(r, include_timing));
    out << dump_json(arr, 1) << '\n';
}

std::filesystem::path emit_results(std::span<const ResultRecord> records, const std::string& format,
                                   const std::filesystem::path& dir, const std::string& stem) {
    require(format == "csv" || format == "json", ErrorCode::ValidationError, "format must be csv or json");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    require(!ec, ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
    const auto path = dir / (stem + "." + format);
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), ErrorCode::IoError, "cannot open " + path.string());
    if (format == "csv") write_csv(out, records);
    else write_json(out, records);
    out.flush();
    require(static_cast<bool>(out), ErrorCode::IoError, "write failed: " + path.string());
    return path;
}

std::vector<ResultRecord> read_results(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), ErrorCode::IoError, "cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    std::vector<ResultRecord> out;
    try {
        const auto first = text.find_first_not_of(" \t\r\n");
        if (first != std::string::npos && text[first] == '[') {
            for (const auto& j : nlohmann::json::parse(text)) out.push_back(record_from_json(j));
            return out;
        }
        std::istringstream lines(text);
        std::string line;
        while (std::getline(lines, line)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            out.push_back(record_from_json(nlohmann::json::parse(line)));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
    return out;
}

}  // namespace freqlab::harness
