#include "edgegov/orch/records_csv.hpp"

#include <charconv>
#include <sstream>

#include "edgegov/errors.hpp"
#include "edgegov/io/atomic_file.hpp"

namespace edgegov::orch {

namespace {

std::vector<std::string_view> split_line(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        auto comma = line.find(',', pos);
        out.push_back(line.substr(pos, comma - pos));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

template <class T>
T parse_field(std::string_view s, std::size_t line_no, const char* column) {
    T v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw FormatError("line " + std::to_string(line_no) + ": bad value '" + std::string(s) + "' in column " +
                          column);
    return v;
}

}  // namespace

std::string records_to_csv(const std::vector<BenchmarkRecord>& records) {
    std::string out(kRecordsHeader);
    out += '\n';
    for (const auto& r : records) {
        out += std::to_string(r.config.freq.value) + ',' + std::to_string(r.load_pct) + ',' +
               io::format_double(r.bogo_ops_per_sec) + ',' + io::format_double(r.power) + ',' +
               io::format_double(r.duration) + ',' + std::to_string(r.repetition) + ',' +
               io::format_double(r.timestamp) + '\n';
    }
    return out;
}

std::vector<BenchmarkRecord> records_from_csv(std::string_view text) {
    std::vector<BenchmarkRecord> out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool header_seen = false;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!header_seen) {
            if (line != kRecordsHeader)
                throw FormatError("records header mismatch: expected '" + std::string(kRecordsHeader) + "', got '" +
                                  std::string(line) + "'");
            header_seen = true;
            continue;
        }
        if (line.empty()) continue;
        const auto f = split_line(line);
        if (f.size() != 7)
            throw FormatError("line " + std::to_string(line_no) + ": expected 7 columns, got " +
                              std::to_string(f.size()));
        BenchmarkRecord r;
        r.config.freq = Kilohertz{parse_field<std::int64_t>(f[0], line_no, "freq_khz")};
        r.load_pct = parse_field<int>(f[1], line_no, "load_pct");
        r.bogo_ops_per_sec = parse_field<double>(f[2], line_no, "bogo_ops_per_sec");
        r.power = parse_field<double>(f[3], line_no, "power_w");
        r.duration = parse_field<double>(f[4], line_no, "duration_s");
        r.repetition = parse_field<int>(f[5], line_no, "repetition");
        r.timestamp = parse_field<double>(f[6], line_no, "timestamp");
        out.push_back(r);
    }
    if (!header_seen)
        throw FormatError("records header mismatch: expected '" + std::string(kRecordsHeader) + "', got empty file");
    return out;
}

void persist_records(const std::vector<BenchmarkRecord>& records, const std::string& path) {
    io::write_atomic(path, records_to_csv(records));
}

std::vector<BenchmarkRecord> load_records(const std::string& path) {
    try {
        return records_from_csv(io::read_file(path));
    } catch (const FormatError& e) {
        throw FormatError(path + ": " + e.what());
    }
}

}  // namespace edgegov::orch
