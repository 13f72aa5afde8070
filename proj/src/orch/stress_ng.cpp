#include "edgegov/orch/stress_ng.hpp"

#include <cstdio>
#include <sstream>
#include <vector>

#include "edgegov/io/atomic_file.hpp"

namespace edgegov::orch {

namespace {

std::vector<std::string> tokens(std::string_view s) {
    std::istringstream in{std::string(s)};
    std::vector<std::string> out;
    for (std::string t; in >> t;) out.push_back(t);
    return out;
}

std::optional<double> to_number(std::string s) {
    if (!s.empty() && s.back() == 's') s.pop_back();
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos == s.size()) return v;
    } catch (const std::exception&) {
    }
    return std::nullopt;
}

}  // namespace

std::string cpufreq_set_command(Kilohertz freq) { return "cpufreq-set -r -f " + std::to_string(freq.value); }

std::string stressor_command(int load_pct, double duration) {
    const auto t = io::format_double(duration);
    if (load_pct == 0) return "sleep " + t;
    return "stress-ng --cpu 0 --cpu-load " + std::to_string(load_pct) + " --timeout " + t + "s --metrics-brief";
}

ParsedCommand parse_command(std::string_view command) {
    const auto t = tokens(command);
    ParsedCommand out;
    if (t.empty()) return out;
    std::size_t i = 0;
    if (t[0] == "sudo") ++i;
    if (i >= t.size()) return out;
    if (t[i] == "cpufreq-set") {
        for (std::size_t j = i + 1; j + 1 < t.size(); ++j)
            if (t[j] == "-f")
                if (auto v = to_number(t[j + 1])) {
                    out.kind = ParsedCommand::Kind::cpufreq_set;
                    out.freq = Kilohertz{static_cast<std::int64_t>(*v)};
                }
    } else if (t[i] == "stress-ng") {
        out.kind = ParsedCommand::Kind::stress_ng;
        for (std::size_t j = i + 1; j + 1 < t.size(); ++j) {
            if (t[j] == "--cpu-load") {
                if (auto v = to_number(t[j + 1])) out.load_pct = static_cast<int>(*v);
            } else if (t[j] == "--timeout") {
                if (auto v = to_number(t[j + 1])) out.timeout = *v;
            }
        }
    } else if (t[i] == "sleep" && i + 1 < t.size()) {
        if (auto v = to_number(t[i + 1])) {
            out.kind = ParsedCommand::Kind::sleep;
            out.load_pct = 0;
            out.timeout = *v;
        }
    }
    return out;
}

std::string format_metrics_brief(double bogo_ops, double real_time, double usr_time, double sys_time) {
    char line[256];
    std::string out;
    out += "stress-ng: info:  [1] dispatching hogs: 4 cpu\n";
    out += "stress-ng: info:  [1] stressor       bogo ops real time  usr time  sys time   bogo ops/s     bogo ops/s\n";
    out += "stress-ng: info:  [1]                           (secs)    (secs)    (secs)   (real time) (usr+sys time)\n";
    const double cpu = usr_time + sys_time;
    std::snprintf(line, sizeof line, "stress-ng: info:  [1] cpu            %9.0f %9.2f %9.2f %9.2f %12.2f %14.2f\n",
                  bogo_ops, real_time, usr_time, sys_time, real_time > 0 ? bogo_ops / real_time : 0.0,
                  cpu > 0 ? bogo_ops / cpu : 0.0);
    out += line;
    out += "stress-ng: info:  [1] successful run completed in " + io::format_double(real_time) + "s\n";
    return out;
}

std::optional<double> parse_bogo_ops_per_sec(std::string_view output) {
    std::istringstream in{std::string(output)};
    for (std::string line; std::getline(in, line);) {
        auto t = tokens(line);
        // stress-ng: info: [pid] cpu <bogo ops> <real> <usr> <sys> <ops/s real> <ops/s usr+sys>
        for (std::size_t i = 0; i + 6 < t.size(); ++i) {
            if (t[i] != "cpu") continue;
            std::vector<double> nums;
            for (std::size_t j = i + 1; j < t.size(); ++j)
                if (auto v = to_number(t[j])) nums.push_back(*v);
                else break;
            if (nums.size() >= 5) return nums[4];
        }
    }
    return std::nullopt;
}

}  // namespace edgegov::orch
