#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "edgegov/orch/campaign.hpp"

namespace edgegov::orch {

inline constexpr std::string_view kRecordsHeader =
    "freq_khz,load_pct,bogo_ops_per_sec,power_w,duration_s,repetition,timestamp";

std::string records_to_csv(const std::vector<BenchmarkRecord>& records);
/// Throws FormatError naming expected/actual columns, or the bad line.
std::vector<BenchmarkRecord> records_from_csv(std::string_view text);

/// Atomic write; IoError carries the path.
void persist_records(const std::vector<BenchmarkRecord>& records, const std::string& path);
std::vector<BenchmarkRecord> load_records(const std::string& path);

}  // namespace edgegov::orch
