#pragma once

#include <string>
#include <vector>

#include "warpcheck/suites.hpp"

namespace warpcheck {

inline constexpr const char* kEngineVersion = "1.0.0";
inline constexpr const char* kReportSchema = "warpcheck-report/1";

// Run-level settings recorded in every report; the same inputs always
// serialize to the same bytes (there is no clock anywhere in a report).
struct RunMeta {
    std::string manifest;
    SamplePlan plan;
    std::string diff = "jets";
    Tolerances tol;
};

// Machine-readable report, schema-versioned, deterministic byte-for-byte
// for fixed inputs.
std::string report_json(const RunMeta& meta, const std::vector<CheckResult>& checks);

// Aligned table for standard output.
std::string report_table(const std::vector<CheckResult>& checks);

}  // namespace warpcheck
