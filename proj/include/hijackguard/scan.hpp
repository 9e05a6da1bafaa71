#pragma once

#include <array>
#include <string>
#include <vector>

#include "hijackguard/risk.hpp"

namespace hijackguard {

struct ScanRow {
    std::string package;
    std::array<KindCounts, 4> counts; // Activity, Service, Receiver, Provider
    int custom_permission_count = 0;
    int stub_lines = 0;
};

struct ScanOutput {
    std::vector<ScanRow> rows; // sorted by package
    std::vector<std::string> file_errors;
    bool any_risky = false;
};

ScanOutput run_scan(const std::vector<std::string>& manifest_paths, const SystemCatalog& cat,
                    RiskRules rules = RiskRules::Final);

/// One TSV row per app, stable ordering; columns:
/// package, per-kind explicit/implicit/total, custom_perms, per-kind risky,
/// stub_lines.
std::string render_scan_tsv(const ScanOutput& output);

} // namespace hijackguard
