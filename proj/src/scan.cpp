#include "hijackguard/scan.hpp"

#include <algorithm>
#include <sstream>

#include "hijackguard/error.hpp"

namespace hijackguard {

ScanOutput run_scan(const std::vector<std::string>& manifest_paths, const SystemCatalog& cat,
                    RiskRules rules) {
    ScanOutput output;
    for (const std::string& path : manifest_paths) {
        try {
            AppManifest m = load_manifest_file(path);
            RiskReport report = identify_risky(m, cat, rules);
            ScanRow row;
            row.package = m.identity.package;
            row.counts = report.counts;
            row.custom_permission_count = static_cast<int>(m.defined_permissions.size());
            row.stub_lines = estimate_stub_lines(report, m);
            if (report.risky_total() > 0) output.any_risky = true;
            output.rows.push_back(std::move(row));
        } catch (const Error& e) {
            output.file_errors.push_back(path + ": " + e.what());
        }
    }
    std::sort(output.rows.begin(), output.rows.end(),
              [](const ScanRow& a, const ScanRow& b) { return a.package < b.package; });
    return output;
}

std::string render_scan_tsv(const ScanOutput& output) {
    std::ostringstream out;
    out << "package";
    for (const char* kind : {"activity", "service", "receiver", "provider"})
        out << '\t' << kind << "_explicit\t" << kind << "_implicit\t" << kind << "_total";
    out << "\tcustom_perms";
    for (const char* kind : {"activity", "service", "receiver", "provider"})
        out << "\trisky_" << kind;
    out << "\tstub_lines\n";
    for (const ScanRow& row : output.rows) {
        out << row.package;
        for (const KindCounts& kc : row.counts)
            out << '\t' << kc.explicit_exported << '\t' << kc.implicit_exported << '\t'
                << kc.total;
        out << '\t' << row.custom_permission_count;
        for (const KindCounts& kc : row.counts) out << '\t' << kc.risky;
        out << '\t' << row.stub_lines << '\n';
    }
    return out.str();
}

} // namespace hijackguard
