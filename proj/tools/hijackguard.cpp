#include <poll.h>
#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hijackguard/binderlog.hpp"
#include "hijackguard/error.hpp"
#include "hijackguard/risk.hpp"
#include "hijackguard/scan.hpp"
#include "hijackguard/scenario.hpp"

#ifndef HIJACKGUARD_DATA_DIR
#define HIJACKGUARD_DATA_DIR "data"
#endif

namespace {

using namespace hijackguard;

std::string default_catalog_path() {
    if (const char* env = std::getenv("HIJACKGUARD_CATALOG")) return env;
    return std::string(HIJACKGUARD_DATA_DIR) + "/catalog.txt";
}

SystemCatalog catalog_for(const std::string& flag_value) {
    return load_catalog_file(flag_value.empty() ? default_catalog_path() : flag_value);
}

// Blocks on stdin for up to timeout_s; unanswered prompts time out.
std::optional<bool> prompt_on_stdin(const std::string& question, int timeout_s) {
    std::cerr << question << " [allow/deny] " << std::flush;
    struct pollfd fd = {STDIN_FILENO, POLLIN, 0};
    if (poll(&fd, 1, timeout_s * 1000) <= 0) {
        std::cerr << "(timeout)\n";
        return std::nullopt;
    }
    std::string answer;
    if (!std::getline(std::cin, answer)) return std::nullopt;
    return answer == "allow" || answer == "a" || answer == "y" || answer == "yes";
}

// The CLI form script:FILE reads one allow/deny answer per line and turns
// it into the inline script form the scenario runner understands.
std::string expand_oracle_spec(const std::string& spec) {
    if (!spec.starts_with("script:")) return spec;
    std::string file = spec.substr(7);
    std::ifstream in(file);
    if (!in) throw Error(ErrorKind::Io, "cannot open oracle script: " + file);
    std::string line;
    std::string inline_spec = "script:";
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!first) inline_spec += ',';
        inline_spec += line;
        first = false;
    }
    return inline_spec;
}

int cmd_scan(const std::vector<std::string>& files, const std::string& catalog_flag,
             bool legacy) {
    SystemCatalog cat = catalog_for(catalog_flag);
    ScanOutput output = run_scan(files, cat, legacy ? RiskRules::Legacy : RiskRules::Final);
    std::cout << render_scan_tsv(output);
    for (const std::string& err : output.file_errors) std::cerr << "error: " << err << '\n';
    if (!output.file_errors.empty()) return 1;
    return output.any_risky ? 2 : 0;
}

int cmd_simulate(const std::string& scenario_file, const std::string& catalog_flag,
                 std::optional<std::uint64_t> seed, const std::string& oracle_spec) {
    SystemCatalog cat = catalog_for(catalog_flag);
    Scenario scenario = load_scenario_file(scenario_file);
    std::string default_spec = expand_oracle_spec(oracle_spec);
    // validate early so a bad flag fails before any output
    (void)make_oracle(default_spec);
    ScenarioRun run =
        run_scenario(scenario, cat, default_spec, seed, std::cout, prompt_on_stdin);
    return run.errors > 0 ? 1 : 0;
}

int cmd_binder(const std::string& log_file, const std::string& procs_file, int callee_pid,
               const std::string& catalog_flag) {
    SystemCatalog cat = catalog_for(catalog_flag);
    std::vector<BinderTransaction> log = load_transaction_log_file(log_file);
    ProcessTable procs = load_process_table_file(procs_file);
    CallerRecovery rec = recover_caller(log, callee_pid, procs, cat);
    std::cout << "pid=" << rec.pid << " uid=" << rec.identity.uid
              << " package=" << rec.identity.package << '\n';
    return 0;
}

int cmd_stub_estimate(const std::string& manifest_file, const std::string& catalog_flag,
                      bool legacy) {
    SystemCatalog cat = catalog_for(catalog_flag);
    AppManifest m = load_manifest_file(manifest_file);
    RiskReport report = identify_risky(m, cat, legacy ? RiskRules::Legacy : RiskRules::Final);
    std::cout << "component\tkind\tentries\tstub_lines\n";
    int total_entries = 0;
    for (const ComponentDecl& c : m.components) {
        auto it = report.per_component.find(c.name);
        if (it == report.per_component.end() || !it->second.risky) continue;
        int entries = static_cast<int>(entry_functions(c).size());
        total_entries += entries;
        std::cout << c.name << '\t' << component_kind_name(c.kind) << '\t' << entries << '\t'
                  << 2 * entries << '\n';
    }
    std::cout << "TOTAL\t-\t" << total_entries << '\t' << estimate_stub_lines(report, m)
              << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"In-app access control toolkit: component risk scanning, IPC policy "
                 "simulation, and binder log forensics"};
    app.require_subcommand(1);

    std::string catalog_flag;
    app.add_option("--catalog", catalog_flag,
                   "catalog file (default: $HIJACKGUARD_CATALOG or the bundled catalog)");

    auto* scan = app.add_subcommand("scan", "risk-scan manifest files (TSV report)");
    std::vector<std::string> scan_files;
    bool scan_legacy = false;
    scan->add_option("manifests", scan_files, "manifest files");
    scan->add_flag("--legacy-rules", scan_legacy, "use the earlier identification rules");

    auto* simulate = app.add_subcommand("simulate", "run a scenario file (JSON lines out)");
    std::string scenario_file;
    std::string oracle_spec = "deny";
    std::uint64_t seed_flag = 0;
    simulate->add_option("--scenario", scenario_file, "scenario JSON file")->required();
    simulate->add_option("--seed", seed_flag, "override the scenario seed");
    simulate->add_option("--oracle", oracle_spec,
                         "default alert decision: allow|deny|script:FILE|prompt");

    auto* binder = app.add_subcommand("binder", "recover the caller from a transaction log");
    std::string log_file, procs_file;
    int callee_pid = 0;
    binder->add_option("--log", log_file, "transaction log file")->required();
    binder->add_option("--procs", procs_file, "process table file")->required();
    binder->add_option("--callee", callee_pid, "callee pid")->required();

    auto* stub = app.add_subcommand("stub-estimate", "stub-code footprint for one manifest");
    std::string stub_manifest;
    bool stub_legacy = false;
    stub->add_option("--manifest", stub_manifest, "manifest file")->required();
    stub->add_flag("--legacy-rules", stub_legacy, "use the earlier identification rules");

    CLI11_PARSE(app, argc, argv);

    try {
        if (scan->parsed()) return cmd_scan(scan_files, catalog_flag, scan_legacy);
        if (simulate->parsed())
            return cmd_simulate(scenario_file, catalog_flag,
                                simulate->count("--seed")
                                    ? std::optional<std::uint64_t>(seed_flag)
                                    : std::nullopt,
                                oracle_spec);
        if (binder->parsed())
            return cmd_binder(log_file, procs_file, callee_pid, catalog_flag);
        if (stub->parsed()) return cmd_stub_estimate(stub_manifest, catalog_flag, stub_legacy);
    } catch (const hijackguard::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
