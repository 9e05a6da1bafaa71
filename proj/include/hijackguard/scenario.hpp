#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "hijackguard/sim.hpp"

namespace hijackguard {

/// One request as loaded from a scenario file; the typed IpcInput is built
/// at run time once the callee component's kind is known.
struct ScenarioRequest {
    std::string caller;
    std::string callee;
    std::string component;
    std::string entry;
    std::string input_json;                 // raw object, re-parsed per run
    std::optional<std::string> oracle_spec; // overrides the run default
};

struct Scenario {
    std::vector<std::string> install_files; // resolved to absolute-ish paths
    std::vector<ScenarioRequest> requests;
    std::uint64_t seed = 0;
};

/// Scenario JSON:
///   { "installs": ["file.xml", ...],
///     "seed": N,
///     "requests": [ { "caller": "..", "callee": "..", "component": "..",
///                     "entry": "..", "input": { ... },
///                     "oracle": "allow|deny|prompt|script:a,d,..." }, ... ] }
/// Install paths are resolved relative to the scenario file's directory.
Scenario load_scenario_file(const std::string& path);
Scenario parse_scenario(const std::string& text, const std::string& base_dir);

using PromptFn = std::function<std::optional<bool>(const std::string& question, int timeout_s)>;

/// "allow", "deny", "prompt", or "script:<answer>,<answer>,..." where an
/// answer is allow/deny (or a/d). Prompt oracles use the supplied prompter;
/// without one they always time out.
DecisionOracle make_oracle(const std::string& spec, PromptFn prompter = nullptr);

struct ScenarioRun {
    int requests_total = 0;
    int errors = 0;
};

/// Installs the listed apps, dispatches every request, and writes one JSON
/// object per request ({"verdict","policy","executed","replayed"}) to out.
/// Request-level failures produce an {"error": ...} record instead. The
/// stream is byte-stable for a fixed scenario and seed.
ScenarioRun run_scenario(const Scenario& scenario, const SystemCatalog& catalog,
                         const std::string& default_oracle_spec,
                         std::optional<std::uint64_t> seed_override, std::ostream& out,
                         PromptFn prompter = nullptr);

} // namespace hijackguard
