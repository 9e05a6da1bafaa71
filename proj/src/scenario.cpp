#include "hijackguard/scenario.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hijackguard/error.hpp"
#include "hijackguard/risk.hpp"

namespace hijackguard {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void bad_scenario(const std::string& what) {
    throw Error(ErrorKind::MalformedScenario, what);
}

void require_keys(const json& obj, std::initializer_list<const char*> allowed,
                  const char* where) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) bad_scenario(std::string("unknown key '") + key + "' in " + where);
    }
}

std::string dir_of(const std::string& path) {
    size_t slash = path.find_last_of('/');
    return slash == std::string::npos ? std::string(".") : path.substr(0, slash);
}

} // namespace

Scenario parse_scenario(const std::string& text, const std::string& base_dir) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) bad_scenario("invalid JSON");
    if (!doc.is_object()) bad_scenario("top level must be an object");
    require_keys(doc, {"installs", "requests", "seed"}, "scenario");

    Scenario scenario;
    if (!doc.contains("installs") || !doc["installs"].is_array())
        bad_scenario("'installs' must be an array of manifest files");
    for (const json& item : doc["installs"]) {
        if (!item.is_string()) bad_scenario("'installs' entries must be strings");
        std::string file = item.get<std::string>();
        scenario.install_files.push_back(
            file.starts_with('/') ? file : base_dir + "/" + file);
    }
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned()) bad_scenario("'seed' must be an unsigned number");
        scenario.seed = doc["seed"].get<std::uint64_t>();
    }
    if (!doc.contains("requests") || !doc["requests"].is_array())
        bad_scenario("'requests' must be an array");
    for (const json& item : doc["requests"]) {
        if (!item.is_object()) bad_scenario("requests must be objects");
        require_keys(item, {"caller", "callee", "component", "entry", "input", "oracle"},
                     "request");
        ScenarioRequest req;
        for (const char* key : {"caller", "callee", "component", "entry"}) {
            if (!item.contains(key) || !item[key].is_string())
                bad_scenario(std::string("request needs string '") + key + "'");
        }
        req.caller = item["caller"].get<std::string>();
        req.callee = item["callee"].get<std::string>();
        req.component = item["component"].get<std::string>();
        req.entry = item["entry"].get<std::string>();
        req.input_json = item.contains("input") ? item["input"].dump() : "{}";
        if (item.contains("oracle")) {
            if (!item["oracle"].is_string()) bad_scenario("'oracle' must be a string");
            req.oracle_spec = item["oracle"].get<std::string>();
        }
        scenario.requests.push_back(std::move(req));
    }
    return scenario;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), dir_of(path));
}

DecisionOracle make_oracle(const std::string& spec, PromptFn prompter) {
    if (spec == "allow") return DecisionOracle::always_allow();
    if (spec == "deny") return DecisionOracle::always_deny();
    if (spec == "prompt") {
        DecisionOracle oracle;
        oracle.kind = DecisionOracle::Kind::Prompt;
        oracle.prompter = std::move(prompter);
        return oracle;
    }
    if (spec.starts_with("script:")) {
        std::vector<bool> answers;
        std::stringstream in(spec.substr(7));
        std::string item;
        while (std::getline(in, item, ',')) {
            if (item == "allow" || item == "a")
                answers.push_back(true);
            else if (item == "deny" || item == "d")
                answers.push_back(false);
            else
                bad_scenario("bad script answer '" + item + "'");
        }
        return DecisionOracle::scripted(std::move(answers));
    }
    bad_scenario("unknown oracle '" + spec + "' (allow|deny|prompt|script:...)");
}

namespace {

IpcInput build_input(const DeviceModel& device, const ScenarioRequest& req) {
    const AppManifest* callee = device.find_app(req.callee);
    if (!callee) throw Error(ErrorKind::UnknownCallee, req.callee + " is not installed");
    const ComponentDecl* component = callee->find_component(req.component);
    if (!component)
        throw Error(ErrorKind::UnknownComponent,
                    req.callee + " has no component " + req.component);

    json input = json::parse(req.input_json);
    if (!input.is_object()) bad_scenario("'input' must be an object");

    if (component->kind == ComponentKind::Provider) {
        require_keys(input, {"uri", "args"}, "provider input");
        ProviderCallInput call;
        call.entry = req.entry;
        if (input.contains("uri")) call.uri = input["uri"].get<std::string>();
        if (input.contains("args"))
            for (const json& arg : input["args"])
                call.args.push_back(arg.is_null()
                                        ? std::optional<std::string>{}
                                        : std::optional<std::string>{arg.get<std::string>()});
        return call;
    }
    const auto& ifaces = component->bound_interfaces;
    if (std::find(ifaces.begin(), ifaces.end(), req.entry) != ifaces.end()) {
        require_keys(input, {"args"}, "bound-call input");
        BoundCallInput call;
        call.interface = req.entry;
        if (input.contains("args"))
            for (const json& arg : input["args"]) call.args.push_back(arg.get<std::string>());
        return call;
    }
    require_keys(input, {"action", "uri", "categories", "extras"}, "intent input");
    IntentInput intent;
    if (input.contains("action") && !input["action"].is_null())
        intent.action = input["action"].get<std::string>();
    if (input.contains("uri") && !input["uri"].is_null())
        intent.uri = input["uri"].get<std::string>();
    if (input.contains("categories"))
        for (const json& cat : input["categories"])
            intent.categories.push_back(cat.get<std::string>());
    if (input.contains("extras"))
        for (const auto& [key, value] : input["extras"].items())
            intent.extras[key] = value.get<std::string>();
    return intent;
}

ordered_json outcome_record(const DispatchOutcome& outcome) {
    ordered_json record;
    record["verdict"] = decision_name(outcome.verdict.decision);
    record["policy"] =
        outcome.verdict.policy ? json(policy_id_name(*outcome.verdict.policy)) : json(nullptr);
    record["executed"] = outcome.executed;
    record["replayed"] = outcome.replayed;
    return record;
}

} // namespace

ScenarioRun run_scenario(const Scenario& scenario, const SystemCatalog& catalog,
                         const std::string& default_oracle_spec,
                         std::optional<std::uint64_t> seed_override, std::ostream& out,
                         PromptFn prompter) {
    DeviceModel device = make_device(catalog);
    for (const std::string& file : scenario.install_files)
        install(device, load_manifest_file(file));

    Rng rng(seed_override.value_or(scenario.seed));
    ScenarioRun run;
    for (const ScenarioRequest& sreq : scenario.requests) {
        ++run.requests_total;
        try {
            IpcRequest req;
            req.caller_package = sreq.caller;
            req.callee_package = sreq.callee;
            req.callee_component = sreq.component;
            req.entry = sreq.entry;
            req.input = build_input(device, sreq);
            DecisionOracle oracle =
                make_oracle(sreq.oracle_spec.value_or(default_oracle_spec), prompter);
            DispatchOutcome outcome = dispatch(device, req, oracle, rng);
            out << outcome_record(outcome).dump() << '\n';
        } catch (const Error& e) {
            ++run.errors;
            ordered_json record;
            record["error"] = e.what();
            out << record.dump() << '\n';
        }
    }
    return run;
}

} // namespace hijackguard
