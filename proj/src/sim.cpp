#include "hijackguard/sim.hpp"

#include <algorithm>
#include <deque>
#include <span>

#include "hijackguard/error.hpp"
#include "hijackguard/risk.hpp"

namespace hijackguard {

namespace {

struct SystemProcess {
    int pid;
    int uid;
    const char* name;
};

// Fixed processes present on every device. The hop pool delegates IPC
// traffic; "android" originates system broadcasts.
constexpr SystemProcess kSystemProcesses[] = {
    {1000, 1000, "android"},
    {1100, 1000, "servicemanager"},
    {1203, 1000, "surfaceflinger"},
    {1500, 1000, "system_server"},
};

constexpr int kHopPool[] = {1203, 1500, 1100}; // surfaceflinger, system_server, servicemanager
constexpr int kMaxHops = 3;

AppIdentity system_identity() {
    return {kSystemCallerPackage, "platform", 1000};
}

} // namespace

const AppManifest* DeviceModel::find_app(const std::string& package) const {
    auto it = std::find_if(installed.begin(), installed.end(), [&](const AppManifest& m) {
        return m.identity.package == package;
    });
    return it == installed.end() ? nullptr : &*it;
}

int DeviceModel::pid_of(const std::string& package) const {
    auto it = package_pids.find(package);
    if (it == package_pids.end())
        throw Error(ErrorKind::UnknownPid, "no process for package " + package);
    return it->second;
}

AppIdentity DeviceModel::identity_of(const std::string& package) const {
    if (package == kSystemCallerPackage) return system_identity();
    if (const AppManifest* app = find_app(package)) return app->identity;
    throw Error(ErrorKind::UnknownCaller, "package " + package + " is not installed");
}

DeviceModel make_device(SystemCatalog catalog) {
    DeviceModel device;
    device.catalog = std::move(catalog);
    for (const SystemProcess& proc : kSystemProcesses) {
        device.pid_map.entries[proc.pid] = {proc.uid, proc.name};
        device.package_pids[proc.name] = proc.pid;
    }
    return device;
}

void install(DeviceModel& device, AppManifest m) {
    if (device.find_app(m.identity.package))
        throw Error(ErrorKind::DuplicatePackage,
                    m.identity.package + " is already installed");
    m.identity.uid = device.next_app_uid++;
    int pid = device.next_app_pid++;
    device.pid_map.entries[pid] = {m.identity.uid, m.identity.package};
    device.package_pids[m.identity.package] = pid;
    for (const PermissionDecl& p : m.defined_permissions)
        device.permission_registry.emplace(p.name,
                                           PermRegistration{m.identity.package, p});
    device.installed.push_back(std::move(m));
}

std::optional<bool> DecisionOracle::decide(const std::string& question) {
    switch (kind) {
    case Kind::AlwaysAllow: return true;
    case Kind::AlwaysDeny: return false;
    case Kind::Scripted:
        if (script_pos >= script.size()) return std::nullopt; // exhausted = timeout
        return script[script_pos++];
    case Kind::Prompt:
        if (!prompter) return std::nullopt;
        return prompter(question, timeout_s);
    }
    return std::nullopt;
}

namespace {

void require_known_pid(const DeviceModel& device, int pid) {
    if (!device.pid_map.find(pid))
        throw Error(ErrorKind::UnknownPid, "pid " + std::to_string(pid) + " is not mapped");
}

BinderTransaction make_tx(DeviceModel& device, const char* action, int from, int to) {
    BinderTransaction tx;
    tx.txid = device.next_txid++;
    tx.action = action;
    tx.from_pid = from;
    tx.from_tid = from;
    tx.to_pid = to;
    tx.to_tid = to;
    tx.node_info = "node 0";
    return tx;
}

// A chain split into schedulable units: the call descent plus the callee's
// first reply is indivisible, every later reply is its own unit.
std::vector<std::vector<BinderTransaction>> chain_units(DeviceModel& device,
                                                        const ChainSpec& chain) {
    if (chain.hops < 0 || chain.hops > kMaxHops)
        throw Error(ErrorKind::UnknownPid,
                    "hop count " + std::to_string(chain.hops) + " out of range");
    require_known_pid(device, chain.caller_pid);
    require_known_pid(device, chain.callee_pid);

    std::vector<int> path;
    path.push_back(chain.caller_pid);
    for (int i = 0; i < chain.hops; ++i) path.push_back(kHopPool[i]);
    path.push_back(chain.callee_pid);

    std::vector<std::vector<BinderTransaction>> units;
    std::vector<BinderTransaction> descent;
    for (size_t i = 0; i + 1 < path.size(); ++i)
        descent.push_back(make_tx(device, "call", path[i], path[i + 1]));
    descent.push_back(make_tx(device, "reply", path.back(), path[path.size() - 2]));
    units.push_back(std::move(descent));
    for (size_t i = path.size() - 2; i > 0; --i)
        units.push_back({make_tx(device, "reply", path[i], path[i - 1])});
    return units;
}

} // namespace

std::vector<BinderTransaction> emit_binder_chain(DeviceModel& device, int caller_pid,
                                                 int callee_pid, int hops) {
    std::vector<BinderTransaction> emitted;
    for (auto& unit : chain_units(device, {caller_pid, callee_pid, hops}))
        for (BinderTransaction& tx : unit) emitted.push_back(std::move(tx));
    device.binder_log.insert(device.binder_log.end(), emitted.begin(), emitted.end());
    return emitted;
}

InterleavedEmission emit_interleaved_chains(DeviceModel& device,
                                            const std::vector<ChainSpec>& chains, Rng& rng) {
    // chain_units assigns txids in per-chain order; re-number after the
    // interleave so the log stays monotone.
    std::vector<std::deque<std::vector<BinderTransaction>>> pending;
    for (const ChainSpec& chain : chains) {
        auto units = chain_units(device, chain);
        pending.emplace_back(units.begin(), units.end());
    }

    InterleavedEmission out;
    for (;;) {
        std::vector<int> ready;
        for (size_t i = 0; i < pending.size(); ++i)
            if (!pending[i].empty()) ready.push_back(static_cast<int>(i));
        if (ready.empty()) break;
        int chain = ready[static_cast<size_t>(rng.below(static_cast<int>(ready.size())))];
        for (BinderTransaction& tx : pending[chain].front()) {
            out.transactions.push_back(std::move(tx));
            out.chain_of_transaction.push_back(chain);
        }
        pending[chain].pop_front();
    }

    std::uint64_t txid = out.transactions.empty() ? device.next_txid
                                                  : out.transactions.front().txid;
    for (BinderTransaction& tx : out.transactions) tx.txid = txid++;
    device.next_txid = txid;
    device.binder_log.insert(device.binder_log.end(), out.transactions.begin(),
                             out.transactions.end());
    return out;
}

namespace {

const ComponentDecl& require_component(const AppManifest& app, const std::string& name) {
    const ComponentDecl* c = app.find_component(name);
    if (!c)
        throw Error(ErrorKind::UnknownComponent,
                    app.identity.package + " has no component " + name);
    return *c;
}

bool entry_takes_intent(const ComponentDecl& c, const std::string& entry) {
    if (c.kind == ComponentKind::Provider) return false;
    return std::find(c.bound_interfaces.begin(), c.bound_interfaces.end(), entry) ==
           c.bound_interfaces.end();
}

void require_legal_entry(const ComponentDecl& c, const IpcRequest& req) {
    std::vector<std::string> legal = entry_functions(c);
    if (std::find(legal.begin(), legal.end(), req.entry) == legal.end())
        throw Error(ErrorKind::IllegalEntry,
                    req.entry + " is not an entry of " + component_kind_name(c.kind) + " " +
                        c.name);
    if (c.kind == ComponentKind::Provider) {
        const ProviderCallInput* call = std::get_if<ProviderCallInput>(&req.input);
        if (!call || call->entry != req.entry)
            throw Error(ErrorKind::IllegalEntry,
                        "provider entry " + req.entry + " requires a matching provider input");
        return;
    }
    if (entry_takes_intent(c, req.entry)) {
        if (!std::holds_alternative<IntentInput>(req.input))
            throw Error(ErrorKind::IllegalEntry, req.entry + " requires an intent input");
    } else {
        const BoundCallInput* call = std::get_if<BoundCallInput>(&req.input);
        if (!call || call->interface != req.entry)
            throw Error(ErrorKind::IllegalEntry,
                        "interface " + req.entry + " requires a matching bound-call input");
    }
}

// Pre-claim test behind P2. A caller claims the guard when it owns the
// registry entry for the name or lists it in uses-permission. A guard the
// callee itself declared at signature level counts as claimed whenever the
// registration belongs to someone else: an external call can only arrive
// once such a permission has been downgraded.
bool caller_claims_permission(const DeviceModel& device, const AppManifest& callee,
                              const AppIdentity& caller, const std::string& perm_name) {
    auto reg = device.permission_registry.find(perm_name);
    if (reg != device.permission_registry.end() && reg->second.owner == caller.package)
        return true;
    if (const AppManifest* caller_app = device.find_app(caller.package)) {
        const auto& used = caller_app->used_permissions;
        if (std::find(used.begin(), used.end(), perm_name) != used.end()) return true;
    }
    for (const PermissionDecl& p : callee.defined_permissions) {
        if (p.name != perm_name || p.level != PermissionLevel::Signature) continue;
        if (reg != device.permission_registry.end() &&
            reg->second.owner != callee.identity.package)
            return true;
    }
    return false;
}

std::optional<PermissionDecl> resolve_guard(const DeviceModel& device,
                                            const ComponentDecl& component) {
    if (!component.permission_guard) return std::nullopt;
    auto reg = device.permission_registry.find(*component.permission_guard);
    if (reg != device.permission_registry.end()) return reg->second.decl;
    if (const PermissionDecl* p = device.catalog.find_permission(*component.permission_guard))
        return *p;
    return std::nullopt;
}

} // namespace

Primitives collect_primitives(const DeviceModel& device, const IpcRequest& req,
                              size_t log_window_start) {
    const AppManifest* callee = device.find_app(req.callee_package);
    if (!callee)
        throw Error(ErrorKind::UnknownCallee, req.callee_package + " is not installed");
    const ComponentDecl& component = require_component(*callee, req.callee_component);

    Primitives prim;
    prim.callee = callee->identity;
    prim.component = component;
    prim.export_status = resolve_export(component, callee->target_sdk);
    prim.input = req.input;

    if (req.caller_package == req.callee_package) {
        // The first app process in an intra-app chain is the app itself; the
        // walk-back excludes the callee, so resolve directly.
        prim.caller = callee->identity;
    } else if (entry_takes_intent(component, req.entry)) {
        // Intent entries run outside binder threads; the caller comes from
        // the binder side channel.
        std::span<const BinderTransaction> window(device.binder_log);
        window = window.subspan(std::min(log_window_start, window.size()));
        try {
            CallerRecovery rec =
                recover_caller(window, device.pid_of(req.callee_package), device.pid_map,
                               device.catalog);
            if (const AppManifest* app = device.find_app(rec.identity.package))
                prim.caller = app->identity;
            else
                prim.caller = rec.identity;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::NoAppCallerFound) throw;
            prim.caller = system_identity(); // system-originated call
        }
    } else {
        prim.caller = device.identity_of(req.caller_package);
    }

    prim.same_developer = !prim.caller.signature.empty() &&
                          prim.caller.signature == prim.callee.signature;
    prim.callee_perm = resolve_guard(device, component);
    if (prim.callee_perm && !is_system_identity(prim.caller))
        prim.caller_claims_perm =
            caller_claims_permission(device, *callee, prim.caller, prim.callee_perm->name);
    return prim;
}

DispatchOutcome dispatch(DeviceModel& device, const IpcRequest& req, DecisionOracle& oracle,
                         Rng& rng) {
    const AppManifest* callee = device.find_app(req.callee_package);
    if (!callee)
        throw Error(ErrorKind::UnknownCallee, req.callee_package + " is not installed");
    const ComponentDecl& component = require_component(*callee, req.callee_component);
    require_legal_entry(component, req);

    int caller_pid = device.pid_of(req.caller_package); // UnknownPid for strangers
    int callee_pid = device.pid_of(req.callee_package);

    size_t window_start = device.binder_log.size();
    emit_binder_chain(device, caller_pid, callee_pid, rng.below(kMaxHops + 1));

    Primitives prim = collect_primitives(device, req, window_start);
    DispatchOutcome out;
    out.verdict = evaluate(prim, device.catalog);

    switch (out.verdict.decision) {
    case Decision::Allow:
        out.executed = true;
        out.delivered_input = req.input;
        break;
    case Decision::Deny:
        break;
    case Decision::Alert: {
        std::string question = req.caller_package + " -> " + req.callee_package + "/" +
                               req.callee_component + " (" + req.entry + "): allow?";
        out.user_decision = oracle.decide(question);
        bool allowed = out.user_decision.value_or(false); // timeout = deny
        if (!allowed) break;
        if (is_time_sensitive_entry(req.entry)) {
            // The entry already returned with a deny; a late allow re-sends
            // the identical input on behalf of the original caller.
            out.replayed = true;
        }
        out.executed = true;
        out.delivered_input = req.input;
        break;
    }
    }
    return out;
}

} // namespace hijackguard
