#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hijackguard/binderlog.hpp"
#include "hijackguard/manifest.hpp"
#include "hijackguard/policy.hpp"
#include "hijackguard/syscatalog.hpp"

namespace hijackguard {

/// Deterministic generator seeding the event loop; all randomness in a run
/// flows through one instance.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    int below(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }

private:
    std::mt19937_64 engine_;
};

struct PermRegistration {
    std::string owner; // first installer that defined the name
    PermissionDecl decl;
};

/// Reserved system identity used for OS-originated broadcasts.
inline const char* kSystemCallerPackage = "android";

struct DeviceModel {
    SystemCatalog catalog;
    std::vector<AppManifest> installed; // install order is significant
    ProcessTable pid_map;               // apps plus the fixed system processes
    std::map<std::string, int> package_pids;
    std::vector<BinderTransaction> binder_log; // append-only
    std::map<std::string, PermRegistration> permission_registry;

    std::uint64_t next_txid = 177000;
    int next_app_pid = 6000;
    int next_app_uid = 10000;

    const AppManifest* find_app(const std::string& package) const;
    int pid_of(const std::string& package) const; // UnknownPid if absent
    AppIdentity identity_of(const std::string& package) const;
};

DeviceModel make_device(SystemCatalog catalog);

/// Appends the app, assigns pid/uid, and registers its defined permissions
/// under first-definer-wins semantics. DuplicatePackage on reinstall.
void install(DeviceModel& device, AppManifest m);

struct IpcRequest {
    std::string caller_package;
    std::string callee_package;
    std::string callee_component;
    std::string entry;
    IpcInput input;
    std::optional<std::string> origin_flag; // reserved; not enforced
};

struct DecisionOracle {
    enum class Kind { AlwaysAllow, AlwaysDeny, Scripted, Prompt };

    Kind kind = Kind::AlwaysDeny;
    std::vector<bool> script; // consumed in order; exhaustion = timeout
    int timeout_s = 30;
    // Wall-clock prompter used only by Kind::Prompt; nullopt = timeout.
    std::function<std::optional<bool>(const std::string& question, int timeout_s)> prompter;

    static DecisionOracle always_allow() { return {Kind::AlwaysAllow, {}, 30, nullptr}; }
    static DecisionOracle always_deny() { return {Kind::AlwaysDeny, {}, 30, nullptr}; }
    static DecisionOracle scripted(std::vector<bool> answers) {
        return {Kind::Scripted, std::move(answers), 30, nullptr};
    }

    /// nullopt means the user never answered within the timeout.
    std::optional<bool> decide(const std::string& question);

    size_t script_pos = 0;
};

struct DispatchOutcome {
    Verdict verdict;
    bool executed = false;
    bool replayed = false;
    std::optional<bool> user_decision;
    // Input the entry function actually ran with (present iff executed).
    std::optional<IpcInput> delivered_input;
};

/// Emits one delegation chain caller -> s1 -> ... -> sh -> callee plus the
/// matching replies (2*hops + 2 transactions) with fresh monotone txids.
std::vector<BinderTransaction> emit_binder_chain(DeviceModel& device, int caller_pid,
                                                 int callee_pid, int hops);

struct ChainSpec {
    int caller_pid = 0;
    int callee_pid = 0;
    int hops = 0;
};

struct InterleavedEmission {
    std::vector<BinderTransaction> transactions;
    std::vector<int> chain_of_transaction; // same length; index into the specs
};

/// Emits several chains with their transactions interleaved by the rng. A
/// chain's call descent up to and including the callee's first reply is one
/// indivisible unit; the unwind replies schedule freely afterwards.
InterleavedEmission emit_interleaved_chains(DeviceModel& device,
                                            const std::vector<ChainSpec>& chains, Rng& rng);

/// Assembles enforcement primitives for a request. Intent-based entries
/// recover the caller from the binder log tail starting at log_window_start
/// (the position where this request's own chain began); Provider and bound
/// Binder entries read the caller directly.
Primitives collect_primitives(const DeviceModel& device, const IpcRequest& req,
                              size_t log_window_start);

/// Full checking pipeline for one request: emit binder traffic, collect
/// primitives, evaluate the policies, then apply the verdict. Alerts on
/// time-sensitive entries return immediately and replay on a late allow;
/// other entries block on the oracle (timeout = deny).
DispatchOutcome dispatch(DeviceModel& device, const IpcRequest& req, DecisionOracle& oracle,
                         Rng& rng);

} // namespace hijackguard
