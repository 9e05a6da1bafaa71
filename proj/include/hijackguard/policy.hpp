#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hijackguard/manifest.hpp"
#include "hijackguard/syscatalog.hpp"

namespace hijackguard {

struct IntentInput {
    std::optional<std::string> action;
    std::optional<std::string> uri;
    std::vector<std::string> categories;
    std::map<std::string, std::string> extras; // string values only

    bool operator==(const IntentInput&) const = default;
};

struct ProviderCallInput {
    std::string entry; // one of the six provider entry functions
    std::string uri;
    // projection/selection/values/sortOrder/mode flattened; nullopt = null arg
    std::vector<std::optional<std::string>> args;

    bool operator==(const ProviderCallInput&) const = default;
};

struct BoundCallInput {
    std::string interface;
    std::vector<std::string> args;

    bool operator==(const BoundCallInput&) const = default;
};

using IpcInput = std::variant<IntentInput, ProviderCallInput, BoundCallInput>;

/// Everything the engine needs about one incoming IPC call, assembled by
/// the device model (collect_primitives) or by hand in tests.
struct Primitives {
    AppIdentity caller;
    AppIdentity callee;
    bool same_developer = false; // signature match
    ComponentDecl component;
    ExportStatus export_status;
    // Effective (registry-resolved) declaration behind the component's
    // permission guard; absent when there is no guard or it does not resolve.
    std::optional<PermissionDecl> callee_perm;
    bool caller_claims_perm = false;
    IpcInput input;
};

enum class Decision { Allow, Deny, Alert };
enum class PolicyId { P1, P2, P3, P4, P5, P6 };

const char* decision_name(Decision d);
const char* policy_id_name(PolicyId p);

struct Verdict {
    Decision decision = Decision::Allow;
    std::optional<PolicyId> policy; // absent iff Allow
    std::string detail;
};

/// Counts how many policy predicates a call to evaluate() consulted.
/// Requests allowed by the trust rule never touch a predicate.
struct EvalTrace {
    int predicates_evaluated = 0;
};

bool is_system_identity(const AppIdentity& id);

/// The six mandatory policies, applied in fixed order, first match wins:
///   trust: same app, same developer, or a system caller      -> Allow
///   P1: Provider with the exported attribute unset           -> Deny
///   P2: custom permission guard pre-claimed by the caller    -> Deny
///   P5: Receiver claiming a system-only action, input differs-> Deny
///   P6: Provider with an attack pattern in an input argument -> Deny
///   P3: implicitly exported A/S/R with a custom action       -> Alert
///   P4: explicitly exported Provider                         -> Alert
///   otherwise                                                -> Allow
Verdict evaluate(const Primitives& p, const SystemCatalog& cat, EvalTrace* trace = nullptr);

/// Keyword filter for provider arguments. Matches, case-insensitively,
///   ... from <identifier>; ...        e.g. "* from private_table;"
/// or a ';' followed by one of select/drop/insert/update/delete.
bool match_injection(const std::string& arg);

/// "../" path traversal, applied to openFile uris.
bool match_traversal(const std::string& uri);

} // namespace hijackguard
