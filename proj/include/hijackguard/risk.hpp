#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "hijackguard/manifest.hpp"
#include "hijackguard/syscatalog.hpp"

namespace hijackguard {

enum class RiskReason {
    ExportedCustomAction,
    ImplicitExport,
    ExplicitCustomAction,
    ExplicitSystemOnlyAction,
    ProviderNotUnexported,
    NotRisky,
};

const char* risk_reason_name(RiskReason reason);

/// Rule set selector. Legacy is the earlier identification variant kept
/// behind --legacy-rules: it flags Services/Receivers only when implicitly
/// exported (no explicit+custom-action clause, no system-only clause).
enum class RiskRules { Final, Legacy };

struct ComponentRisk {
    bool risky = false;
    RiskReason reason = RiskReason::NotRisky;

    bool operator==(const ComponentRisk&) const = default;
};

struct KindCounts {
    int explicit_exported = 0;
    int implicit_exported = 0;
    int total = 0;
    int risky = 0;

    bool operator==(const KindCounts&) const = default;
};

struct RiskReport {
    std::map<std::string, ComponentRisk> per_component;
    // indexed by ComponentKind: Activity, Service, Receiver, Provider
    std::array<KindCounts, 4> counts{};

    int risky_total() const;
};

/// Flags the components whose entry points need interception:
///   Activity: effectively exported and registers a custom Intent action
///   Service:  explicitly exported with a custom action, or implicitly exported
///   Receiver: explicitly exported with a custom or system-only action,
///             or implicitly exported
///   Provider: does not claim exported="false"
RiskReport identify_risky(const AppManifest& m, const SystemCatalog& cat,
                          RiskRules rules = RiskRules::Final);

/// Entry functions intercepted per component. Services add one entry per
/// bound Binder interface on top of the five lifecycle entries.
std::vector<std::string> entry_functions(const ComponentDecl& c);

bool is_time_sensitive_entry(const std::string& entry);

/// Two stub lines per intercepted entry function, summed over risky
/// components.
int estimate_stub_lines(const RiskReport& report, const AppManifest& m);

} // namespace hijackguard
