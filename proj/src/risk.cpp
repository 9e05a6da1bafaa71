#include "hijackguard/risk.hpp"

#include <algorithm>

namespace hijackguard {

const char* risk_reason_name(RiskReason reason) {
    switch (reason) {
    case RiskReason::ExportedCustomAction: return "exported-custom-action";
    case RiskReason::ImplicitExport: return "implicit-export";
    case RiskReason::ExplicitCustomAction: return "explicit-custom-action";
    case RiskReason::ExplicitSystemOnlyAction: return "explicit-system-only-action";
    case RiskReason::ProviderNotUnexported: return "provider-not-unexported";
    case RiskReason::NotRisky: return "not-risky";
    }
    return "?";
}

int RiskReport::risky_total() const {
    int total = 0;
    for (const KindCounts& kc : counts) total += kc.risky;
    return total;
}

namespace {

bool has_custom_action(const ComponentDecl& c, const SystemCatalog& cat) {
    for (const IntentFilterDecl& f : c.filters)
        for (const std::string& a : f.actions)
            if (is_custom_action(a, cat)) return true;
    return false;
}

bool has_system_only_action(const ComponentDecl& c, const SystemCatalog& cat) {
    for (const IntentFilterDecl& f : c.filters)
        for (const std::string& a : f.actions)
            if (cat.sys_only_actions.count(a)) return true;
    return false;
}

ComponentRisk classify_final(const ComponentDecl& c, const ExportStatus& ex,
                             const SystemCatalog& cat) {
    switch (c.kind) {
    case ComponentKind::Activity:
        if (ex.effective && has_custom_action(c, cat))
            return {true, RiskReason::ExportedCustomAction};
        return {};
    case ComponentKind::Service:
        if (ex.mode == ExportMode::Implicit) return {true, RiskReason::ImplicitExport};
        if (ex.mode == ExportMode::Explicit && has_custom_action(c, cat))
            return {true, RiskReason::ExplicitCustomAction};
        return {};
    case ComponentKind::Receiver:
        if (ex.mode == ExportMode::Implicit) return {true, RiskReason::ImplicitExport};
        if (ex.mode == ExportMode::Explicit) {
            if (has_custom_action(c, cat)) return {true, RiskReason::ExplicitCustomAction};
            if (has_system_only_action(c, cat))
                return {true, RiskReason::ExplicitSystemOnlyAction};
        }
        return {};
    case ComponentKind::Provider:
        if (c.raw_exported != RawExported::False)
            return {true, RiskReason::ProviderNotUnexported};
        return {};
    }
    return {};
}

ComponentRisk classify_legacy(const ComponentDecl& c, const ExportStatus& ex,
                              const SystemCatalog& cat) {
    switch (c.kind) {
    case ComponentKind::Activity:
        if (ex.effective && has_custom_action(c, cat))
            return {true, RiskReason::ExportedCustomAction};
        return {};
    case ComponentKind::Service:
    case ComponentKind::Receiver:
        // raw attribute absent and still exported, i.e. implicit export
        if (c.raw_exported == RawExported::Unset && ex.effective)
            return {true, RiskReason::ImplicitExport};
        return {};
    case ComponentKind::Provider:
        if (c.raw_exported != RawExported::False)
            return {true, RiskReason::ProviderNotUnexported};
        return {};
    }
    return {};
}

} // namespace

RiskReport identify_risky(const AppManifest& m, const SystemCatalog& cat, RiskRules rules) {
    RiskReport report;
    for (const ComponentDecl& c : m.components) {
        ExportStatus ex = resolve_export(c, m.target_sdk);
        ComponentRisk risk = rules == RiskRules::Final ? classify_final(c, ex, cat)
                                                       : classify_legacy(c, ex, cat);
        report.per_component.emplace(c.name, risk);
        KindCounts& kc = report.counts[static_cast<size_t>(c.kind)];
        ++kc.total;
        if (ex.mode == ExportMode::Explicit) ++kc.explicit_exported;
        if (ex.mode == ExportMode::Implicit) ++kc.implicit_exported;
        if (risk.risky) ++kc.risky;
    }
    return report;
}

std::vector<std::string> entry_functions(const ComponentDecl& c) {
    switch (c.kind) {
    case ComponentKind::Activity:
        return {"onCreate", "onStart", "onNewIntent"};
    case ComponentKind::Service: {
        std::vector<std::string> entries = {"onCreate", "onStartCommand", "onHandleIntent",
                                            "onBind", "onRebind"};
        entries.insert(entries.end(), c.bound_interfaces.begin(), c.bound_interfaces.end());
        return entries;
    }
    case ComponentKind::Receiver:
        return {"onReceive"};
    case ComponentKind::Provider:
        return {"query", "insert", "bulkInsert", "update", "delete", "openFile"};
    }
    return {};
}

bool is_time_sensitive_entry(const std::string& entry) {
    return entry == "onCreate" || entry == "onStart" || entry == "onNewIntent" ||
           entry == "onReceive";
}

int estimate_stub_lines(const RiskReport& report, const AppManifest& m) {
    int lines = 0;
    for (const ComponentDecl& c : m.components) {
        auto it = report.per_component.find(c.name);
        if (it == report.per_component.end() || !it->second.risky) continue;
        lines += 2 * static_cast<int>(entry_functions(c).size());
    }
    return lines;
}

} // namespace hijackguard
