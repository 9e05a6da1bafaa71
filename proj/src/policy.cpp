#include "hijackguard/policy.hpp"

#include <cctype>

namespace hijackguard {

const char* decision_name(Decision d) {
    switch (d) {
    case Decision::Allow: return "allow";
    case Decision::Deny: return "deny";
    case Decision::Alert: return "alert";
    }
    return "?";
}

const char* policy_id_name(PolicyId p) {
    switch (p) {
    case PolicyId::P1: return "P1";
    case PolicyId::P2: return "P2";
    case PolicyId::P3: return "P3";
    case PolicyId::P4: return "P4";
    case PolicyId::P5: return "P5";
    case PolicyId::P6: return "P6";
    }
    return "?";
}

bool is_system_identity(const AppIdentity& id) {
    return id.uid < 10000;
}

namespace {

bool trusted(const Primitives& p) {
    if (p.caller.package == p.callee.package) return true;
    if (p.same_developer) return true;
    return is_system_identity(p.caller);
}

bool intent_based(ComponentKind kind) {
    return kind != ComponentKind::Provider;
}

// P1: external request to a Provider that never claims the exported
// attribute (the by-default export hole).
bool p1_matches(const Primitives& p) {
    return p.component.kind == ComponentKind::Provider &&
           p.component.raw_exported == RawExported::Unset;
}

// P2: the component's custom permission guard has been claimed by the
// caller (collect_primitives folds the pre-claim/downgrade check into
// caller_claims_perm).
bool p2_matches(const Primitives& p, const SystemCatalog& cat) {
    if (!p.callee_perm) return false;
    if (cat.find_permission(p.callee_perm->name)) return false;
    return p.caller_claims_perm;
}

// P5: a Receiver listening to a system-only broadcast receives an input
// action that is not that broadcast.
bool p5_matches(const Primitives& p, const SystemCatalog& cat) {
    if (p.component.kind != ComponentKind::Receiver) return false;
    const IntentInput* intent = std::get_if<IntentInput>(&p.input);
    for (const IntentFilterDecl& f : p.component.filters) {
        for (const std::string& claimed : f.actions) {
            if (cat.sys_only_actions.count(claimed) == 0) continue;
            if (!intent || !intent->action || *intent->action != claimed) return true;
        }
    }
    return false;
}

// P6: keyword filtering of Provider input arguments, plus path traversal
// in openFile uris.
bool p6_matches(const Primitives& p) {
    if (p.component.kind != ComponentKind::Provider) return false;
    const ProviderCallInput* call = std::get_if<ProviderCallInput>(&p.input);
    if (!call) return false;
    for (const std::optional<std::string>& arg : call->args)
        if (arg && match_injection(*arg)) return true;
    return call->entry == "openFile" && match_traversal(call->uri);
}

// P3: implicitly exported Intent-based component registering a custom
// action.
bool p3_matches(const Primitives& p, const SystemCatalog& cat) {
    if (!intent_based(p.component.kind)) return false;
    if (p.export_status.mode != ExportMode::Implicit) return false;
    for (const IntentFilterDecl& f : p.component.filters)
        for (const std::string& a : f.actions)
            if (is_custom_action(a, cat)) return true;
    return false;
}

// P4: explicitly exported Provider.
bool p4_matches(const Primitives& p) {
    return p.component.kind == ComponentKind::Provider &&
           p.component.raw_exported == RawExported::True;
}

Verdict verdict(Decision decision, PolicyId policy, std::string detail) {
    return {decision, policy, std::move(detail)};
}

} // namespace

Verdict evaluate(const Primitives& p, const SystemCatalog& cat, EvalTrace* trace) {
    if (trusted(p))
        return {Decision::Allow, std::nullopt, "trusted caller"};

    auto consult = [&](auto&& predicate) {
        if (trace) ++trace->predicates_evaluated;
        return predicate();
    };

    if (consult([&] { return p1_matches(p); }))
        return verdict(Decision::Deny, PolicyId::P1,
                       "provider does not claim the exported attribute");
    if (consult([&] { return p2_matches(p, cat); }))
        return verdict(Decision::Deny, PolicyId::P2,
                       "custom permission '" + p.callee_perm->name + "' pre-claimed by caller");
    if (consult([&] { return p5_matches(p, cat); }))
        return verdict(Decision::Deny, PolicyId::P5,
                       "input action does not match the claimed system-only broadcast");
    if (consult([&] { return p6_matches(p); }))
        return verdict(Decision::Deny, PolicyId::P6, "attack pattern in provider input");
    if (consult([&] { return p3_matches(p, cat); }))
        return verdict(Decision::Alert, PolicyId::P3,
                       "implicitly exported component with a custom action");
    if (consult([&] { return p4_matches(p); }))
        return verdict(Decision::Alert, PolicyId::P4, "explicitly exported provider");
    return {Decision::Allow, std::nullopt, "no policy matched"};
}

namespace {

bool is_ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

char lower(char c) {
    return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

bool ci_word_at(const std::string& text, size_t pos, const char* word) {
    size_t len = std::char_traits<char>::length(word);
    if (pos + len > text.size()) return false;
    for (size_t i = 0; i < len; ++i)
        if (lower(text[pos + i]) != word[i]) return false;
    // reject matches inside a longer identifier
    if (pos > 0 && is_ident_char(text[pos - 1])) return false;
    if (pos + len < text.size() && is_ident_char(text[pos + len])) return false;
    return true;
}

size_t skip_spaces(const std::string& text, size_t pos) {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    return pos;
}

// <any> from <identifier> ; <any>
bool matches_from_table(const std::string& arg) {
    for (size_t i = 0; i + 4 <= arg.size(); ++i) {
        if (!ci_word_at(arg, i, "from")) continue;
        size_t pos = skip_spaces(arg, i + 4);
        if (pos == i + 4 || pos >= arg.size() || !is_ident_start(arg[pos])) continue;
        while (pos < arg.size() && is_ident_char(arg[pos])) ++pos;
        pos = skip_spaces(arg, pos);
        if (pos < arg.size() && arg[pos] == ';') return true;
    }
    return false;
}

// ; <keyword>
bool matches_stacked_statement(const std::string& arg) {
    static const char* const keywords[] = {"select", "drop", "insert", "update", "delete"};
    for (size_t i = 0; i < arg.size(); ++i) {
        if (arg[i] != ';') continue;
        size_t pos = skip_spaces(arg, i + 1);
        for (const char* kw : keywords)
            if (ci_word_at(arg, pos, kw)) return true;
    }
    return false;
}

} // namespace

bool match_injection(const std::string& arg) {
    return matches_from_table(arg) || matches_stacked_statement(arg);
}

bool match_traversal(const std::string& uri) {
    return uri.find("../") != std::string::npos;
}

} // namespace hijackguard
