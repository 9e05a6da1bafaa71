#pragma once

#include <set>
#include <string>
#include <vector>

#include "hijackguard/manifest.hpp"

namespace hijackguard {

/// System-defined permissions, Intent actions, the subset of actions only
/// the OS may send, and the process names that identify system binaries.
/// Loaded from a versioned data file so the lists can be swapped without a
/// rebuild.
struct SystemCatalog {
    std::vector<PermissionDecl> sys_perms; // all with system_defined = true
    std::set<std::string> sys_actions;
    std::set<std::string> sys_only_actions; // subset of sys_actions
    std::set<std::string> system_binaries;

    const PermissionDecl* find_permission(const std::string& name) const;
    bool is_system_binary(const std::string& package) const {
        return system_binaries.count(package) != 0;
    }
};

/// Line-oriented catalog format. Sections:
///   [sys_perms]         name level [system-only]
///   [sys_actions]       name
///   [sys_only_actions]  name
///   [system_binaries]   name
/// '#' starts a comment. sys_only_actions must be a subset of sys_actions
/// (SysOnlyNotSubset otherwise).
SystemCatalog load_catalog(const std::string& text);

SystemCatalog load_catalog_file(const std::string& path);

inline bool is_custom_action(const std::string& action, const SystemCatalog& cat) {
    return cat.sys_actions.count(action) == 0;
}

} // namespace hijackguard
