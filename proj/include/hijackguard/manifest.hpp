#pragma once

#include <optional>
#include <string>
#include <vector>

namespace hijackguard {

enum class ComponentKind { Activity, Service, Receiver, Provider };
enum class RawExported { True, False, Unset };
enum class PermissionLevel { Normal, Dangerous, Signature };
enum class ExportMode { Explicit, Implicit, NotExported };

const char* component_kind_name(ComponentKind kind);

/// Package name, developer-certificate fingerprint and the uid assigned at
/// install time (0 until a DeviceModel installs the app). uids below 10000
/// are reserved for system identities.
struct AppIdentity {
    std::string package;
    std::string signature;
    int uid = 0;

    bool operator==(const AppIdentity&) const = default;
};

struct PermissionDecl {
    std::string name;
    PermissionLevel level = PermissionLevel::Normal;
    bool system_defined = false;
    bool system_only = false;

    bool operator==(const PermissionDecl&) const = default;
};

struct IntentFilterDecl {
    std::vector<std::string> actions; // never empty on a parsed filter
    std::vector<std::string> categories;

    bool operator==(const IntentFilterDecl&) const = default;
};

struct ComponentDecl {
    std::string name;
    ComponentKind kind = ComponentKind::Activity;
    RawExported raw_exported = RawExported::Unset;
    std::vector<IntentFilterDecl> filters;
    std::optional<std::string> permission_guard;
    std::vector<std::string> bound_interfaces; // Service only

    bool operator==(const ComponentDecl&) const = default;
};

struct AppManifest {
    AppIdentity identity;
    int target_sdk = 1;
    std::vector<PermissionDecl> defined_permissions;
    std::vector<std::string> used_permissions;
    std::vector<ComponentDecl> components; // declaration order

    const ComponentDecl* find_component(const std::string& name) const;

    bool operator==(const AppManifest&) const = default;
};

struct ExportStatus {
    bool effective = false;
    ExportMode mode = ExportMode::NotExported;

    bool operator==(const ExportStatus&) const = default;
};

/// Parses the manifest document subset:
///
///   <manifest package=".." targetSdk="N" signature="..">
///     <permission name=".." level="normal|dangerous|signature"/>*
///     <uses-permission name=".."/>*
///     <activity|service|receiver|provider name=".."
///         [exported="true|false"] [permission=".."] [interfaces="f1,f2"]>
///       <intent-filter>
///         <action name=".."/>+ <category name=".."/>*
///       </intent-filter>*
///     </...>*
///   </manifest>
///
/// Strict mode: unknown elements or attributes are MalformedDocument.
/// XML comments are permitted between elements. An absent exported
/// attribute parses as RawExported::Unset.
AppManifest parse_manifest(const std::string& text);

AppManifest load_manifest_file(const std::string& path);

/// Canonical serialization; parse(serialize(m)) == m.
std::string serialize_manifest(const AppManifest& m);

/// Effective export resolution. Explicit true/false wins; Unset Intent-based
/// components export iff they declare a filter; Unset providers export iff
/// target_sdk < 17 (the Android 4.2 cutover).
ExportStatus resolve_export(const ComponentDecl& c, int target_sdk);

} // namespace hijackguard
