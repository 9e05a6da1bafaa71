#include <doctest.h>

#include <functional>

#include "hijackguard/error.hpp"
#include "hijackguard/manifest.hpp"
#include "support.hpp"

using namespace hijackguard;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an Error");
    return ErrorKind::Io;
}

} // namespace

TEST_CASE("minimal document: absent attributes map to defaults") {
    AppManifest m = parse_manifest(
        R"(<manifest package="com.example" targetSdk="21" signature="sig-x">
             <activity name="Main"/>
           </manifest>)");
    CHECK(m.identity.package == "com.example");
    CHECK(m.target_sdk == 21);
    REQUIRE(m.components.size() == 1);
    CHECK(m.components[0].kind == ComponentKind::Activity);
    CHECK(m.components[0].raw_exported == RawExported::Unset);
    CHECK(m.components[0].filters.empty());
    CHECK(!m.components[0].permission_guard);
}

TEST_CASE("k9 fixture: four providers, two explicitly exported") {
    AppManifest m = load_manifest_file(testsupport::data_path("fixtures/k9mail.xml"));
    int providers = 0;
    int explicitly_exported = 0;
    for (const ComponentDecl& c : m.components) {
        if (c.kind != ComponentKind::Provider) continue;
        ++providers;
        if (resolve_export(c, m.target_sdk).mode == ExportMode::Explicit)
            ++explicitly_exported;
    }
    CHECK(providers == 4);
    CHECK(explicitly_exported == 2);
}

TEST_CASE("parse errors") {
    SUBCASE("filter without an action") {
        CHECK(kind_of([] {
                  parse_manifest(
                      R"(<manifest package="p" targetSdk="21" signature="s">
                           <activity name="A">
                             <intent-filter><category name="c"/></intent-filter>
                           </activity>
                         </manifest>)");
              }) == ErrorKind::FilterWithoutAction);
    }
    SUBCASE("duplicate component name") {
        CHECK(kind_of([] {
                  parse_manifest(
                      R"(<manifest package="p" targetSdk="21" signature="s">
                           <activity name="A"/><service name="A"/>
                         </manifest>)");
              }) == ErrorKind::DuplicateComponent);
    }
    SUBCASE("unknown element") {
        CHECK(kind_of([] {
                  parse_manifest(
                      R"(<manifest package="p" targetSdk="21" signature="s">
                           <widget name="W"/>
                         </manifest>)");
              }) == ErrorKind::MalformedDocument);
    }
    SUBCASE("unknown attribute") {
        CHECK(kind_of([] {
                  parse_manifest(
                      R"(<manifest package="p" targetSdk="21" signature="s">
                           <activity name="A" taskAffinity="x"/>
                         </manifest>)");
              }) == ErrorKind::MalformedDocument);
    }
    SUBCASE("provider with an intent filter") {
        CHECK(kind_of([] {
                  parse_manifest(
                      R"(<manifest package="p" targetSdk="21" signature="s">
                           <provider name="P">
                             <intent-filter><action name="a"/></intent-filter>
                           </provider>
                         </manifest>)");
              }) == ErrorKind::MalformedDocument);
    }
    SUBCASE("interfaces on a non-service component") {
        CHECK(kind_of([] {
                  parse_manifest(
                      R"(<manifest package="p" targetSdk="21" signature="s">
                           <receiver name="R" interfaces="f"/>
                         </manifest>)");
              }) == ErrorKind::MalformedDocument);
    }
    SUBCASE("text content") {
        CHECK(kind_of([] {
                  parse_manifest(
                      R"(<manifest package="p" targetSdk="21" signature="s">hello</manifest>)");
              }) == ErrorKind::MalformedDocument);
    }
    SUBCASE("bad targetSdk") {
        CHECK(kind_of([] {
                  parse_manifest(R"(<manifest package="p" targetSdk="x" signature="s"/>)");
              }) == ErrorKind::MalformedDocument);
    }
    SUBCASE("duplicate permission") {
        CHECK(kind_of([] {
                  parse_manifest(
                      R"(<manifest package="p" targetSdk="21" signature="s">
                           <permission name="x" level="normal"/>
                           <permission name="x" level="signature"/>
                         </manifest>)");
              }) == ErrorKind::MalformedDocument);
    }
}

TEST_CASE("declaration order and attributes are preserved") {
    AppManifest m = parse_manifest(
        R"(<manifest package="p" targetSdk="19" signature="s">
             <permission name="p.PERM" level="dangerous"/>
             <uses-permission name="android.permission.INTERNET"/>
             <service name="S" exported="false" permission="p.PERM" interfaces="getPid,getState"/>
             <activity name="A" exported="true"/>
           </manifest>)");
    REQUIRE(m.components.size() == 2);
    CHECK(m.components[0].name == "S");
    CHECK(m.components[0].raw_exported == RawExported::False);
    CHECK(m.components[0].permission_guard == "p.PERM");
    CHECK(m.components[0].bound_interfaces == std::vector<std::string>{"getPid", "getState"});
    CHECK(m.components[1].name == "A");
    CHECK(m.defined_permissions[0].level == PermissionLevel::Dangerous);
    CHECK(m.used_permissions == std::vector<std::string>{"android.permission.INTERNET"});
}

TEST_CASE("round-trip over every bundled fixture") {
    const char* fixtures[] = {"telegram", "zxing",  "terminal", "k9mail",     "wordpress",
                              "signal",   "wire",   "bitcoin",  "chatsecure", "zirco",
                              "attack"};
    for (const char* name : fixtures) {
        CAPTURE(name);
        AppManifest parsed =
            load_manifest_file(testsupport::data_path("fixtures/" + std::string(name) + ".xml"));
        AppManifest reparsed = parse_manifest(serialize_manifest(parsed));
        CHECK(parsed == reparsed);
    }
}

TEST_CASE("resolve_export: provider default rule around the sdk 17 cutover") {
    ComponentDecl provider =
        testsupport::make_component("P", ComponentKind::Provider);
    CHECK(resolve_export(provider, 16) == ExportStatus{true, ExportMode::Implicit});
    CHECK(resolve_export(provider, 23) == ExportStatus{false, ExportMode::NotExported});
    CHECK(resolve_export(provider, 17) == ExportStatus{false, ExportMode::NotExported});

    ComponentDecl receiver = testsupport::make_component(
        "R", ComponentKind::Receiver, RawExported::Unset, {"com.example.ACTION"});
    CHECK(resolve_export(receiver, 23) == ExportStatus{true, ExportMode::Implicit});
}

namespace {

// Expected results spelled out cell by cell, independently of the
// implementation: raw x kind x has-filter x sdk.
ExportStatus export_table(RawExported raw, ComponentKind kind, bool has_filter, int sdk) {
    if (raw == RawExported::True) return {true, ExportMode::Explicit};
    if (raw == RawExported::False) return {false, ExportMode::NotExported};
    if (kind == ComponentKind::Provider) {
        if (sdk < 17) return {true, ExportMode::Implicit};
        return {false, ExportMode::NotExported};
    }
    if (has_filter) return {true, ExportMode::Implicit};
    return {false, ExportMode::NotExported};
}

} // namespace

TEST_CASE("resolve_export: exhaustive 48-cell truth table") {
    int cells = 0;
    for (RawExported raw : {RawExported::True, RawExported::False, RawExported::Unset}) {
        for (ComponentKind kind : {ComponentKind::Activity, ComponentKind::Service,
                                   ComponentKind::Receiver, ComponentKind::Provider}) {
            for (bool has_filter : {false, true}) {
                for (int sdk : {16, 17}) {
                    ComponentDecl c = testsupport::make_component(
                        "C", kind, raw,
                        has_filter ? std::vector<std::string>{"com.x.ACTION"}
                                   : std::vector<std::string>{});
                    CAPTURE(static_cast<int>(raw));
                    CAPTURE(static_cast<int>(kind));
                    CAPTURE(has_filter);
                    CAPTURE(sdk);
                    CHECK(resolve_export(c, sdk) == export_table(raw, kind, has_filter, sdk));
                    ++cells;
                }
            }
        }
    }
    CHECK(cells == 48);
}

TEST_CASE("explicit false always wins") {
    for (ComponentKind kind : {ComponentKind::Activity, ComponentKind::Service,
                               ComponentKind::Receiver, ComponentKind::Provider}) {
        for (int sdk : {10, 16, 17, 25}) {
            ComponentDecl c = testsupport::make_component("C", kind, RawExported::False,
                                                          {"com.x.A", "com.x.B"});
            if (kind == ComponentKind::Provider) c.filters.clear();
            CHECK_FALSE(resolve_export(c, sdk).effective);
        }
    }
}
