#include "hijackguard/manifest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "hijackguard/error.hpp"

namespace hijackguard {

const char* component_kind_name(ComponentKind kind) {
    switch (kind) {
    case ComponentKind::Activity: return "activity";
    case ComponentKind::Service: return "service";
    case ComponentKind::Receiver: return "receiver";
    case ComponentKind::Provider: return "provider";
    }
    return "?";
}

const ComponentDecl* AppManifest::find_component(const std::string& name) const {
    auto it = std::find_if(components.begin(), components.end(),
                           [&](const ComponentDecl& c) { return c.name == name; });
    return it == components.end() ? nullptr : &*it;
}

namespace {

[[noreturn]] void malformed(const std::string& what, int line = 0) {
    throw Error(ErrorKind::MalformedDocument, what, line);
}

// Minimal strict reader for the manifest XML subset. Produces a tree of
// Node{tag, attrs, children}; any text content other than whitespace is
// rejected.
struct Node {
    std::string tag;
    std::vector<std::pair<std::string, std::string>> attrs;
    std::vector<Node> children;
    int line = 0;

    const std::string* attr(const std::string& name) const {
        for (const auto& [k, v] : attrs)
            if (k == name) return &v;
        return nullptr;
    }
};

class XmlReader {
public:
    explicit XmlReader(const std::string& text) : text_(text) {}

    Node read_document() {
        skip_misc();
        if (eof()) malformed("empty document", line_);
        Node root = read_element();
        skip_misc();
        if (!eof()) malformed("trailing content after root element", line_);
        return root;
    }

private:
    const std::string& text_;
    size_t pos_ = 0;
    int line_ = 1;

    bool eof() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }

    char get() {
        char c = text_[pos_++];
        if (c == '\n') ++line_;
        return c;
    }

    bool starts_with(const char* s) const {
        return text_.compare(pos_, std::char_traits<char>::length(s), s) == 0;
    }

    void expect(char c) {
        if (eof() || peek() != c)
            malformed(std::string("expected '") + c + "'", line_);
        get();
    }

    void skip_ws() {
        while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) get();
    }

    // Whitespace, comments and an optional <?xml ...?> prolog.
    void skip_misc() {
        for (;;) {
            skip_ws();
            if (starts_with("<!--")) {
                pos_ += 4;
                size_t end = text_.find("-->", pos_);
                if (end == std::string::npos) malformed("unterminated comment", line_);
                line_ += static_cast<int>(std::count(text_.begin() + pos_, text_.begin() + end, '\n'));
                pos_ = end + 3;
            } else if (starts_with("<?")) {
                size_t end = text_.find("?>", pos_);
                if (end == std::string::npos) malformed("unterminated processing instruction", line_);
                pos_ = end + 2;
            } else {
                return;
            }
        }
    }

    static bool is_name_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ||
               c == '.' || c == ':';
    }

    std::string read_name() {
        std::string name;
        while (!eof() && is_name_char(peek())) name += get();
        if (name.empty()) malformed("expected a name", line_);
        return name;
    }

    std::string read_attr_value() {
        expect('"');
        std::string value;
        while (!eof() && peek() != '"') {
            char c = get();
            if (c == '<') malformed("'<' in attribute value", line_);
            if (c == '&') {
                value += read_entity();
            } else {
                value += c;
            }
        }
        expect('"');
        return value;
    }

    char read_entity() {
        size_t semi = text_.find(';', pos_);
        if (semi == std::string::npos || semi - pos_ > 4) malformed("bad entity", line_);
        std::string name = text_.substr(pos_, semi - pos_);
        pos_ = semi + 1;
        if (name == "amp") return '&';
        if (name == "lt") return '<';
        if (name == "gt") return '>';
        if (name == "quot") return '"';
        if (name == "apos") return '\'';
        malformed("unknown entity &" + name + ";", line_);
    }

    Node read_element() {
        expect('<');
        Node node;
        node.line = line_;
        node.tag = read_name();
        for (;;) {
            skip_ws();
            if (eof()) malformed("unterminated element <" + node.tag + ">", line_);
            if (peek() == '/') {
                get();
                expect('>');
                return node;
            }
            if (peek() == '>') {
                get();
                read_children(node);
                return node;
            }
            std::string key = read_name();
            skip_ws();
            expect('=');
            skip_ws();
            if (node.attr(key)) malformed("duplicate attribute '" + key + "'", node.line);
            node.attrs.emplace_back(key, read_attr_value());
        }
    }

    void read_children(Node& node) {
        for (;;) {
            skip_misc();
            if (eof()) malformed("unterminated element <" + node.tag + ">", line_);
            if (peek() != '<')
                malformed("text content is not allowed inside <" + node.tag + ">", line_);
            if (starts_with("</")) {
                pos_ += 2;
                std::string closing = read_name();
                if (closing != node.tag)
                    malformed("mismatched closing tag </" + closing + ">", line_);
                skip_ws();
                expect('>');
                return;
            }
            node.children.push_back(read_element());
        }
    }
};

void require_only_attrs(const Node& node, std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : node.attrs) {
        bool ok = std::any_of(allowed.begin(), allowed.end(),
                              [&](const char* a) { return key == a; });
        if (!ok)
            malformed("unknown attribute '" + key + "' on <" + node.tag + ">", node.line);
    }
}

std::string require_attr(const Node& node, const char* name) {
    const std::string* value = node.attr(name);
    if (!value)
        malformed("<" + node.tag + "> requires attribute '" + std::string(name) + "'",
                  node.line);
    return *value;
}

PermissionLevel parse_level(const std::string& text, int line) {
    if (text == "normal") return PermissionLevel::Normal;
    if (text == "dangerous") return PermissionLevel::Dangerous;
    if (text == "signature") return PermissionLevel::Signature;
    malformed("invalid permission level '" + text + "'", line);
}

IntentFilterDecl parse_filter(const Node& node) {
    require_only_attrs(node, {});
    IntentFilterDecl filter;
    for (const Node& child : node.children) {
        if (child.tag == "action") {
            require_only_attrs(child, {"name"});
            if (!child.children.empty()) malformed("<action> takes no children", child.line);
            filter.actions.push_back(require_attr(child, "name"));
        } else if (child.tag == "category") {
            require_only_attrs(child, {"name"});
            if (!child.children.empty()) malformed("<category> takes no children", child.line);
            filter.categories.push_back(require_attr(child, "name"));
        } else {
            malformed("unknown element <" + child.tag + "> inside <intent-filter>", child.line);
        }
    }
    if (filter.actions.empty())
        throw Error(ErrorKind::FilterWithoutAction,
                    "intent-filter declares no <action>", node.line);
    return filter;
}

std::vector<std::string> split_interfaces(const std::string& text, int line) {
    std::vector<std::string> out;
    std::string item;
    std::stringstream in(text);
    while (std::getline(in, item, ',')) {
        // trim surrounding spaces
        size_t a = item.find_first_not_of(" \t");
        size_t b = item.find_last_not_of(" \t");
        if (a == std::string::npos) malformed("empty interface name", line);
        out.push_back(item.substr(a, b - a + 1));
    }
    if (out.empty()) malformed("empty interfaces list", line);
    return out;
}

ComponentDecl parse_component(const Node& node, ComponentKind kind) {
    ComponentDecl c;
    c.kind = kind;
    if (kind == ComponentKind::Service)
        require_only_attrs(node, {"name", "exported", "permission", "interfaces"});
    else
        require_only_attrs(node, {"name", "exported", "permission"});
    c.name = require_attr(node, "name");
    if (const std::string* exported = node.attr("exported")) {
        if (*exported == "true")
            c.raw_exported = RawExported::True;
        else if (*exported == "false")
            c.raw_exported = RawExported::False;
        else
            malformed("exported must be \"true\" or \"false\"", node.line);
    }
    if (const std::string* guard = node.attr("permission")) c.permission_guard = *guard;
    if (const std::string* ifaces = node.attr("interfaces"))
        c.bound_interfaces = split_interfaces(*ifaces, node.line);
    for (const Node& child : node.children) {
        if (child.tag != "intent-filter")
            malformed("unknown element <" + child.tag + "> inside <" + node.tag + ">",
                      child.line);
        if (kind == ComponentKind::Provider)
            malformed("provider components do not take intent filters", child.line);
        c.filters.push_back(parse_filter(child));
    }
    return c;
}

} // namespace

AppManifest parse_manifest(const std::string& text) {
    Node root = XmlReader(text).read_document();
    if (root.tag != "manifest")
        malformed("root element must be <manifest>", root.line);
    require_only_attrs(root, {"package", "targetSdk", "signature"});

    AppManifest m;
    m.identity.package = require_attr(root, "package");
    if (m.identity.package.empty()) malformed("package must be non-empty", root.line);
    m.identity.signature = require_attr(root, "signature");

    std::string sdk = require_attr(root, "targetSdk");
    auto [ptr, ec] = std::from_chars(sdk.data(), sdk.data() + sdk.size(), m.target_sdk);
    if (ec != std::errc() || ptr != sdk.data() + sdk.size() || m.target_sdk < 1)
        malformed("targetSdk must be a positive integer", root.line);

    std::set<std::string> perm_names;
    std::set<std::string> component_names;
    for (const Node& child : root.children) {
        if (child.tag == "permission") {
            require_only_attrs(child, {"name", "level"});
            if (!child.children.empty()) malformed("<permission> takes no children", child.line);
            PermissionDecl p;
            p.name = require_attr(child, "name");
            p.level = parse_level(require_attr(child, "level"), child.line);
            if (!perm_names.insert(p.name).second)
                malformed("duplicate permission '" + p.name + "'", child.line);
            m.defined_permissions.push_back(p);
        } else if (child.tag == "uses-permission") {
            require_only_attrs(child, {"name"});
            if (!child.children.empty())
                malformed("<uses-permission> takes no children", child.line);
            m.used_permissions.push_back(require_attr(child, "name"));
        } else if (child.tag == "activity" || child.tag == "service" ||
                   child.tag == "receiver" || child.tag == "provider") {
            ComponentKind kind = child.tag == "activity" ? ComponentKind::Activity
                               : child.tag == "service"  ? ComponentKind::Service
                               : child.tag == "receiver" ? ComponentKind::Receiver
                                                         : ComponentKind::Provider;
            ComponentDecl c = parse_component(child, kind);
            if (!component_names.insert(c.name).second)
                throw Error(ErrorKind::DuplicateComponent,
                            "component '" + c.name + "' declared twice", child.line);
            m.components.push_back(std::move(c));
        } else {
            malformed("unknown element <" + child.tag + "> inside <manifest>", child.line);
        }
    }
    return m;
}

AppManifest load_manifest_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open manifest file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_manifest(buf.str());
}

namespace {

std::string escape(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

const char* level_name(PermissionLevel level) {
    switch (level) {
    case PermissionLevel::Normal: return "normal";
    case PermissionLevel::Dangerous: return "dangerous";
    case PermissionLevel::Signature: return "signature";
    }
    return "?";
}

} // namespace

std::string serialize_manifest(const AppManifest& m) {
    std::ostringstream out;
    out << "<manifest package=\"" << escape(m.identity.package) << "\" targetSdk=\""
        << m.target_sdk << "\" signature=\"" << escape(m.identity.signature) << "\">\n";
    for (const PermissionDecl& p : m.defined_permissions)
        out << "  <permission name=\"" << escape(p.name) << "\" level=\""
            << level_name(p.level) << "\"/>\n";
    for (const std::string& name : m.used_permissions)
        out << "  <uses-permission name=\"" << escape(name) << "\"/>\n";
    for (const ComponentDecl& c : m.components) {
        out << "  <" << component_kind_name(c.kind) << " name=\"" << escape(c.name) << "\"";
        if (c.raw_exported != RawExported::Unset)
            out << " exported=\"" << (c.raw_exported == RawExported::True ? "true" : "false")
                << "\"";
        if (c.permission_guard) out << " permission=\"" << escape(*c.permission_guard) << "\"";
        if (!c.bound_interfaces.empty()) {
            out << " interfaces=\"";
            for (size_t i = 0; i < c.bound_interfaces.size(); ++i)
                out << (i ? "," : "") << escape(c.bound_interfaces[i]);
            out << "\"";
        }
        if (c.filters.empty()) {
            out << "/>\n";
            continue;
        }
        out << ">\n";
        for (const IntentFilterDecl& f : c.filters) {
            out << "    <intent-filter>\n";
            for (const std::string& a : f.actions)
                out << "      <action name=\"" << escape(a) << "\"/>\n";
            for (const std::string& cat : f.categories)
                out << "      <category name=\"" << escape(cat) << "\"/>\n";
            out << "    </intent-filter>\n";
        }
        out << "  </" << component_kind_name(c.kind) << ">\n";
    }
    out << "</manifest>\n";
    return out.str();
}

ExportStatus resolve_export(const ComponentDecl& c, int target_sdk) {
    switch (c.raw_exported) {
    case RawExported::True:
        return {true, ExportMode::Explicit};
    case RawExported::False:
        return {false, ExportMode::NotExported};
    case RawExported::Unset:
        break;
    }
    if (c.kind == ComponentKind::Provider) {
        if (target_sdk < 17) return {true, ExportMode::Implicit};
        return {false, ExportMode::NotExported};
    }
    if (!c.filters.empty()) return {true, ExportMode::Implicit};
    return {false, ExportMode::NotExported};
}

} // namespace hijackguard
