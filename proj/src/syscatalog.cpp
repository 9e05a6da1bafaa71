#include "hijackguard/syscatalog.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "hijackguard/error.hpp"

namespace hijackguard {

const PermissionDecl* SystemCatalog::find_permission(const std::string& name) const {
    auto it = std::find_if(sys_perms.begin(), sys_perms.end(),
                           [&](const PermissionDecl& p) { return p.name == name; });
    return it == sys_perms.end() ? nullptr : &*it;
}

namespace {

std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> tokens;
    std::stringstream in(line);
    std::string token;
    while (in >> token) {
        if (token[0] == '#') break;
        tokens.push_back(token);
    }
    return tokens;
}

PermissionLevel parse_level(const std::string& text, int line_no) {
    if (text == "normal") return PermissionLevel::Normal;
    if (text == "dangerous") return PermissionLevel::Dangerous;
    if (text == "signature") return PermissionLevel::Signature;
    throw Error(ErrorKind::MalformedDocument,
                "invalid permission level '" + text + "'", line_no);
}

} // namespace

SystemCatalog load_catalog(const std::string& text) {
    SystemCatalog cat;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::vector<std::string> tokens = tokenize(line);
        if (tokens.empty()) continue;
        if (tokens[0].front() == '[') {
            if (tokens.size() != 1 || tokens[0].back() != ']')
                throw Error(ErrorKind::MalformedDocument, "bad section header", line_no);
            section = tokens[0].substr(1, tokens[0].size() - 2);
            if (section != "sys_perms" && section != "sys_actions" &&
                section != "sys_only_actions" && section != "system_binaries")
                throw Error(ErrorKind::MalformedDocument,
                            "unknown section [" + section + "]", line_no);
            continue;
        }
        if (section.empty())
            throw Error(ErrorKind::MalformedDocument, "entry before any section", line_no);
        if (section == "sys_perms") {
            if (tokens.size() < 2 || tokens.size() > 3 ||
                (tokens.size() == 3 && tokens[2] != "system-only"))
                throw Error(ErrorKind::MalformedDocument,
                            "sys_perms entries are 'name level [system-only]'", line_no);
            PermissionDecl p;
            p.name = tokens[0];
            p.level = parse_level(tokens[1], line_no);
            p.system_defined = true;
            p.system_only = tokens.size() == 3;
            cat.sys_perms.push_back(p);
        } else {
            if (tokens.size() != 1)
                throw Error(ErrorKind::MalformedDocument,
                            "[" + section + "] entries are a single name", line_no);
            if (section == "sys_actions")
                cat.sys_actions.insert(tokens[0]);
            else if (section == "sys_only_actions")
                cat.sys_only_actions.insert(tokens[0]);
            else
                cat.system_binaries.insert(tokens[0]);
        }
    }
    for (const std::string& action : cat.sys_only_actions)
        if (cat.sys_actions.count(action) == 0)
            throw Error(ErrorKind::SysOnlyNotSubset,
                        "'" + action + "' is listed as system-only but not as a system action");
    return cat;
}

SystemCatalog load_catalog_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open catalog file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_catalog(buf.str());
}

} // namespace hijackguard
