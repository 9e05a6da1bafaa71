#pragma once

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "hijackguard/manifest.hpp"
#include "hijackguard/syscatalog.hpp"

#ifndef HIJACKGUARD_DATA_DIR
#define HIJACKGUARD_DATA_DIR "data"
#endif

namespace testsupport {

inline std::string data_dir() {
    return HIJACKGUARD_DATA_DIR;
}

inline std::string data_path(const std::string& rel) {
    return data_dir() + "/" + rel;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline const hijackguard::SystemCatalog& default_catalog() {
    static hijackguard::SystemCatalog cat =
        hijackguard::load_catalog_file(data_path("catalog.txt"));
    return cat;
}

inline hijackguard::ComponentDecl make_component(
    const std::string& name, hijackguard::ComponentKind kind,
    hijackguard::RawExported raw = hijackguard::RawExported::Unset,
    std::vector<std::string> actions = {}) {
    hijackguard::ComponentDecl c;
    c.name = name;
    c.kind = kind;
    c.raw_exported = raw;
    if (!actions.empty()) c.filters.push_back({std::move(actions), {}});
    return c;
}

struct CommandResult {
    int exit_code = -1;
    std::string output; // stdout only
};

inline CommandResult run_command(const std::string& command) {
    CommandResult result;
    FILE* pipe = popen(command.c_str(), "r");
    if (!pipe) return result;
    std::array<char, 4096> chunk{};
    size_t n;
    while ((n = fread(chunk.data(), 1, chunk.size(), pipe)) > 0)
        result.output.append(chunk.data(), n);
    int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

} // namespace testsupport
