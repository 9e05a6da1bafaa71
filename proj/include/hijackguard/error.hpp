#pragma once

#include <stdexcept>
#include <string>

namespace hijackguard {

enum class ErrorKind {
    // document parsing
    MalformedDocument,
    DuplicateComponent,
    FilterWithoutAction,
    SysOnlyNotSubset,
    MalformedLine,
    NonMonotoneTxid,
    MalformedScenario,
    // binder recovery
    CalleeNotInLog,
    NoAppCallerFound,
    // device / dispatch
    DuplicatePackage,
    UnknownCaller,
    UnknownCallee,
    UnknownComponent,
    IllegalEntry,
    UnknownPid,
    // misc
    Io,
};

const char* error_kind_name(ErrorKind kind);

/// All library failures are reported as Error; kind() identifies the
/// contract violation and line() carries a 1-based line number for the
/// line-oriented formats (0 when not applicable).
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message, int line = 0)
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message),
          kind_(kind),
          line_(line) {}

    ErrorKind kind() const { return kind_; }
    int line() const { return line_; }

private:
    ErrorKind kind_;
    int line_;
};

} // namespace hijackguard
