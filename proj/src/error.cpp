#include "hijackguard/error.hpp"

namespace hijackguard {

const char* error_kind_name(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::MalformedDocument: return "MalformedDocument";
    case ErrorKind::DuplicateComponent: return "DuplicateComponent";
    case ErrorKind::FilterWithoutAction: return "FilterWithoutAction";
    case ErrorKind::SysOnlyNotSubset: return "SysOnlyNotSubset";
    case ErrorKind::MalformedLine: return "MalformedLine";
    case ErrorKind::NonMonotoneTxid: return "NonMonotoneTxid";
    case ErrorKind::MalformedScenario: return "MalformedScenario";
    case ErrorKind::CalleeNotInLog: return "CalleeNotInLog";
    case ErrorKind::NoAppCallerFound: return "NoAppCallerFound";
    case ErrorKind::DuplicatePackage: return "DuplicatePackage";
    case ErrorKind::UnknownCaller: return "UnknownCaller";
    case ErrorKind::UnknownCallee: return "UnknownCallee";
    case ErrorKind::UnknownComponent: return "UnknownComponent";
    case ErrorKind::IllegalEntry: return "IllegalEntry";
    case ErrorKind::UnknownPid: return "UnknownPid";
    case ErrorKind::Io: return "Io";
    }
    return "Error";
}

} // namespace hijackguard
