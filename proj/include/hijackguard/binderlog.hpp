#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hijackguard/manifest.hpp"
#include "hijackguard/syscatalog.hpp"

namespace hijackguard {

/// One transaction_log line:
///   <txid>: <action> from <pid>:<tid> to <pid>:<tid> <node_info>
/// node_info is kept verbatim (may be empty). txids are strictly increasing
/// within a log; pids and tids are positive.
struct BinderTransaction {
    std::uint64_t txid = 0;
    std::string action;
    int from_pid = 0;
    int from_tid = 0;
    int to_pid = 0;
    int to_tid = 0;
    std::string node_info;

    bool operator==(const BinderTransaction&) const = default;
};

struct ProcessEntry {
    int uid = 0;
    std::string package;

    bool operator==(const ProcessEntry&) const = default;
};

struct ProcessTable {
    std::map<int, ProcessEntry> entries; // pid -> uid/package

    const ProcessEntry* find(int pid) const {
        auto it = entries.find(pid);
        return it == entries.end() ? nullptr : &it->second;
    }
};

std::vector<BinderTransaction> parse_transaction_log(const std::string& text);
std::vector<BinderTransaction> load_transaction_log_file(const std::string& path);

std::string format_transaction(const BinderTransaction& tx);

/// ProcessTable file: lines of `pid uid package`, '#' comments.
ProcessTable load_process_table(const std::string& text);
ProcessTable load_process_table_file(const std::string& path);

/// A process is a system process iff its uid is below 10000 or its package
/// names a system binary; everything else is an app process.
bool is_system_process(const ProcessEntry& proc, const SystemCatalog& cat);

struct CallerRecovery {
    int pid = 0;
    AppIdentity identity; // signature unknown at this layer
};

inline constexpr int kDefaultRecoveryWindow = 128;

/// Caller recovery over a transaction log: locate the first transaction
/// sent from the callee pid, then walk backwards (nearest first, from- then
/// to-participant) until an app process other than the callee appears.
/// The walk inspects at most `window` transactions, the located one
/// included. Throws CalleeNotInLog / NoAppCallerFound.
CallerRecovery recover_caller(std::span<const BinderTransaction> log, int callee_pid,
                              const ProcessTable& procs, const SystemCatalog& cat,
                              int window = kDefaultRecoveryWindow);

} // namespace hijackguard
