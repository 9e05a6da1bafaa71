#include "hijackguard/binderlog.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "hijackguard/error.hpp"

namespace hijackguard {

namespace {

class LineCursor {
public:
    LineCursor(const std::string& line, int line_no) : line_(line), line_no_(line_no) {}

    [[noreturn]] void fail(const std::string& what) const {
        throw Error(ErrorKind::MalformedLine, what, line_no_);
    }

    void skip_spaces() {
        while (pos_ < line_.size() && line_[pos_] == ' ') ++pos_;
    }

    bool at_end() const { return pos_ >= line_.size(); }

    template <typename T>
    T read_number(const char* what) {
        T value{};
        auto [ptr, ec] = std::from_chars(line_.data() + pos_, line_.data() + line_.size(), value);
        if (ec != std::errc() || ptr == line_.data() + pos_)
            fail(std::string("expected ") + what);
        pos_ = static_cast<size_t>(ptr - line_.data());
        return value;
    }

    void expect(char c, const char* what) {
        if (pos_ >= line_.size() || line_[pos_] != c) fail(what);
        ++pos_;
    }

    std::string read_token(const char* what) {
        size_t start = pos_;
        while (pos_ < line_.size() && line_[pos_] != ' ') ++pos_;
        if (pos_ == start) fail(std::string("expected ") + what);
        return line_.substr(start, pos_ - start);
    }

    void expect_word(const char* word) {
        std::string token = read_token(word);
        if (token != word) fail(std::string("expected '") + word + "'");
    }

    std::string rest() {
        if (at_end()) return {};
        ++pos_; // the single separating space
        return line_.substr(pos_);
    }

private:
    const std::string& line_;
    size_t pos_ = 0;
    int line_no_;
};

BinderTransaction parse_line(const std::string& line, int line_no) {
    LineCursor cur(line, line_no);
    BinderTransaction tx;
    tx.txid = cur.read_number<std::uint64_t>("a transaction id");
    cur.expect(':', "expected ':' after the transaction id");
    cur.skip_spaces();
    tx.action = cur.read_token("a binder action");
    cur.skip_spaces();
    cur.expect_word("from");
    cur.skip_spaces();
    tx.from_pid = cur.read_number<int>("a pid");
    cur.expect(':', "expected pid:tid");
    tx.from_tid = cur.read_number<int>("a tid");
    cur.skip_spaces();
    cur.expect_word("to");
    cur.skip_spaces();
    tx.to_pid = cur.read_number<int>("a pid");
    cur.expect(':', "expected pid:tid");
    tx.to_tid = cur.read_number<int>("a tid");
    tx.node_info = cur.rest();
    if (tx.from_pid <= 0 || tx.from_tid <= 0 || tx.to_pid <= 0 || tx.to_tid <= 0)
        cur.fail("pids and tids must be positive");
    return tx;
}

} // namespace

std::vector<BinderTransaction> parse_transaction_log(const std::string& text) {
    std::vector<BinderTransaction> log;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    bool have_prev = false;
    std::uint64_t prev_txid = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        BinderTransaction tx = parse_line(line, line_no);
        if (have_prev && tx.txid <= prev_txid)
            throw Error(ErrorKind::NonMonotoneTxid,
                        "transaction id " + std::to_string(tx.txid) +
                            " does not increase past " + std::to_string(prev_txid),
                        line_no);
        prev_txid = tx.txid;
        have_prev = true;
        log.push_back(std::move(tx));
    }
    return log;
}

std::vector<BinderTransaction> load_transaction_log_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open transaction log: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_transaction_log(buf.str());
}

std::string format_transaction(const BinderTransaction& tx) {
    std::ostringstream out;
    out << tx.txid << ": " << tx.action << " from " << tx.from_pid << ':' << tx.from_tid
        << " to " << tx.to_pid << ':' << tx.to_tid;
    if (!tx.node_info.empty()) out << ' ' << tx.node_info;
    return out.str();
}

ProcessTable load_process_table(const std::string& text) {
    ProcessTable table;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::stringstream fields(line);
        std::string first;
        if (!(fields >> first) || first[0] == '#') continue;
        int pid = 0;
        auto [ptr, ec] = std::from_chars(first.data(), first.data() + first.size(), pid);
        if (ec != std::errc() || ptr != first.data() + first.size() || pid <= 0)
            throw Error(ErrorKind::MalformedLine, "expected a pid", line_no);
        ProcessEntry entry;
        if (!(fields >> entry.uid >> entry.package))
            throw Error(ErrorKind::MalformedLine, "expected 'pid uid package'", line_no);
        if (!table.entries.emplace(pid, std::move(entry)).second)
            throw Error(ErrorKind::MalformedLine,
                        "pid " + std::to_string(pid) + " listed twice", line_no);
    }
    return table;
}

ProcessTable load_process_table_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open process table: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_process_table(buf.str());
}

bool is_system_process(const ProcessEntry& proc, const SystemCatalog& cat) {
    return proc.uid < 10000 || cat.is_system_binary(proc.package);
}

CallerRecovery recover_caller(std::span<const BinderTransaction> log, int callee_pid,
                              const ProcessTable& procs, const SystemCatalog& cat,
                              int window) {
    if (!procs.find(callee_pid))
        throw Error(ErrorKind::UnknownPid,
                    "callee pid " + std::to_string(callee_pid) + " is not in the process table");

    std::ptrdiff_t located = -1;
    for (std::ptrdiff_t i = 0; i < std::ssize(log); ++i) {
        if (log[i].from_pid == callee_pid) {
            located = i;
            break;
        }
    }
    if (located < 0)
        throw Error(ErrorKind::CalleeNotInLog,
                    "callee pid " + std::to_string(callee_pid) + " never sends in this log");

    auto classify = [&](int pid) -> const ProcessEntry* {
        if (pid == callee_pid) return nullptr;
        const ProcessEntry* proc = procs.find(pid);
        if (!proc || is_system_process(*proc, cat)) return nullptr;
        return proc;
    };

    std::ptrdiff_t lowest = std::max<std::ptrdiff_t>(0, located - window + 1);
    for (std::ptrdiff_t i = located; i >= lowest; --i) {
        for (int pid : {log[i].from_pid, log[i].to_pid}) {
            if (const ProcessEntry* proc = classify(pid))
                return {pid, AppIdentity{proc->package, "", proc->uid}};
        }
    }
    throw Error(ErrorKind::NoAppCallerFound,
                "every upstream participant is a system process");
}

} // namespace hijackguard
