#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "support.hpp"

#ifndef HIJACKGUARD_CLI_PATH
#define HIJACKGUARD_CLI_PATH "hijackguard"
#endif

namespace {

using testsupport::CommandResult;
using testsupport::run_command;

std::string cli() {
    return HIJACKGUARD_CLI_PATH;
}

std::string fixture_args(const std::vector<std::string>& names) {
    std::string args;
    for (const std::string& name : names)
        args += " " + testsupport::data_path("fixtures/" + name + ".xml");
    return args;
}

const std::vector<std::string> kTenApps = {"telegram", "zxing",  "terminal", "k9mail",
                                           "wordpress", "signal", "wire",     "bitcoin",
                                           "chatsecure", "zirco"};

std::map<std::string, std::vector<std::string>> parse_tsv(const std::string& text) {
    std::map<std::string, std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    std::getline(in, line); // header
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream cell_in(line);
        std::string cell;
        while (std::getline(cell_in, cell, '\t')) cells.push_back(cell);
        if (!cells.empty()) rows[cells[0]] = cells;
    }
    return rows;
}

} // namespace

TEST_CASE("scan reproduces the published risky counts for the ten bundled apps") {
    CommandResult result = run_command(cli() + " scan" + fixture_args(kTenApps));
    CHECK(result.exit_code == 2); // risky components found
    auto rows = parse_tsv(result.output);
    REQUIRE(rows.size() == 10);
    // package -> {risky activity, service, receiver, provider, stub lines}
    std::map<std::string, std::vector<std::string>> expected = {
        {"org.telegram.messenger", {"0", "1", "4", "0"}},
        {"com.google.zxing.client.android", {"4", "0", "0", "0"}},
        {"jackpal.androidterm", {"3", "1", "0", "0"}},
        {"com.fsck.k9", {"1", "0", "4", "2"}},
        {"org.wordpress.android", {"1", "0", "2", "0"}},
        {"org.thoughtcrime.securesms", {"0", "0", "5", "0"}},
        {"com.wire", {"0", "0", "1", "0"}},
        {"de.schildbach.wallet", {"0", "0", "2", "0"}},
        {"info.guardianproject.otr.app.im", {"1", "0", "0", "0"}},
        {"org.zirco", {"0", "0", "1", "2"}},
    };
    for (const auto& [package, risky] : expected) {
        CAPTURE(package);
        REQUIRE(rows.count(package) == 1);
        const std::vector<std::string>& cells = rows[package];
        REQUIRE(cells.size() == 19);
        CHECK(std::vector<std::string>(cells.begin() + 14, cells.begin() + 18) == risky);
    }
    CHECK(rows["com.google.zxing.client.android"][18] == "24");
    CHECK(rows["com.wire"][18] == "2");
    CHECK(rows["org.zirco"][18] == "26");
}

TEST_CASE("scan with no inputs prints only the header and exits cleanly") {
    CommandResult result = run_command(cli() + " scan");
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("package\t") == 0);
    CHECK(result.output.find('\n') == result.output.size() - 1);
}

TEST_CASE("scan reports unreadable files and exits 1") {
    CommandResult result = run_command(cli() + " scan /no/such/file.xml 2>/dev/null");
    CHECK(result.exit_code == 1);
}

TEST_CASE("legacy rules change the risky picture for explicit receivers") {
    std::string fixture = testsupport::data_path("fixtures/k9mail.xml");
    CommandResult final_rules = run_command(cli() + " scan " + fixture);
    CommandResult legacy_rules = run_command(cli() + " scan --legacy-rules " + fixture);
    // K-9's risky set is implicit-only, so the two rule sets agree here
    CHECK(parse_tsv(final_rules.output) == parse_tsv(legacy_rules.output));

    // an explicitly exported receiver listening to a system-only broadcast
    // is only flagged by the final rules
    std::string path = "/tmp/hijackguard_explicit_receiver.xml";
    {
        std::ofstream out(path);
        out << R"(<manifest package="com.divergence" targetSdk="23" signature="s">
                    <receiver name="R" exported="true">
                      <intent-filter>
                        <action name="android.intent.action.BOOT_COMPLETED"/>
                      </intent-filter>
                    </receiver>
                  </manifest>)";
    }
    CommandResult flagged = run_command(cli() + " scan " + path);
    CommandResult unflagged = run_command(cli() + " scan --legacy-rules " + path);
    CHECK(flagged.exit_code == 2);
    CHECK(unflagged.exit_code == 0);
    CHECK(parse_tsv(flagged.output)["com.divergence"][16] == "1");
    CHECK(parse_tsv(unflagged.output)["com.divergence"][16] == "0");
    std::remove(path.c_str());
}

TEST_CASE("simulate runs the bundled case studies") {
    CommandResult result = run_command(
        cli() + " simulate --scenario " + testsupport::data_path("scenarios/case_studies.json"));
    CHECK(result.exit_code == 0);
    std::string expected =
        R"({"verdict":"alert","policy":"P3","executed":false,"replayed":false}
{"verdict":"alert","policy":"P4","executed":false,"replayed":false}
{"verdict":"alert","policy":"P3","executed":false,"replayed":false}
{"verdict":"alert","policy":"P3","executed":false,"replayed":false}
{"verdict":"deny","policy":"P1","executed":false,"replayed":false}
{"verdict":"deny","policy":"P2","executed":false,"replayed":false}
{"verdict":"deny","policy":"P5","executed":false,"replayed":false}
{"verdict":"deny","policy":"P6","executed":false,"replayed":false}
)";
    CHECK(result.output == expected);
}

TEST_CASE("simulate is byte-stable for a fixed seed and verdict-stable across seeds") {
    std::string base = cli() + " simulate --scenario " +
                       testsupport::data_path("scenarios/case_studies.json");
    CommandResult a = run_command(base + " --seed 7");
    CommandResult b = run_command(base + " --seed 7");
    CommandResult c = run_command(base + " --seed 9");
    CHECK(a.output == b.output);
    // hop counts change with the seed; verdicts do not
    CHECK(a.output == c.output);
}

TEST_CASE("simulate reports unknown components as error records with exit 1") {
    std::string path = "/tmp/hijackguard_bad_scenario.json";
    {
        std::ofstream out(path);
        out << R"({"installs": [")" << testsupport::data_path("fixtures/wire.xml")
            << R"("], "requests": [{"caller": "com.wire", "callee": "com.wire",
                 "component": "NoSuchComponent", "entry": "onCreate", "input": {}}]})";
    }
    CommandResult result = run_command(cli() + " simulate --scenario " + path);
    CHECK(result.exit_code == 1);
    CHECK(result.output.find("\"error\"") != std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("simulate honors a scripted allow for the replay path") {
    std::string path = "/tmp/hijackguard_replay_scenario.json";
    {
        std::ofstream out(path);
        out << R"({"installs": [")" << testsupport::data_path("fixtures/attack.xml") << R"(", ")"
            << testsupport::data_path("fixtures/terminal.xml") << R"("],
                 "requests": [{"caller": "com.attack.demo", "callee": "jackpal.androidterm",
                 "component": "RemoteInterface", "entry": "onCreate",
                 "input": {"action": "jackpal.androidterm.OPEN_NEW_WINDOW"},
                 "oracle": "script:allow"}]})";
    }
    CommandResult result = run_command(cli() + " simulate --scenario " + path);
    CHECK(result.exit_code == 0);
    CHECK(result.output ==
          "{\"verdict\":\"alert\",\"policy\":\"P3\",\"executed\":true,\"replayed\":true}\n");
    std::remove(path.c_str());
}

TEST_CASE("binder subcommand recovers the example caller") {
    CommandResult result = run_command(
        cli() + " binder --log " + testsupport::data_path("examples/transaction.log") +
        " --procs " + testsupport::data_path("examples/procs.txt") + " --callee 6767");
    CHECK(result.exit_code == 0);
    CHECK(result.output == "pid=7569 uid=10123 package=com.evil.app\n");
}

TEST_CASE("binder subcommand surfaces recovery errors") {
    // pid absent from the process table
    CommandResult unknown = run_command(
        cli() + " binder --log " + testsupport::data_path("examples/transaction.log") +
        " --procs " + testsupport::data_path("examples/procs.txt") + " --callee 9999 2>/dev/null");
    CHECK(unknown.exit_code == 1);
    // callee present but never sends in this log
    CommandResult silent = run_command(
        cli() + " binder --log " + testsupport::data_path("examples/transaction.log") +
        " --procs " + testsupport::data_path("examples/procs.txt") + " --callee 8001 2>/dev/null");
    CHECK(silent.exit_code == 1);
}

TEST_CASE("stub-estimate totals") {
    auto total_of = [&](const std::string& fixture) {
        CommandResult result = run_command(
            cli() + " stub-estimate --manifest " +
            testsupport::data_path("fixtures/" + fixture + ".xml"));
        REQUIRE(result.exit_code == 0);
        size_t pos = result.output.rfind("TOTAL");
        REQUIRE(pos != std::string::npos);
        std::stringstream in(result.output.substr(pos));
        std::string label, dash;
        int entries = 0, lines = 0;
        in >> label >> dash >> entries >> lines;
        return lines;
    };
    CHECK(total_of("zxing") == 24);
    CHECK(total_of("wire") == 2);
    CHECK(total_of("zirco") == 26);
    CHECK(total_of("terminal") == 30);
}

TEST_CASE("HIJACKGUARD_CATALOG env var overrides the default catalog") {
    // a catalog that marks the zxing actions as system turns its activities
    // non-risky
    std::string path = "/tmp/hijackguard_all_system_catalog.txt";
    {
        std::ofstream out(path);
        out << "[sys_actions]\n"
               "android.intent.action.MAIN\n"
               "com.google.zxing.client.android.SCAN\n"
               "com.google.zxing.client.android.ENCODE\n"
               "com.google.zxing.client.android.SEARCH_BOOK_CONTENTS\n"
               "com.google.zxing.client.android.SHARE\n";
    }
    CommandResult result = run_command("HIJACKGUARD_CATALOG=" + path + " " + cli() + " scan" +
                                       fixture_args({"zxing"}));
    CHECK(result.exit_code == 0); // nothing risky any more
    auto rows = parse_tsv(result.output);
    CHECK(rows["com.google.zxing.client.android"][14] == "0");
    std::remove(path.c_str());
}
