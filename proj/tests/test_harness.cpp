#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "chainless/harness.hpp"

using namespace chainless;
namespace fs = std::filesystem;

namespace {

const char* kHappyPath = R"(
seed 42
chain 1
chain 2
chain 3
fund 1 alice USD 100
fund 1 bob SPOT 10
app spot kind=zkspot chain=3 markets=SPOT/USD mu=4 nu=2 trust=full da=public
run_until 14
at 1 deposit 1 spot alice USD 100
at 1 deposit 1 spot bob SPOT 10
at 1 claim
at 2 settle
at 4 place spot bob sell SPOT/USD 5 10
at 5 place spot alice buy SPOT/USD 5 10
at 6 settle
at 7 withdraw spot bob USD 50 2
at 10 settle
expect verdict spot 0 accepted
expect settled_epochs 3
expect premature_claims 2
expect conservation
expect chain_balance 2 bob USD 50
expect app_available spot alice SPOT 10
)";

const char* kCorrupt = R"(
seed 7
chain 1
app ctr kind=counter chain=1 mu=2 nu=2 trust=full fault=corrupt_post_root:1
run_until 6
at 0 input ctr KzE=
at 0 input ctr KzE=
at 1 input ctr KzE=
at 1 input ctr KzE=
at 2 input ctr KzE=
at 2 input ctr KzE=
at 4 settle
expect verdict ctr 1 rejected
expect rejected_blocks ctr 1
)";

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("chainless-test-" + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("scenario parser reports schema violations with line numbers") {
    CHECK_THROWS_WITH_AS((void)scen::parse_scenario("seed\n"), doctest::Contains("line 1"),
                         Error);
    CHECK_THROWS_WITH_AS(
        (void)scen::parse_scenario("seed 1\nchain 1\napp a kind=counter chain=2\nrun_until 1\n"),
        doctest::Contains("line 3"), Error);
    CHECK_THROWS_WITH_AS(
        (void)scen::parse_scenario(
            "seed 1\nchain 1\napp a kind=counter chain=1\nat 5 settle\nat 3 settle\nrun_until 9\n"),
        doctest::Contains("nondecreasing"), Error);
    // undeclared app in an expectation
    CHECK_THROWS_WITH_AS(
        (void)scen::parse_scenario(
            "seed 1\nchain 1\napp a kind=counter chain=1\nrun_until 1\nexpect verdict b 0 accepted\n"),
        doctest::Contains("not declared"), Error);
}

TEST_CASE("happy-path run meets all its expectations") {
    auto scenario = scen::parse_scenario(kHappyPath);
    auto report = harness::run_scenario(scenario);
    for (const auto& e : report.expectations) {
        CAPTURE(e.name);
        CAPTURE(e.detail);
        CHECK(e.pass);
    }
    CHECK(report.expectations.size() == scenario.expectations.size());
    CHECK(report.all_passed());
    CHECK(report.transitions_executed > 0);
    CHECK(report.transitions_replayed >= report.transitions_executed);  // full replay
}

TEST_CASE("fingerprints are reproducible and serial mode matches parallel") {
    auto scenario = scen::parse_scenario(kHappyPath);
    auto a = harness::run_scenario(scenario);
    auto b = harness::run_scenario(scenario);
    harness::RunOptions serial;
    serial.serial = true;
    auto c = harness::run_scenario(scenario, serial);
    CHECK(a.fingerprint == b.fingerprint);
    CHECK(a.fingerprint == c.fingerprint);

    harness::RunOptions reseeded;
    reseeded.seed_override = 43;
    auto d = harness::run_scenario(scenario, reseeded);
    // full re-execution consumes no randomness, so even a reseed matches;
    // what must never happen is a third distinct fingerprint between runs
    CHECK(d.fingerprint == a.fingerprint);
}

TEST_CASE("the corrupt-sequencer scenario observes the rejection it expects") {
    auto report = harness::run_scenario(scen::parse_scenario(kCorrupt));
    CHECK(report.all_passed());
    CHECK(report.rejected_receipts == 1);
}

TEST_CASE("run writes the advertised exports and a loadable trace") {
    TempDir dir("exports");
    harness::RunOptions opts;
    opts.out_dir = dir.path.string();
    auto report = harness::run_scenario(scen::parse_scenario(kHappyPath), opts);
    for (const char* name : {"receipts.log", "bridge_events.log", "settlement.log", "trace.log",
                             "metrics.log", "report.txt"})
        CHECK(fs::exists(dir.path / name));
    CHECK(slurp(dir.path / "report.txt").find(report.fingerprint.hex()) != std::string::npos);

    auto verified = harness::verify_trace_export(slurp(dir.path / "trace.log"));
    CHECK(verified.ok);
    CHECK(verified.apps == 1);
    CHECK(verified.blocks > 0);
}

TEST_CASE("verify-trace flags a corrupted export") {
    TempDir dir("tamper");
    harness::RunOptions opts;
    opts.out_dir = dir.path.string();
    (void)harness::run_scenario(scen::parse_scenario(kCorrupt), opts);
    auto text = slurp(dir.path / "trace.log");
    auto result = harness::verify_trace_export(text);
    CHECK_FALSE(result.ok);  // the export carries the corrupt published block
    CHECK(result.detail.find("block 1") != std::string::npos);

    CHECK_THROWS_AS((void)harness::verify_trace_export("block nonsense\n"), Error);
    CHECK_THROWS_AS((void)harness::verify_trace_export(""), Error);
}

TEST_CASE("machine and text reports carry the same verdicts") {
    auto report = harness::run_scenario(scen::parse_scenario(kCorrupt));
    auto text = report.text_report();
    auto machine = report.machine_report();
    CHECK(text.find("result pass") != std::string::npos);
    CHECK(machine.find("result=pass") != std::string::npos);
    CHECK(machine.find("fingerprint=" + report.fingerprint.hex()) != std::string::npos);
}

TEST_CASE("compare_trust_models produces the cost/detection table") {
    auto rows = harness::compare_trust_models(
        scen::parse_scenario(kCorrupt),
        {trust::TrustModel::operator_trust(), trust::TrustModel::spotcheck(0.5),
         trust::TrustModel::committee(4, 3), trust::TrustModel::full()});
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].model == "operator");
    CHECK_FALSE(rows[0].detected);
    CHECK(rows[0].transitions_replayed == 0);
    CHECK(rows[3].model == "full");
    CHECK(rows[3].detected);
    // committee replays with every honest validator; full replays once
    CHECK(rows[2].transitions_replayed > rows[3].transitions_replayed);
}

TEST_CASE("isolation: a corrupt operator-trust app cannot overdraw the bridge") {
    auto scenario = scen::parse_scenario(R"(
seed 9
chain 1
chain 2
fund 1 alice USD 100
app rogue kind=zkspot chain=2 markets=SPOT/USD mu=2 nu=2 trust=operator fault=corrupt_post_root:0 da=public
run_until 8
at 1 deposit 1 rogue alice USD 100
at 2 settle
at 5 forge_claim 1 2 USD 150
at 6 settle
expect pessimistic_denials 1
expect conservation
)");
    auto report = harness::run_scenario(scenario);
    for (const auto& e : report.expectations) {
        CAPTURE(e.name);
        CAPTURE(e.detail);
        CHECK(e.pass);
    }
}
