#include "doctest.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "chainless.h"

namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("chainless-capi-" + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

fs::path write_scenario(const TempDir& dir, const std::string& body) {
    auto p = dir.path / "scenario.scn";
    std::ofstream out(p, std::ios::binary);
    out << body;
    return p;
}

const char* kScenario = R"(
seed 7
chain 1
app ctr kind=counter chain=1 mu=2 nu=2 trust=full fault=corrupt_post_root:1
run_until 6
at 0 input ctr KzE=
at 0 input ctr KzE=
at 1 input ctr KzE=
at 1 input ctr KzE=
at 4 settle
expect verdict ctr 1 rejected
)";

}  // namespace

TEST_CASE("run returns OK and a report for a passing scenario") {
    TempDir dir("run");
    auto path = write_scenario(dir, kScenario);
    chainless_report* report = nullptr;
    auto status = chainless_run(path.string().c_str(), nullptr, nullptr, 0, &report);
    REQUIRE(status == CHAINLESS_OK);
    REQUIRE(report != nullptr);
    CHECK(chainless_report_all_passed(report) == 1);
    CHECK(std::strlen(chainless_report_fingerprint(report)) == 64);

    char* text = chainless_report_render(report, 0);
    CHECK(std::string(text).find("result pass") != std::string::npos);
    chainless_string_free(text);
    char* machine = chainless_report_render(report, 1);
    CHECK(std::string(machine).find("result=pass") != std::string::npos);
    chainless_string_free(machine);
    chainless_report_free(report);
}

TEST_CASE("run distinguishes expectation failure from config error") {
    TempDir dir("fail");
    auto failing = write_scenario(
        dir, std::string(kScenario) + "expect verdict ctr 0 rejected\n");
    chainless_report* report = nullptr;
    auto status = chainless_run(failing.string().c_str(), nullptr, nullptr, 0, &report);
    CHECK(status == CHAINLESS_EXPECTATION_FAILED);
    REQUIRE(report != nullptr);
    CHECK(chainless_report_all_passed(report) == 0);
    chainless_report_free(report);

    report = nullptr;
    CHECK(chainless_run((dir.path / "missing.scn").string().c_str(), nullptr, nullptr, 0,
                        &report) == CHAINLESS_CONFIG_ERROR);
    CHECK(report == nullptr);
    CHECK(std::strlen(chainless_last_error()) > 0);
}

TEST_CASE("seed override and serial flag round-trip through the C layer") {
    TempDir dir("seed");
    auto path = write_scenario(dir, kScenario);
    chainless_report* a = nullptr;
    chainless_report* b = nullptr;
    uint64_t seed = 99;
    REQUIRE(chainless_run(path.string().c_str(), nullptr, &seed, 1, &a) == CHAINLESS_OK);
    REQUIRE(chainless_run(path.string().c_str(), nullptr, &seed, 0, &b) == CHAINLESS_OK);
    CHECK(std::string(chainless_report_fingerprint(a)) ==
          std::string(chainless_report_fingerprint(b)));
    chainless_report_free(a);
    chainless_report_free(b);
}

TEST_CASE("compare-trust renders a table through the C layer") {
    TempDir dir("cmp");
    auto path = write_scenario(dir, kScenario);
    char* table = nullptr;
    auto status =
        chainless_compare_trust(path.string().c_str(), "operator,committee:4;3,full", &table);
    REQUIRE(status == CHAINLESS_OK);
    std::string t(table);
    chainless_string_free(table);
    CHECK(t.find("operator") != std::string::npos);
    CHECK(t.find("committee:4,3") != std::string::npos);
    CHECK(t.find("full yes") != std::string::npos);

    CHECK(chainless_compare_trust(path.string().c_str(), "alchemy", &table) ==
          CHAINLESS_CONFIG_ERROR);
}

TEST_CASE("verify-trace statuses: valid, corrupt, malformed") {
    TempDir dir("trace");
    auto path = write_scenario(dir, kScenario);
    chainless_report* report = nullptr;
    auto out = dir.path / "out";
    REQUIRE(chainless_run(path.string().c_str(), out.string().c_str(), nullptr, 0, &report) ==
            CHAINLESS_OK);
    chainless_report_free(report);

    char* detail = nullptr;
    auto trace = (out / "trace.log").string();
    // this trace embeds the corrupt published block, so replay flags it
    CHECK(chainless_verify_trace(trace.c_str(), &detail) == CHAINLESS_EXPECTATION_FAILED);
    CHECK(std::string(detail).find("corrupt") != std::string::npos);
    chainless_string_free(detail);

    auto junk = dir.path / "junk.log";
    std::ofstream(junk) << "gibberish\n";
    CHECK(chainless_verify_trace(junk.string().c_str(), &detail) == CHAINLESS_CONFIG_ERROR);
}
