// Command-line front end; links only the C API.
#include <cstdint>
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "chainless.h"

namespace {

int fail_config(const std::string& context) {
    std::fprintf(stderr, "error: %s: %s\n", context.c_str(), chainless_last_error());
    return 2;
}

int cmd_run(const std::string& scenario, const std::string& out_dir, bool have_seed,
            uint64_t seed, bool serial, const std::string& report_format) {
    chainless_report* report = nullptr;
    chainless_status status =
        chainless_run(scenario.c_str(), out_dir.empty() ? nullptr : out_dir.c_str(),
                      have_seed ? &seed : nullptr, serial ? 1 : 0, &report);
    if (status == CHAINLESS_CONFIG_ERROR) return fail_config("run " + scenario);
    if (status == CHAINLESS_INTERNAL_ERROR) {
        std::fprintf(stderr, "internal error: %s\n", chainless_last_error());
        return 2;
    }
    char* rendered = chainless_report_render(report, report_format == "machine-readable" ? 1 : 0);
    std::fputs(rendered, stdout);
    chainless_string_free(rendered);
    int exit_code = chainless_report_all_passed(report) ? 0 : 1;
    chainless_report_free(report);
    return exit_code;
}

int cmd_compare(const std::string& scenario, const std::string& models) {
    char* table = nullptr;
    chainless_status status = chainless_compare_trust(scenario.c_str(), models.c_str(), &table);
    if (status != CHAINLESS_OK) return fail_config("compare-trust " + scenario);
    std::fputs(table, stdout);
    chainless_string_free(table);
    return 0;
}

int cmd_verify(const std::string& trace) {
    char* detail = nullptr;
    chainless_status status = chainless_verify_trace(trace.c_str(), &detail);
    if (status == CHAINLESS_CONFIG_ERROR || status == CHAINLESS_INTERNAL_ERROR)
        return fail_config("verify-trace " + trace);
    std::printf("%s\n", detail);
    chainless_string_free(detail);
    return status == CHAINLESS_OK ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App cli{"chainless: deterministic app-chain simulator"};
    cli.require_subcommand(1);

    std::string scenario, out_dir, models, trace;
    uint64_t seed = 0;
    bool serial = false;
    std::string report_format = "text";

    auto* run = cli.add_subcommand("run", "run a scenario and report expectations");
    run->add_option("scenario", scenario, "scenario file")->required();
    run->add_option("--out", out_dir, "directory for exported logs")->required();
    auto* seed_opt = run->add_option("--seed", seed, "override the scenario seed");
    run->add_flag("--serial", serial, "disable parallel verification");
    run->add_option("--report", report_format, "report format")
        ->check(CLI::IsMember({"text", "machine-readable"}));

    auto* compare = cli.add_subcommand("compare-trust", "run once per trust model");
    compare->add_option("scenario", scenario, "scenario file")->required();
    compare->add_option("--models", models,
                        "comma-separated models (committee params use ';', e.g. committee:4;3)")
        ->required();

    auto* verify = cli.add_subcommand("verify-trace", "offline replay of a trace export");
    verify->add_option("trace", trace, "trace export file")->required();

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = cli.exit(e);
        return rc == 0 ? 0 : 2;  // usage problems are configuration errors
    }

    if (run->parsed())
        return cmd_run(scenario, out_dir, seed_opt->count() > 0, seed, serial, report_format);
    if (compare->parsed()) return cmd_compare(scenario, models);
    return cmd_verify(trace);
}
