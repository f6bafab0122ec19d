#include "chainless.h"

#include <cstring>
#include <fstream>
#include <sstream>

#include "chainless/harness.hpp"

using namespace chainless;

struct chainless_report {
    harness::RunReport report;
    std::string fingerprint_hex;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

chainless_status status_for(const Error& e) {
    switch (e.code()) {
        case Errc::config:
        case Errc::io:
            return CHAINLESS_CONFIG_ERROR;
        default:
            return CHAINLESS_INTERNAL_ERROR;
    }
}

}  // namespace

extern "C" {

chainless_status chainless_run(const char* scenario_path, const char* out_dir,
                               const uint64_t* seed_override, int serial,
                               chainless_report** out_report) {
    g_last_error.clear();
    if (!scenario_path || !out_report) {
        g_last_error = "scenario_path and out_report are required";
        return CHAINLESS_CONFIG_ERROR;
    }
    *out_report = nullptr;
    try {
        auto scenario = scen::load_scenario(scenario_path);
        harness::RunOptions opts;
        opts.serial = serial != 0;
        if (out_dir) opts.out_dir = out_dir;
        if (seed_override) opts.seed_override = *seed_override;
        auto report = harness::run_scenario(scenario, opts);
        auto* handle = new chainless_report{std::move(report), {}};
        handle->fingerprint_hex = handle->report.fingerprint.hex();
        *out_report = handle;
        return handle->report.all_passed() ? CHAINLESS_OK : CHAINLESS_EXPECTATION_FAILED;
    } catch (const Error& e) {
        g_last_error = e.what();
        return status_for(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return CHAINLESS_INTERNAL_ERROR;
    }
}

const char* chainless_report_fingerprint(const chainless_report* report) {
    return report ? report->fingerprint_hex.c_str() : "";
}

char* chainless_report_render(const chainless_report* report, int machine) {
    if (!report) return dup_string("");
    return dup_string(machine ? report->report.machine_report() : report->report.text_report());
}

int chainless_report_all_passed(const chainless_report* report) {
    return report && report->report.all_passed() ? 1 : 0;
}

void chainless_report_free(chainless_report* report) { delete report; }

chainless_status chainless_compare_trust(const char* scenario_path, const char* models,
                                         char** out_table) {
    g_last_error.clear();
    if (!scenario_path || !models || !out_table) {
        g_last_error = "scenario_path, models, and out_table are required";
        return CHAINLESS_CONFIG_ERROR;
    }
    *out_table = nullptr;
    try {
        auto scenario = scen::load_scenario(scenario_path);
        std::vector<trust::TrustModel> parsed;
        std::istringstream in(models);
        std::string tok;
        while (std::getline(in, tok, ',')) {
            if (tok.empty()) continue;
            for (auto& c : tok)
                if (c == ';') c = ',';  // committee:n;q spelling inside the list
            auto model = trust::TrustModel::parse(tok);
            if (!model) throw Error(Errc::config, "unknown trust model '" + tok + "'");
            parsed.push_back(*model);
        }
        if (parsed.empty()) throw Error(Errc::config, "no trust models given");
        auto rows = harness::compare_trust_models(scenario, parsed);
        std::ostringstream table;
        table << "model detected rejected_blocks transitions_replayed\n";
        for (const auto& row : rows)
            table << row.model << " " << (row.detected ? "yes" : "no") << " "
                  << row.rejected_blocks << " " << row.transitions_replayed << "\n";
        *out_table = dup_string(table.str());
        return CHAINLESS_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return status_for(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return CHAINLESS_INTERNAL_ERROR;
    }
}

chainless_status chainless_verify_trace(const char* trace_path, char** out_detail) {
    g_last_error.clear();
    if (!trace_path || !out_detail) {
        g_last_error = "trace_path and out_detail are required";
        return CHAINLESS_CONFIG_ERROR;
    }
    *out_detail = nullptr;
    try {
        std::ifstream in(trace_path, std::ios::binary);
        if (!in) throw Error(Errc::config, std::string("cannot open ") + trace_path);
        std::ostringstream buf;
        buf << in.rdbuf();
        auto result = harness::verify_trace_export(buf.str());
        std::ostringstream detail;
        detail << (result.ok ? "valid" : "corrupt") << ": " << result.detail << " (apps="
               << result.apps << " blocks=" << result.blocks
               << " transitions=" << result.transitions << ")";
        *out_detail = dup_string(detail.str());
        return result.ok ? CHAINLESS_OK : CHAINLESS_EXPECTATION_FAILED;
    } catch (const Error& e) {
        g_last_error = e.what();
        return status_for(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return CHAINLESS_INTERNAL_ERROR;
    }
}

void chainless_string_free(char* s) { delete[] s; }

const char* chainless_last_error(void) { return g_last_error.c_str(); }

}  // extern "C"
