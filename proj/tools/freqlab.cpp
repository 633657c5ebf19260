#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "freqlab/error.hpp"
#include "freqlab/harness/config.hpp"
#include "freqlab/harness/emit.hpp"
#include "freqlab/harness/json_text.hpp"
#include "freqlab/harness/registry.hpp"
#include "freqlab/harness/scenario.hpp"
#include "freqlab/harness/sweep.hpp"

namespace fs = std::filesystem;
using namespace freqlab;
using namespace freqlab::harness;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct Common {
    std::string format;
    std::optional<long long> seed;
    std::optional<long long> grid;
    bool quiet = false;
};

Overrides cli_overrides(const Common& c) {
    Overrides o;
    if (c.seed) o.emplace_back("seed", std::to_string(*c.seed));
    if (c.grid) o.emplace_back("grid", std::to_string(*c.grid));
    return o;
}

fs::path output_dir(const ExperimentConfig& cfg) {
    if (const char* env = std::getenv("FREQLAB_OUT"); env && *env) return env;
    return cfg.output.dir;
}

std::string format_of(const Common& c, const ExperimentConfig& cfg) {
    return c.format.empty() ? cfg.output.format : c.format;
}

void write_echo(const fs::path& dir, const ExperimentConfig& cfg) {
    fs::create_directories(dir);
    std::ofstream out(dir / "config.resolved.json", std::ios::binary);
    require(static_cast<bool>(out), ErrorCode::IoError, "cannot write config echo in " + dir.string());
    out << dump_json(to_json(cfg), 1) << '\n';
}

void print_record(const ResultRecord& r) {
    std::printf("scenario %zu %s (%s) digest %s\n", r.scenario_id, r.name.c_str(), r.role.c_str(),
                r.config_digest.c_str());
    if (!r.error.empty()) std::printf("  error: %s\n", r.error.c_str());
    for (const auto& c : r.checks) {
        std::printf("  %-30s %-15s margin=%-12.4g %s\n", c.name.c_str(), std::string(to_string(c.status)).c_str(),
                    c.margin, c.detail.c_str());
    }
}

int exit_for(const std::vector<ResultRecord>& records) {
    int code = kExitPass;
    for (const auto& r : records) {
        if (!r.error.empty()) code = std::max(code, r.error_exit ? r.error_exit : kExitNumerical);
        else if (!r.all_passed()) code = std::max(code, kExitFail);
    }
    return code;
}

int cmd_run(const std::string& path, const Common& c) {
    const ExperimentConfig cfg = load_config(path, cli_overrides(c));
    const auto dir = output_dir(cfg);
    write_echo(dir, cfg);
    std::vector<ResultRecord> records{run_scenario(cfg)};
    const auto file = emit_results(records, format_of(c, cfg), dir);
    if (!c.quiet) {
        print_record(records.front());
        std::printf("wrote %s\n", file.string().c_str());
    }
    return exit_for(records);
}

int cmd_sweep(const std::string& path, const std::vector<std::string>& axis_specs, const Common& c) {
    const ExperimentConfig cfg = load_config(path, cli_overrides(c));
    std::vector<SweepAxis> axes;
    for (const auto& s : axis_specs) axes.push_back(parse_axis(s));
    // Validate every member up front so a bad axis value is an input error.
    expand_sweep(cfg, axes);
    const auto dir = output_dir(cfg);
    write_echo(dir, cfg);
    SweepOptions opt;
    opt.progress = dir / "results.partial.jsonl";
    const auto records = sweep(cfg, axes, opt);
    const auto file = emit_results(records, format_of(c, cfg), dir);
    if (!c.quiet) {
        for (const auto& r : records) print_record(r);
        std::printf("wrote %s\n", file.string().c_str());
    }
    return exit_for(records);
}

int cmd_verify(const std::string& path, const std::string& check, const Common& c) {
    require(is_registered(check), ErrorCode::ValidationError, "unknown check '" + check + "'");
    const ExperimentConfig cfg = load_config(path, cli_overrides(c));
    const ResultRecord r = run_scenario(cfg);
    if (!r.error.empty()) {
        if (!c.quiet) std::printf("error: %s\n", r.error.c_str());
        return r.error_exit ? r.error_exit : kExitNumerical;
    }
    const CheckOutcome* o = r.find(check);
    require(o != nullptr, ErrorCode::ValidationError, "record lacks check '" + check + "'");
    if (!c.quiet) {
        std::printf("%s %s margin=%s fitted=%s %s\n", o->name.c_str(), std::string(to_string(o->status)).c_str(),
                    format_real(o->margin).c_str(), format_real(o->fitted_constant).c_str(), o->detail.c_str());
    }
    return o->status == Status::Fail ? kExitFail : kExitPass;
}

int cmd_report(const std::string& path, const std::string& out_dir, const Common& c) {
    const auto records = read_results(path);
    fs::path dir = out_dir;
    if (const char* env = std::getenv("FREQLAB_OUT"); out_dir.empty() && env && *env) dir = env;
    require(!dir.empty(), ErrorCode::ValidationError, "report needs --out or FREQLAB_OUT");
    const auto file = emit_results(records, c.format.empty() ? "csv" : c.format, dir);
    if (!c.quiet) {
        std::size_t failed = 0;
        for (const auto& r : records) failed += r.all_passed() ? 0 : 1;
        std::printf("%zu records, %zu with failures; wrote %s\n", records.size(), failed, file.string().c_str());
    }
    return exit_for(records);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"freqlab: numerical checks for parabolic unique continuation"};
    app.require_subcommand(1);
    Common common;
    app.add_option("--format", common.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--seed", common.seed, "Override coefficient and initial-data seeds");
    app.add_option("--grid", common.grid, "Override grid points per axis");
    app.add_flag("--quiet,-q", common.quiet, "Suppress per-check output");

    // Global flags are accepted after the subcommand as well.
    app.fallthrough();
    std::string config, results, check, out;
    std::vector<std::string> axes;
    auto* run = app.add_subcommand("run", "Run one scenario");
    run->add_option("config", config, "Config file")->required();
    auto* sw = app.add_subcommand("sweep", "Cartesian sweep with calibration and hold-out members");
    sw->add_option("config", config, "Config template")->required();
    sw->add_option("--axis", axes, "key=v1,v2,...")->required()->take_all()->expected(1)->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    auto* ver = app.add_subcommand("verify", "Run one scenario and report a single check");
    ver->add_option("config", config, "Config file")->required();
    ver->add_option("--check", check, "Check name")->required();
    auto* rep = app.add_subcommand("report", "Re-emit stored results");
    rep->add_option("results", results, "results.json or results.partial.jsonl")->required();
    rep->add_option("--out", out, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitPass : kExitInput;
    }

    try {
        audit_registry();
        if (*run) return cmd_run(config, common);
        if (*sw) return cmd_sweep(config, axes, common);
        if (*ver) return cmd_verify(config, check, common);
        return cmd_report(results, out, common);
    } catch (const Error& e) {
        std::fprintf(stderr, "freqlab: %s\n", e.what());
        switch (e.code()) {
            case ErrorCode::ParseError:
            case ErrorCode::ValidationError:
            case ErrorCode::IoError:
            case ErrorCode::InsufficientFamily:
            case ErrorCode::InvalidGeometry:
            case ErrorCode::InvalidDomain:
            case ErrorCode::TooCoarse:
                return kExitInput;
            default:
                return kExitNumerical;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "freqlab: %s\n", e.what());
        return kExitNumerical;
    }
}
