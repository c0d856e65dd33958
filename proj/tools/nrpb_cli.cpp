// nrpb: point evaluations, sweeps and named scenarios for the three-cavity
// Kerr network.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nrpb/config.hpp"
#include "nrpb/error.hpp"
#include "nrpb/runner.hpp"
#include "nrpb/scenarios.hpp"

namespace fs = std::filesystem;
using namespace nrpb;

namespace {

struct Common {
    unsigned jobs = 0;
    std::optional<int> dims;
    std::string format;
    bool quiet = false;
};

ProgressCallback progress_printer(const std::string& label, bool quiet)
{
    if (quiet) {
        return {};
    }
    return [label, last = std::int64_t{-1}](std::int64_t done, std::int64_t total) mutable {
        const std::int64_t decile = done * 10 / total;
        if (decile != last) {
            last = decile;
            std::cerr << label << ": " << done << "/" << total << "\n";
        }
    };
}

void print_warnings(const SystemParams& p)
{
    for (const auto& w : validate(p)) {
        std::cerr << "warning: " << w << "\n";
    }
}

void report(const std::vector<fs::path>& paths)
{
    for (const auto& p : paths) {
        std::cout << p.string() << "\n";
    }
}

int cmd_point(const std::string& file, const Common& opt, const std::optional<fs::path>& out)
{
    PointConfig config = parse_point_config(load_json(file));
    if (opt.dims) {
        override_dims(config, *opt.dims);
    }
    print_warnings(config.params);

    SweepResult result;
    result.dims = config.dims;
    result.rows.push_back({{}, evaluate_point(config)});
    const PointOutcome& outcome = result.rows.front().outcome;

    Output output;
    output.stem = fs::path(file).stem().string();
    output.table = to_table(result);
    output.manifest = {{"name", output.stem},
                       {"kind", "point"},
                       {"parameters", to_json(config)},
                       {"truncation", config.dims},
                       {"failed_points", outcome.ok() ? 0 : 1}};

    const std::string format = opt.format.empty() ? "csv" : opt.format;
    std::cout << (format == "json" ? to_json(output.table) : to_csv(output.table));
    if (out) {
        write_output(output, *out, format_from_string(format));
    }
    if (!outcome.ok()) {
        std::cerr << "error: " << outcome.error << "\n";
        return 2;
    }
    return 0;
}

int cmd_sweep(const std::string& file, const Common& opt, const fs::path& out)
{
    SweepSpec spec = parse_sweep_spec(load_json(file));
    if (opt.dims) {
        override_dims(spec.base, *opt.dims);
    }
    print_warnings(spec.base.params);
    const std::string stem = fs::path(file).stem().string();
    const Output output = sweep_output(stem, spec, opt.jobs, progress_printer(stem, opt.quiet));
    report(write_output(output, out,
                        opt.format.empty() ? Format::Both : format_from_string(opt.format)));
    return output.manifest.at("failed_points").get<int>() == 0 ? 0 : 3;
}

int cmd_scenario(const std::string& name, const Common& opt, const fs::path& out)
{
    ScenarioOptions so;
    so.dims = opt.dims;
    so.jobs = opt.jobs;
    so.progress = progress_printer(name, opt.quiet);
    const Format format = opt.format.empty() ? Format::Both : format_from_string(opt.format);
    for (const Output& output : run_scenario(name, so)) {
        report(write_output(output, out, format));
    }
    return 0;
}

int cmd_validate(const std::string& file, const Common& opt)
{
    const Json doc = load_json(file);
    Json normalized;
    std::string summary;
    if (doc.is_object() && doc.contains("axes")) {
        SweepSpec spec = parse_sweep_spec(doc);
        if (opt.dims) {
            override_dims(spec.base, *opt.dims);
        }
        print_warnings(spec.base.params);
        normalized = to_json(spec);
        summary = "sweep, " + std::to_string(spec.total_points()) + " points";
    } else {
        PointConfig config = parse_point_config(doc);
        if (opt.dims) {
            override_dims(config, *opt.dims);
        }
        print_warnings(config.params);
        normalized = to_json(config);
        summary = "point";
    }
    if (opt.format == "json") {
        std::cout << normalized.dump(2) << "\n";
    } else {
        std::cout << "ok: " << summary << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Steady-state transmission and photon statistics of a three-cavity Kerr network"};
    app.require_subcommand(1);

    Common opt;
    std::string input;
    std::string out_dir = ".";
    std::optional<std::string> point_out;

    auto add_common = [&](CLI::App* sub, bool with_jobs) {
        if (with_jobs) {
            sub->add_option("--jobs", opt.jobs, "worker threads (default: all cores)")
                ->check(CLI::PositiveNumber);
        }
        sub->add_option("--dims", opt.dims, "Fock levels per mode")->check(CLI::Range(2, 64));
        sub->add_option("--format", opt.format, "csv or json")
            ->check(CLI::IsMember({"csv", "json"}));
    };

    auto* point = app.add_subcommand("point", "evaluate one working point in both directions");
    point->add_option("config", input, "point config JSON")->required();
    point->add_option("--out", point_out, "also write files into this directory");
    add_common(point, false);

    auto* sweep = app.add_subcommand("sweep", "run a 1D or 2D parameter sweep");
    sweep->add_option("spec", input, "sweep spec JSON")->required();
    sweep->add_option("--out", out_dir, "output directory");
    sweep->add_flag("--quiet", opt.quiet, "no progress on stderr");
    add_common(sweep, true);

    auto* scenario = app.add_subcommand("scenario", "run a named scenario");
    std::string names;
    for (const auto& n : scenario_names()) {
        names += (names.empty() ? "" : ", ") + n;
    }
    scenario->add_option("name", input, "one of: " + names)->required();
    scenario->add_option("--out", out_dir, "output directory");
    scenario->add_flag("--quiet", opt.quiet, "no progress on stderr");
    add_common(scenario, true);

    auto* check = app.add_subcommand("validate", "parse and check a point config or sweep spec");
    check->add_option("config", input, "config JSON")->required();
    add_common(check, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (point->parsed()) {
            std::optional<fs::path> dir;
            if (point_out) {
                dir = *point_out;
            }
            return cmd_point(input, opt, dir);
        }
        if (sweep->parsed()) {
            return cmd_sweep(input, opt, out_dir);
        }
        if (scenario->parsed()) {
            return cmd_scenario(input, opt, out_dir);
        }
        return cmd_validate(input, opt);
    } catch (const Error& e) {
        std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
        if (e.code() == ErrorCode::UnknownScenario) {
            std::cerr << "available scenarios: " << names << "\n";
        }
        return 1;
    }
}
