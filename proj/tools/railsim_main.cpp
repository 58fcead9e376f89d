// railsim: command-line front end for the rail-vehicle vertical dynamics
// simulator.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "railsim/commands.hpp"
#include "railsim/config.hpp"
#include "railsim/csv.hpp"
#include "railsim/error.hpp"
#include "railsim/validation.hpp"

namespace {

railsim::SimConfig load(const std::string& path) {
    if (path.empty()) return railsim::parse_config("{}");
    return railsim::load_config(path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rail vehicle vertical dynamics: sequential and parallel RK4 with a frequency-domain oracle"};
    app.require_subcommand(1);

    std::string config_path;
    std::string engine = "seq";
    std::string plot;
    std::string out;
    std::string speeds;
    int reps = 3;
    std::string scratch = "railsim_validate";

    auto* simulate = app.add_subcommand("simulate", "Integrate one scenario and write a CSV time series");
    simulate->add_option("--config", config_path, "JSON config file (omit for defaults)");
    simulate->add_option("--engine", engine, "seq or par")->check(CLI::IsMember({"seq", "par"}));
    simulate->add_option("--plot", plot, "Also emit a gnuplot script")->check(CLI::IsMember({"timeseries", "phase"}));
    simulate->add_option("--out", out, "CSV path (overrides output.csv)");

    auto* sweep = app.add_subcommand("sweep", "Compare engines and oracle across speeds");
    sweep->add_option("--config", config_path, "JSON config file (omit for defaults)");
    sweep->add_option("--speeds", speeds, "Comma-separated speeds in km/h")->required();
    sweep->add_option("--out", out, "Summary CSV path (overrides output.sweep_csv)");

    auto* bench = app.add_subcommand("bench", "Time the sequential engine and each parallel plan");
    bench->add_option("--config", config_path, "JSON config file (omit for defaults)");
    bench->add_option("--reps", reps, "Repetitions per engine")->check(CLI::PositiveNumber);
    bench->add_option("--out", out, "Write the JSON report here as well as to stdout");

    auto* validate = app.add_subcommand("validate", "Run the full oracle and acceptance suite");
    validate->add_option("--config", config_path, "JSON config file (omit for defaults)");
    validate->add_option("--scratch", scratch, "Directory for determinism scratch files");

    CLI11_PARSE(app, argc, argv);

    try {
        const railsim::SimConfig config = load(config_path);

        if (*simulate) {
            railsim::SimulateOptions opts;
            opts.engine = railsim::parse_engine_kind(engine);
            if (!plot.empty()) opts.plot = railsim::parse_plot_kind(plot);
            if (!out.empty()) opts.csv = out;
            const auto result = railsim::cmd_simulate(config, opts);
            std::cout << "wrote " << result.series.size() << " rows to " << result.csv.string() << "\n";
            if (result.plot_script) std::cout << "wrote plot script " << result.plot_script->string() << "\n";
            if (result.stats) {
                for (const auto& w : result.stats->warnings) std::cerr << "warning: " << w << "\n";
            }
            return 0;
        }
        if (*sweep) {
            std::optional<std::filesystem::path> path;
            if (!out.empty()) path = out;
            const auto report = railsim::cmd_sweep(config, railsim::parse_speed_list(speeds), path);
            std::cout << railsim::sweep_csv(report.rows);
            std::cerr << "wrote " << report.rows.size() << " rows to " << report.csv.string() << "\n";
            return report.all_ok() ? 0 : 1;
        }
        if (*bench) {
            const auto report = railsim::cmd_bench(config, reps);
            const std::string text = report.dump(2) + "\n";
            std::cout << text;
            if (!out.empty()) railsim::write_text_file(out, text);
            return 0;
        }
        if (*validate) {
            bool ok = true;
            for (const auto& r : railsim::run_acceptance_suite(config, scratch)) {
                std::cout << railsim::format_result(r) << std::endl;
                ok = ok && r.passed;
            }
            return ok ? 0 : 1;
        }
    } catch (const railsim::Error& e) {
        std::cerr << "error (" << railsim::to_string(e.code()) << "): " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
