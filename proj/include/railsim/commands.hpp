#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "railsim/config.hpp"
#include "railsim/integrators.hpp"
#include "railsim/parallel_engine.hpp"

namespace railsim {

enum class EngineKind { kSequential, kParallel };

EngineKind parse_engine_kind(std::string_view text);

struct SimulateOptions {
    EngineKind engine = EngineKind::kSequential;
    std::optional<PlotKind> plot;                // overrides output.plot
    std::optional<std::filesystem::path> csv;    // overrides output.csv
};

struct SimulateOutcome {
    TimeSeries series;
    std::filesystem::path csv;
    std::optional<std::filesystem::path> plot_script;
    std::optional<ParallelStats> stats;
};

/// Runs the configured engine, writes the CSV and, if asked, a plot script.
SimulateOutcome cmd_simulate(const SimConfig& config, const SimulateOptions& options = {});

inline constexpr std::string_view kSweepHeader =
    "speed_kmh,speed_mps,omega,max_par_seq_diff,amp_z1,amp_z1dot,amp_z2,amp_z2dot,amp_zk,amp_zkdot,"
    "amp_phi,amp_phidot,oracle_rel_err,status";

struct SweepRow {
    double speed_kmh = 0.0;
    double speed_mps = 0.0;
    double omega = 0.0;
    double max_par_seq_diff = 0.0;
    std::array<double, kStateSize> tail_amplitude{};  // peak |x - mean| over the trailing window
    double oracle_rel_err = 0.0;  // max over states of max|sim - steady| / peak|steady|
    std::string status = "ok";

    bool ok() const { return status == "ok"; }
};

struct SweepReport {
    std::vector<SweepRow> rows;
    std::filesystem::path csv;

    bool all_ok() const;
};

/// Measures one speed: sequential and parallel runs over settle + window,
/// then tail amplitudes and agreement with the steady-state oracle.
SweepRow sweep_speed(const SimConfig& config, double speed_kmh);

/// Runs sweep_speed for each speed and writes one summary row per speed.
/// A failing speed gets an error status and the sweep carries on.
SweepReport cmd_sweep(const SimConfig& config, const std::vector<double>& speeds_kmh,
                      const std::optional<std::filesystem::path>& csv = std::nullopt);

std::string sweep_csv(const std::vector<SweepRow>& rows);

/// Timing report for the sequential engine and each parallel plan, with
/// per-worker busy/wait decomposition and medians over repetitions.
nlohmann::json cmd_bench(const SimConfig& config, int repetitions);

/// Parses "20,60,100" (km/h). An empty string yields an empty list.
std::vector<double> parse_speed_list(std::string_view text);

double median(std::vector<double> values);

}  // namespace railsim
