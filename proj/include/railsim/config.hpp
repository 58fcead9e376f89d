#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "railsim/affinity.hpp"
#include "railsim/integrators.hpp"
#include "railsim/parallel_engine.hpp"

namespace railsim {

struct TimeConfig {
    double start = 0.0;  // s
    double end = 10.0;   // s
    double step = 1e-3;  // s, fixed-step RK4

    bool operator==(const TimeConfig&) const = default;
};

struct PlanConfig {
    std::string name = "bodywise";
    int workers = 4;
    bool pin = false;
    std::vector<int> cores;  // empty with pin=true: worker i -> core i
    bool elevate_priority = false;

    bool operator==(const PlanConfig&) const = default;

    WorkerPlan make_plan() const;
};

enum class PlotKind { kNone, kTimeSeries, kPhase };

PlotKind parse_plot_kind(std::string_view text);
std::string_view to_string(PlotKind kind);

struct OutputConfig {
    std::size_t stride = 1;
    std::string csv = "railsim.csv";
    std::string sweep_csv = "railsim_sweep.csv";
    PlotKind plot = PlotKind::kNone;

    bool operator==(const OutputConfig&) const = default;
};

/// Transient settle time and trailing measurement window for oracle checks.
struct ValidationConfig {
    double settle = 50.0;  // s
    double window = 10.0;  // s

    bool operator==(const ValidationConfig&) const = default;
};

struct SimConfig {
    VehicleParams vehicle;
    TrackProfile track;
    TimeConfig time;
    StateVector initial_state;
    bool forcing_enabled = true;
    StepControl adaptive;
    PlanConfig parallel;
    OutputConfig output;
    ValidationConfig validation;

    bool operator==(const SimConfig&) const = default;

    SimulationContext context() const { return {vehicle, track, forcing_enabled}; }

    /// Throws Error(kConfig) with a path-qualified message.
    void validate() const;
};

/// Parses a JSON object. Missing keys take default values; unknown keys,
/// wrong types and invariant violations throw Error(kConfig) naming the key
/// path (e.g. "track.speed").
SimConfig parse_config(std::string_view json_text);
SimConfig load_config(const std::filesystem::path& path);

/// Full JSON form of a config; parse_config(serialize_config(c)) == c.
std::string serialize_config(const SimConfig& config);

}  // namespace railsim
