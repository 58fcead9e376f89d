#pragma once

#include <filesystem>
#include <string>

#include "railsim/config.hpp"
#include "railsim/integrators.hpp"

namespace railsim {

/// Gnuplot script for a CSV written by write_timeseries_csv.
///
/// kTimeSeries: displacements and velocities of the wagon body (red), front
/// bogie (blue) and rear bogie (green) against time.
/// kPhase: one displacement-vs-velocity panel per body.
/// The script renders to `image` (PNG).
std::string plot_script(PlotKind kind, const std::filesystem::path& csv, const std::filesystem::path& image);

/// Writes the script. An empty series throws Error(kEmptySeries) and no file
/// is created.
void emit_plot(const TimeSeries& series, PlotKind kind, const std::filesystem::path& csv,
               const std::filesystem::path& script);

/// Default script path for a CSV: <csv stem>.<kind>.gp beside it.
std::filesystem::path default_plot_path(const std::filesystem::path& csv, PlotKind kind);

}  // namespace railsim
