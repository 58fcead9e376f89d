#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "railsim/integrators.hpp"

namespace railsim {

inline constexpr std::string_view kTimeSeriesHeader =
    "t,z1,z1dot,z2,z2dot,zk,zkdot,phi,phidot,eta1,eta2,eta3,eta4";

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

void write_timeseries_csv(std::ostream& out, const TimeSeries& series);
void write_timeseries_csv(const std::filesystem::path& path, const TimeSeries& series);

/// Reads a file written by write_timeseries_csv. Forcing rates are not
/// stored and come back as zero.
TimeSeries read_timeseries_csv(const std::filesystem::path& path);

/// Writes text to a file, throwing Error(kIo) on failure.
void write_text_file(const std::filesystem::path& path, std::string_view text);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace railsim
