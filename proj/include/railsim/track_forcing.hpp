#pragma once

#include <array>

#include "railsim/vehicle_model.hpp"

namespace railsim {

/// Two-harmonic rail irregularity travelled at constant speed:
/// eta(t) = amp1*sin(w t) + amp2*sin(3 w t), w = 2*pi*speed/wavelength.
struct TrackProfile {
    double amp1 = 0.005;      // m
    double amp2 = 0.002;      // m
    double wavelength = 25.0; // m
    double speed = 20.0;      // m/s

    bool operator==(const TrackProfile&) const = default;

    void validate() const;
};

/// Transport delay of each wheel relative to the leading wheel, s.
struct WheelDelays {
    std::array<double, kWheelCount> tau{};
};

/// km/h to m/s.
inline constexpr double kmh_to_mps(double kmh) { return kmh / 3.6; }

double excitation_frequency(const TrackProfile& profile);

double profile_height(double t, const TrackProfile& profile);
double profile_rate(double t, const TrackProfile& profile);

WheelDelays wheel_delays(const VehicleParams& params, const TrackProfile& profile);

ForcingSample wheel_forcing(double t, const TrackProfile& profile, const WheelDelays& delays);

/// Forcing evaluator bound to one vehicle and track. A disabled model yields
/// zero forcing everywhere (free motion), as does a stationary vehicle.
class ForcingModel {
   public:
    ForcingModel(const VehicleParams& params, const TrackProfile& profile, bool enabled = true);

    ForcingSample at(double t) const;

    bool enabled() const { return enabled_; }
    const TrackProfile& profile() const { return profile_; }
    const WheelDelays& delays() const { return delays_; }

   private:
    TrackProfile profile_;
    WheelDelays delays_{};
    bool enabled_;
};

}  // namespace railsim
