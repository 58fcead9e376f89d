#include "railsim/track_forcing.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "railsim/error.hpp"

namespace railsim {

void TrackProfile::validate() const {
    auto fail = [](const char* field, const char* rule, double v) {
        throw Error(ErrorCode::kInvalidProfile,
                    std::string("track.") + field + " " + rule + " (got " + std::to_string(v) + ")");
    };
    if (!(std::isfinite(wavelength) && wavelength > 0.0)) fail("wavelength", "must be > 0", wavelength);
    if (!(std::isfinite(speed) && speed >= 0.0)) fail("speed", "must be >= 0", speed);
    if (!(std::isfinite(amp1) && amp1 >= 0.0)) fail("amp1", "must be >= 0", amp1);
    if (!(std::isfinite(amp2) && amp2 >= 0.0)) fail("amp2", "must be >= 0", amp2);
}

double excitation_frequency(const TrackProfile& profile) {
    if (!(profile.wavelength > 0.0)) {
        throw Error(ErrorCode::kInvalidProfile, "track.wavelength must be > 0");
    }
    return 2.0 * std::numbers::pi * profile.speed / profile.wavelength;
}

double profile_height(double t, const TrackProfile& profile) {
    const double w = excitation_frequency(profile);
    return profile.amp1 * std::sin(w * t) + profile.amp2 * std::sin(3.0 * w * t);
}

double profile_rate(double t, const TrackProfile& profile) {
    const double w = excitation_frequency(profile);
    return profile.amp1 * w * std::cos(w * t) + 3.0 * profile.amp2 * w * std::cos(3.0 * w * t);
}

WheelDelays wheel_delays(const VehicleParams& params, const TrackProfile& profile) {
    if (!(profile.speed > 0.0)) {
        throw Error(ErrorCode::kDelaysUndefined,
                    "wheel delays undefined for a stationary vehicle (track.speed = 0)");
    }
    const double v = profile.speed;
    const double ab = params.bogie_half_base;
    const double ak = params.wagon_half_base;
    return WheelDelays{{0.0, 2.0 * ab / v, 2.0 * ak / v, 2.0 * (ak + ab) / v}};
}

ForcingSample wheel_forcing(double t, const TrackProfile& profile, const WheelDelays& delays) {
    ForcingSample s;
    for (std::size_t i = 0; i < kWheelCount; ++i) {
        s.eta[i] = profile_height(t - delays.tau[i], profile);
        s.eta_rate[i] = profile_rate(t - delays.tau[i], profile);
    }
    return s;
}

ForcingModel::ForcingModel(const VehicleParams& params, const TrackProfile& profile, bool enabled)
    : profile_(profile), enabled_(enabled && profile.speed > 0.0) {
    profile_.validate();
    if (enabled_) delays_ = wheel_delays(params, profile_);
}

ForcingSample ForcingModel::at(double t) const {
    if (!enabled_) return ForcingSample{};
    return wheel_forcing(t, profile_, delays_);
}

}  // namespace railsim
