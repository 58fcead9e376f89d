#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "railsim/integrators.hpp"
#include "railsim/track_forcing.hpp"
#include "railsim/vehicle_model.hpp"

namespace railsim {

using Complex = std::complex<double>;

inline constexpr std::size_t kInputSize = 2 * kWheelCount;

/// x' = A x + B u with u = (eta1..eta4, eta1'..eta4').
struct StateSpace {
    std::array<std::array<double, kStateSize>, kStateSize> a{};
    std::array<std::array<double, kInputSize>, kStateSize> b{};

    StateVector apply(const StateVector& x, const ForcingSample& u) const;
};

/// Built from the second-order matrices, not from the first-order kernel, so
/// that it can serve as a cross-check of derivative().
StateSpace build_state_space(const VehicleParams& params);

/// Dense square complex matrix, row-major.
class ComplexMatrix {
   public:
    explicit ComplexMatrix(std::size_t n) : n_(n), data_(n * n) {}

    std::size_t size() const { return n_; }
    Complex& operator()(std::size_t r, std::size_t c) { return data_[r * n_ + c]; }
    const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * n_ + c]; }

    std::vector<Complex> multiply(std::span<const Complex> y) const;

   private:
    std::size_t n_;
    std::vector<Complex> data_;
};

inline constexpr std::size_t kMaxSolveSize = 16;

/// Gaussian elimination with partial pivoting. Throws Error(kSingularMatrix)
/// when a pivot magnitude drops below 1e-300.
std::vector<Complex> complex_solve(ComplexMatrix m, std::vector<Complex> rhs);

/// One forcing harmonic: the input vector u(t) = Re(input * exp(i*omega*t)).
struct HarmonicComponent {
    double angular_frequency = 0.0;
    std::array<Complex, kInputSize> input{};
};

/// The fundamental and third harmonic of the track, with each wheel's
/// transport delay folded into the phase.
std::vector<HarmonicComponent> track_harmonics(const TrackProfile& profile, const WheelDelays& delays);

/// Steady periodic response: x(t) = sum_k Re(X_k exp(i*omega_k*t)).
struct SteadyStateResponse {
    std::vector<double> frequencies;
    std::vector<std::array<Complex, kStateSize>> amplitudes;

    StateVector at(double t) const;
    /// |X_k| for one component and harmonic.
    double amplitude(std::size_t component, std::size_t harmonic) const;
};

/// X(omega) = (i*omega*I - A)^-1 B U(omega) per harmonic. Throws
/// Error(kResonanceUndamped) if the resolvent is singular.
SteadyStateResponse steady_state_response(const StateSpace& ss, std::span<const HarmonicComponent> harmonics);

/// Convenience: harmonics of the given vehicle and track, then their response.
SteadyStateResponse steady_state_response(const VehicleParams& params, const TrackProfile& profile);

struct AmplitudeEstimate {
    double peak = 0.0;         // max |x - mean| over the window
    double fundamental = 0.0;  // fitted amplitude at omega
    double third = 0.0;        // fitted amplitude at 3*omega
    double dominant = 0.0;     // larger of the two fitted amplitudes
};

/// Amplitudes of one component over the trailing `window` seconds. The
/// harmonic amplitudes come from a least-squares fit of a constant plus
/// sin/cos at omega and 3*omega. The window must span at least two periods
/// of omega.
AmplitudeEstimate amplitude_from_series(const TimeSeries& series, std::size_t component, double window,
                                        double omega);

}  // namespace railsim
