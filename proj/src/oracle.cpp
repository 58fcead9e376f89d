#include "railsim/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "railsim/error.hpp"

namespace railsim {

StateVector StateSpace::apply(const StateVector& x, const ForcingSample& u) const {
    std::array<double, kInputSize> in{};
    for (std::size_t w = 0; w < kWheelCount; ++w) {
        in[w] = u.eta[w];
        in[kWheelCount + w] = u.eta_rate[w];
    }
    StateVector d;
    for (std::size_t r = 0; r < kStateSize; ++r) {
        double acc = 0.0;
        for (std::size_t c = 0; c < kStateSize; ++c) acc += a[r][c] * x[c];
        for (std::size_t c = 0; c < kInputSize; ++c) acc += b[r][c] * in[c];
        d[r] = acc;
    }
    return d;
}

StateSpace build_state_space(const VehicleParams& params) {
    const SystemMatrices m = assemble_matrices(params);
    StateSpace ss;
    // Generalized coordinate j lives at state 2j, its rate at 2j+1.
    for (std::size_t r = 0; r < kDofCount; ++r) {
        ss.a[2 * r][2 * r + 1] = 1.0;
        const double inv = 1.0 / m.inertia[r][r];
        for (std::size_t c = 0; c < kDofCount; ++c) {
            ss.a[2 * r + 1][2 * c] = -m.stiffness[r][c] * inv;
            ss.a[2 * r + 1][2 * c + 1] = -m.dissipative[r][c] * inv;
        }
        for (std::size_t c = 0; c < kInputSize; ++c) ss.b[2 * r + 1][c] = m.force_map[r][c] * inv;
    }
    return ss;
}

std::vector<Complex> ComplexMatrix::multiply(std::span<const Complex> y) const {
    std::vector<Complex> out(n_);
    for (std::size_t r = 0; r < n_; ++r) {
        Complex acc{};
        for (std::size_t c = 0; c < n_; ++c) acc += (*this)(r, c) * y[c];
        out[r] = acc;
    }
    return out;
}

std::vector<Complex> complex_solve(ComplexMatrix m, std::vector<Complex> rhs) {
    const std::size_t n = m.size();
    if (n == 0 || n > kMaxSolveSize || rhs.size() != n) {
        throw Error(ErrorCode::kSingularMatrix, "complex_solve: need square system with 1 <= n <= 16 and matching rhs");
    }
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        double best = std::abs(m(col, col));
        for (std::size_t r = col + 1; r < n; ++r) {
            const double mag = std::abs(m(r, col));
            if (mag > best) {
                best = mag;
                pivot = r;
            }
        }
        if (!(best >= 1e-300)) {
            throw Error(ErrorCode::kSingularMatrix, "complex_solve: pivot below 1e-300 in column " + std::to_string(col));
        }
        if (pivot != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(m(col, c), m(pivot, c));
            std::swap(rhs[col], rhs[pivot]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const Complex factor = m(r, col) / m(col, col);
            if (factor == Complex{}) continue;
            for (std::size_t c = col; c < n; ++c) m(r, c) -= factor * m(col, c);
            rhs[r] -= factor * rhs[col];
        }
    }
    std::vector<Complex> y(n);
    for (std::size_t i = n; i-- > 0;) {
        Complex acc = rhs[i];
        for (std::size_t c = i + 1; c < n; ++c) acc -= m(i, c) * y[c];
        y[i] = acc / m(i, i);
    }
    return y;
}

std::vector<HarmonicComponent> track_harmonics(const TrackProfile& profile, const WheelDelays& delays) {
    const double w = excitation_frequency(profile);
    const Complex i{0.0, 1.0};
    // a*sin(omega*(t - tau)) = Re(-i*a*exp(-i*omega*tau) * exp(i*omega*t))
    auto make = [&](double omega, double amp) {
        HarmonicComponent h;
        h.angular_frequency = omega;
        for (std::size_t k = 0; k < kWheelCount; ++k) {
            const Complex eta = -i * amp * std::exp(-i * omega * delays.tau[k]);
            h.input[k] = eta;
            h.input[kWheelCount + k] = i * omega * eta;
        }
        return h;
    };
    return {make(w, profile.amp1), make(3.0 * w, profile.amp2)};
}

StateVector SteadyStateResponse::at(double t) const {
    StateVector x;
    for (std::size_t k = 0; k < frequencies.size(); ++k) {
        const Complex phase = std::exp(Complex{0.0, frequencies[k] * t});
        for (std::size_t s = 0; s < kStateSize; ++s) x[s] += (amplitudes[k][s] * phase).real();
    }
    return x;
}

double SteadyStateResponse::amplitude(std::size_t component, std::size_t harmonic) const {
    return std::abs(amplitudes.at(harmonic).at(component));
}

SteadyStateResponse steady_state_response(const StateSpace& ss, std::span<const HarmonicComponent> harmonics) {
    SteadyStateResponse out;
    for (const auto& h : harmonics) {
        ComplexMatrix m(kStateSize);
        std::vector<Complex> rhs(kStateSize);
        for (std::size_t r = 0; r < kStateSize; ++r) {
            for (std::size_t c = 0; c < kStateSize; ++c) m(r, c) = -ss.a[r][c];
            m(r, r) += Complex{0.0, h.angular_frequency};
            for (std::size_t c = 0; c < kInputSize; ++c) rhs[r] += ss.b[r][c] * h.input[c];
        }
        std::vector<Complex> x;
        try {
            x = complex_solve(std::move(m), std::move(rhs));
        } catch (const Error& e) {
            throw Error(ErrorCode::kResonanceUndamped,
                        "resolvent singular at omega=" + std::to_string(h.angular_frequency) + ": " + e.what());
        }
        std::array<Complex, kStateSize> amp{};
        std::copy(x.begin(), x.end(), amp.begin());
        out.frequencies.push_back(h.angular_frequency);
        out.amplitudes.push_back(amp);
    }
    return out;
}

SteadyStateResponse steady_state_response(const VehicleParams& params, const TrackProfile& profile) {
    const auto harmonics = track_harmonics(profile, wheel_delays(params, profile));
    return steady_state_response(build_state_space(params), harmonics);
}

AmplitudeEstimate amplitude_from_series(const TimeSeries& series, std::size_t component, double window,
                                        double omega) {
    if (component >= kStateSize) throw Error(ErrorCode::kInsufficientWindow, "component index out of range");
    if (!(omega > 0.0)) throw Error(ErrorCode::kInsufficientWindow, "amplitude fit needs omega > 0");
    const double period = 2.0 * std::numbers::pi / omega;
    if (series.empty() || !(window >= 2.0 * period)) {
        throw Error(ErrorCode::kInsufficientWindow,
                    "window " + std::to_string(window) + " s shorter than two periods (" +
                        std::to_string(2.0 * period) + " s)");
    }
    const double t_end = series.times.back();
    const double t_begin = t_end - window;
    if (t_begin < series.times.front() - 1e-12 * std::max(1.0, std::abs(t_end))) {
        throw Error(ErrorCode::kInsufficientWindow, "window extends before the start of the series");
    }

    const auto first = std::lower_bound(series.times.begin(), series.times.end(), t_begin - 1e-12);
    const std::size_t begin = static_cast<std::size_t>(first - series.times.begin());
    const std::size_t count = series.size() - begin;
    if (count < 5) throw Error(ErrorCode::kInsufficientWindow, "too few samples in window");

    AmplitudeEstimate est;
    double mean = 0.0;
    for (std::size_t i = begin; i < series.size(); ++i) mean += series.states[i][component];
    mean /= static_cast<double>(count);
    for (std::size_t i = begin; i < series.size(); ++i) {
        est.peak = std::max(est.peak, std::abs(series.states[i][component] - mean));
    }

    // Normal equations for [1, cos wt, sin wt, cos 3wt, sin 3wt]; time is
    // shifted to the window start for conditioning.
    constexpr std::size_t kBasis = 5;
    ComplexMatrix normal(kBasis);
    std::vector<Complex> rhs(kBasis);
    for (std::size_t i = begin; i < series.size(); ++i) {
        const double t = series.times[i] - t_begin;
        const std::array<double, kBasis> phi{1.0, std::cos(omega * t), std::sin(omega * t),
                                             std::cos(3.0 * omega * t), std::sin(3.0 * omega * t)};
        const double y = series.states[i][component];
        for (std::size_t r = 0; r < kBasis; ++r) {
            rhs[r] += phi[r] * y;
            for (std::size_t c = 0; c < kBasis; ++c) normal(r, c) += phi[r] * phi[c];
        }
    }
    const auto coef = complex_solve(std::move(normal), std::move(rhs));
    est.fundamental = std::hypot(coef[1].real(), coef[2].real());
    est.third = std::hypot(coef[3].real(), coef[4].real());
    est.dominant = std::max(est.fundamental, est.third);
    return est;
}

}  // namespace railsim
