#include "railsim/integrators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "railsim/error.hpp"
#include "rk4_kernel.hpp"

namespace railsim {

namespace {

void require_finite(const StateVector& k, int stage) {
    if (!k.all_finite()) {
        throw Error(ErrorCode::kIntegrationDiverged,
                    "non-finite derivative in RK stage " + std::to_string(stage));
    }
}

std::string where(std::size_t step, double t) {
    std::ostringstream os;
    os << " at step " << step << " (t=" << t << " s)";
    return os.str();
}

}  // namespace

void TimeSeries::reserve(std::size_t n) {
    times.reserve(n);
    states.reserve(n);
    forcings.reserve(n);
}

void TimeSeries::push(double t, const StateVector& x, const ForcingSample& u) {
    times.push_back(t);
    states.push_back(x);
    forcings.push_back(u);
}

StepSchedule::StepSchedule(double t0, double t1, double h) : t0_(t0), t1_(t1), h_(h) {
    if (!(std::isfinite(t0) && std::isfinite(t1) && t1 > t0)) {
        throw Error(ErrorCode::kInvalidStepControl, "time span requires t1 > t0");
    }
    if (!(std::isfinite(h) && h > 0.0)) {
        throw Error(ErrorCode::kInvalidStepControl, "step size must be > 0");
    }
    const double ratio = (t1 - t0) / h;
    const double nearest = std::round(ratio);
    if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, ratio)) {
        count_ = static_cast<std::size_t>(std::max(1.0, nearest));
    } else {
        count_ = static_cast<std::size_t>(std::ceil(ratio));
    }
}

double StepSchedule::time(std::size_t n) const {
    if (n >= count_) return t1_;
    return t0_ + static_cast<double>(n) * h_;
}

double StepSchedule::step(std::size_t n) const {
    if (n + 1 == count_) return t1_ - time(n);
    return h_;
}

bool StepSchedule::records(std::size_t completed_steps, std::size_t stride) const {
    return completed_steps == count_ || completed_steps % stride == 0;
}

StateVector rk4_step(const DerivativeFn& f, double t, const StateVector& x, double h) {
    using detail::rk4_stage_input;
    const double half = h / 2.0;
    StateVector in;

    const StateVector k1 = f(t, x);
    require_finite(k1, 1);
    for (std::size_t i = 0; i < kStateSize; ++i) in[i] = rk4_stage_input(x[i], half, k1[i]);

    const StateVector k2 = f(t + half, in);
    require_finite(k2, 2);
    for (std::size_t i = 0; i < kStateSize; ++i) in[i] = rk4_stage_input(x[i], half, k2[i]);

    const StateVector k3 = f(t + half, in);
    require_finite(k3, 3);
    for (std::size_t i = 0; i < kStateSize; ++i) in[i] = rk4_stage_input(x[i], h, k3[i]);

    const StateVector k4 = f(t + h, in);
    require_finite(k4, 4);

    StateVector out;
    for (std::size_t i = 0; i < kStateSize; ++i) {
        out[i] = detail::rk4_combine(x[i], h, k1[i], k2[i], k3[i], k4[i]);
    }
    return out;
}

DerivativeFn vehicle_rhs(const SimulationContext& context) {
    context.vehicle.validate();
    ForcingModel forcing(context.vehicle, context.track, context.forcing_enabled);
    const EquationCoefficients coeffs = equation_coefficients(context.vehicle);
    return [forcing, coeffs](double t, const StateVector& x) {
        const ForcingSample u = forcing.at(t);
        StateVector d;
        for (std::size_t i = 0; i < kStateSize; ++i) d[i] = derivative_component(i, x, u, coeffs);
        return d;
    };
}

TimeSeries integrate_fixed(const StateVector& x0, double t0, double t1, double h,
                           const SimulationContext& context, std::size_t sample_stride) {
    if (sample_stride == 0) throw Error(ErrorCode::kInvalidStepControl, "sample stride must be >= 1");
    if (!x0.all_finite()) throw Error(ErrorCode::kNonFiniteInput, "initial state has non-finite component");
    const StepSchedule schedule(t0, t1, h);
    const DerivativeFn f = vehicle_rhs(context);
    const ForcingModel forcing(context.vehicle, context.track, context.forcing_enabled);

    TimeSeries series;
    series.sample_stride = sample_stride;
    series.reserve(schedule.count() / sample_stride + 2);
    series.push(t0, x0, forcing.at(t0));

    StateVector x = x0;
    for (std::size_t n = 0; n < schedule.count(); ++n) {
        const double t = schedule.time(n);
        try {
            x = rk4_step(f, t, x, schedule.step(n));
        } catch (const Error& e) {
            throw Error(e.code(), std::string(e.what()) + where(n, t));
        }
        if (schedule.records(n + 1, sample_stride)) {
            const double tn = schedule.time(n + 1);
            series.push(tn, x, forcing.at(tn));
        }
    }
    return series;
}

void StepControl::validate() const {
    auto fail = [](const std::string& msg) { throw Error(ErrorCode::kInvalidStepControl, msg); };
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) fail("adaptive tolerances must be > 0");
    if (!(h_min > 0.0 && h_min <= h_init && h_init <= h_max)) fail("adaptive steps require 0 < h_min <= h_init <= h_max");
    if (!(safety > 0.0 && safety <= 1.0)) fail("adaptive.safety must lie in (0, 1]");
    if (!(shrink > 0.0 && shrink < 1.0 && growth > 1.0)) fail("adaptive clamps require 0 < shrink < 1 < growth");
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0, b5 = -2187.0 / 6784.0,
                 b6 = 11.0 / 84.0;
// Fifth- minus fourth-order weights.
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

}  // namespace

AdaptiveResult dormand_prince(const DerivativeFn& f, const StateVector& x0, double t0, double t1,
                              const StepControl& ctrl) {
    ctrl.validate();
    if (!(std::isfinite(t0) && std::isfinite(t1) && t1 > t0)) {
        throw Error(ErrorCode::kInvalidStepControl, "time span requires t1 > t0");
    }
    if (!x0.all_finite()) throw Error(ErrorCode::kNonFiniteInput, "initial state has non-finite component");

    AdaptiveResult result;
    result.series.push(t0, x0, ForcingSample{});

    double t = t0;
    StateVector x = x0;
    StateVector k1 = f(t, x);
    require_finite(k1, 1);
    double h = std::min(ctrl.h_init, t1 - t0);
    bool last_rejected = false;

    StateVector tmp, k2, k3, k4, k5, k6, k7, x_new;
    while (t < t1) {
        bool lands = false;
        if (t + h >= t1) {
            h = t1 - t;
            lands = true;
        }
        for (std::size_t i = 0; i < kStateSize; ++i) tmp[i] = x[i] + h * (a21 * k1[i]);
        k2 = f(t + c2 * h, tmp);
        for (std::size_t i = 0; i < kStateSize; ++i) tmp[i] = x[i] + h * (a31 * k1[i] + a32 * k2[i]);
        k3 = f(t + c3 * h, tmp);
        for (std::size_t i = 0; i < kStateSize; ++i)
            tmp[i] = x[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        k4 = f(t + c4 * h, tmp);
        for (std::size_t i = 0; i < kStateSize; ++i)
            tmp[i] = x[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        k5 = f(t + c5 * h, tmp);
        for (std::size_t i = 0; i < kStateSize; ++i)
            tmp[i] = x[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        k6 = f(t + h, tmp);
        for (std::size_t i = 0; i < kStateSize; ++i)
            x_new[i] = x[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        k7 = f(t + h, x_new);

        double norm = 0.0;
        for (std::size_t i = 0; i < kStateSize; ++i) {
            const double err =
                h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double scale = ctrl.abs_tol + ctrl.rel_tol * std::max(std::abs(x[i]), std::abs(x_new[i]));
            norm = std::max(norm, std::abs(err) / scale);
        }
        if (!std::isfinite(norm) || !x_new.all_finite()) norm = std::numeric_limits<double>::infinity();

        if (norm <= 1.0) {
            t = lands ? t1 : t + h;
            x = x_new;
            k1 = k7;
            ++result.accepted_steps;
            result.accepted_error_norms.push_back(norm);
            result.series.push(t, x, ForcingSample{});
            double factor = norm == 0.0 ? ctrl.growth : ctrl.safety * std::pow(1.0 / norm, 0.2);
            factor = std::clamp(factor, ctrl.shrink, ctrl.growth);
            if (last_rejected) factor = std::min(factor, 1.0);
            h = std::min(h * factor, ctrl.h_max);
            last_rejected = false;
        } else {
            ++result.rejected_steps;
            double factor = std::isfinite(norm) ? ctrl.safety * std::pow(1.0 / norm, 0.2) : ctrl.shrink;
            factor = std::clamp(factor, ctrl.shrink, 1.0);
            h *= factor;
            last_rejected = true;
            if (h < ctrl.h_min) {
                std::ostringstream os;
                os << "adaptive step fell below h_min=" << ctrl.h_min << " at t=" << t << " (h=" << h
                   << ", error norm=" << norm << ", accepted=" << result.accepted_steps
                   << ", rejected=" << result.rejected_steps << ")";
                throw Error(ErrorCode::kStepSizeUnderflow, os.str());
            }
        }
    }
    return result;
}

AdaptiveResult integrate_adaptive(const StateVector& x0, double t0, double t1, const StepControl& ctrl,
                                  const SimulationContext& context) {
    const DerivativeFn f = vehicle_rhs(context);
    AdaptiveResult result = dormand_prince(f, x0, t0, t1, ctrl);
    const ForcingModel forcing(context.vehicle, context.track, context.forcing_enabled);
    for (std::size_t i = 0; i < result.series.size(); ++i) {
        result.series.forcings[i] = forcing.at(result.series.times[i]);
    }
    return result;
}

}  // namespace railsim
