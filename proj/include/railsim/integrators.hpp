#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "railsim/track_forcing.hpp"
#include "railsim/vehicle_model.hpp"

namespace railsim {

/// Sampled trajectory. All columns have the same length; times strictly
/// increase.
struct TimeSeries {
    std::vector<double> times;
    std::vector<StateVector> states;
    std::vector<ForcingSample> forcings;
    std::size_t sample_stride = 1;

    std::size_t size() const { return times.size(); }
    bool empty() const { return times.empty(); }
    void reserve(std::size_t n);
    void push(double t, const StateVector& x, const ForcingSample& u);

    bool operator==(const TimeSeries&) const = default;
};

/// Vehicle, track and whether the track excites the vehicle at all.
struct SimulationContext {
    VehicleParams vehicle;
    TrackProfile track;
    bool forcing_enabled = true;
};

using DerivativeFn = std::function<StateVector(double t, const StateVector& x)>;

/// Fixed-step grid over [t0, t1]: steps of h, the last one shortened so the
/// grid lands on t1 exactly. Both the sequential and parallel integrators
/// walk this schedule.
class StepSchedule {
   public:
    StepSchedule(double t0, double t1, double h);

    std::size_t count() const { return count_; }
    double time(std::size_t n) const;
    double step(std::size_t n) const;
    bool records(std::size_t completed_steps, std::size_t stride) const;

   private:
    double t0_;
    double t1_;
    double h_;
    std::size_t count_;
};

/// One classic RK4 step. Throws Error(kIntegrationDiverged) if any stage
/// derivative is non-finite.
StateVector rk4_step(const DerivativeFn& f, double t, const StateVector& x, double h);

TimeSeries integrate_fixed(const StateVector& x0, double t0, double t1, double h,
                           const SimulationContext& context, std::size_t sample_stride = 1);

struct StepControl {
    double abs_tol = 1e-9;
    double rel_tol = 1e-6;
    double h_init = 1e-3;
    double h_min = 1e-12;
    double h_max = 0.1;
    double safety = 0.9;
    double shrink = 0.2;
    double growth = 5.0;

    bool operator==(const StepControl&) const = default;

    void validate() const;
};

struct AdaptiveResult {
    TimeSeries series;
    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;
    std::vector<double> accepted_error_norms;
};

/// Dormand-Prince 4(5) with error norm max_i |err_i| / (abs_tol + rel_tol*|x_i|).
/// Records every accepted step; forcing columns are left zero.
AdaptiveResult dormand_prince(const DerivativeFn& f, const StateVector& x0, double t0, double t1,
                              const StepControl& ctrl);

AdaptiveResult integrate_adaptive(const StateVector& x0, double t0, double t1, const StepControl& ctrl,
                                  const SimulationContext& context);

/// The vehicle right-hand side with forcing evaluated at each probe time.
DerivativeFn vehicle_rhs(const SimulationContext& context);

}  // namespace railsim
