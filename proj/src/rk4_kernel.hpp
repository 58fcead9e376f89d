#pragma once

// Per-component RK4 arithmetic. Every integration path goes through these so
// that results agree bit for bit regardless of how components are scheduled.

namespace railsim::detail {

inline double rk4_stage_input(double x, double scale, double k) { return x + scale * k; }

inline double rk4_combine(double x, double h, double k1, double k2, double k3, double k4) {
    return x + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
}

}  // namespace railsim::detail
