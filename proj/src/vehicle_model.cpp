#include "railsim/vehicle_model.hpp"

#include <cmath>
#include <string>

#include "railsim/error.hpp"

namespace railsim {

namespace {

void require(bool ok, const char* field, const char* rule, double value) {
    if (!ok) {
        throw Error(ErrorCode::kInvalidParams,
                    std::string("vehicle.") + field + " " + rule + " (got " + std::to_string(value) + ")");
    }
}

}  // namespace

bool StateVector::all_finite() const {
    for (double v : values) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

bool ForcingSample::all_finite() const {
    for (std::size_t i = 0; i < kWheelCount; ++i) {
        if (!std::isfinite(eta[i]) || !std::isfinite(eta_rate[i])) return false;
    }
    return true;
}

void VehicleParams::validate() const {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    auto non_negative = [](double v) { return std::isfinite(v) && v >= 0.0; };
    require(positive(wagon_mass), "wagon_mass", "must be > 0", wagon_mass);
    require(positive(wagon_inertia), "wagon_inertia", "must be > 0", wagon_inertia);
    require(positive(bogie_mass), "bogie_mass", "must be > 0", bogie_mass);
    require(positive(wagon_half_base), "wagon_half_base", "must be > 0", wagon_half_base);
    require(positive(bogie_half_base), "bogie_half_base", "must be > 0", bogie_half_base);
    require(positive(primary_stiffness), "primary_stiffness", "must be > 0", primary_stiffness);
    require(non_negative(primary_damping), "primary_damping", "must be >= 0", primary_damping);
    require(positive(secondary_stiffness), "secondary_stiffness", "must be > 0", secondary_stiffness);
    require(non_negative(secondary_damping), "secondary_damping", "must be >= 0", secondary_damping);
}

EquationCoefficients equation_coefficients(const VehicleParams& p) {
    EquationCoefficients k{};
    k.m1 = p.bogie_mass;
    k.m2 = p.wagon_mass;
    k.b1 = p.literal_damper_aliases ? p.secondary_damping : p.primary_damping;
    k.b2 = p.literal_damper_aliases ? p.primary_damping : p.secondary_damping;
    k.c1 = p.primary_stiffness;
    k.c2 = p.secondary_stiffness;
    k.a2 = p.wagon_half_base;
    k.j2 = p.wagon_inertia;
    return k;
}

double derivative_component(std::size_t index, const StateVector& x, const ForcingSample& u,
                            const EquationCoefficients& k) noexcept {
    const auto& n = u.eta;
    const auto& nd = u.eta_rate;
    switch (index) {
        case kZ1: return x[1];
        case kZ1Rate:
            return 1.0 / k.m1 *
                   (k.b1 * (nd[0] + nd[1] - 2.0 * x[1]) + k.c1 * (n[0] + n[1] - 2.0 * x[0]) +
                    k.b2 * (x[5] - x[1] + k.a2 * x[7]) + k.c2 * (x[4] - x[0] + k.a2 * x[6]));
        case kZ2: return x[3];
        case kZ2Rate:
            return 1.0 / k.m1 *
                   (k.b1 * (nd[2] + nd[3] - 2.0 * x[3]) + k.c1 * (n[2] + n[3] - 2.0 * x[2]) +
                    k.b2 * (x[5] - x[3] - k.a2 * x[7]) + k.c2 * (x[4] - x[2] - k.a2 * x[6]));
        case kZk: return x[5];
        case kZkRate:
            return 1.0 / k.m2 * (k.b2 * (x[1] + x[3] - 2.0 * x[5]) + k.c2 * (x[0] + x[2] - 2.0 * x[4]));
        case kPhi: return x[7];
        case kPhiRate:
            return k.a2 / k.j2 *
                   (k.b2 * (x[1] - x[3] - 2.0 * x[7] * k.a2) + k.c2 * (x[0] - x[2] - 2.0 * x[6] * k.a2));
        default: return 0.0;
    }
}

StateVector derivative(const StateVector& x, const ForcingSample& u, const VehicleParams& params) {
    params.validate();
    if (!x.all_finite()) throw Error(ErrorCode::kNonFiniteInput, "derivative: state has non-finite component");
    if (!u.all_finite()) throw Error(ErrorCode::kNonFiniteInput, "derivative: forcing has non-finite component");
    const auto k = equation_coefficients(params);
    StateVector d;
    for (std::size_t i = 0; i < kStateSize; ++i) d[i] = derivative_component(i, x, u, k);
    return d;
}

SystemMatrices assemble_matrices(const VehicleParams& params) {
    params.validate();
    const auto k = equation_coefficients(params);
    const double a = k.a2;
    SystemMatrices m;

    m.inertia[0][0] = k.m1;
    m.inertia[1][1] = k.m1;
    m.inertia[2][2] = k.m2;
    m.inertia[3][3] = k.j2;

    // The rail coupling acts on the bogies only; the wagon coupling is the
    // spring/damper pair joining each bogie to its end of the wagon, whose
    // attachment point moves by zk +/- a*phi.
    auto fill = [&](Matrix4& out, double rail, double wagon) {
        out = Matrix4{};
        out[0][0] = 2.0 * rail + wagon;
        out[0][2] = -wagon;
        out[0][3] = -wagon * a;
        out[1][1] = 2.0 * rail + wagon;
        out[1][2] = -wagon;
        out[1][3] = wagon * a;
        out[2][0] = -wagon;
        out[2][1] = -wagon;
        out[2][2] = 2.0 * wagon;
        out[3][0] = -wagon * a;
        out[3][1] = wagon * a;
        out[3][3] = 2.0 * wagon * a * a;
    };
    fill(m.stiffness, k.c1, k.c2);
    fill(m.dissipative, k.b1, k.b2);

    // Wheels 1,2 load the front bogie, wheels 3,4 the rear bogie.
    for (std::size_t w = 0; w < kWheelCount; ++w) {
        const std::size_t bogie = w < 2 ? 0 : 1;
        m.force_map[bogie][w] = k.c1;
        m.force_map[bogie][kWheelCount + w] = k.b1;
    }
    return m;
}

StateVector first_order_derivative(const SystemMatrices& m, const StateVector& x,
                                   const ForcingSample& u) {
    std::array<double, kDofCount> q{x[kZ1], x[kZ2], x[kZk], x[kPhi]};
    std::array<double, kDofCount> qd{x[kZ1Rate], x[kZ2Rate], x[kZkRate], x[kPhiRate]};
    std::array<double, 2 * kWheelCount> input{};
    for (std::size_t w = 0; w < kWheelCount; ++w) {
        input[w] = u.eta[w];
        input[kWheelCount + w] = u.eta_rate[w];
    }
    StateVector d;
    for (std::size_t r = 0; r < kDofCount; ++r) {
        double rhs = 0.0;
        for (std::size_t c = 0; c < 2 * kWheelCount; ++c) rhs += m.force_map[r][c] * input[c];
        for (std::size_t c = 0; c < kDofCount; ++c) {
            rhs -= m.dissipative[r][c] * qd[c] + m.stiffness[r][c] * q[c];
        }
        d[2 * r] = qd[r];
        d[2 * r + 1] = rhs / m.inertia[r][r];
    }
    return d;
}

double mechanical_energy(const StateVector& x, const ForcingSample& u, const VehicleParams& p) {
    const double a = p.wagon_half_base;
    const double kinetic = 0.5 * p.bogie_mass * (x[1] * x[1] + x[3] * x[3]) +
                           0.5 * p.wagon_mass * x[5] * x[5] + 0.5 * p.wagon_inertia * x[7] * x[7];
    auto sq = [](double v) { return v * v; };
    const double rail = 0.5 * p.primary_stiffness *
                        (sq(u.eta[0] - x[0]) + sq(u.eta[1] - x[0]) + sq(u.eta[2] - x[2]) + sq(u.eta[3] - x[2]));
    const double wagon = 0.5 * p.secondary_stiffness * (sq(x[4] + a * x[6] - x[0]) + sq(x[4] - a * x[6] - x[2]));
    return kinetic + rail + wagon;
}

double free_energy_rate(const StateVector& x, const VehicleParams& params) {
    const auto k = equation_coefficients(params);
    auto sq = [](double v) { return v * v; };
    return -(k.b1 * (2.0 * sq(x[1]) + 2.0 * sq(x[3])) +
             k.b2 * (sq(x[5] + k.a2 * x[7] - x[1]) + sq(x[5] - k.a2 * x[7] - x[3])));
}

}  // namespace railsim
