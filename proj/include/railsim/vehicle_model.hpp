#pragma once

#include <array>
#include <cstddef>

namespace railsim {

inline constexpr std::size_t kStateSize = 8;
inline constexpr std::size_t kWheelCount = 4;
inline constexpr std::size_t kDofCount = 4;

/// Positions in StateVector. Displacements sit on even slots, their rates on
/// the following odd slot.
enum StateIndex : std::size_t {
    kZ1 = 0,      // front bogie displacement, m
    kZ1Rate = 1,  // m/s
    kZ2 = 2,      // rear bogie displacement, m
    kZ2Rate = 3,  // m/s
    kZk = 4,      // wagon bounce, m
    kZkRate = 5,  // m/s
    kPhi = 6,     // wagon pitch, rad
    kPhiRate = 7, // rad/s
};

struct StateVector {
    std::array<double, kStateSize> values{};

    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
    bool operator==(const StateVector&) const = default;

    bool all_finite() const;
};

/// Rail displacement under each wheel and its rate. Wheels are ordered front
/// bogie front, front bogie rear, rear bogie front, rear bogie rear.
struct ForcingSample {
    std::array<double, kWheelCount> eta{};
    std::array<double, kWheelCount> eta_rate{};

    bool operator==(const ForcingSample&) const = default;

    bool all_finite() const;
};

/// Wagon/two-bogie parameters in the tonne, kN, m, s unit system
/// (1 kN = 1 t*m/s^2, energies come out in kJ).
struct VehicleParams {
    double wagon_mass = 57.0;          // t
    double wagon_inertia = 70.0;       // t*m^2, pitch
    double bogie_mass = 9.0;           // t
    double wagon_half_base = 3.725;    // m
    double bogie_half_base = 1.5;      // m
    double primary_stiffness = 3040.0; // kN/m, bogie to rail
    double primary_damping = 30.0;     // kN*s/m, bogie to rail
    double secondary_stiffness = 2660.0; // kN/m, wagon to bogie
    double secondary_damping = 100.0;  // kN*s/m, wagon to bogie

    // Swap the damper roles (primary damper on the wagon coupling, secondary
    // on the rail coupling). Off by default; kept for side-by-side comparison.
    bool literal_damper_aliases = false;

    bool operator==(const VehicleParams&) const = default;

    /// Throws Error(kInvalidParams) naming the first offending field.
    void validate() const;
};

/// Coefficients in the form the first-order equations use them.
struct EquationCoefficients {
    double m1;  // bogie mass
    double m2;  // wagon mass
    double b1;  // damper on the rail coupling
    double b2;  // damper on the wagon coupling
    double c1;  // rail coupling stiffness
    double c2;  // wagon coupling stiffness
    double a2;  // wagon half base
    double j2;  // wagon pitch inertia
};

EquationCoefficients equation_coefficients(const VehicleParams& params);

/// One component of the first-order right-hand side. No validation; this is
/// the kernel shared by every integration path so that all of them perform
/// the same floating-point operations in the same order.
double derivative_component(std::size_t index, const StateVector& x, const ForcingSample& u,
                            const EquationCoefficients& k) noexcept;

/// Full time derivative of the state. Rejects non-finite state or forcing.
StateVector derivative(const StateVector& x, const ForcingSample& u, const VehicleParams& params);

using Matrix4 = std::array<std::array<double, kDofCount>, kDofCount>;

/// Second-order form I q'' + D q' + S q = F(eta, eta') with
/// q = (z1, z2, zk, phi). force_map acts on (eta1..eta4, eta1'..eta4').
struct SystemMatrices {
    Matrix4 inertia{};
    Matrix4 dissipative{};
    Matrix4 stiffness{};
    std::array<std::array<double, 2 * kWheelCount>, kDofCount> force_map{};
};

SystemMatrices assemble_matrices(const VehicleParams& params);

/// Converts the second-order form back to a first-order derivative. This is
/// an independent route to derivative() used for cross-checking.
StateVector first_order_derivative(const SystemMatrices& m, const StateVector& x,
                                   const ForcingSample& u);

/// Kinetic plus spring potential energy, kJ.
double mechanical_energy(const StateVector& x, const ForcingSample& u, const VehicleParams& params);

/// Analytic dE/dt for free motion (no forcing); never positive.
double free_energy_rate(const StateVector& x, const VehicleParams& params);

}  // namespace railsim
