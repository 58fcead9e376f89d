#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "railsim/config.hpp"

namespace railsim {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

// Thresholds for the acceptance criteria.
inline constexpr double kEquivalenceRuntimeLimit = 5.0;      // s per parallel run
inline constexpr double kSolverAgreementTol = 1e-6;          // RK4 vs RK45 at t1
inline constexpr double kOracleRelTol = 0.01;                // of peak steady amplitude
inline constexpr double kOracleRuntimeLimit = 120.0;         // s for the whole sweep
inline constexpr double kExcitationTarget = 5.0265;          // rad/s
inline constexpr double kExcitationTol = 1e-3;
inline constexpr double kEnergyStepSlack = 1e-9;             // kJ per step
inline constexpr double kEnergyDecayRatio = 1e-6;            // E(30 s) / E(0)
inline constexpr double kFreeDecayDuration = 30.0;           // s
inline constexpr double kFreeDecayOffset = 0.01;             // m, initial z1
inline constexpr double kOrderRatioMin = 12.0;
inline constexpr double kOrderRatioMax = 20.0;
inline constexpr double kReferenceRelTol = 1e-10;
inline constexpr double kReferenceAbsTol = 1e-12;

/// Speeds (km/h) for the oracle sweep: 20, 40, ..., 140 and 150.
std::vector<double> oracle_sweep_speeds();

CriterionResult check_parallel_equivalence(const SimConfig& config);
CriterionResult check_solver_agreement(const SimConfig& config);
CriterionResult check_oracle_agreement(const SimConfig& config);
CriterionResult check_excitation_frequency();
CriterionResult check_stability(const SimConfig& config);
CriterionResult check_rk4_order(const SimConfig& config);
CriterionResult check_parallel_accounting(const SimConfig& config);
/// Runs simulate (both engines) and sweep twice each into scratch_dir and
/// compares the CSV bytes.
CriterionResult check_determinism(const SimConfig& config, const std::filesystem::path& scratch_dir);

/// All eight criteria in order.
std::vector<CriterionResult> run_acceptance_suite(const SimConfig& config, const std::filesystem::path& scratch_dir);

std::string format_result(const CriterionResult& r);

}  // namespace railsim
