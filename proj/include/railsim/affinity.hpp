#pragma once

#include <optional>
#include <string>

namespace railsim {

enum class PriorityHint { kNormal, kElevated };

/// What the OS granted when a worker asked to be pinned and/or prioritized.
/// Denials are reported, never thrown.
struct PinOutcome {
    std::optional<int> requested_core;
    bool pin_granted = false;
    std::optional<int> observed_core;  // sched_getcpu() after pinning, when available
    bool core_stable = false;          // repeated current-core queries all matched the request
    PriorityHint requested_priority = PriorityHint::kNormal;
    bool priority_granted = false;
    std::string message;
};

/// Logical cores this process may run on.
int available_core_count();

/// Core the calling thread is executing on, if the platform exposes it.
std::optional<int> current_core();

/// Pins the calling thread to core_id (if given) and raises its scheduling
/// priority when asked to.
PinOutcome pin_and_prioritize(std::optional<int> core_id, PriorityHint priority);

}  // namespace railsim
