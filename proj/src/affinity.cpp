#include "railsim/affinity.hpp"

#include <thread>

#ifdef __linux__
#include <pthread.h>
#include <sched.h>
#include <sys/resource.h>
#include <sys/syscall.h>
#include <unistd.h>
#include <cerrno>
#include <cstring>
#endif

namespace railsim {

namespace {

// Niceness applied for an elevated worker.
constexpr int kElevatedNice = -5;

}  // namespace

int available_core_count() {
#ifdef __linux__
    cpu_set_t set;
    CPU_ZERO(&set);
    if (sched_getaffinity(0, sizeof(set), &set) == 0) return CPU_COUNT(&set);
#endif
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

std::optional<int> current_core() {
#ifdef __linux__
    const int cpu = sched_getcpu();
    if (cpu >= 0) return cpu;
#endif
    return std::nullopt;
}

PinOutcome pin_and_prioritize(std::optional<int> core_id, PriorityHint priority) {
    PinOutcome out;
    out.requested_core = core_id;
    out.requested_priority = priority;
    std::string msg;

    if (core_id) {
        const int cores = available_core_count();
        if (*core_id < 0 || *core_id >= cores) {
            msg += "pin to core " + std::to_string(*core_id) + " denied: only " + std::to_string(cores) +
                   " logical core(s) available; ";
        } else {
#ifdef __linux__
            cpu_set_t set;
            CPU_ZERO(&set);
            CPU_SET(*core_id, &set);
            const int rc = pthread_setaffinity_np(pthread_self(), sizeof(set), &set);
            if (rc == 0) {
                out.pin_granted = true;
                out.core_stable = true;
                for (int probe = 0; probe < 8; ++probe) {
                    out.observed_core = current_core();
                    if (!out.observed_core || *out.observed_core != *core_id) out.core_stable = false;
                    std::this_thread::yield();
                }
                msg += "pinned to core " + std::to_string(*core_id) + "; ";
            } else {
                msg += std::string("pin denied: ") + std::strerror(rc) + "; ";
            }
#else
            msg += "pinning unsupported on this platform; ";
#endif
        }
    }

    if (priority == PriorityHint::kElevated) {
#ifdef __linux__
        const auto tid = static_cast<id_t>(syscall(SYS_gettid));
        errno = 0;
        if (setpriority(PRIO_PROCESS, tid, kElevatedNice) == 0) {
            out.priority_granted = true;
            msg += "priority elevated; ";
        } else {
            msg += std::string("priority elevation denied: ") + std::strerror(errno) + "; ";
        }
#else
        msg += "priority elevation unsupported on this platform; ";
#endif
    }

    if (msg.size() >= 2) msg.resize(msg.size() - 2);
    out.message = msg;
    return out;
}

}  // namespace railsim
