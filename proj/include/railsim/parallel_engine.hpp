#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "railsim/affinity.hpp"
#include "railsim/integrators.hpp"

namespace railsim {

/// Assignment of state components to workers. Component indices are 0-based
/// positions in StateVector.
struct WorkerPlan {
    std::string name;
    std::vector<std::vector<std::size_t>> groups;
    std::vector<int> core_assignment;  // empty: no pinning, else one core per group
    PriorityHint priority = PriorityHint::kNormal;

    std::size_t worker_count() const { return groups.size(); }

    /// Groups must be non-empty, disjoint and cover every component; cores,
    /// when given, must be one per group and distinct.
    void validate() const;
};

/// Body-wise grouping: each worker owns whole second-order equations, so four
/// workers get {z1, z1'}, {z2, z2'}, {zk, zk'}, {phi, phi'}.
WorkerPlan default_plan(int worker_count);

/// Round-robin grouping: component i goes to worker i mod N. With four
/// workers this is {1,5}, {2,6}, {3,7}, {4,8} in 1-based numbering.
WorkerPlan interleaved_plan(int worker_count);

/// "bodywise" or "interleaved".
WorkerPlan named_plan(std::string_view name, int worker_count);

/// Per-component slot: the accepted value, the three intermediate RK stage
/// inputs and the four stage derivatives. Only the owning worker writes it.
struct ComponentSlot {
    double value = 0.0;
    double stage_input[3] = {0.0, 0.0, 0.0};
    double rate[4] = {0.0, 0.0, 0.0, 0.0};
};

inline constexpr std::size_t kDefaultCacheLine = 64;
inline constexpr const char* kCacheLineEnv = "RAILSIM_CACHE_LINE";

/// Cache-line size used for padding: RAILSIM_CACHE_LINE if set (power of two
/// in [8, 4096]), else 64.
std::size_t cache_line_size();

/// Component slots laid out so that no two slots share a cache line.
class PaddedStateBuffer {
   public:
    PaddedStateBuffer(std::size_t components, std::size_t line_size);

    PaddedStateBuffer(const PaddedStateBuffer&) = delete;
    PaddedStateBuffer& operator=(const PaddedStateBuffer&) = delete;

    ComponentSlot& slot(std::size_t i) { return *slot_ptr(i); }
    const ComponentSlot& slot(std::size_t i) const { return *slot_ptr(i); }

    std::size_t size() const { return components_; }
    std::size_t line_size() const { return line_; }
    std::size_t stride() const { return stride_; }
    std::uintptr_t slot_address(std::size_t i) const { return reinterpret_cast<std::uintptr_t>(slot_ptr(i)); }

    /// True when every slot's bytes fall on cache lines no other slot touches.
    bool slots_on_distinct_lines() const;

   private:
    struct AlignedDelete {
        std::size_t align;
        void operator()(std::byte* p) const;
    };

    ComponentSlot* slot_ptr(std::size_t i) const {
        return reinterpret_cast<ComponentSlot*>(storage_.get() + i * stride_);
    }

    std::size_t components_;
    std::size_t line_;
    std::size_t stride_;
    std::unique_ptr<std::byte[], AlignedDelete> storage_;
};

struct EngineOptions {
    std::size_t cache_line = cache_line_size();
    std::size_t sample_stride = 1;
    // Count every shared-buffer write and flag writes outside the writer's group.
    bool track_writes = false;
};

struct WorkerStats {
    std::size_t worker = 0;
    std::vector<std::size_t> components;
    double busy_time = 0.0;  // s, computing stage derivatives and stage inputs
    double wait_time = 0.0;  // s, blocked at rendezvous points
    double wall_time = 0.0;  // s, first stage start to last rendezvous exit
    std::uint64_t steps = 0;
    std::uint64_t stage_rendezvous_count = 0;
    PinOutcome pin;
};

struct BufferLayout {
    std::size_t line_size = 0;
    std::size_t stride = 0;
    std::vector<std::uintptr_t> slot_offsets;
    bool distinct_lines = false;
};

struct ParallelStats {
    std::vector<WorkerStats> workers;
    double wall_time = 0.0;
    std::string clock_source;
    double clock_resolution = 0.0;  // s, smallest observed tick
    std::uint64_t threads_created = 0;
    std::uint64_t tracked_writes = 0;
    std::uint64_t write_violations = 0;
    BufferLayout layout;
    std::vector<std::string> warnings;
};

struct ParallelResult {
    TimeSeries series;
    ParallelStats stats;
};

/// Fixed-step RK4 with state components split across workers that meet at a
/// rendezvous after each of the four stages. Output is bit-identical to
/// integrate_fixed for every valid plan. One run at a time per instance.
class ParallelEngine {
   public:
    ParallelEngine(SimulationContext context, WorkerPlan plan, EngineOptions options = {});

    ParallelResult run(const StateVector& x0, double t0, double t1, double h);

    /// Worker threads created over this engine's lifetime.
    std::uint64_t threads_created() const { return threads_created_.load(); }

    const WorkerPlan& plan() const { return plan_; }

   private:
    SimulationContext context_;
    WorkerPlan plan_;
    EngineOptions options_;
    std::atomic<std::uint64_t> threads_created_{0};
};

ParallelResult run_parallel(const StateVector& x0, double t0, double t1, double h, const WorkerPlan& plan,
                            const SimulationContext& context, const EngineOptions& options = {});

/// Smallest nonzero increment observed on the steady clock, s.
double measured_clock_resolution();

}  // namespace railsim
