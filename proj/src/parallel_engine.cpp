#include "railsim/parallel_engine.hpp"

#include <algorithm>
#include <barrier>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <latch>
#include <new>
#include <sstream>
#include <thread>

#include "railsim/error.hpp"
#include "rk4_kernel.hpp"

namespace railsim {

namespace {

using Clock = std::chrono::steady_clock;

double seconds(Clock::duration d) { return std::chrono::duration<double>(d).count(); }

void check_worker_count(int n) {
    if (n != 1 && n != 2 && n != 4 && n != 8) {
        throw Error(ErrorCode::kInvalidPlan,
                    "unsupported worker count " + std::to_string(n) + " (expected 1, 2, 4 or 8)");
    }
}

}  // namespace

void WorkerPlan::validate() const {
    auto fail = [this](const std::string& msg) {
        throw Error(ErrorCode::kInvalidPlan, "plan '" + name + "': " + msg);
    };
    if (groups.empty()) fail("no worker groups");
    std::array<int, kStateSize> seen{};
    for (const auto& g : groups) {
        if (g.empty()) fail("empty worker group");
        for (std::size_t i : g) {
            if (i >= kStateSize) fail("component index " + std::to_string(i) + " out of range");
            if (seen[i]++) fail("component " + std::to_string(i + 1) + " assigned twice");
        }
    }
    for (std::size_t i = 0; i < kStateSize; ++i) {
        if (!seen[i]) fail("component " + std::to_string(i + 1) + " not assigned");
    }
    if (!core_assignment.empty()) {
        if (core_assignment.size() != groups.size()) fail("core assignment needs one core per group");
        auto cores = core_assignment;
        std::sort(cores.begin(), cores.end());
        if (std::adjacent_find(cores.begin(), cores.end()) != cores.end()) fail("core ids must be distinct");
    }
}

WorkerPlan default_plan(int worker_count) {
    check_worker_count(worker_count);
    WorkerPlan plan;
    plan.name = "bodywise";
    const std::size_t per = kStateSize / static_cast<std::size_t>(worker_count);
    plan.groups.resize(static_cast<std::size_t>(worker_count));
    for (std::size_t i = 0; i < kStateSize; ++i) plan.groups[i / per].push_back(i);
    return plan;
}

WorkerPlan interleaved_plan(int worker_count) {
    check_worker_count(worker_count);
    WorkerPlan plan;
    plan.name = "interleaved";
    const auto n = static_cast<std::size_t>(worker_count);
    plan.groups.resize(n);
    for (std::size_t i = 0; i < kStateSize; ++i) plan.groups[i % n].push_back(i);
    return plan;
}

WorkerPlan named_plan(std::string_view name, int worker_count) {
    if (name == "bodywise") return default_plan(worker_count);
    if (name == "interleaved") return interleaved_plan(worker_count);
    throw Error(ErrorCode::kInvalidPlan, "unknown plan name '" + std::string(name) + "'");
}

std::size_t cache_line_size() {
    const char* env = std::getenv(kCacheLineEnv);
    if (env == nullptr || *env == '\0') return kDefaultCacheLine;
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end == env || *end != '\0' || v < 8 || v > 4096 || !std::has_single_bit(v)) {
        throw Error(ErrorCode::kConfig, std::string(kCacheLineEnv) + "='" + env +
                                            "' must be a power of two between 8 and 4096");
    }
    return static_cast<std::size_t>(v);
}

void PaddedStateBuffer::AlignedDelete::operator()(std::byte* p) const {
    ::operator delete[](p, std::align_val_t(align));
}

PaddedStateBuffer::PaddedStateBuffer(std::size_t components, std::size_t line_size)
    : components_(components), line_(line_size), stride_(0), storage_(nullptr, AlignedDelete{line_size}) {
    if (line_size < alignof(ComponentSlot) || !std::has_single_bit(line_size)) {
        throw Error(ErrorCode::kConfig, "cache line size must be a power of two >= " +
                                            std::to_string(alignof(ComponentSlot)));
    }
    stride_ = (sizeof(ComponentSlot) + line_ - 1) / line_ * line_;
    const std::size_t bytes = std::max<std::size_t>(1, components_) * stride_;
    storage_.reset(static_cast<std::byte*>(::operator new[](bytes, std::align_val_t(line_))));
    for (std::size_t i = 0; i < components_; ++i) new (storage_.get() + i * stride_) ComponentSlot{};
}

bool PaddedStateBuffer::slots_on_distinct_lines() const {
    for (std::size_t i = 0; i + 1 < components_; ++i) {
        const std::uintptr_t last_line_i = (slot_address(i) + sizeof(ComponentSlot) - 1) / line_;
        for (std::size_t j = i + 1; j < components_; ++j) {
            if (slot_address(j) / line_ <= last_line_i) return false;
        }
    }
    return true;
}

double measured_clock_resolution() {
    auto best = Clock::duration::max();
    for (int trial = 0; trial < 16; ++trial) {
        const auto a = Clock::now();
        auto b = Clock::now();
        while (b == a) b = Clock::now();
        best = std::min(best, b - a);
    }
    return seconds(best);
}

namespace {

// Shared state of one run. Fields below `completed` are touched only inside
// the barrier completion step, which runs while every worker is parked.
struct RunShared {
    RunShared(const SimulationContext& ctx, const WorkerPlan& plan, const EngineOptions& opts, double t0,
              double t1, double h)
        : buffer(kStateSize, opts.cache_line),
          schedule(t0, t1, h),
          forcing(ctx.vehicle, ctx.track, ctx.forcing_enabled),
          coeffs(equation_coefficients(ctx.vehicle)),
          stride(opts.sample_stride),
          track_writes(opts.track_writes) {
        for (std::size_t w = 0; w < plan.groups.size(); ++w) {
            for (std::size_t i : plan.groups[w]) owner[i] = w;
        }
    }

    PaddedStateBuffer buffer;
    StepSchedule schedule;
    ForcingModel forcing;
    EquationCoefficients coeffs;
    std::array<std::size_t, kStateSize> owner{};
    std::size_t stride;
    bool track_writes;

    std::atomic<long long> failed_step{-1};
    std::atomic<int> failed_stage{0};
    std::atomic<std::uint64_t> writes{0};
    std::atomic<std::uint64_t> violations{0};

    std::uint64_t phase = 0;
    std::size_t completed = 0;
    bool halt = false;
    TimeSeries series;

    StateVector snapshot() const {
        StateVector x;
        for (std::size_t i = 0; i < kStateSize; ++i) x[i] = buffer.slot(i).value;
        return x;
    }
};

// Time spent in the completion step, charged to whichever worker ran it.
thread_local Clock::duration t_completion{};

struct StageComplete {
    RunShared* shared;

    void operator()() noexcept {
        const auto begin = Clock::now();
        record();
        t_completion += Clock::now() - begin;
    }

    void record() noexcept {
        RunShared& s = *shared;
        // Decided here, while every worker is parked, so all of them leave on the same phase.
        if (s.failed_step.load(std::memory_order_relaxed) >= 0) {
            s.halt = true;
            return;
        }
        if (++s.phase % 4 != 0) return;
        ++s.completed;
        if (s.schedule.records(s.completed, s.stride)) {
            const double t = s.schedule.time(s.completed);
            s.series.push(t, s.snapshot(), s.forcing.at(t));
        }
    }
};

}  // namespace

ParallelEngine::ParallelEngine(SimulationContext context, WorkerPlan plan, EngineOptions options)
    : context_(std::move(context)), plan_(std::move(plan)), options_(options) {
    context_.vehicle.validate();
    context_.track.validate();
    plan_.validate();
    if (options_.sample_stride == 0) throw Error(ErrorCode::kInvalidStepControl, "sample stride must be >= 1");
}

ParallelResult ParallelEngine::run(const StateVector& x0, double t0, double t1, double h) {
    if (!x0.all_finite()) throw Error(ErrorCode::kNonFiniteInput, "initial state has non-finite component");
    RunShared shared(context_, plan_, options_, t0, t1, h);
    const std::size_t workers = plan_.worker_count();
    const std::size_t steps = shared.schedule.count();

    for (std::size_t i = 0; i < kStateSize; ++i) shared.buffer.slot(i).value = x0[i];
    shared.series.sample_stride = options_.sample_stride;
    shared.series.reserve(steps / options_.sample_stride + 2);
    shared.series.push(t0, x0, shared.forcing.at(t0));

    ParallelResult result;
    ParallelStats& stats = result.stats;
    stats.clock_source = "std::chrono::steady_clock";
    stats.clock_resolution = measured_clock_resolution();
    stats.layout.line_size = shared.buffer.line_size();
    stats.layout.stride = shared.buffer.stride();
    for (std::size_t i = 0; i < kStateSize; ++i) {
        stats.layout.slot_offsets.push_back(shared.buffer.slot_address(i) - shared.buffer.slot_address(0));
    }
    stats.layout.distinct_lines = shared.buffer.slots_on_distinct_lines();
    stats.workers.resize(workers);

    StageComplete complete{&shared};
    std::barrier<StageComplete> rendezvous(static_cast<std::ptrdiff_t>(workers), complete);
    std::latch ready(static_cast<std::ptrdiff_t>(workers));
    std::latch go(1);

    auto worker_main = [&](std::size_t w) {
        WorkerStats& ws = stats.workers[w];
        ws.worker = w;
        ws.components = plan_.groups[w];
        std::optional<int> core;
        if (!plan_.core_assignment.empty()) core = plan_.core_assignment[w];
        if (core || plan_.priority == PriorityHint::kElevated) ws.pin = pin_and_prioritize(core, plan_.priority);
        ready.count_down();
        go.wait();

        const auto& own = plan_.groups[w];
        const bool needs_forcing = std::any_of(own.begin(), own.end(), [](std::size_t i) {
            return i == kZ1Rate || i == kZ2Rate;
        });
        auto put = [&](std::size_t i, double& field, double v) {
            if (shared.track_writes) {
                shared.writes.fetch_add(1, std::memory_order_relaxed);
                if (shared.owner[i] != w) shared.violations.fetch_add(1, std::memory_order_relaxed);
            }
            field = v;
        };

        PaddedStateBuffer& buf = shared.buffer;
        t_completion = Clock::duration::zero();
        const auto start = Clock::now();
        auto busy = Clock::duration::zero();
        auto wait = Clock::duration::zero();
        auto last = start;
        for (std::size_t n = 0; n < steps; ++n) {
            const double t = shared.schedule.time(n);
            const double step = shared.schedule.step(n);
            const double half = step / 2.0;
            bool stop = false;
            for (int s = 0; s < 4; ++s) {
                const auto a = Clock::now();
                StateVector in;
                for (std::size_t i = 0; i < kStateSize; ++i) {
                    const ComponentSlot& slot = buf.slot(i);
                    in[i] = s == 0 ? slot.value : slot.stage_input[s - 1];
                }
                const double ts = s == 0 ? t : (s == 3 ? t + step : t + half);
                const ForcingSample u = needs_forcing ? shared.forcing.at(ts) : ForcingSample{};
                bool finite = true;
                for (std::size_t i : own) {
                    ComponentSlot& slot = buf.slot(i);
                    const double k = derivative_component(i, in, u, shared.coeffs);
                    finite = finite && std::isfinite(k);
                    put(i, slot.rate[s], k);
                    switch (s) {
                        case 0: put(i, slot.stage_input[0], detail::rk4_stage_input(slot.value, half, k)); break;
                        case 1: put(i, slot.stage_input[1], detail::rk4_stage_input(slot.value, half, k)); break;
                        case 2: put(i, slot.stage_input[2], detail::rk4_stage_input(slot.value, step, k)); break;
                        default:
                            put(i, slot.value,
                                detail::rk4_combine(slot.value, step, slot.rate[0], slot.rate[1], slot.rate[2],
                                                    slot.rate[3]));
                    }
                }
                if (!finite) {
                    long long expected = -1;
                    if (shared.failed_step.compare_exchange_strong(expected, static_cast<long long>(n))) {
                        shared.failed_stage.store(s + 1);
                    }
                }
                const auto b = Clock::now();
                if (workers == 1) {
                    // No peers: the rendezvous degenerates to recording the sample.
                    complete();
                    const auto c = Clock::now();
                    busy += c - a;
                    last = c;
                } else {
                    const auto before = t_completion;
                    rendezvous.arrive_and_wait();
                    const auto c = Clock::now();
                    const auto recording = t_completion - before;
                    busy += b - a + recording;
                    wait += c - b - recording;
                    last = c;
                }
                ++ws.stage_rendezvous_count;
                if (shared.halt) {
                    stop = true;
                    break;
                }
            }
            if (stop) break;
            ++ws.steps;
        }
        ws.busy_time = seconds(busy);
        ws.wait_time = seconds(wait);
        ws.wall_time = seconds(last - start);
    };

    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        threads.emplace_back(worker_main, w);
        threads_created_.fetch_add(1);
        ++stats.threads_created;
    }
    ready.wait();
    const auto wall_start = Clock::now();
    go.count_down();
    for (auto& th : threads) th.join();
    stats.wall_time = seconds(Clock::now() - wall_start);
    stats.tracked_writes = shared.writes.load();
    stats.write_violations = shared.violations.load();

    for (const auto& ws : stats.workers) {
        if (!ws.pin.message.empty() && (!ws.pin.pin_granted && ws.pin.requested_core)) {
            stats.warnings.push_back("worker " + std::to_string(ws.worker) + ": " + ws.pin.message);
        } else if (ws.pin.requested_priority == PriorityHint::kElevated && !ws.pin.priority_granted) {
            stats.warnings.push_back("worker " + std::to_string(ws.worker) + ": " + ws.pin.message);
        }
    }

    const long long failed = shared.failed_step.load();
    if (failed >= 0) {
        std::ostringstream os;
        os << "non-finite derivative in RK stage " << shared.failed_stage.load() << " at step " << failed
           << " (t=" << shared.schedule.time(static_cast<std::size_t>(failed)) << " s)";
        throw Error(ErrorCode::kIntegrationDiverged, os.str());
    }
    result.series = std::move(shared.series);
    return result;
}

ParallelResult run_parallel(const StateVector& x0, double t0, double t1, double h, const WorkerPlan& plan,
                            const SimulationContext& context, const EngineOptions& options) {
    ParallelEngine engine(context, plan, options);
    return engine.run(x0, t0, t1, h);
}

}  // namespace railsim
