#include <doctest.h>

#include <cstdlib>
#include <set>
#include <thread>

#include "railsim/error.hpp"
#include "railsim/parallel_engine.hpp"

using namespace railsim;

namespace {

std::vector<std::size_t> v(std::initializer_list<std::size_t> l) { return l; }

// Temporarily sets an environment variable.
class EnvGuard {
   public:
    EnvGuard(const char* name, const char* value) : name_(name) {
        if (const char* old = std::getenv(name)) old_ = old;
        if (value) {
            ::setenv(name, value, 1);
        } else {
            ::unsetenv(name);
        }
    }
    ~EnvGuard() {
        if (old_) {
            ::setenv(name_, old_->c_str(), 1);
        } else {
            ::unsetenv(name_);
        }
    }

   private:
    const char* name_;
    std::optional<std::string> old_;
};

}  // namespace

TEST_CASE("default and interleaved plans") {
    const auto one = default_plan(1);
    REQUIRE(one.groups.size() == 1);
    CHECK(one.groups[0] == v({0, 1, 2, 3, 4, 5, 6, 7}));

    const auto four = default_plan(4);
    REQUIRE(four.groups.size() == 4);
    CHECK(four.groups[0] == v({0, 1}));
    CHECK(four.groups[1] == v({2, 3}));
    CHECK(four.groups[2] == v({4, 5}));
    CHECK(four.groups[3] == v({6, 7}));
    CHECK_NOTHROW(four.validate());

    const auto lit = interleaved_plan(4);
    CHECK(lit.groups[0] == v({0, 4}));
    CHECK(lit.groups[1] == v({1, 5}));
    CHECK(lit.groups[2] == v({2, 6}));
    CHECK(lit.groups[3] == v({3, 7}));

    CHECK(default_plan(8).groups.size() == 8);
    CHECK(named_plan("interleaved", 2).groups[1] == v({1, 3, 5, 7}));

    for (int bad : {0, 3, 5, 16}) {
        try {
            (void)default_plan(bad);
            FAIL("expected invalid plan");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::kInvalidPlan);
        }
    }
    CHECK_THROWS_AS(named_plan("diagonal", 4), Error);
}

TEST_CASE("plan validation") {
    WorkerPlan p = default_plan(4);
    p.groups[3] = v({6});  // component 8 missing
    CHECK_THROWS_AS(p.validate(), Error);

    p = default_plan(2);
    p.groups[1].push_back(0);  // duplicate
    CHECK_THROWS_AS(p.validate(), Error);

    p = default_plan(2);
    p.core_assignment = {1, 1};
    CHECK_THROWS_AS(p.validate(), Error);
    p.core_assignment = {0};
    CHECK_THROWS_AS(p.validate(), Error);
    p.core_assignment = {0, 1};
    CHECK_NOTHROW(p.validate());
}

TEST_CASE("padded buffer keeps slots on separate cache lines") {
    for (std::size_t line : {16u, 32u, 64u, 128u, 256u}) {
        PaddedStateBuffer buf(kStateSize, line);
        CHECK(buf.slots_on_distinct_lines());
        CHECK(buf.stride() % line == 0);
        CHECK(buf.stride() >= sizeof(ComponentSlot));
        CHECK(buf.slot_address(0) % line == 0);
        for (std::size_t i = 1; i < kStateSize; ++i) {
            CHECK(buf.slot_address(i) - buf.slot_address(i - 1) >= std::max(line, sizeof(ComponentSlot)));
        }
    }
    CHECK_THROWS_AS(PaddedStateBuffer(kStateSize, 48), Error);
}

TEST_CASE("cache line size override") {
    {
        EnvGuard g(kCacheLineEnv, nullptr);
        CHECK(cache_line_size() == kDefaultCacheLine);
    }
    {
        EnvGuard g(kCacheLineEnv, "128");
        CHECK(cache_line_size() == 128);
        EngineOptions opts;
        CHECK(opts.cache_line == 128);
    }
    {
        EnvGuard g(kCacheLineEnv, "100");
        CHECK_THROWS_AS(cache_line_size(), Error);
    }
}

TEST_CASE("parallel output is bit-identical to sequential") {
    const SimulationContext ctx;
    StateVector x0;
    x0[kZk] = 0.002;
    x0[kPhiRate] = -0.01;
    const auto reference = integrate_fixed(x0, 0.0, 2.0, 1e-3, ctx);
    for (const char* name : {"bodywise", "interleaved"}) {
        for (int workers : {1, 2, 4, 8}) {
            CAPTURE(name);
            CAPTURE(workers);
            const auto res = run_parallel(x0, 0.0, 2.0, 1e-3, named_plan(name, workers), ctx);
            CHECK(res.series == reference);
        }
    }

    WorkerPlan custom;
    custom.name = "uneven";
    custom.groups = {v({7}), v({0, 1, 2, 3, 4}), v({5, 6})};
    CHECK(run_parallel(x0, 0.0, 2.0, 1e-3, custom, ctx).series == reference);

    EngineOptions strided;
    strided.sample_stride = 37;
    const auto a = run_parallel(x0, 0.0, 1.0005, 1e-3, default_plan(4), ctx, strided);
    const auto b = integrate_fixed(x0, 0.0, 1.0005, 1e-3, ctx, 37);
    CHECK(a.series == b);
    CHECK(a.series.times.back() == 1.0005);
}

TEST_CASE("parallel statistics and write tracking") {
    const SimulationContext ctx;
    EngineOptions opts;
    opts.track_writes = true;
    ParallelEngine engine(ctx, default_plan(4), opts);
    const auto res = engine.run(StateVector{}, 0.0, 0.5, 1e-3);
    const auto& st = res.stats;
    const std::uint64_t steps = 500;
    REQUIRE(st.workers.size() == 4);
    for (const auto& w : st.workers) {
        CHECK(w.steps == steps);
        CHECK(w.stage_rendezvous_count == 4 * steps);
        CHECK(w.busy_time + w.wait_time <= w.wall_time + st.clock_resolution);
        CHECK(w.busy_time > 0.0);
    }
    CHECK(st.wall_time > 0.0);
    CHECK(st.clock_resolution > 0.0);
    CHECK(st.clock_source == "std::chrono::steady_clock");
    CHECK(st.threads_created == 4);
    CHECK(st.write_violations == 0);
    CHECK(st.tracked_writes == steps * kStateSize * 8);
    CHECK(st.layout.distinct_lines);
    CHECK(st.layout.slot_offsets.size() == kStateSize);
    CHECK(st.warnings.empty());

    (void)engine.run(StateVector{}, 0.0, 0.1, 1e-3);
    CHECK(engine.threads_created() == 8);
}

TEST_CASE("single worker has nothing to wait for") {
    const SimulationContext ctx;
    const auto res = run_parallel(StateVector{}, 0.0, 1.0, 1e-3, default_plan(1), ctx);
    const auto& w = res.stats.workers.at(0);
    CHECK(w.wait_time / w.wall_time < 0.2);
}

TEST_CASE("pin and prioritize") {
    SUBCASE("out-of-range core is denied") {
        PinOutcome out;
        std::thread([&] { out = pin_and_prioritize(available_core_count() + 1000, PriorityHint::kNormal); }).join();
        CHECK_FALSE(out.pin_granted);
        CHECK(out.message.find("denied") != std::string::npos);
    }
    SUBCASE("an allowed core is granted and stays put") {
        const auto core = current_core();
        if (!core) return;  // platform cannot report the executing core
        PinOutcome out;
        std::thread([&] { out = pin_and_prioritize(*core, PriorityHint::kNormal); }).join();
        CHECK(out.pin_granted);
        CHECK(out.core_stable);
        REQUIRE(out.observed_core);
        CHECK(*out.observed_core == *core);
    }
    SUBCASE("priority elevation reports its outcome") {
        PinOutcome out;
        std::thread([&] { out = pin_and_prioritize(std::nullopt, PriorityHint::kElevated); }).join();
        CHECK(out.requested_priority == PriorityHint::kElevated);
        CHECK_FALSE(out.message.empty());
    }
}

TEST_CASE("denied pinning falls back and still matches sequential") {
    const SimulationContext ctx;
    WorkerPlan plan = default_plan(4);
    const int base = available_core_count() + 100;
    plan.core_assignment = {base, base + 1, base + 2, base + 3};
    plan.priority = PriorityHint::kElevated;
    const auto res = run_parallel(StateVector{}, 0.0, 0.5, 1e-3, plan, ctx);
    CHECK(res.series == integrate_fixed(StateVector{}, 0.0, 0.5, 1e-3, ctx));
    CHECK(res.stats.warnings.size() == 4);
    for (const auto& w : res.stats.workers) CHECK_FALSE(w.pin.pin_granted);
}

TEST_CASE("parallel divergence matches sequential") {
    const SimulationContext ctx;
    StateVector x0;
    x0[kZ1] = 0.01;
    std::string seq_msg, par_msg;
    try {
        (void)integrate_fixed(x0, 0.0, 5000.0, 0.5, ctx);
    } catch (const Error& e) {
        seq_msg = e.what();
    }
    try {
        (void)run_parallel(x0, 0.0, 5000.0, 0.5, default_plan(4), ctx);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::kIntegrationDiverged);
        par_msg = e.what();
    }
    CHECK_FALSE(seq_msg.empty());
    CHECK(seq_msg == par_msg);
}
