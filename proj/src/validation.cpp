#include "railsim/validation.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "railsim/commands.hpp"
#include "railsim/csv.hpp"
#include "railsim/error.hpp"
#include "railsim/oracle.hpp"

namespace railsim {

namespace {

using Clock = std::chrono::steady_clock;

template <class Fn>
CriterionResult timed(int id, std::string name, Fn&& body) {
    CriterionResult r;
    r.id = id;
    r.name = std::move(name);
    const auto start = Clock::now();
    try {
        body(r);
    } catch (const std::exception& e) {
        r.passed = false;
        r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return r;
}

std::string sci(double v) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << v;
    return os.str();
}

double final_error(const StateVector& a, const StateVector& b) {
    double e = 0.0;
    for (std::size_t i = 0; i < kStateSize; ++i) e = std::max(e, std::abs(a[i] - b[i]));
    return e;
}

}  // namespace

std::vector<double> oracle_sweep_speeds() {
    std::vector<double> v;
    for (int s = 20; s <= 140; s += 20) v.push_back(s);
    v.push_back(150.0);
    return v;
}

CriterionResult check_parallel_equivalence(const SimConfig& config) {
    return timed(1, "parallel/sequential equivalence", [&](CriterionResult& r) {
        const auto ctx = config.context();
        const auto& t = config.time;
        const TimeSeries reference = integrate_fixed(config.initial_state, t.start, t.end, t.step, ctx);
        bool ok = true;
        double slowest = 0.0;
        std::ostringstream os;
        for (const char* name : {"bodywise", "interleaved"}) {
            for (int workers : {1, 2, 4}) {
                const auto start = Clock::now();
                const auto res =
                    run_parallel(config.initial_state, t.start, t.end, t.step, named_plan(name, workers), ctx);
                const double secs = std::chrono::duration<double>(Clock::now() - start).count();
                slowest = std::max(slowest, secs);
                const bool same = res.series == reference;
                if (!same || secs >= kEquivalenceRuntimeLimit) {
                    ok = false;
                    os << name << "/" << workers << (same ? " too slow " : " differs ") << secs << " s; ";
                }
            }
        }
        r.passed = ok;
        os << "6 runs bit-identical=" << (ok ? "yes" : "no") << ", slowest run " << slowest << " s (limit "
           << kEquivalenceRuntimeLimit << " s)";
        r.detail = os.str();
    });
}

CriterionResult check_solver_agreement(const SimConfig& config) {
    return timed(2, "RK4 vs adaptive RK45", [&](CriterionResult& r) {
        const auto ctx = config.context();
        const auto& t = config.time;
        const TimeSeries fixed = integrate_fixed(config.initial_state, t.start, t.end, t.step, ctx);
        const AdaptiveResult adaptive = integrate_adaptive(config.initial_state, t.start, t.end, config.adaptive, ctx);
        const double err = final_error(fixed.states.back(), adaptive.series.states.back());
        r.passed = err <= kSolverAgreementTol && adaptive.series.times.back() == t.end;
        r.detail = "max |RK4 - RK45| at t1 = " + sci(err) + " (tol " + sci(kSolverAgreementTol) + "), " +
                   std::to_string(adaptive.accepted_steps) + " accepted / " +
                   std::to_string(adaptive.rejected_steps) + " rejected steps";
    });
}

CriterionResult check_oracle_agreement(const SimConfig& config) {
    return timed(3, "frequency-domain oracle", [&](CriterionResult& r) {
        const auto start = Clock::now();
        bool ok = true;
        double worst = 0.0;
        std::ostringstream os;
        for (double kmh : oracle_sweep_speeds()) {
            const SweepRow row = sweep_speed(config, kmh);
            if (!row.ok()) {
                ok = false;
                os << kmh << " km/h: " << row.status << "; ";
                continue;
            }
            worst = std::max(worst, row.oracle_rel_err);
            if (!(row.oracle_rel_err <= kOracleRelTol)) {
                ok = false;
                os << kmh << " km/h rel err " << sci(row.oracle_rel_err) << "; ";
            }
        }
        const double secs = std::chrono::duration<double>(Clock::now() - start).count();
        if (secs >= kOracleRuntimeLimit) ok = false;
        r.passed = ok;
        os << "worst relative deviation " << sci(worst) << " over " << oracle_sweep_speeds().size()
           << " speeds (tol " << kOracleRelTol << "), " << secs << " s";
        r.detail = os.str();
    });
}

CriterionResult check_excitation_frequency() {
    return timed(4, "excitation frequency", [&](CriterionResult& r) {
        TrackProfile profile;
        profile.speed = 20.0;
        profile.wavelength = 25.0;
        const double w = excitation_frequency(profile);
        r.passed = std::abs(w - kExcitationTarget) <= kExcitationTol;
        std::ostringstream os;
        os.precision(6);
        os << "w = " << w << " rad/s (target " << kExcitationTarget << " +/- " << kExcitationTol << ")";
        r.detail = os.str();
    });
}

CriterionResult check_stability(const SimConfig& config) {
    return timed(5, "free-decay stability", [&](CriterionResult& r) {
        SimulationContext ctx = config.context();
        ctx.forcing_enabled = false;
        StateVector x0;
        x0[kZ1] = kFreeDecayOffset;
        const TimeSeries s = integrate_fixed(x0, 0.0, kFreeDecayDuration, config.time.step, ctx);
        const ForcingSample none{};
        const double e0 = mechanical_energy(s.states.front(), none, ctx.vehicle);
        double prev = e0;
        double worst_rise = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < s.size(); ++i) {
            const double e = mechanical_energy(s.states[i], none, ctx.vehicle);
            worst_rise = std::max(worst_rise, e - prev);
            prev = e;
        }
        const double ratio = prev / e0;
        r.passed = worst_rise <= kEnergyStepSlack && ratio <= kEnergyDecayRatio;
        r.detail = "E(0) = " + sci(e0) + " kJ, largest per-step change " + sci(worst_rise) + " kJ (slack " +
                   sci(kEnergyStepSlack) + "), E(30 s)/E(0) = " + sci(ratio) + " (limit " + sci(kEnergyDecayRatio) + ")";
    });
}

CriterionResult check_rk4_order(const SimConfig& config) {
    return timed(6, "RK4 convergence order", [&](CriterionResult& r) {
        const auto ctx = config.context();
        const auto& t = config.time;
        StepControl tight = config.adaptive;
        tight.rel_tol = kReferenceRelTol;
        tight.abs_tol = kReferenceAbsTol;
        const AdaptiveResult reference = integrate_adaptive(config.initial_state, t.start, t.end, tight, ctx);
        const StateVector& ref = reference.series.states.back();
        const double coarse = final_error(integrate_fixed(config.initial_state, t.start, t.end, 1e-3, ctx).states.back(), ref);
        const double fine = final_error(integrate_fixed(config.initial_state, t.start, t.end, 5e-4, ctx).states.back(), ref);
        const double ratio = coarse / fine;
        r.passed = ratio >= kOrderRatioMin && ratio <= kOrderRatioMax;
        std::ostringstream os;
        os << "error(h=1e-3) = " << sci(coarse) << ", error(h=5e-4) = " << sci(fine) << ", ratio " << ratio
           << " (accepted range [" << kOrderRatioMin << ", " << kOrderRatioMax << "])";
        r.detail = os.str();
    });
}

CriterionResult check_parallel_accounting(const SimConfig& config) {
    return timed(7, "parallel accounting and layout", [&](CriterionResult& r) {
        const auto ctx = config.context();
        const auto& t = config.time;
        EngineOptions opts;
        opts.track_writes = true;
        ParallelEngine engine(ctx, default_plan(4), opts);
        const auto res = engine.run(config.initial_state, t.start, t.end, t.step);
        const auto& st = res.stats;
        const std::uint64_t steps = StepSchedule(t.start, t.end, t.step).count();
        bool ok = st.layout.distinct_lines && st.threads_created == 4 && engine.threads_created() == 4 &&
                  st.write_violations == 0 && st.tracked_writes == steps * kStateSize * 8;
        std::ostringstream os;
        for (const auto& ws : st.workers) {
            const bool fits = ws.busy_time + ws.wait_time <= ws.wall_time + st.clock_resolution;
            const bool counts = ws.steps == steps && ws.stage_rendezvous_count == 4 * steps;
            ok = ok && fits && counts;
            os << "w" << ws.worker << " busy " << sci(ws.busy_time) << " + wait " << sci(ws.wait_time) << " <= wall "
               << sci(ws.wall_time) << (fits ? "" : " VIOLATED") << ", rendezvous " << ws.stage_rendezvous_count
               << "; ";
        }
        os << "line " << st.layout.line_size << " B, stride " << st.layout.stride << " B, distinct lines "
           << (st.layout.distinct_lines ? "yes" : "no") << ", threads created " << st.threads_created
           << ", write violations " << st.write_violations;
        r.passed = ok;
        r.detail = os.str();
    });
}

CriterionResult check_determinism(const SimConfig& config, const std::filesystem::path& scratch_dir) {
    return timed(8, "byte-identical CSV output", [&](CriterionResult& r) {
        std::filesystem::create_directories(scratch_dir);
        bool ok = true;
        std::ostringstream os;
        for (EngineKind engine : {EngineKind::kSequential, EngineKind::kParallel}) {
            const std::string tag = engine == EngineKind::kSequential ? "seq" : "par";
            std::string bytes[2];
            for (int run = 0; run < 2; ++run) {
                SimulateOptions so;
                so.engine = engine;
                so.plot = PlotKind::kNone;
                so.csv = scratch_dir / ("simulate_" + tag + "_" + std::to_string(run) + ".csv");
                cmd_simulate(config, so);
                bytes[run] = read_text_file(*so.csv);
            }
            const bool same = bytes[0] == bytes[1] && !bytes[0].empty();
            ok = ok && same;
            os << "simulate " << tag << " " << (same ? "identical" : "DIFFERENT") << " (" << bytes[0].size()
               << " B); ";
        }
        {
            const std::vector<double> speeds{20.0, 150.0};
            std::string bytes[2];
            for (int run = 0; run < 2; ++run) {
                const auto path = scratch_dir / ("sweep_" + std::to_string(run) + ".csv");
                cmd_sweep(config, speeds, path);
                bytes[run] = read_text_file(path);
            }
            const bool same = bytes[0] == bytes[1];
            ok = ok && same;
            os << "sweep " << (same ? "identical" : "DIFFERENT") << " (" << bytes[0].size() << " B)";
        }
        r.passed = ok;
        r.detail = os.str();
    });
}

std::vector<CriterionResult> run_acceptance_suite(const SimConfig& config, const std::filesystem::path& scratch_dir) {
    std::vector<CriterionResult> out;
    out.push_back(check_parallel_equivalence(config));
    out.push_back(check_solver_agreement(config));
    out.push_back(check_oracle_agreement(config));
    out.push_back(check_excitation_frequency());
    out.push_back(check_stability(config));
    out.push_back(check_rk4_order(config));
    out.push_back(check_parallel_accounting(config));
    out.push_back(check_determinism(config, scratch_dir));
    return out;
}

std::string format_result(const CriterionResult& r) {
    std::ostringstream os;
    os << (r.passed ? "PASS" : "FAIL") << "  [" << r.id << "] " << r.name << " (" << std::fixed;
    os.precision(2);
    os << r.seconds << " s): " << r.detail;
    return os.str();
}

}  // namespace railsim
