#include "railsim/commands.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "railsim/csv.hpp"
#include "railsim/error.hpp"
#include "railsim/oracle.hpp"
#include "railsim/plot.hpp"

namespace railsim {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point since) {
    return std::chrono::duration<double>(Clock::now() - since).count();
}

double max_abs_diff(const TimeSeries& a, const TimeSeries& b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    double d = 0.0;
    for (std::size_t r = 0; r < a.size(); ++r) {
        if (a.times[r] != b.times[r]) return std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < kStateSize; ++i) {
            d = std::max(d, std::abs(a.states[r][i] - b.states[r][i]));
        }
    }
    return d;
}

std::string csv_safe(std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

WorkerPlan plan_with_config_flags(WorkerPlan plan, const PlanConfig& pc) {
    if (pc.pin) {
        for (std::size_t w = 0; w < plan.worker_count(); ++w) plan.core_assignment.push_back(static_cast<int>(w));
    }
    plan.priority = pc.elevate_priority ? PriorityHint::kElevated : PriorityHint::kNormal;
    return plan;
}

nlohmann::json pin_json(const PinOutcome& p) {
    nlohmann::json j;
    j["requested_core"] = p.requested_core ? nlohmann::json(*p.requested_core) : nlohmann::json(nullptr);
    j["pin_granted"] = p.pin_granted;
    j["observed_core"] = p.observed_core ? nlohmann::json(*p.observed_core) : nlohmann::json(nullptr);
    j["core_stable"] = p.core_stable;
    j["priority_elevation_requested"] = p.requested_priority == PriorityHint::kElevated;
    j["priority_granted"] = p.priority_granted;
    j["message"] = p.message;
    return j;
}

}  // namespace

EngineKind parse_engine_kind(std::string_view text) {
    if (text == "seq") return EngineKind::kSequential;
    if (text == "par") return EngineKind::kParallel;
    throw Error(ErrorCode::kConfig, "unknown engine '" + std::string(text) + "' (seq|par)");
}

SimulateOutcome cmd_simulate(const SimConfig& config, const SimulateOptions& options) {
    config.validate();
    SimulateOutcome out;
    out.csv = options.csv.value_or(std::filesystem::path(config.output.csv));
    const auto ctx = config.context();
    const auto& t = config.time;
    if (options.engine == EngineKind::kSequential) {
        out.series = integrate_fixed(config.initial_state, t.start, t.end, t.step, ctx, config.output.stride);
    } else {
        EngineOptions eo;
        eo.sample_stride = config.output.stride;
        auto result = run_parallel(config.initial_state, t.start, t.end, t.step, config.parallel.make_plan(), ctx, eo);
        out.series = std::move(result.series);
        out.stats = std::move(result.stats);
    }
    write_timeseries_csv(out.csv, out.series);

    const PlotKind plot = options.plot.value_or(config.output.plot);
    if (plot != PlotKind::kNone) {
        const auto script = default_plot_path(out.csv, plot);
        emit_plot(out.series, plot, out.csv, script);
        out.plot_script = script;
    }
    return out;
}

bool SweepReport::all_ok() const {
    return std::all_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.ok(); });
}

SweepRow sweep_speed(const SimConfig& config, double speed_kmh) {
    SweepRow row;
    row.speed_kmh = speed_kmh;
    try {
        if (!(std::isfinite(speed_kmh) && speed_kmh > 0.0)) {
            throw Error(ErrorCode::kConfig, "speed must be positive");
        }
        SimConfig cfg = config;
        cfg.track.speed = kmh_to_mps(speed_kmh);
        row.speed_mps = cfg.track.speed;
        row.omega = excitation_frequency(cfg.track);

        const auto ctx = cfg.context();
        const double t0 = cfg.time.start;
        const double t1 = t0 + cfg.validation.settle + cfg.validation.window;
        const double h = cfg.time.step;
        const TimeSeries seq = integrate_fixed(cfg.initial_state, t0, t1, h, ctx);
        const auto par = run_parallel(cfg.initial_state, t0, t1, h, cfg.parallel.make_plan(), ctx);
        row.max_par_seq_diff = max_abs_diff(seq, par.series);

        for (std::size_t i = 0; i < kStateSize; ++i) {
            row.tail_amplitude[i] = amplitude_from_series(seq, i, cfg.validation.window, row.omega).peak;
        }

        const SteadyStateResponse ss = steady_state_response(cfg.vehicle, cfg.track);
        const double tail_start = t1 - cfg.validation.window;
        std::array<double, kStateSize> err{};
        std::array<double, kStateSize> peak{};
        for (std::size_t r = 0; r < seq.size(); ++r) {
            if (seq.times[r] < tail_start) continue;
            const StateVector ref = ss.at(seq.times[r]);
            for (std::size_t i = 0; i < kStateSize; ++i) {
                err[i] = std::max(err[i], std::abs(seq.states[r][i] - ref[i]));
                peak[i] = std::max(peak[i], std::abs(ref[i]));
            }
        }
        for (std::size_t i = 0; i < kStateSize; ++i) {
            const double rel = peak[i] > 0.0 ? err[i] / peak[i]
                                             : (err[i] == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
            row.oracle_rel_err = std::max(row.oracle_rel_err, rel);
        }
    } catch (const std::exception& e) {
        row.status = "error: " + csv_safe(e.what());
    }
    return row;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out(kSweepHeader);
    out += '\n';
    for (const auto& r : rows) {
        out += format_double(r.speed_kmh) + ',' + format_double(r.speed_mps) + ',' + format_double(r.omega) + ',' +
               format_double(r.max_par_seq_diff);
        for (double a : r.tail_amplitude) out += ',' + format_double(a);
        out += ',' + format_double(r.oracle_rel_err) + ',' + r.status + '\n';
    }
    return out;
}

SweepReport cmd_sweep(const SimConfig& config, const std::vector<double>& speeds_kmh,
                      const std::optional<std::filesystem::path>& csv) {
    config.validate();
    SweepReport report;
    report.csv = csv.value_or(std::filesystem::path(config.output.sweep_csv));
    for (double v : speeds_kmh) report.rows.push_back(sweep_speed(config, v));
    write_text_file(report.csv, sweep_csv(report.rows));
    return report;
}

double median(std::vector<double> values) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

nlohmann::json cmd_bench(const SimConfig& config, int repetitions) {
    config.validate();
    if (repetitions < 1) throw Error(ErrorCode::kConfig, "repetitions must be >= 1");
    const auto ctx = config.context();
    const auto& t = config.time;

    nlohmann::json report;
    report["repetitions"] = repetitions;
    report["steps"] = StepSchedule(t.start, t.end, t.step).count();
    report["clock_source"] = "std::chrono::steady_clock";
    report["clock_resolution_s"] = measured_clock_resolution();
    report["available_cores"] = available_core_count();

    std::vector<double> seq_walls;
    for (int r = 0; r < repetitions; ++r) {
        const auto start = Clock::now();
        (void)integrate_fixed(config.initial_state, t.start, t.end, t.step, ctx, config.output.stride);
        seq_walls.push_back(elapsed(start));
    }
    report["sequential"] = {{"wall_samples_s", seq_walls}, {"median_wall_s", median(seq_walls)}};

    std::vector<WorkerPlan> plans;
    for (int n : {1, 2, 4}) plans.push_back(default_plan(n));
    for (int n : {2, 4}) plans.push_back(interleaved_plan(n));
    {
        const WorkerPlan configured = named_plan(config.parallel.name, config.parallel.workers);
        const bool listed = std::any_of(plans.begin(), plans.end(), [&](const WorkerPlan& p) {
            return p.name == configured.name && p.worker_count() == configured.worker_count();
        });
        if (!listed) plans.push_back(configured);
    }

    EngineOptions eo;
    eo.sample_stride = config.output.stride;
    nlohmann::json plan_reports = nlohmann::json::array();
    for (const WorkerPlan& base : plans) {
        const WorkerPlan plan = plan_with_config_flags(base, config.parallel);
        const std::size_t nw = plan.worker_count();
        std::vector<double> walls;
        std::vector<std::vector<double>> busy(nw), wait(nw), busy_frac(nw), wait_frac(nw);
        std::vector<std::uint64_t> steps(nw), rendezvous(nw);
        std::vector<PinOutcome> pins(nw);
        std::vector<std::string> warnings;
        bool accounting_ok = true;
        std::uint64_t threads_created = 0;
        ParallelEngine engine(ctx, plan, eo);
        for (int r = 0; r < repetitions; ++r) {
            const auto res = engine.run(config.initial_state, t.start, t.end, t.step);
            const auto& st = res.stats;
            walls.push_back(st.wall_time);
            for (std::size_t w = 0; w < nw; ++w) {
                const auto& ws = st.workers[w];
                busy[w].push_back(ws.busy_time);
                wait[w].push_back(ws.wait_time);
                const double denom = ws.wall_time > 0.0 ? ws.wall_time : 1.0;
                busy_frac[w].push_back(ws.busy_time / denom);
                wait_frac[w].push_back(ws.wait_time / denom);
                steps[w] = ws.steps;
                rendezvous[w] = ws.stage_rendezvous_count;
                pins[w] = ws.pin;
                accounting_ok = accounting_ok && ws.busy_time + ws.wait_time <= ws.wall_time + st.clock_resolution &&
                                ws.stage_rendezvous_count == 4 * ws.steps && ws.steps == st.workers[0].steps;
            }
            if (r == 0) warnings = st.warnings;
        }
        threads_created = engine.threads_created();

        nlohmann::json pr;
        pr["name"] = plan.name;
        pr["workers"] = nw;
        pr["wall_samples_s"] = walls;
        pr["median_wall_s"] = median(walls);
        pr["threads_created"] = threads_created;
        pr["accounting_ok"] = accounting_ok;
        pr["warnings"] = warnings;
        nlohmann::json wj = nlohmann::json::array();
        for (std::size_t w = 0; w < nw; ++w) {
            std::vector<std::size_t> comps;
            for (std::size_t i : plan.groups[w]) comps.push_back(i + 1);
            wj.push_back({{"worker", w},
                          {"components", comps},
                          {"median_busy_s", median(busy[w])},
                          {"median_wait_s", median(wait[w])},
                          {"median_busy_fraction", median(busy_frac[w])},
                          {"median_wait_fraction", median(wait_frac[w])},
                          {"steps", steps[w]},
                          {"stage_rendezvous_count", rendezvous[w]},
                          {"pin", pin_json(pins[w])}});
        }
        pr["per_worker"] = wj;
        plan_reports.push_back(pr);
    }
    report["plans"] = plan_reports;
    return report;
}

std::vector<double> parse_speed_list(std::string_view text) {
    std::vector<double> out;
    std::size_t pos = 0;
    auto trim = [](std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
        return s;
    };
    if (trim(text).empty()) return out;
    while (pos <= text.size()) {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        const std::string_view tok = trim(text.substr(pos, comma - pos));
        double v = 0.0;
        const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (tok.empty() || res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
            throw Error(ErrorCode::kConfig, "bad speed '" + std::string(tok) + "' in speed list");
        }
        out.push_back(v);
        pos = comma + 1;
    }
    return out;
}

}  // namespace railsim
