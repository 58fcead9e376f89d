#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "railsim/commands.hpp"
#include "railsim/config.hpp"
#include "railsim/csv.hpp"
#include "railsim/error.hpp"
#include "railsim/integrators.hpp"
#include "railsim/oracle.hpp"
#include "railsim/parallel_engine.hpp"
#include "railsim/track_forcing.hpp"
#include "railsim/validation.hpp"
#include "railsim/vehicle_model.hpp"

namespace py = pybind11;
using namespace railsim;

namespace {

StateVector to_state(const std::array<double, kStateSize>& v) {
    StateVector x;
    x.values = v;
    return x;
}

py::dict series_dict(const TimeSeries& s) {
    const auto n = static_cast<py::ssize_t>(s.size());
    py::array_t<double> t(n);
    py::array_t<double> states({n, static_cast<py::ssize_t>(kStateSize)});
    py::array_t<double> eta({n, static_cast<py::ssize_t>(kWheelCount)});
    auto tv = t.mutable_unchecked<1>();
    auto sv = states.mutable_unchecked<2>();
    auto ev = eta.mutable_unchecked<2>();
    for (py::ssize_t r = 0; r < n; ++r) {
        tv(r) = s.times[r];
        for (std::size_t i = 0; i < kStateSize; ++i) sv(r, i) = s.states[r][i];
        for (std::size_t j = 0; j < kWheelCount; ++j) ev(r, j) = s.forcings[r].eta[j];
    }
    py::dict d;
    d["t"] = t;
    d["states"] = states;
    d["eta"] = eta;
    return d;
}

py::dict stats_dict(const ParallelStats& st) {
    py::list workers;
    for (const auto& w : st.workers) {
        py::dict d;
        d["worker"] = w.worker;
        d["components"] = w.components;
        d["busy_time"] = w.busy_time;
        d["wait_time"] = w.wait_time;
        d["wall_time"] = w.wall_time;
        d["steps"] = w.steps;
        d["stage_rendezvous_count"] = w.stage_rendezvous_count;
        d["pin_granted"] = w.pin.pin_granted;
        d["pin_message"] = w.pin.message;
        workers.append(d);
    }
    py::dict d;
    d["workers"] = workers;
    d["wall_time"] = st.wall_time;
    d["clock_source"] = st.clock_source;
    d["clock_resolution"] = st.clock_resolution;
    d["threads_created"] = st.threads_created;
    d["cache_line"] = st.layout.line_size;
    d["slot_stride"] = st.layout.stride;
    d["distinct_lines"] = st.layout.distinct_lines;
    d["warnings"] = st.warnings;
    return d;
}

py::dict simulate(const std::string& config_json, const std::string& engine) {
    const SimConfig c = parse_config(config_json);
    const EngineKind kind = parse_engine_kind(engine);
    TimeSeries series;
    std::optional<ParallelStats> stats;
    {
        py::gil_scoped_release release;
        if (kind == EngineKind::kSequential) {
            series = integrate_fixed(c.initial_state, c.time.start, c.time.end, c.time.step, c.context(),
                                     c.output.stride);
        } else {
            EngineOptions opts;
            opts.sample_stride = c.output.stride;
            auto r = run_parallel(c.initial_state, c.time.start, c.time.end, c.time.step, c.parallel.make_plan(),
                                  c.context(), opts);
            series = std::move(r.series);
            stats = std::move(r.stats);
        }
    }
    py::dict d = series_dict(series);
    d["stats"] = stats ? py::object(stats_dict(*stats)) : py::none();
    return d;
}

py::dict simulate_adaptive(const std::string& config_json) {
    const SimConfig c = parse_config(config_json);
    AdaptiveResult r;
    {
        py::gil_scoped_release release;
        r = integrate_adaptive(c.initial_state, c.time.start, c.time.end, c.adaptive, c.context());
    }
    py::dict d = series_dict(r.series);
    d["accepted_steps"] = r.accepted_steps;
    d["rejected_steps"] = r.rejected_steps;
    return d;
}

py::list sweep(const std::string& config_json, const std::vector<double>& speeds) {
    const SimConfig c = parse_config(config_json);
    std::vector<SweepRow> rows;
    {
        py::gil_scoped_release release;
        for (double v : speeds) rows.push_back(sweep_speed(c, v));
    }
    py::list out;
    for (const auto& r : rows) {
        py::dict d;
        d["speed_kmh"] = r.speed_kmh;
        d["speed_mps"] = r.speed_mps;
        d["omega"] = r.omega;
        d["max_par_seq_diff"] = r.max_par_seq_diff;
        d["tail_amplitude"] = r.tail_amplitude;
        d["oracle_rel_err"] = r.oracle_rel_err;
        d["status"] = r.status;
        out.append(d);
    }
    return out;
}

py::list validate(const std::string& config_json, const std::string& scratch) {
    const SimConfig c = parse_config(config_json);
    std::vector<CriterionResult> results;
    {
        py::gil_scoped_release release;
        results = run_acceptance_suite(c, scratch);
    }
    py::list out;
    for (const auto& r : results) {
        py::dict d;
        d["id"] = r.id;
        d["name"] = r.name;
        d["passed"] = r.passed;
        d["detail"] = r.detail;
        d["seconds"] = r.seconds;
        out.append(d);
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Railway vehicle vertical dynamics simulator";

    py::register_exception<Error>(m, "RailsimError", PyExc_ValueError);

    m.attr("STATE_SIZE") = kStateSize;
    m.attr("CSV_HEADER") = std::string(kTimeSeriesHeader);
    m.attr("SWEEP_HEADER") = std::string(kSweepHeader);

    py::class_<VehicleParams>(m, "VehicleParams")
        .def(py::init<>())
        .def_readwrite("wagon_mass", &VehicleParams::wagon_mass)
        .def_readwrite("wagon_inertia", &VehicleParams::wagon_inertia)
        .def_readwrite("bogie_mass", &VehicleParams::bogie_mass)
        .def_readwrite("wagon_half_base", &VehicleParams::wagon_half_base)
        .def_readwrite("bogie_half_base", &VehicleParams::bogie_half_base)
        .def_readwrite("primary_stiffness", &VehicleParams::primary_stiffness)
        .def_readwrite("primary_damping", &VehicleParams::primary_damping)
        .def_readwrite("secondary_stiffness", &VehicleParams::secondary_stiffness)
        .def_readwrite("secondary_damping", &VehicleParams::secondary_damping)
        .def_readwrite("literal_damper_aliases", &VehicleParams::literal_damper_aliases)
        .def("validate", &VehicleParams::validate);

    py::class_<TrackProfile>(m, "TrackProfile")
        .def(py::init<>())
        .def_readwrite("amp1", &TrackProfile::amp1)
        .def_readwrite("amp2", &TrackProfile::amp2)
        .def_readwrite("wavelength", &TrackProfile::wavelength)
        .def_readwrite("speed", &TrackProfile::speed)
        .def("validate", &TrackProfile::validate);

    m.def(
        "derivative",
        [](const std::array<double, kStateSize>& x, const std::array<double, kWheelCount>& eta,
           const std::array<double, kWheelCount>& eta_rate, const VehicleParams& params) {
            ForcingSample u;
            u.eta = eta;
            u.eta_rate = eta_rate;
            return derivative(to_state(x), u, params).values;
        },
        py::arg("x"), py::arg("eta"), py::arg("eta_rate"), py::arg("params") = VehicleParams{});
    m.def(
        "wheel_forcing",
        [](double t, const TrackProfile& profile, const VehicleParams& params) {
            const ForcingSample u = wheel_forcing(t, profile, wheel_delays(params, profile));
            return py::make_tuple(u.eta, u.eta_rate);
        },
        py::arg("t"), py::arg("profile") = TrackProfile{}, py::arg("params") = VehicleParams{});
    m.def("excitation_frequency", &excitation_frequency, py::arg("profile") = TrackProfile{});
    m.def(
        "mechanical_energy",
        [](const std::array<double, kStateSize>& x, const VehicleParams& params) {
            return mechanical_energy(to_state(x), ForcingSample{}, params);
        },
        py::arg("x"), py::arg("params") = VehicleParams{});
    m.def(
        "steady_state_amplitudes",
        [](const VehicleParams& params, const TrackProfile& profile) {
            const SteadyStateResponse r = steady_state_response(params, profile);
            py::array_t<double> a({static_cast<py::ssize_t>(kStateSize),
                                   static_cast<py::ssize_t>(r.frequencies.size())});
            auto v = a.mutable_unchecked<2>();
            for (std::size_t i = 0; i < kStateSize; ++i) {
                for (std::size_t k = 0; k < r.frequencies.size(); ++k) v(i, k) = r.amplitude(i, k);
            }
            return py::make_tuple(r.frequencies, a);
        },
        py::arg("params") = VehicleParams{}, py::arg("profile") = TrackProfile{});

    m.def("normalize_config", [](const std::string& text) { return serialize_config(parse_config(text)); });
    m.def("simulate", &simulate, py::arg("config_json"), py::arg("engine") = "seq");
    m.def("simulate_adaptive", &simulate_adaptive, py::arg("config_json"));
    m.def("sweep", &sweep, py::arg("config_json"), py::arg("speeds_kmh"));
    m.def(
        "bench",
        [](const std::string& config_json, int reps) {
            const SimConfig c = parse_config(config_json);
            nlohmann::json report;
            {
                py::gil_scoped_release release;
                report = cmd_bench(c, reps);
            }
            return report.dump();
        },
        py::arg("config_json"), py::arg("reps"));
    m.def("validate", &validate, py::arg("config_json"), py::arg("scratch_dir"));
}
