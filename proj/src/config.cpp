#include "railsim/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "railsim/error.hpp"

namespace railsim {

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& path, const std::string& what) {
    throw Error(ErrorCode::kConfig, "config: " + path + ": " + what);
}

std::string join(const std::string& prefix, const std::string& key) {
    return prefix.empty() ? key : prefix + "." + key;
}

const json& require_object(const json& j, const std::string& path) {
    if (!j.is_object()) config_error(path.empty() ? "<root>" : path, "expected a JSON object");
    return j;
}

void reject_unknown(const json& j, const std::string& path, std::initializer_list<const char*> known) {
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) config_error(join(path, key), "unknown key");
    }
}

void read(const json& j, const std::string& path, const char* key, double& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (!v.is_number()) config_error(join(path, key), "expected a number");
    out = v.get<double>();
}

void read(const json& j, const std::string& path, const char* key, bool& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (!v.is_boolean()) config_error(join(path, key), "expected true or false");
    out = v.get<bool>();
}

void read(const json& j, const std::string& path, const char* key, std::string& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (!v.is_string()) config_error(join(path, key), "expected a string");
    out = v.get<std::string>();
}

template <class Int>
void read_int(const json& j, const std::string& path, const char* key, Int& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (!v.is_number_integer()) config_error(join(path, key), "expected an integer");
    const auto value = v.get<long long>();
    if (value < 0) config_error(join(path, key), "must be >= 0");
    out = static_cast<Int>(value);
}

void parse_vehicle(const json& j, VehicleParams& p) {
    const std::string path = "vehicle";
    require_object(j, path);
    reject_unknown(j, path,
                   {"wagon_mass", "wagon_inertia", "bogie_mass", "wagon_half_base", "bogie_half_base",
                    "primary_stiffness", "primary_damping", "secondary_stiffness", "secondary_damping",
                    "literal_damper_aliases"});
    read(j, path, "wagon_mass", p.wagon_mass);
    read(j, path, "wagon_inertia", p.wagon_inertia);
    read(j, path, "bogie_mass", p.bogie_mass);
    read(j, path, "wagon_half_base", p.wagon_half_base);
    read(j, path, "bogie_half_base", p.bogie_half_base);
    read(j, path, "primary_stiffness", p.primary_stiffness);
    read(j, path, "primary_damping", p.primary_damping);
    read(j, path, "secondary_stiffness", p.secondary_stiffness);
    read(j, path, "secondary_damping", p.secondary_damping);
    read(j, path, "literal_damper_aliases", p.literal_damper_aliases);
}

void parse_track(const json& j, TrackProfile& t) {
    const std::string path = "track";
    require_object(j, path);
    reject_unknown(j, path, {"amp1", "amp2", "wavelength", "speed"});
    read(j, path, "amp1", t.amp1);
    read(j, path, "amp2", t.amp2);
    read(j, path, "wavelength", t.wavelength);
    read(j, path, "speed", t.speed);
}

void parse_time(const json& j, TimeConfig& t) {
    const std::string path = "time";
    require_object(j, path);
    reject_unknown(j, path, {"start", "end", "step"});
    read(j, path, "start", t.start);
    read(j, path, "end", t.end);
    read(j, path, "step", t.step);
}

void parse_adaptive(const json& j, StepControl& c) {
    const std::string path = "adaptive";
    require_object(j, path);
    reject_unknown(j, path, {"abs_tol", "rel_tol", "h_init", "h_min", "h_max", "safety", "shrink", "growth"});
    read(j, path, "abs_tol", c.abs_tol);
    read(j, path, "rel_tol", c.rel_tol);
    read(j, path, "h_init", c.h_init);
    read(j, path, "h_min", c.h_min);
    read(j, path, "h_max", c.h_max);
    read(j, path, "safety", c.safety);
    read(j, path, "shrink", c.shrink);
    read(j, path, "growth", c.growth);
}

void parse_parallel(const json& j, PlanConfig& p) {
    const std::string path = "parallel";
    require_object(j, path);
    reject_unknown(j, path, {"plan", "workers", "pin", "cores", "elevate_priority"});
    read(j, path, "plan", p.name);
    read_int(j, path, "workers", p.workers);
    read(j, path, "pin", p.pin);
    read(j, path, "elevate_priority", p.elevate_priority);
    if (j.contains("cores")) {
        const json& cores = j.at("cores");
        if (!cores.is_array()) config_error("parallel.cores", "expected an array of integers");
        p.cores.clear();
        for (std::size_t i = 0; i < cores.size(); ++i) {
            if (!cores[i].is_number_integer()) {
                config_error("parallel.cores[" + std::to_string(i) + "]", "expected an integer");
            }
            p.cores.push_back(cores[i].get<int>());
        }
    }
}

void parse_output(const json& j, OutputConfig& o) {
    const std::string path = "output";
    require_object(j, path);
    reject_unknown(j, path, {"stride", "csv", "sweep_csv", "plot"});
    read_int(j, path, "stride", o.stride);
    read(j, path, "csv", o.csv);
    read(j, path, "sweep_csv", o.sweep_csv);
    std::string plot(to_string(o.plot));
    read(j, path, "plot", plot);
    try {
        o.plot = parse_plot_kind(plot);
    } catch (const Error& e) {
        config_error("output.plot", e.what());
    }
}

void parse_validation(const json& j, ValidationConfig& v) {
    const std::string path = "validation";
    require_object(j, path);
    reject_unknown(j, path, {"settle", "window"});
    read(j, path, "settle", v.settle);
    read(j, path, "window", v.window);
}

}  // namespace

PlotKind parse_plot_kind(std::string_view text) {
    if (text == "none") return PlotKind::kNone;
    if (text == "timeseries") return PlotKind::kTimeSeries;
    if (text == "phase") return PlotKind::kPhase;
    throw Error(ErrorCode::kConfig, "unknown plot kind '" + std::string(text) + "' (none|timeseries|phase)");
}

std::string_view to_string(PlotKind kind) {
    switch (kind) {
        case PlotKind::kTimeSeries: return "timeseries";
        case PlotKind::kPhase: return "phase";
        case PlotKind::kNone: break;
    }
    return "none";
}

WorkerPlan PlanConfig::make_plan() const {
    WorkerPlan plan = named_plan(name, workers);
    if (pin) {
        if (cores.empty()) {
            for (int w = 0; w < workers; ++w) plan.core_assignment.push_back(w);
        } else {
            plan.core_assignment = cores;
        }
    }
    plan.priority = elevate_priority ? PriorityHint::kElevated : PriorityHint::kNormal;
    plan.validate();
    return plan;
}

void SimConfig::validate() const {
    auto rewrap = [](auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            throw Error(ErrorCode::kConfig, std::string("config: ") + e.what());
        }
    };
    rewrap([&] { vehicle.validate(); });
    rewrap([&] { track.validate(); });
    if (!(time.end > time.start)) config_error("time.end", "must be greater than time.start");
    if (!(time.step > 0.0)) config_error("time.step", "must be > 0");
    if (!initial_state.all_finite()) config_error("initial_state", "all components must be finite");
    rewrap([&] { adaptive.validate(); });
    if (parallel.name != "bodywise" && parallel.name != "interleaved") {
        config_error("parallel.plan", "unknown plan '" + parallel.name + "' (bodywise|interleaved)");
    }
    try {
        (void)parallel.make_plan();
    } catch (const Error& e) {
        config_error("parallel", e.what());
    }
    if (output.stride == 0) config_error("output.stride", "must be >= 1");
    if (!(validation.settle >= 0.0)) config_error("validation.settle", "must be >= 0");
    if (!(validation.window > 0.0)) config_error("validation.window", "must be > 0");
}

SimConfig parse_config(std::string_view json_text) {
    json root;
    try {
        root = json::parse(json_text.begin(), json_text.end());
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::kConfig, std::string("config: malformed JSON: ") + e.what());
    }
    require_object(root, "");
    reject_unknown(root, "",
                   {"vehicle", "track", "time", "initial_state", "forcing_enabled", "adaptive", "parallel",
                    "output", "validation"});

    SimConfig c;
    if (root.contains("vehicle")) parse_vehicle(root["vehicle"], c.vehicle);
    if (root.contains("track")) parse_track(root["track"], c.track);
    if (root.contains("time")) parse_time(root["time"], c.time);
    if (root.contains("initial_state")) {
        const json& s = root["initial_state"];
        if (!s.is_array() || s.size() != kStateSize) config_error("initial_state", "expected an array of 8 numbers");
        for (std::size_t i = 0; i < kStateSize; ++i) {
            if (!s[i].is_number()) config_error("initial_state[" + std::to_string(i) + "]", "expected a number");
            c.initial_state[i] = s[i].get<double>();
        }
    }
    read(root, "", "forcing_enabled", c.forcing_enabled);
    if (root.contains("adaptive")) parse_adaptive(root["adaptive"], c.adaptive);
    if (root.contains("parallel")) parse_parallel(root["parallel"], c.parallel);
    if (root.contains("output")) parse_output(root["output"], c.output);
    if (root.contains("validation")) parse_validation(root["validation"], c.validation);
    c.validate();
    return c;
}

SimConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::kIo, "cannot read config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const SimConfig& c) {
    json j;
    const auto& v = c.vehicle;
    j["vehicle"] = {{"wagon_mass", v.wagon_mass},
                    {"wagon_inertia", v.wagon_inertia},
                    {"bogie_mass", v.bogie_mass},
                    {"wagon_half_base", v.wagon_half_base},
                    {"bogie_half_base", v.bogie_half_base},
                    {"primary_stiffness", v.primary_stiffness},
                    {"primary_damping", v.primary_damping},
                    {"secondary_stiffness", v.secondary_stiffness},
                    {"secondary_damping", v.secondary_damping},
                    {"literal_damper_aliases", v.literal_damper_aliases}};
    j["track"] = {{"amp1", c.track.amp1},
                  {"amp2", c.track.amp2},
                  {"wavelength", c.track.wavelength},
                  {"speed", c.track.speed}};
    j["time"] = {{"start", c.time.start}, {"end", c.time.end}, {"step", c.time.step}};
    j["initial_state"] = c.initial_state.values;
    j["forcing_enabled"] = c.forcing_enabled;
    const auto& a = c.adaptive;
    j["adaptive"] = {{"abs_tol", a.abs_tol}, {"rel_tol", a.rel_tol}, {"h_init", a.h_init},
                     {"h_min", a.h_min},     {"h_max", a.h_max},     {"safety", a.safety},
                     {"shrink", a.shrink},   {"growth", a.growth}};
    j["parallel"] = {{"plan", c.parallel.name},
                     {"workers", c.parallel.workers},
                     {"pin", c.parallel.pin},
                     {"cores", c.parallel.cores},
                     {"elevate_priority", c.parallel.elevate_priority}};
    j["output"] = {{"stride", c.output.stride},
                   {"csv", c.output.csv},
                   {"sweep_csv", c.output.sweep_csv},
                   {"plot", std::string(to_string(c.output.plot))}};
    j["validation"] = {{"settle", c.validation.settle}, {"window", c.validation.window}};
    return j.dump(2);
}

}  // namespace railsim
