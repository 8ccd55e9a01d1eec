#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>

#include "config_json.hpp"

namespace cvqkd {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void config_error(const std::string& path, const std::string& what) {
    fail(ErrorKind::config, path + ": " + what);
}

// Reads the keys of one JSON object and rejects anything it was not asked
// about once finish() runs.
class Section {
public:
    Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) config_error(path_, "expected an object");
    }

    bool has(const char* key) const { return node_.contains(key); }

    const json* child(const char* key) {
        seen_.insert(key);
        auto it = node_.find(key);
        return it == node_.end() ? nullptr : &*it;
    }

    void read(const char* key, double& out) {
        if (const auto* v = child(key)) {
            if (!v->is_number()) config_error(field(key), "expected a number");
            out = v->get<double>();
            if (!std::isfinite(out)) config_error(field(key), "must be finite");
        }
    }

    void read(const char* key, std::uint64_t& out) {
        if (const auto* v = child(key)) {
            const bool ok = v->is_number_unsigned() || (v->is_number_integer() && v->get<long long>() >= 0);
            if (!ok) config_error(field(key), "expected a non-negative integer");
            out = v->get<std::uint64_t>();
        }
    }

    void read(const char* key, unsigned& out) {
        std::uint64_t tmp = out;
        read(key, tmp);
        out = static_cast<unsigned>(tmp);
    }

    void read(const char* key, std::string& out) {
        if (const auto* v = child(key)) {
            if (!v->is_string()) config_error(field(key), "expected a string");
            out = v->get<std::string>();
        }
    }

    std::string field(const char* key) const { return path_ + "." + key; }

    void finish() const {
        for (const auto& [key, _] : node_.items())
            if (!seen_.count(key)) config_error(path_, "unknown key '" + key + "'");
    }

private:
    const json& node_;
    std::string path_;
    std::set<std::string> seen_;
};

template <typename E>
E parse_enum(const std::string& path, const std::string& text, std::initializer_list<std::pair<const char*, E>> map) {
    for (const auto& [name, value] : map)
        if (text == name) return value;
    std::string allowed;
    for (const auto& [name, _] : map) allowed += (allowed.empty() ? "" : "|") + std::string(name);
    config_error(path, "invalid value '" + text + "' (expected " + allowed + ")");
}

RunMode parse_mode(const std::string& path, const std::string& s) {
    return parse_enum<RunMode>(path, s,
                               {{"simulate", RunMode::simulate},
                                {"keyrate_only", RunMode::keyrate_only},
                                {"calibrate", RunMode::calibrate}});
}

Fidelity parse_fidelity(const std::string& path, const std::string& s) {
    return parse_enum<Fidelity>(path, s, {{"symbol", Fidelity::symbol}, {"waveform", Fidelity::waveform}});
}

ReceiverTrust parse_trust(const std::string& path, const std::string& s) {
    return parse_enum<ReceiverTrust>(path, s,
                                     {{"trusted", ReceiverTrust::trusted}, {"untrusted", ReceiverTrust::untrusted}});
}

CoreChannelParams parse_core(const json& node, const std::string& path) {
    Section s(node, path);
    CoreChannelParams core;
    std::uint64_t id = 0;
    if (!s.has("core_id")) config_error(path, "missing core_id");
    s.read("core_id", id);
    core.core_id = static_cast<int>(id);

    if (s.has("transmittance") && s.has("loss_db"))
        config_error(path, "give either transmittance or loss_db, not both");
    if (s.has("loss_db")) {
        double loss = 0.0;
        s.read("loss_db", loss);
        if (loss < 0.0) config_error(s.field("loss_db"), "must be >= 0");
        core.transmittance = std::pow(10.0, -loss / 10.0);
    } else {
        s.read("transmittance", core.transmittance);
    }
    s.read("excess_noise_snu", core.excess_noise_at_bob);
    s.read("linewidth_hz", core.linewidth_hz);
    s.read("freq_offset_hz", core.freq_offset_hz);
    if (const auto* xt = s.child("crosstalk_db")) {
        if (!xt->is_object()) config_error(s.field("crosstalk_db"), "expected an object of core_id -> dB");
        for (const auto& [key, value] : xt->items()) {
            const std::string where = s.field("crosstalk_db") + "." + key;
            int source = 0;
            try {
                std::size_t used = 0;
                source = std::stoi(key, &used);
                if (used != key.size()) throw std::invalid_argument(key);
            } catch (const std::exception&) {
                config_error(where, "key must be a core id");
            }
            if (source < 1 || source > kMcfCores) config_error(where, "core id out of range");
            if (value.is_null()) continue;
            if (!value.is_number()) config_error(where, "expected a number (dB) or null");
            core.crosstalk_db[source - 1] = value.get<double>();
        }
    }
    s.finish();
    return core;
}

}  // namespace

std::string_view to_string(RunMode mode) noexcept {
    switch (mode) {
    case RunMode::simulate: return "simulate";
    case RunMode::keyrate_only: return "keyrate_only";
    case RunMode::calibrate: return "calibrate";
    }
    return "simulate";
}

std::string_view to_string(Fidelity fidelity) noexcept {
    return fidelity == Fidelity::waveform ? "waveform" : "symbol";
}

namespace detail {

ScenarioConfig config_from_json(const json& root, RunMode default_mode) {
    ScenarioConfig cfg;
    cfg.mode = default_mode;
    Section top(root, "config");

    std::string text;
    if (top.has("mode")) {
        top.read("mode", text);
        cfg.mode = parse_mode(top.field("mode"), text);
    }
    top.read("seed", cfg.seed);
    top.read("block_size", cfg.block_size);
    top.read("n_blocks", cfg.n_blocks);
    if (top.has("fidelity")) {
        top.read("fidelity", text);
        cfg.fidelity = parse_fidelity(top.field("fidelity"), text);
    }
    top.read("output_dir", cfg.output_dir);
    top.read("workers", cfg.workers);

    if (const auto* sys = top.child("system")) {
        Section s(*sys, "config.system");
        s.read("v_mod", cfg.system.v_mod);
        s.read("eta", cfg.system.eta);
        s.read("v_elec", cfg.system.v_elec);
        s.read("beta", cfg.system.beta);
        s.read("rho", cfg.system.rho);
        s.read("pulse_rate_hz", cfg.system.pulse_rate);
        s.finish();
    }

    if (const auto* rx = top.child("receiver")) {
        Section s(*rx, "config.receiver");
        s.read("raw_gain", cfg.receiver.raw_gain);
        s.read("calibration_samples", cfg.receiver.calibration_samples);
        if (s.has("trust")) {
            s.read("trust", text);
            cfg.receiver.trust = parse_trust(s.field("trust"), text);
        }
        s.finish();
    }

    if (const auto* sim = top.child("simulation")) {
        Section s(*sim, "config.simulation");
        auto& o = cfg.simulation;
        s.read("max_sync_delay", o.max_sync_delay);
        s.read("repeat_period", o.repeat_period);
        s.read("phase_smoothing", o.phase_smoothing);
        s.read("reference_phase_rad", o.reference_phase);
        s.read("figure_points", o.figure_points);
        s.read("histogram_bins", o.histogram_bins);
        if (const auto* wf = s.child("waveform")) {
            Section w(*wf, "config.simulation.waveform");
            w.read("period_samples", o.waveform.period_samples);
            w.read("pulse_samples", o.waveform.pulse_samples);
            w.read("pulse_offset", o.waveform.pulse_offset);
            w.read("sample_noise_var", o.waveform_sample_noise_var);
            w.finish();
        }
        s.finish();
    }

    const auto* cores = top.child("cores");
    if (!cores || !cores->is_array()) config_error("config.cores", "expected an array of core entries");
    for (std::size_t i = 0; i < cores->size(); ++i)
        cfg.cores.push_back(parse_core((*cores)[i], "config.cores[" + std::to_string(i) + "]"));

    top.finish();
    cfg.validate();
    return cfg;
}

ordered_json config_to_json(const ScenarioConfig& cfg) {
    ordered_json j;
    j["mode"] = std::string(to_string(cfg.mode));
    j["seed"] = cfg.seed;
    j["block_size"] = cfg.block_size;
    j["n_blocks"] = cfg.n_blocks;
    j["fidelity"] = std::string(to_string(cfg.fidelity));
    j["output_dir"] = cfg.output_dir;
    j["workers"] = cfg.workers;
    j["system"] = {{"v_mod", cfg.system.v_mod},   {"eta", cfg.system.eta},   {"v_elec", cfg.system.v_elec},
                   {"beta", cfg.system.beta},     {"rho", cfg.system.rho},   {"pulse_rate_hz", cfg.system.pulse_rate}};
    j["receiver"] = {{"raw_gain", cfg.receiver.raw_gain},
                     {"calibration_samples", cfg.receiver.calibration_samples},
                     {"trust", cfg.receiver.trust == ReceiverTrust::trusted ? "trusted" : "untrusted"}};
    const auto& o = cfg.simulation;
    j["simulation"] = {{"max_sync_delay", o.max_sync_delay},
                       {"repeat_period", o.repeat_period},
                       {"phase_smoothing", o.phase_smoothing},
                       {"reference_phase_rad", o.reference_phase},
                       {"figure_points", o.figure_points},
                       {"histogram_bins", o.histogram_bins},
                       {"waveform",
                        {{"period_samples", o.waveform.period_samples},
                         {"pulse_samples", o.waveform.pulse_samples},
                         {"pulse_offset", o.waveform.pulse_offset},
                         {"sample_noise_var", o.waveform_sample_noise_var}}}};
    ordered_json cores = ordered_json::array();
    for (const auto& c : cfg.cores) {
        ordered_json xt = ordered_json::object();
        for (int s = 0; s < kMcfCores; ++s)
            if (!std::isinf(c.crosstalk_db[s])) xt[std::to_string(s + 1)] = c.crosstalk_db[s];
        cores.push_back({{"core_id", c.core_id},
                         {"transmittance", c.transmittance},
                         {"excess_noise_snu", c.excess_noise_at_bob},
                         {"linewidth_hz", c.linewidth_hz},
                         {"freq_offset_hz", c.freq_offset_hz},
                         {"crosstalk_db", xt}});
    }
    j["cores"] = cores;
    return j;
}

}  // namespace detail

void ScenarioConfig::validate() const {
    try {
        system.validate();
    } catch (const Error& e) {
        fail(ErrorKind::config, std::string("config.system: ") + e.what());
    }
    if (block_size < 10'000) fail(ErrorKind::config, "config.block_size: must be >= 10000");
    if (cores.empty() || cores.size() > static_cast<std::size_t>(kMcfCores))
        fail(ErrorKind::config, "config.cores: need between 1 and 7 cores");

    std::set<int> ids;
    for (std::size_t i = 0; i < cores.size(); ++i) {
        const std::string where = "config.cores[" + std::to_string(i) + "]";
        try {
            cores[i].validate();
        } catch (const Error& e) {
            fail(ErrorKind::config, where + ": " + e.what());
        }
        if (!ids.insert(cores[i].core_id).second)
            fail(ErrorKind::config, where + ".core_id: duplicate core id " + std::to_string(cores[i].core_id));
        if (mode == RunMode::keyrate_only && !(cores[i].transmittance > 0.0))
            fail(ErrorKind::config, where + ".transmittance: must be > 0 for key-rate evaluation");
    }
    for (const auto& c : cores) {
        for (int s = 0; s < kMcfCores; ++s) {
            const double v = c.crosstalk_db[s];
            if (std::isinf(v)) continue;
            const std::string where = "config.cores[core " + std::to_string(c.core_id) + "].crosstalk_db." +
                                      std::to_string(s + 1);
            if (s + 1 == c.core_id) fail(ErrorKind::config, where + ": a core cannot couple into itself");
            if (!ids.count(s + 1)) fail(ErrorKind::config, where + ": source core is not part of this scenario");
            const auto& other = *std::find_if(cores.begin(), cores.end(), [&](const auto& o) { return o.core_id == s + 1; });
            if (other.crosstalk_db[c.core_id - 1] != v)
                fail(ErrorKind::config, where + ": coupling must be symmetric");
        }
    }

    if (receiver.calibration_samples < 2) fail(ErrorKind::config, "config.receiver.calibration_samples: must be >= 2");
    if (!(receiver.raw_gain > 0.0)) fail(ErrorKind::config, "config.receiver.raw_gain: must be > 0");
    const auto& w = simulation.waveform;
    if (w.period_samples < 2 || w.pulse_samples == 0 || w.pulse_offset + w.pulse_samples > w.period_samples)
        fail(ErrorKind::config, "config.simulation.waveform: pulse does not fit in its period");
    if (simulation.waveform_sample_noise_var < 0.0)
        fail(ErrorKind::config, "config.simulation.waveform.sample_noise_var: must be >= 0");
    if (simulation.phase_smoothing == 0) fail(ErrorKind::config, "config.simulation.phase_smoothing: must be >= 1");
    if (simulation.histogram_bins == 0) fail(ErrorKind::config, "config.simulation.histogram_bins: must be >= 1");
}

CrosstalkMatrix ScenarioConfig::crosstalk() const {
    CrosstalkMatrix xt(cores.size());
    for (std::size_t v = 0; v < cores.size(); ++v)
        for (std::size_t s = 0; s < cores.size(); ++s)
            if (v != s) xt.set_db(v, s, cores[v].crosstalk_db[cores[s].core_id - 1]);
    return xt;
}

ScenarioConfig parse_scenario_config(std::string_view json_text, RunMode default_mode) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        fail(ErrorKind::config, std::string("config: malformed JSON: ") + e.what());
    }
    return detail::config_from_json(root, default_mode);
}

ScenarioConfig load_scenario_config(const std::filesystem::path& path, RunMode default_mode) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::config, "config: cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_config(buf.str(), default_mode);
}

std::string scenario_config_to_json(const ScenarioConfig& config) {
    return detail::config_to_json(config).dump(2) + "\n";
}

}  // namespace cvqkd
