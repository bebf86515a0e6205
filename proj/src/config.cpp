#include "relaysim/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace relaysim {

using nlohmann::json;

std::string_view to_string(TopologyMode m)
{
    return m == TopologyMode::PerCampaign ? "campaign" : "packet";
}

std::string_view to_string(RelayDecoding m)
{
    return m == RelayDecoding::Lazy ? "lazy" : "eager";
}

std::string_view to_string(FailurePolicy m)
{
    return m == FailurePolicy::CountFull ? "count" : "restart";
}

namespace {

std::string strategies_token(const std::vector<Strategy>& list)
{
    std::string out;
    for (const auto s : list) {
        if (!out.empty())
            out += ',';
        out += to_string(s);
    }
    return out;
}

std::vector<Strategy> parse_strategies(std::string_view text)
{
    std::vector<Strategy> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto token = text.substr(start, comma == std::string_view::npos ? text.npos
                                                                               : comma - start);
        try {
            out.push_back(parse_strategy(token));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return out;
}

template <typename T>
T get_as(const json& j, const char* key)
{
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("config key '") + key + "' has the wrong type");
    }
}

std::size_t get_count(const json& j, const char* key)
{
    if (!j.is_number_integer() || j.get<long long>() < 0)
        throw ConfigError(std::string("config key '") + key + "' must be a non-negative integer");
    return j.get<std::size_t>();
}

std::uint64_t get_u64(const json& j, const char* key)
{
    if (j.is_number_unsigned() || (j.is_number_integer() && j.get<long long>() >= 0))
        return j.get<std::uint64_t>();
    if (j.is_string()) {
        try {
            std::size_t used = 0;
            const auto s = j.get<std::string>();
            const auto v = std::stoull(s, &used, 0);
            if (used == s.size())
                return v;
        } catch (const std::exception&) {
        }
    }
    throw ConfigError(std::string("config key '") + key + "' must be an unsigned 64-bit integer");
}

} // namespace

PathLossParams SimConfig::path_loss() const
{
    return PathLossParams::from_carrier_frequency(carrier_freq_hz, reference_distance_m,
                                                  path_loss_exponent, source_dest_distance_m);
}

NoiseParams SimConfig::noise() const
{
    const double n0 = db_to_linear(noise_db);
    return NoiseParams{n0, calibrate_tx_energy(avg_snr_db, source_dest_distance_m, path_loss(), n0)};
}

ContentionConfig SimConfig::contention() const
{
    ContentionConfig c;
    c.minislots = minislots;
    c.feedback_prob = feedback_prob;
    c.per_relay_prob = feedback_probs;
    c.gain_threshold = db_to_linear(gain_threshold_db);
    c.pool = winner_pool;
    return c;
}

void SimConfig::validate() const
{
    auto require = [](bool ok, const std::string& msg) {
        if (!ok)
            throw ConfigError(msg);
    };
    require(std::isfinite(carrier_freq_hz) && carrier_freq_hz > 0.0,
            "carrier_freq_hz must be positive");
    require(std::isfinite(reference_distance_m) && reference_distance_m > 0.0,
            "reference_distance_m must be positive");
    require(std::isfinite(path_loss_exponent) && path_loss_exponent >= 2.0,
            "path_loss_exponent must be >= 2");
    require(std::isfinite(source_dest_distance_m) && source_dest_distance_m > 0.0,
            "source_dest_distance_m must be positive");
    require(n_relays >= 1 && n_relays <= 10000, "n_relays must be in 1..10000");
    require(std::isfinite(noise_db), "noise_db must be finite");
    require(std::isfinite(avg_snr_db), "avg_snr_db must be finite");
    require(minislots >= 1 && minislots <= 100000, "minislots must be in 1..100000");
    require(feedback_prob >= 0.0 && feedback_prob <= 1.0, "feedback_prob must lie in [0, 1]");
    for (const double p : feedback_probs)
        require(p >= 0.0 && p <= 1.0, "feedback_probs entries must lie in [0, 1]");
    require(feedback_probs.empty() || feedback_probs.size() == n_relays,
            "feedback_probs must list one probability per relay");
    require(std::isfinite(gain_threshold_db), "gain_threshold_db must be finite");
    require(!strategies.empty(), "strategy must name at least one strategy");
    require(n_packets >= 1, "n_packets must be >= 1");
    require(max_attempts >= 1, "max_attempts must be >= 1");
    if (sweep) {
        require(std::find(std::begin(kSweepAxes), std::end(kSweepAxes), sweep->axis) !=
                    std::end(kSweepAxes),
                "unknown sweep axis '" + sweep->axis + "'");
        require(!sweep->values.empty(), "sweep needs at least one value");
        for (const double v : sweep->values) {
            SimConfig probe = *this;
            probe.sweep.reset();
            apply_axis(probe, sweep->axis, v);
            probe.validate();
        }
    }
    try {
        path_loss().validate();
        noise().validate();
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
}

json to_json(const SimConfig& cfg)
{
    json j;
    j["carrier_freq_hz"] = cfg.carrier_freq_hz;
    j["reference_distance_m"] = cfg.reference_distance_m;
    j["path_loss_exponent"] = cfg.path_loss_exponent;
    j["source_dest_distance_m"] = cfg.source_dest_distance_m;
    j["n_relays"] = cfg.n_relays;
    j["noise_db"] = cfg.noise_db;
    j["avg_snr_db"] = cfg.avg_snr_db;
    j["minislots"] = cfg.minislots;
    j["feedback_prob"] = cfg.feedback_prob;
    j["feedback_probs"] = cfg.feedback_probs;
    j["gain_threshold_db"] = cfg.gain_threshold_db;
    j["winner_pool"] = std::string(to_string(cfg.winner_pool));
    j["strategy"] = strategies_token(cfg.strategies);
    j["n_packets"] = cfg.n_packets;
    j["seed"] = cfg.seed;
    j["topology_mode"] = std::string(to_string(cfg.topology_mode));
    j["topology_file"] = cfg.topology_file;
    j["puncture_file"] = cfg.puncture_file;
    j["relay_combining"] = cfg.relay_combining;
    j["relay_decoding"] = std::string(to_string(cfg.relay_decoding));
    j["failure_policy"] = std::string(to_string(cfg.failure_policy));
    j["max_attempts"] = cfg.max_attempts;
    j["common_random_numbers"] = cfg.common_random_numbers;
    if (cfg.sweep)
        j["sweep"] = json{{"axis", cfg.sweep->axis}, {"values", cfg.sweep->values}};
    else
        j["sweep"] = nullptr;
    return j;
}

SimConfig config_from_json(const json& j, SimConfig cfg)
{
    if (!j.is_object())
        throw ConfigError("config must be a JSON object");
    for (const auto& [key, v] : j.items()) {
        const char* k = key.c_str();
        if (key == "carrier_freq_hz")
            cfg.carrier_freq_hz = get_as<double>(v, k);
        else if (key == "reference_distance_m")
            cfg.reference_distance_m = get_as<double>(v, k);
        else if (key == "path_loss_exponent")
            cfg.path_loss_exponent = get_as<double>(v, k);
        else if (key == "source_dest_distance_m")
            cfg.source_dest_distance_m = get_as<double>(v, k);
        else if (key == "n_relays")
            cfg.n_relays = get_count(v, k);
        else if (key == "noise_db")
            cfg.noise_db = get_as<double>(v, k);
        else if (key == "avg_snr_db")
            cfg.avg_snr_db = get_as<double>(v, k);
        else if (key == "minislots")
            cfg.minislots = get_count(v, k);
        else if (key == "feedback_prob")
            cfg.feedback_prob = get_as<double>(v, k);
        else if (key == "feedback_probs")
            cfg.feedback_probs = get_as<std::vector<double>>(v, k);
        else if (key == "gain_threshold_db")
            cfg.gain_threshold_db = get_as<double>(v, k);
        else if (key == "winner_pool") {
            try {
                cfg.winner_pool = parse_winner_pool(get_as<std::string>(v, k));
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
        } else if (key == "strategy")
            cfg.strategies = parse_strategies(get_as<std::string>(v, k));
        else if (key == "n_packets")
            cfg.n_packets = get_count(v, k);
        else if (key == "seed")
            cfg.seed = get_u64(v, k);
        else if (key == "topology_mode") {
            const auto s = get_as<std::string>(v, k);
            if (s == "campaign")
                cfg.topology_mode = TopologyMode::PerCampaign;
            else if (s == "packet")
                cfg.topology_mode = TopologyMode::PerPacket;
            else
                throw ConfigError("topology_mode must be 'campaign' or 'packet'");
        } else if (key == "topology_file")
            cfg.topology_file = get_as<std::string>(v, k);
        else if (key == "puncture_file")
            cfg.puncture_file = get_as<std::string>(v, k);
        else if (key == "relay_combining")
            cfg.relay_combining = get_as<bool>(v, k);
        else if (key == "relay_decoding") {
            const auto s = get_as<std::string>(v, k);
            if (s == "lazy")
                cfg.relay_decoding = RelayDecoding::Lazy;
            else if (s == "eager")
                cfg.relay_decoding = RelayDecoding::Eager;
            else
                throw ConfigError("relay_decoding must be 'lazy' or 'eager'");
        } else if (key == "failure_policy") {
            const auto s = get_as<std::string>(v, k);
            if (s == "count")
                cfg.failure_policy = FailurePolicy::CountFull;
            else if (s == "restart")
                cfg.failure_policy = FailurePolicy::Restart;
            else
                throw ConfigError("failure_policy must be 'count' or 'restart'");
        } else if (key == "max_attempts")
            cfg.max_attempts = get_count(v, k);
        else if (key == "common_random_numbers")
            cfg.common_random_numbers = get_as<bool>(v, k);
        else if (key == "sweep") {
            if (v.is_null()) {
                cfg.sweep.reset();
            } else {
                if (!v.is_object() || !v.contains("axis") || !v.contains("values") || v.size() != 2)
                    throw ConfigError("sweep must be {\"axis\": ..., \"values\": [...]}");
                cfg.sweep = SweepSpec{get_as<std::string>(v["axis"], "sweep.axis"),
                                      get_as<std::vector<double>>(v["values"], "sweep.values")};
            }
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    return cfg;
}

SimConfig load_config_file(const std::string& path, SimConfig base)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path + "': " + e.what());
    }
    return config_from_json(j, std::move(base));
}

void apply_override(SimConfig& cfg, std::string_view assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0)
        throw ConfigError("override '" + std::string(assignment) + "' is not KEY=VALUE");
    const std::string key(assignment.substr(0, eq));
    const std::string text(assignment.substr(eq + 1));
    json value;
    try {
        value = json::parse(text);
    } catch (const json::parse_error&) {
        value = text;
    }
    cfg = config_from_json(json{{key, value}}, cfg);
}

SweepSpec parse_sweep(std::string_view text)
{
    const auto eq = text.find('=');
    if (eq == std::string_view::npos || eq == 0)
        throw ConfigError("sweep must be AXIS=V1,V2,...");
    SweepSpec spec{std::string(text.substr(0, eq)), {}};
    std::stringstream ss{std::string(text.substr(eq + 1))};
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            spec.values.push_back(std::stod(item, &used));
            if (used != item.size())
                throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("sweep value '" + item + "' is not a number");
        }
    }
    if (spec.values.empty())
        throw ConfigError("sweep needs at least one value");
    if (std::find(std::begin(kSweepAxes), std::end(kSweepAxes), spec.axis) == std::end(kSweepAxes))
        throw ConfigError("unknown sweep axis '" + spec.axis + "'");
    return spec;
}

void apply_preset(SimConfig& cfg, std::string_view name)
{
    if (name == "fig3") {
        cfg.strategies = {Strategy::Opportunistic};
        cfg.minislots = 10;
        cfg.gain_threshold_db = -91.0;
        cfg.avg_snr_db = 2.0;
        SweepSpec s{"feedback_prob", {}};
        for (int i = 1; i <= 19; ++i)
            s.values.push_back(i / 20.0);
        cfg.sweep = s;
    } else if (name == "fig4") {
        cfg.strategies = {Strategy::Opportunistic};
        cfg.minislots = 10;
        cfg.feedback_prob = 0.1;
        cfg.avg_snr_db = 2.0;
        SweepSpec s{"gain_threshold_db", {}};
        for (int db = -103; db <= -79; db += 2)
            s.values.push_back(db);
        cfg.sweep = s;
    } else if (name == "fig5") {
        cfg.strategies = {Strategy::Opportunistic, Strategy::Harbinger, Strategy::PointToPoint};
        cfg.minislots = 10;
        cfg.feedback_prob = 0.3;
        cfg.gain_threshold_db = -91.0;
        cfg.sweep = SweepSpec{"avg_snr_db", {-2.0, 0.0, 2.0, 4.0, 6.0, 8.0}};
    } else {
        throw ConfigError("unknown preset '" + std::string(name) + "' (expected fig3, fig4 or fig5)");
    }
}

void apply_axis(SimConfig& cfg, std::string_view axis, double value)
{
    auto as_count = [&](const char* what) {
        if (!(value >= 1.0) || value != std::floor(value) || value > 1e9)
            throw ConfigError(std::string(what) + " sweep values must be positive integers");
        return static_cast<std::size_t>(value);
    };
    if (axis == "feedback_prob")
        cfg.feedback_prob = value;
    else if (axis == "gain_threshold_db")
        cfg.gain_threshold_db = value;
    else if (axis == "avg_snr_db")
        cfg.avg_snr_db = value;
    else if (axis == "minislots")
        cfg.minislots = as_count("minislots");
    else if (axis == "n_relays") {
        cfg.n_relays = as_count("n_relays");
        if (!cfg.feedback_probs.empty() && cfg.feedback_probs.size() != cfg.n_relays)
            throw ConfigError("n_relays sweep conflicts with per-relay feedback_probs");
    } else
        throw ConfigError("unknown sweep axis '" + std::string(axis) + "'");
}

std::string config_hash(const SimConfig& cfg)
{
    const std::string text = to_json(cfg).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace relaysim
