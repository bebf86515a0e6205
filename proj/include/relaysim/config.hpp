#ifndef RELAYSIM_CONFIG_HPP_
#define RELAYSIM_CONFIG_HPP_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "relaysim/phy.hpp"
#include "relaysim/protocol.hpp"
#include "relaysim/topology.hpp"

namespace relaysim {

/// Invalid or inconsistent configuration. Raised before any simulation runs.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class TopologyMode { PerCampaign, PerPacket };
enum class RelayDecoding { Lazy, Eager };
enum class FailurePolicy { CountFull, Restart };

/// Sweep axes accepted by sweep().
inline constexpr std::string_view kSweepAxes[] = {"feedback_prob", "gain_threshold_db",
                                                  "avg_snr_db", "minislots", "n_relays"};

struct SweepSpec {
    std::string axis;
    std::vector<double> values;
};

/// Complete simulation configuration. Defaults reproduce the reference
/// two-hop setup: 2.4 GHz carrier, d0 = 1 m, 100 m source-destination
/// distance, path-loss exponent 3, 20 relays, N0 = -134 dB, 2 dB average SNR
/// at the destination, K = 10 minislots, p = 0.3, threshold -91 dB.
struct SimConfig {
    double carrier_freq_hz = 2.4e9;
    double reference_distance_m = 1.0;
    double path_loss_exponent = 3.0;
    double source_dest_distance_m = 100.0;
    std::size_t n_relays = 20;

    double noise_db = -134.0;
    double avg_snr_db = 2.0;

    std::size_t minislots = 10;
    double feedback_prob = 0.3;
    std::vector<double> feedback_probs;
    double gain_threshold_db = -91.0;
    WinnerPool winner_pool = WinnerPool::DistinctRelays;

    std::vector<Strategy> strategies{Strategy::Opportunistic};
    std::size_t n_packets = 2000;
    std::uint64_t seed = 20070101;
    TopologyMode topology_mode = TopologyMode::PerCampaign;
    std::string topology_file;
    std::string puncture_file;
    bool relay_combining = true;
    RelayDecoding relay_decoding = RelayDecoding::Lazy;
    FailurePolicy failure_policy = FailurePolicy::CountFull;
    std::size_t max_attempts = 4;
    bool common_random_numbers = true;

    std::optional<SweepSpec> sweep;

    PathLossParams path_loss() const;
    NoiseParams noise() const;
    ContentionConfig contention() const;

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

nlohmann::json to_json(const SimConfig& cfg);
/// Unknown keys and ill-typed values raise ConfigError. Missing keys keep
/// the values already in `base`.
SimConfig config_from_json(const nlohmann::json& j, SimConfig base = {});

SimConfig load_config_file(const std::string& path, SimConfig base = {});

/// Applies one "key=value" override (value parsed as JSON when possible,
/// otherwise as a string).
void apply_override(SimConfig& cfg, std::string_view assignment);

/// Parses "AXIS=V1,V2,...".
SweepSpec parse_sweep(std::string_view text);

/// Named experiments: fig3 (feedback probability sweep), fig4 (threshold
/// sweep), fig5 (SNR sweep over all three strategies).
void apply_preset(SimConfig& cfg, std::string_view name);

/// Sets one sweep axis on a configuration.
void apply_axis(SimConfig& cfg, std::string_view axis, double value);

/// 64-bit FNV-1a of the canonical JSON form, as 16 hex digits.
std::string config_hash(const SimConfig& cfg);

std::string_view to_string(TopologyMode m);
std::string_view to_string(RelayDecoding m);
std::string_view to_string(FailurePolicy m);

} // namespace relaysim

#endif // RELAYSIM_CONFIG_HPP_
