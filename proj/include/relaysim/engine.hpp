#ifndef RELAYSIM_ENGINE_HPP_
#define RELAYSIM_ENGINE_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "relaysim/config.hpp"
#include "relaysim/harq.hpp"
#include "relaysim/phy.hpp"
#include "relaysim/protocol.hpp"
#include "relaysim/topology.hpp"

namespace relaysim {

/// Source of per-(link, slot) fading coefficients.
class FadingModel {
public:
    virtual ~FadingModel() = default;
    virtual Complex sample(NodeId tx, NodeId rx, std::uint32_t slot, double mean_gain,
                           Rng& rng) = 0;
};

/// Independent Rayleigh draw for every (link, slot).
class RayleighFading final : public FadingModel {
public:
    Complex sample(NodeId, NodeId, std::uint32_t, double mean_gain, Rng& rng) override
    {
        return sample_fading(rng, mean_gain);
    }
};

/// One round of a packet episode.
struct RoundRecord {
    std::size_t attempt = 1;
    std::size_t round = 1;
    NodeId transmitter;
    std::size_t bits = 0;
    std::size_t eligible = 0;
    std::size_t successful_minislots = 0;
    std::size_t collided_minislots = 0;
    std::size_t idle_minislots = 0;
    bool contention_held = false;
    bool dest_decoded = false;
};

struct PacketOutcome {
    bool success = false;
    /// Rounds transmitted, summed over attempts (at most m per attempt).
    std::size_t rounds_used = 0;
    std::size_t coded_bits_sent = 0;
    std::vector<NodeId> transmitter_per_round;
    bool undetected_error = false;
    std::size_t attempts = 1;
    std::size_t minislots_used = 0;
    std::vector<RoundRecord> transcript;
};

struct PacketOptions {
    Strategy strategy = Strategy::Opportunistic;
    ContentionConfig contention;
    bool relay_combining = true;
    RelayDecoding relay_decoding = RelayDecoding::Lazy;
    FailurePolicy failure_policy = FailurePolicy::CountFull;
    std::size_t max_attempts = 4;
};

/// Everything a packet episode reads; nothing in it is mutated.
struct PacketContext {
    const Topology& topology;
    const CodingChain& chain;
    PathLossParams path_loss;
    NoiseParams noise;
    PacketOptions options;
};

/// One HARQ episode: round 1 from the source at the highest rate, then after
/// every destination NACK a transmitter is selected and sends the next
/// incremental parity, until the destination's RS decoder succeeds or the
/// mother code is exhausted. Fading is redrawn for every (link, slot).
PacketOutcome run_packet(const PacketContext& ctx, Rng& rng, FadingModel& fading);
PacketOutcome run_packet(const PacketContext& ctx, Rng& rng);

/// Additional transmitted bits per P information bits, averaged over
/// packets: coded_bits * P / k - P. Failed packets count in full.
/// Throws std::invalid_argument on an empty list.
double measure_lav(std::span<const PacketOutcome> outcomes, std::size_t k, std::size_t period);
double measure_lav(std::span<const std::size_t> coded_bits, std::size_t k, std::size_t period);

/// Average code rate k / (n + M) * P / (P + l_av).
double throughput(double l_av, std::size_t k, std::size_t n, std::size_t period,
                  std::size_t memory);

struct Metrics {
    std::size_t packets = 0;
    std::size_t successes = 0;
    std::size_t undetected_errors = 0;
    double l_av = 0.0;
    double r_avg = 0.0;
    double empirical_throughput = 0.0;
    double outage_rate = 0.0;
    /// 95% normal-approximation half-width of r_avg (delta method on l_av).
    double ci_halfwidth = 0.0;
    double mean_rounds = 0.0;
    std::uint64_t coded_bits_total = 0;
    std::uint64_t info_bits_delivered = 0;
    std::uint64_t minislots_total = 0;
    /// Rounds transmitted by each node id (source 0, relays 1..K_r).
    std::vector<std::uint64_t> relay_usage_histogram;
    /// n in the average-rate formula: the mother codeword length k / R_m.
    std::size_t mother_length = 0;
};

Metrics compute_metrics(std::span<const PacketOutcome> outcomes, const CodingChain& chain,
                        std::size_t node_count);

struct CampaignOptions {
    /// Worker threads; 0 uses the hardware concurrency. Results do not
    /// depend on this value.
    unsigned threads = 0;
    bool keep_outcomes = false;
};

struct CampaignResult {
    SimConfig config;
    Metrics metrics;
    std::vector<PacketOutcome> outcomes;  ///< filled when keep_outcomes
};

/// Loads the RCPC family named by the config (standard family when empty).
CodingChain make_chain(const SimConfig& cfg);

/// Runs cfg.n_packets episodes for the single strategy in cfg.strategies.
/// Packet i uses the substream derive_seed(seed, Packet, i); the topology
/// comes from derive_seed(seed, Topology) (or per packet, index i).
/// Throws ConfigError before simulating when the config is invalid.
CampaignResult run_campaign(const SimConfig& cfg, const CampaignOptions& opts = {});

struct SweepPoint {
    double axis_value = 0.0;
    Strategy strategy = Strategy::Opportunistic;
    SimConfig config;  ///< fully resolved single-campaign config (no sweep)
    Metrics metrics;
};

/// One campaign per (value, strategy). With common random numbers every
/// point reuses the master seed; otherwise point i uses
/// derive_seed(seed, SweepPoint, i). Points come back sorted by axis value,
/// then strategy token.
std::vector<SweepPoint> sweep(const SimConfig& cfg, std::string_view axis,
                              std::span<const double> values, const CampaignOptions& opts = {});

/// Per-point configurations sweep() would run, in output order.
std::vector<SweepPoint> plan_sweep(const SimConfig& cfg, std::string_view axis,
                                   std::span<const double> values);

} // namespace relaysim

#endif // RELAYSIM_ENGINE_HPP_
