#ifndef RELAYSIM_PROTOCOL_HPP_
#define RELAYSIM_PROTOCOL_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "relaysim/rng.hpp"
#include "relaysim/topology.hpp"

namespace relaysim {

enum class Strategy { Opportunistic, Harbinger, PointToPoint };

std::string_view to_string(Strategy s);
/// Accepts "opportunistic", "harbinger" and "p2p".
Strategy parse_strategy(std::string_view token);

/// How the source picks among relays that won at least one minislot.
enum class WinnerPool {
    DistinctRelays,  ///< uniform over distinct successful relays
    PerMinislot,     ///< uniform over successful minislots
};

std::string_view to_string(WinnerPool p);
WinnerPool parse_winner_pool(std::string_view token);

struct ContentionConfig {
    std::size_t minislots = 10;
    double feedback_prob = 0.3;
    /// Optional per-relay probabilities indexed by relay index; empty means
    /// every relay uses feedback_prob.
    std::vector<double> per_relay_prob;
    /// Linear power gain threshold on |h_{i,r}|^2.
    double gain_threshold = 7.943282347242822e-10;  // -91 dB
    WinnerPool pool = WinnerPool::DistinctRelays;

    double prob_for(std::size_t relay_index) const;
    void validate() const;
};

/// Protocol view of one packet just before a selection.
///
/// Decoding status may be resolved lazily: a relay not yet marked decoded is
/// asked through the probe, and a positive answer is cached.
class RoundState {
public:
    using DecodeProbe = std::function<bool(std::size_t relay_index)>;

    RoundState(std::size_t relay_count, std::size_t rate_index, DecodeProbe probe = {});

    std::size_t relay_count() const { return decoded_.size(); }
    std::size_t rate_index() const { return rate_index_; }

    bool has_decoded(std::size_t relay_index);
    void mark_decoded(std::size_t relay_index);
    /// Resolves every relay and returns the decoded ones in index order.
    std::vector<std::size_t> decoded_relays();

    /// |h_{i,r}|^2 of every relay for the upcoming slot.
    std::vector<double> gains_to_dest;

private:
    std::vector<std::uint8_t> decoded_;
    std::size_t rate_index_;
    DecodeProbe probe_;
};

/// Relays that have decoded and whose upcoming gain to the destination
/// strictly exceeds the threshold, in index order.
std::vector<std::size_t> eligible_set(RoundState& state, const ContentionConfig& cfg);

struct ContentionResult {
    std::optional<std::size_t> winner;  ///< relay index; empty means no winner
    std::size_t successful_minislots = 0;
    std::size_t collided_minislots = 0;
    std::size_t idle_minislots = 0;
    /// Relay that succeeded in each successful minislot, in minislot order.
    std::vector<std::size_t> successes;
};

/// K minislots of random access: each eligible relay sends a Hello with its
/// feedback probability, independently per minislot. A minislot succeeds iff
/// exactly one relay sends.
ContentionResult run_contention(const std::vector<std::size_t>& eligible,
                                const ContentionConfig& cfg, Rng& rng);

struct Selection {
    NodeId transmitter;
    std::size_t eligible_count = 0;
    std::optional<ContentionResult> contention;
};

/// Chooses who sends the incremental parity of round state.rate_index()
/// (which must be >= 2).
///   Opportunistic: contention among the eligible set, source if no winner.
///   Harbinger: decoded relay closest to the destination (lowest id on ties),
///              source if none has decoded.
///   PointToPoint: always the source.
Selection select_transmitter(Strategy strategy, RoundState& state, const ContentionConfig& cfg,
                             const Topology& topology, Rng& rng);

} // namespace relaysim

#endif // RELAYSIM_PROTOCOL_HPP_
