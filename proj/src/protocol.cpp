#include "relaysim/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace relaysim {

std::string_view to_string(Strategy s)
{
    switch (s) {
    case Strategy::Opportunistic:
        return "opportunistic";
    case Strategy::Harbinger:
        return "harbinger";
    case Strategy::PointToPoint:
        return "p2p";
    }
    return "unknown";
}

Strategy parse_strategy(std::string_view token)
{
    if (token == "opportunistic")
        return Strategy::Opportunistic;
    if (token == "harbinger")
        return Strategy::Harbinger;
    if (token == "p2p")
        return Strategy::PointToPoint;
    throw std::invalid_argument("unknown strategy '" + std::string(token) +
                                "' (expected opportunistic, harbinger or p2p)");
}

std::string_view to_string(WinnerPool p)
{
    return p == WinnerPool::DistinctRelays ? "relay" : "minislot";
}

WinnerPool parse_winner_pool(std::string_view token)
{
    if (token == "relay")
        return WinnerPool::DistinctRelays;
    if (token == "minislot")
        return WinnerPool::PerMinislot;
    throw std::invalid_argument("unknown winner pool '" + std::string(token) +
                                "' (expected relay or minislot)");
}

double ContentionConfig::prob_for(std::size_t relay_index) const
{
    if (relay_index < per_relay_prob.size())
        return per_relay_prob[relay_index];
    return feedback_prob;
}

void ContentionConfig::validate() const
{
    if (minislots < 1)
        throw std::invalid_argument("minislots must be >= 1");
    auto check_prob = [](double p) {
        if (!(p >= 0.0 && p <= 1.0))
            throw std::invalid_argument("feedback probability must lie in [0, 1]");
    };
    check_prob(feedback_prob);
    for (const double p : per_relay_prob)
        check_prob(p);
    if (!(gain_threshold > 0.0) || !std::isfinite(gain_threshold))
        throw std::invalid_argument("gain threshold must be positive");
}

RoundState::RoundState(std::size_t relay_count, std::size_t rate_index, DecodeProbe probe)
    : decoded_(relay_count, 0), rate_index_(rate_index), probe_(std::move(probe))
{
}

bool RoundState::has_decoded(std::size_t relay_index)
{
    if (decoded_.at(relay_index))
        return true;
    if (probe_ && probe_(relay_index)) {
        decoded_[relay_index] = 1;
        return true;
    }
    return false;
}

void RoundState::mark_decoded(std::size_t relay_index)
{
    decoded_.at(relay_index) = 1;
}

std::vector<std::size_t> RoundState::decoded_relays()
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < decoded_.size(); ++i) {
        if (has_decoded(i))
            out.push_back(i);
    }
    return out;
}

std::vector<std::size_t> eligible_set(RoundState& state, const ContentionConfig& cfg)
{
    if (state.gains_to_dest.size() != state.relay_count())
        throw std::invalid_argument("eligible_set: gains_to_dest not populated");
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < state.relay_count(); ++i) {
        // Gain first: decoding status is only resolved when it matters.
        if (state.gains_to_dest[i] > cfg.gain_threshold && state.has_decoded(i))
            out.push_back(i);
    }
    return out;
}

ContentionResult run_contention(const std::vector<std::size_t>& eligible,
                                const ContentionConfig& cfg, Rng& rng)
{
    ContentionResult result;
    if (eligible.empty()) {
        result.idle_minislots = cfg.minislots;
        return result;
    }
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (std::size_t slot = 0; slot < cfg.minislots; ++slot) {
        std::size_t senders = 0;
        std::size_t sender = 0;
        for (const auto relay : eligible) {
            if (coin(rng) < cfg.prob_for(relay)) {
                ++senders;
                sender = relay;
            }
        }
        if (senders == 0)
            ++result.idle_minislots;
        else if (senders == 1) {
            ++result.successful_minislots;
            result.successes.push_back(sender);
        } else
            ++result.collided_minislots;
    }
    if (result.successes.empty())
        return result;

    if (cfg.pool == WinnerPool::PerMinislot) {
        std::uniform_int_distribution<std::size_t> pick(0, result.successes.size() - 1);
        result.winner = result.successes[pick(rng)];
    } else {
        std::vector<std::size_t> pool = result.successes;
        std::sort(pool.begin(), pool.end());
        pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
        std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
        result.winner = pool[pick(rng)];
    }
    return result;
}

Selection select_transmitter(Strategy strategy, RoundState& state, const ContentionConfig& cfg,
                             const Topology& topology, Rng& rng)
{
    if (state.rate_index() < 2)
        throw std::invalid_argument("select_transmitter: round 1 always belongs to the source");
    Selection sel{topology.source_id(), 0, std::nullopt};

    switch (strategy) {
    case Strategy::PointToPoint:
        break;
    case Strategy::Harbinger: {
        std::vector<std::size_t> order(state.relay_count());
        std::iota(order.begin(), order.end(), std::size_t{0});
        const NodeId dest = topology.dest_id();
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return topology.distance_between(topology.relay_id(a), dest) <
                   topology.distance_between(topology.relay_id(b), dest);
        });
        for (const auto relay : order) {
            if (state.has_decoded(relay)) {
                sel.transmitter = topology.relay_id(relay);
                break;
            }
        }
        break;
    }
    case Strategy::Opportunistic: {
        const auto eligible = eligible_set(state, cfg);
        sel.eligible_count = eligible.size();
        sel.contention = run_contention(eligible, cfg, rng);
        if (sel.contention->winner)
            sel.transmitter = topology.relay_id(*sel.contention->winner);
        break;
    }
    }
    return sel;
}

} // namespace relaysim
