#include "relaysim/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace relaysim {

namespace {

struct RelayState {
    SoftBuffer buffer;
    bool decoded = false;
    std::optional<std::uint64_t> failed_version;
    std::vector<std::uint8_t> codeword;
};

// Single HARQ attempt; appends to `out`. Returns true on destination success.
bool run_attempt(const PacketContext& ctx, Rng& rng, FadingModel& fading, std::size_t attempt,
                 PacketOutcome& out)
{
    const Topology& topo = ctx.topology;
    const CodingChain& chain = ctx.chain;
    const PacketOptions& opt = ctx.options;
    const std::size_t n_relays = topo.relay_count();
    const NodeId dest = topo.dest_id();

    std::vector<std::uint8_t> payload(chain.payload_bytes());
    for (auto& byte : payload)
        byte = static_cast<std::uint8_t>(rng() & 0xFFu);
    const auto source_codeword = chain.encode_payload(payload);

    SoftBuffer dest_buffer(dest, chain.codeword_length());
    std::vector<RelayState> relays;
    relays.reserve(n_relays);
    for (std::size_t i = 0; i < n_relays; ++i)
        relays.push_back(RelayState{SoftBuffer(topo.relay_id(i), chain.codeword_length()), false, std::nullopt, {}});

    auto probe = [&](std::size_t i) {
        RelayState& r = relays[i];
        if (r.decoded)
            return true;
        if (r.failed_version && *r.failed_version == r.buffer.version())
            return false;
        auto decoded = attempt_decode(r.buffer, chain, payload);
        if (decoded.success) {
            r.decoded = true;
            r.codeword = chain.encode_rs_codeword(*decoded.rs_codeword);
            return true;
        }
        r.failed_version = r.buffer.version();
        return false;
    };

    auto mean_gain = [&](NodeId a, NodeId b) {
        return path_gain(topo.distance_between(a, b), ctx.path_loss);
    };

    std::vector<Complex> relay_to_dest(n_relays);
    for (std::size_t j = 1; j <= chain.rounds(); ++j) {
        const auto slot = static_cast<std::uint32_t>(j);
        RoundRecord rec;
        rec.attempt = attempt;
        rec.round = j;
        NodeId tx = topo.source_id();

        if (j > 1) {
            RoundState state(n_relays, j, probe);
            state.gains_to_dest.resize(n_relays);
            for (std::size_t i = 0; i < n_relays; ++i) {
                const NodeId relay = topo.relay_id(i);
                relay_to_dest[i] = fading.sample(relay, dest, slot, mean_gain(relay, dest), rng);
                state.gains_to_dest[i] = std::norm(relay_to_dest[i]);
                if (relays[i].decoded)
                    state.mark_decoded(i);
            }
            if (opt.relay_decoding == RelayDecoding::Eager)
                state.decoded_relays();
            const Selection sel = select_transmitter(opt.strategy, state, opt.contention, topo, rng);
            tx = sel.transmitter;
            rec.eligible = sel.eligible_count;
            if (sel.contention) {
                rec.contention_held = true;
                rec.successful_minislots = sel.contention->successful_minislots;
                rec.collided_minislots = sel.contention->collided_minislots;
                rec.idle_minislots = sel.contention->idle_minislots;
                out.minislots_used += opt.contention.minislots;
            }
        }

        const bool relay_tx = topo.is_relay(tx);
        const std::vector<std::uint8_t>& bits =
            relay_tx ? relays[topo.relay_index(tx)].codeword : source_codeword;
        const auto& released = chain.released(j);

        const Complex h_dest = relay_tx ? relay_to_dest[topo.relay_index(tx)]
                                        : fading.sample(tx, dest, slot, mean_gain(tx, dest), rng);
        dest_buffer.absorb(observe(bits, released, h_dest, ctx.noise, rng));

        const std::uint64_t overhear_seed = rng();
        for (std::size_t i = 0; i < n_relays; ++i) {
            RelayState& r = relays[i];
            const NodeId relay = topo.relay_id(i);
            if (r.decoded || relay == tx)
                continue;
            Rng relay_rng{splitmix64(overhear_seed + i)};
            const Complex h = fading.sample(tx, relay, slot, mean_gain(tx, relay), relay_rng);
            if (!opt.relay_combining)
                r.buffer.clear();
            r.buffer.absorb(observe(bits, released, h, ctx.noise, relay_rng));
        }

        rec.transmitter = tx;
        rec.bits = released.size();
        out.coded_bits_sent += released.size();
        out.transmitter_per_round.push_back(tx);
        ++out.rounds_used;

        const auto outcome = attempt_decode(dest_buffer, chain, payload);
        rec.dest_decoded = outcome.success;
        out.transcript.push_back(rec);
        if (outcome.success) {
            out.success = true;
            out.undetected_error = outcome.undetected_error;
            return true;
        }
    }
    return false;
}

} // namespace

PacketOutcome run_packet(const PacketContext& ctx, Rng& rng, FadingModel& fading)
{
    PacketOutcome out;
    const std::size_t attempts =
        ctx.options.failure_policy == FailurePolicy::Restart ? ctx.options.max_attempts : 1;
    for (std::size_t a = 1; a <= attempts; ++a) {
        out.attempts = a;
        if (run_attempt(ctx, rng, fading, a, out))
            break;
    }
    return out;
}

PacketOutcome run_packet(const PacketContext& ctx, Rng& rng)
{
    RayleighFading fading;
    return run_packet(ctx, rng, fading);
}

double measure_lav(std::span<const std::size_t> coded_bits, std::size_t k, std::size_t period)
{
    if (coded_bits.empty())
        throw std::invalid_argument("measure_lav: no packets");
    if (k == 0)
        throw std::invalid_argument("measure_lav: k must be positive");
    const double p = static_cast<double>(period);
    double sum = 0.0;
    for (const auto bits : coded_bits)
        sum += static_cast<double>(bits) * p / static_cast<double>(k) - p;
    return sum / static_cast<double>(coded_bits.size());
}

double measure_lav(std::span<const PacketOutcome> outcomes, std::size_t k, std::size_t period)
{
    std::vector<std::size_t> bits;
    bits.reserve(outcomes.size());
    for (const auto& o : outcomes)
        bits.push_back(o.coded_bits_sent);
    return measure_lav(bits, k, period);
}

double throughput(double l_av, std::size_t k, std::size_t n, std::size_t period,
                  std::size_t memory)
{
    const double p = static_cast<double>(period);
    return static_cast<double>(k) / static_cast<double>(n + memory) * p / (p + l_av);
}

Metrics compute_metrics(std::span<const PacketOutcome> outcomes, const CodingChain& chain,
                        std::size_t node_count)
{
    if (outcomes.empty())
        throw std::invalid_argument("compute_metrics: no packets");
    const std::size_t k = chain.info_bits();
    const std::size_t period = chain.family().period();
    const std::size_t memory = chain.conv().memory();

    Metrics m;
    m.packets = outcomes.size();
    m.mother_length = k * chain.conv().outputs();
    m.relay_usage_histogram.assign(node_count, 0);
    double rounds = 0.0;
    for (const auto& o : outcomes) {
        if (o.success)
            ++m.successes;
        if (o.undetected_error)
            ++m.undetected_errors;
        if (o.success && !o.undetected_error)
            m.info_bits_delivered += k;
        m.coded_bits_total += o.coded_bits_sent;
        m.minislots_total += o.minislots_used;
        rounds += static_cast<double>(o.rounds_used);
        for (const auto id : o.transmitter_per_round) {
            if (id.value < node_count)
                ++m.relay_usage_histogram[id.value];
        }
    }
    const double n = static_cast<double>(m.packets);
    m.l_av = measure_lav(outcomes, k, period);
    m.r_avg = throughput(m.l_av, k, m.mother_length, period, memory);
    m.empirical_throughput = m.coded_bits_total == 0
                                 ? 0.0
                                 : static_cast<double>(m.info_bits_delivered) /
                                       static_cast<double>(m.coded_bits_total);
    m.outage_rate = static_cast<double>(m.packets - m.successes) / n;
    m.mean_rounds = rounds / n;

    if (m.packets > 1) {
        const double p = static_cast<double>(period);
        double ss = 0.0;
        for (const auto& o : outcomes) {
            const double l = static_cast<double>(o.coded_bits_sent) * p / static_cast<double>(k) - p;
            ss += (l - m.l_av) * (l - m.l_av);
        }
        const double sd = std::sqrt(ss / (n - 1.0));
        const double slope = static_cast<double>(k) /
                             static_cast<double>(m.mother_length + memory) * p /
                             ((p + m.l_av) * (p + m.l_av));
        m.ci_halfwidth = 1.96 * slope * sd / std::sqrt(n);
    }
    return m;
}

CodingChain make_chain(const SimConfig& cfg)
{
    if (cfg.puncture_file.empty())
        return CodingChain::standard();
    std::ifstream in(cfg.puncture_file);
    if (!in)
        throw ConfigError("cannot open puncture file '" + cfg.puncture_file + "'");
    try {
        return CodingChain(ConvCode::standard(), read_rcpc_family(in), ReedSolomon(255, 239));
    } catch (const std::invalid_argument& e) {
        throw ConfigError("puncture file '" + cfg.puncture_file + "': " + e.what());
    }
}

namespace {

std::optional<Topology> load_fixed_topology(const SimConfig& cfg)
{
    if (cfg.topology_file.empty())
        return std::nullopt;
    std::ifstream in(cfg.topology_file);
    if (!in)
        throw ConfigError("cannot open topology file '" + cfg.topology_file + "'");
    try {
        Topology t = read_topology(in);
        if (t.relay_count() != cfg.n_relays)
            throw ConfigError("topology file has " + std::to_string(t.relay_count()) +
                              " relays but n_relays is " + std::to_string(cfg.n_relays));
        return t;
    } catch (const std::invalid_argument& e) {
        throw ConfigError("topology file '" + cfg.topology_file + "': " + e.what());
    }
}

template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn)
{
    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count)
                    return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                    next = count;
                    return;
                }
            }
        });
    }
    for (auto& th : pool)
        th.join();
    if (error)
        std::rethrow_exception(error);
}

} // namespace

CampaignResult run_campaign(const SimConfig& cfg, const CampaignOptions& opts)
{
    cfg.validate();
    if (cfg.strategies.size() != 1)
        throw ConfigError("a campaign runs exactly one strategy; use a sweep for several");
    if (cfg.sweep)
        throw ConfigError("run_campaign does not take a sweep; use sweep()");
    const CodingChain chain = make_chain(cfg);
    const auto fixed = load_fixed_topology(cfg);
    const PathLossParams pl = cfg.path_loss();

    std::optional<Topology> campaign_topology = fixed;
    if (!campaign_topology && cfg.topology_mode == TopologyMode::PerCampaign) {
        Rng trng = make_rng(cfg.seed, Stream::Topology);
        campaign_topology = place_relays(trng, cfg.n_relays, pl);
    }

    PacketOptions popt;
    popt.strategy = cfg.strategies.front();
    popt.contention = cfg.contention();
    popt.relay_combining = cfg.relay_combining;
    popt.relay_decoding = cfg.relay_decoding;
    popt.failure_policy = cfg.failure_policy;
    popt.max_attempts = cfg.max_attempts;
    const NoiseParams noise = cfg.noise();

    std::vector<PacketOutcome> outcomes(cfg.n_packets);
    parallel_for(cfg.n_packets, opts.threads, [&](std::size_t i) {
        std::optional<Topology> own;
        if (!campaign_topology) {
            Rng trng = make_rng(cfg.seed, Stream::Topology, i);
            own = place_relays(trng, cfg.n_relays, pl);
        }
        const Topology& topo = campaign_topology ? *campaign_topology : *own;
        PacketContext ctx{topo, chain, pl, noise, popt};
        Rng rng = make_rng(cfg.seed, Stream::Packet, i);
        outcomes[i] = run_packet(ctx, rng);
    });

    CampaignResult result;
    result.config = cfg;
    result.metrics = compute_metrics(outcomes, chain, cfg.n_relays + 2);
    if (opts.keep_outcomes)
        result.outcomes = std::move(outcomes);
    return result;
}

std::vector<SweepPoint> plan_sweep(const SimConfig& cfg, std::string_view axis,
                                   std::span<const double> values)
{
    if (std::find(std::begin(kSweepAxes), std::end(kSweepAxes), axis) == std::end(kSweepAxes))
        throw ConfigError("unknown sweep axis '" + std::string(axis) + "'");
    if (values.empty())
        throw ConfigError("sweep needs at least one value");
    std::vector<double> sorted(values.begin(), values.end());
    std::stable_sort(sorted.begin(), sorted.end());
    std::vector<Strategy> strategies = cfg.strategies;
    std::sort(strategies.begin(), strategies.end(),
              [](Strategy a, Strategy b) { return to_string(a) < to_string(b); });

    std::vector<SweepPoint> points;
    std::uint64_t index = 0;
    for (const double v : sorted) {
        for (const auto s : strategies) {
            SweepPoint p;
            p.axis_value = v;
            p.strategy = s;
            p.config = cfg;
            p.config.sweep.reset();
            p.config.strategies = {s};
            apply_axis(p.config, axis, v);
            if (!cfg.common_random_numbers)
                p.config.seed = derive_seed(cfg.seed, Stream::SweepPoint, index);
            p.config.validate();
            points.push_back(std::move(p));
            ++index;
        }
    }
    return points;
}

std::vector<SweepPoint> sweep(const SimConfig& cfg, std::string_view axis,
                              std::span<const double> values, const CampaignOptions& opts)
{
    auto points = plan_sweep(cfg, axis, values);
    for (auto& p : points)
        p.metrics = run_campaign(p.config, opts).metrics;
    return points;
}

} // namespace relaysim
