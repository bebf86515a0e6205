#include "doctest.h"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "relaysim/engine.hpp"

using namespace relaysim;

namespace {

const CodingChain& chain()
{
    static const CodingChain c = CodingChain::standard();
    return c;
}

// Every link gets a fixed gain, chosen per (tx, rx, slot) by a callback.
class ScriptedFading final : public FadingModel {
public:
    using Script = std::function<double(NodeId tx, NodeId rx, std::uint32_t slot)>;
    explicit ScriptedFading(Script s) : script_(std::move(s)) {}

    Complex sample(NodeId tx, NodeId rx, std::uint32_t slot, double, Rng&) override
    {
        ++calls;
        return {script_(tx, rx, slot), 0.0};
    }

    std::size_t calls = 0;

private:
    Script script_;
};

Topology small_topology()
{
    return Topology({0, 0}, {100, 0}, {{50, 10}, {70, -5}, {30, 0}});
}

PacketContext context(const Topology& topo, double snr_db, Strategy s = Strategy::Opportunistic)
{
    const PathLossParams pl;
    const double n0 = db_to_linear(-134.0);
    PacketOptions opt;
    opt.strategy = s;
    return PacketContext{topo, chain(), pl,
                         NoiseParams{n0, calibrate_tx_energy(snr_db, 100.0, pl, n0)}, opt};
}

std::size_t bits_through(std::size_t rounds)
{
    return chain().positions(rounds).size();
}

SimConfig small_config(Strategy s, std::size_t packets)
{
    SimConfig cfg;
    cfg.strategies = {s};
    cfg.n_packets = packets;
    cfg.seed = 77;
    return cfg;
}

} // namespace

TEST_CASE("a clean channel finishes in one round")
{
    const auto topo = small_topology();
    const auto ctx = context(topo, 80.0);
    Rng rng(1);
    const auto out = run_packet(ctx, rng);
    CHECK(out.success);
    CHECK(out.rounds_used == 1);
    CHECK(out.coded_bits_sent == bits_through(1));
    CHECK(out.coded_bits_sent == 2558);
    REQUIRE(out.transmitter_per_round.size() == 1);
    CHECK(out.transmitter_per_round[0] == topo.source_id());
    CHECK(out.minislots_used == 0);
    CHECK_FALSE(out.undetected_error);
}

TEST_CASE("a dead channel exhausts the mother code")
{
    const auto topo = small_topology();
    for (const auto s : {Strategy::Opportunistic, Strategy::Harbinger, Strategy::PointToPoint}) {
        const auto ctx = context(topo, -200.0, s);
        Rng rng(2);
        const auto out = run_packet(ctx, rng);
        CHECK_FALSE(out.success);
        CHECK(out.rounds_used == 5);
        CHECK(out.coded_bits_sent == 3 * (2040 + 6));
        for (const auto tx : out.transmitter_per_round)
            CHECK(tx == topo.source_id());
    }
}

TEST_CASE("restart policy repeats failed attempts")
{
    const auto topo = small_topology();
    auto ctx = context(topo, -200.0, Strategy::PointToPoint);
    ctx.options.failure_policy = FailurePolicy::Restart;
    ctx.options.max_attempts = 3;
    Rng rng(3);
    const auto out = run_packet(ctx, rng);
    CHECK_FALSE(out.success);
    CHECK(out.attempts == 3);
    CHECK(out.rounds_used == 15);
    CHECK(out.coded_bits_sent == 3 * 6138);
    CHECK(out.transcript.back().attempt == 3);

    auto clean = context(topo, 80.0, Strategy::PointToPoint);
    clean.options.failure_policy = FailurePolicy::Restart;
    const auto ok = run_packet(clean, rng);
    CHECK(ok.attempts == 1);
    CHECK(ok.rounds_used == 1);
}

TEST_CASE("scripted weak then strong link needs three rounds")
{
    // Source to destination only: 0.75 dB for two slots, then 20 dB.
    const Topology topo({0, 0}, {100, 0}, {{50, 0}});
    PacketContext ctx{topo, chain(), PathLossParams{}, NoiseParams{1.0, 1.0}, PacketOptions{}};
    ctx.options.strategy = Strategy::PointToPoint;
    ScriptedFading fading([&](NodeId tx, NodeId rx, std::uint32_t slot) {
        if (tx != topo.source_id() || rx != topo.dest_id())
            return 0.0;
        return std::sqrt(db_to_linear(slot <= 2 ? 0.75 : 20.0));
    });
    Rng rng(1);
    const auto out = run_packet(ctx, rng, fading);
    CHECK(out.success);
    CHECK(out.rounds_used == 3);
    CHECK(out.coded_bits_sent == bits_through(3));
    REQUIRE(out.transcript.size() == 3);
    CHECK_FALSE(out.transcript[1].dest_decoded);
    CHECK(out.transcript[2].dest_decoded);
}

TEST_CASE("a relay forwards its own re-encoded codeword")
{
    // The destination hears nothing from the source; relay 0 hears the
    // source cleanly and reaches the destination cleanly.
    const Topology topo({0, 0}, {100, 0}, {{60, 0}, {20, 0}});
    PacketContext ctx{topo, chain(), PathLossParams{}, NoiseParams{1.0, 1.0}, PacketOptions{}};
    ctx.options.strategy = Strategy::Harbinger;
    const NodeId r0 = topo.relay_id(0);
    ScriptedFading fading([&](NodeId tx, NodeId rx, std::uint32_t) {
        if (tx == topo.source_id() && rx == r0)
            return 1e3;
        if (tx == r0 && rx == topo.dest_id())
            return 1e3;
        return 0.0;
    });
    Rng rng(4);
    const auto out = run_packet(ctx, rng, fading);
    CHECK(out.success);
    CHECK_FALSE(out.undetected_error);
    // Rounds 2..5 leave out only what round 1 sent; the complete third
    // generator arrives in round 5 and determines the information word.
    CHECK(out.rounds_used == 5);
    CHECK(out.coded_bits_sent == bits_through(5));
    CHECK_FALSE(out.transcript[3].dest_decoded);
    const std::vector<NodeId> expected{topo.source_id(), r0, r0, r0, r0};
    CHECK(out.transmitter_per_round == expected);
}

TEST_CASE("opportunistic contention reaches the destination through a relay")
{
    const Topology topo({0, 0}, {100, 0}, {{60, 0}});
    PacketContext ctx{topo, chain(), PathLossParams{}, NoiseParams{1.0, 1.0}, PacketOptions{}};
    ctx.options.contention.feedback_prob = 1.0;
    ctx.options.contention.minislots = 3;
    ctx.options.contention.gain_threshold = 1.0;
    const NodeId r0 = topo.relay_id(0);
    ScriptedFading fading([&](NodeId tx, NodeId rx, std::uint32_t) {
        if (tx == topo.source_id() && rx == r0)
            return 1e3;
        if (tx == r0 && rx == topo.dest_id())
            return 1e3;
        return 0.0;
    });
    Rng rng(5);
    const auto out = run_packet(ctx, rng, fading);
    CHECK(out.success);
    CHECK(out.rounds_used == 5);
    CHECK(out.minislots_used == 12);
    REQUIRE(out.transcript.size() == 5);
    CHECK(out.transcript[1].contention_held);
    CHECK(out.transcript[1].eligible == 1);
    CHECK(out.transcript[1].successful_minislots == 3);

    // Below the threshold the relay is not eligible and the source keeps
    // sending into a dead link.
    ctx.options.contention.gain_threshold = 1e7;
    Rng again(5);
    const auto blocked = run_packet(ctx, again, fading);
    CHECK_FALSE(blocked.success);
    for (const auto tx : blocked.transmitter_per_round)
        CHECK(tx == topo.source_id());
}

TEST_CASE("fading is drawn once per link and slot")
{
    const auto topo = small_topology();
    auto ctx = context(topo, -200.0, Strategy::PointToPoint);
    ScriptedFading fading([](NodeId, NodeId, std::uint32_t) { return 1e-9; });
    Rng rng(6);
    const auto out = run_packet(ctx, rng, fading);
    REQUIRE(out.rounds_used == 5);
    // Round 1: source to destination and to 3 relays. Rounds 2..5 also draw
    // the 3 relay-destination gains before selection.
    CHECK(fading.calls == 4 + 4 * (3 + 4));
}

TEST_CASE("packets are reproducible from their seed")
{
    const auto topo = small_topology();
    const auto ctx = context(topo, 2.0);
    for (int s = 0; s < 5; ++s) {
        Rng a(100 + s);
        Rng b(100 + s);
        const auto x = run_packet(ctx, a);
        const auto y = run_packet(ctx, b);
        CHECK(x.success == y.success);
        CHECK(x.coded_bits_sent == y.coded_bits_sent);
        CHECK(x.transmitter_per_round == y.transmitter_per_round);
        CHECK(x.minislots_used == y.minislots_used);
    }
}

TEST_CASE("transcript accounting is consistent")
{
    const auto topo = small_topology();
    for (const auto s : {Strategy::Opportunistic, Strategy::Harbinger, Strategy::PointToPoint}) {
        const auto ctx = context(topo, 0.0, s);
        Rng rng(7);
        for (int p = 0; p < 10; ++p) {
            const auto out = run_packet(ctx, rng);
            CHECK(out.transcript.size() == out.rounds_used);
            CHECK(out.transmitter_per_round.size() == out.rounds_used);
            std::size_t bits = 0;
            std::size_t slots = 0;
            for (const auto& r : out.transcript) {
                CHECK(r.bits == chain().released(r.round).size());
                bits += r.bits;
                slots += r.contention_held ? 10 : 0;
                if (r.contention_held)
                    CHECK(r.idle_minislots + r.collided_minislots + r.successful_minislots == 10);
            }
            CHECK(bits == out.coded_bits_sent);
            CHECK(slots == out.minislots_used);
            CHECK(out.coded_bits_sent == bits_through(out.rounds_used));
            CHECK(out.success == out.transcript.back().dest_decoded);
            if (s == Strategy::PointToPoint)
                CHECK(out.minislots_used == 0);
        }
    }
}

TEST_CASE("average code rate of a toy example")
{
    const std::vector<std::size_t> bits{10, 16};
    const double lav = measure_lav(bits, 8, 8);
    CHECK(lav == doctest::Approx(5.0));
    CHECK(throughput(lav, 8, 24, 8, 6) == doctest::Approx(8.0 / 30.0 * 8.0 / 13.0));
    CHECK(throughput(lav, 8, 24, 8, 6) == doctest::Approx(0.1641).epsilon(1e-3));
    CHECK(throughput(0.0, 2040, 6120, 8, 6) == doctest::Approx(2040.0 / 6126.0));
    CHECK_THROWS_AS(measure_lav(std::vector<std::size_t>{}, 8, 8), std::invalid_argument);
    CHECK_THROWS_AS(measure_lav(std::vector<PacketOutcome>{}, 8, 8), std::invalid_argument);
}

TEST_CASE("metrics from hand-made outcomes")
{
    std::vector<PacketOutcome> outs(4);
    outs[0].success = true;
    outs[0].coded_bits_sent = 2558;
    outs[0].rounds_used = 1;
    outs[0].transmitter_per_round = {NodeId{0}};
    outs[1].success = true;
    outs[1].coded_bits_sent = 2558 + 512;
    outs[1].rounds_used = 2;
    outs[1].transmitter_per_round = {NodeId{0}, NodeId{2}};
    outs[2].success = false;
    outs[2].coded_bits_sent = 6138;
    outs[2].rounds_used = 5;
    outs[2].transmitter_per_round.assign(5, NodeId{0});
    outs[3].success = true;
    outs[3].undetected_error = true;
    outs[3].coded_bits_sent = 2558;
    outs[3].rounds_used = 1;
    outs[3].transmitter_per_round = {NodeId{0}};

    const auto m = compute_metrics(outs, chain(), 4);
    CHECK(m.packets == 4);
    CHECK(m.successes == 3);
    CHECK(m.undetected_errors == 1);
    CHECK(m.outage_rate == 0.25);
    CHECK(m.info_bits_delivered == 2 * 2040);
    CHECK(m.coded_bits_total == 2558 * 2 + 3070 + 6138);
    CHECK(m.empirical_throughput == doctest::Approx(4080.0 / (2558 * 2 + 3070 + 6138)));
    CHECK(m.mean_rounds == doctest::Approx(9.0 / 4.0));
    CHECK(m.mother_length == 6120);
    CHECK(m.relay_usage_histogram == std::vector<std::uint64_t>{8, 0, 1, 0});

    std::vector<double> l;
    for (const auto& o : outs)
        l.push_back(static_cast<double>(o.coded_bits_sent) * 8.0 / 2040.0 - 8.0);
    const double lav = std::accumulate(l.begin(), l.end(), 0.0) / 4.0;
    CHECK(m.l_av == doctest::Approx(lav));
    CHECK(m.r_avg == doctest::Approx(2040.0 / 6126.0 * 8.0 / (8.0 + lav)));
    double ss = 0.0;
    for (const double x : l)
        ss += (x - lav) * (x - lav);
    const double sd = std::sqrt(ss / 3.0);
    const double slope = 2040.0 / 6126.0 * 8.0 / ((8.0 + lav) * (8.0 + lav));
    CHECK(m.ci_halfwidth == doctest::Approx(1.96 * slope * sd / 2.0));

    CHECK_THROWS_AS(compute_metrics(std::vector<PacketOutcome>{}, chain(), 4),
                    std::invalid_argument);
}

TEST_CASE("campaign validation")
{
    auto cfg = small_config(Strategy::Opportunistic, 2);
    cfg.strategies = {Strategy::Opportunistic, Strategy::PointToPoint};
    CHECK_THROWS_AS(run_campaign(cfg), ConfigError);
    cfg = small_config(Strategy::Opportunistic, 2);
    cfg.sweep = SweepSpec{"feedback_prob", {0.1, 0.2}};
    CHECK_THROWS_AS(run_campaign(cfg), ConfigError);
    cfg = small_config(Strategy::Opportunistic, 2);
    cfg.feedback_prob = 1.5;
    CHECK_THROWS_AS(run_campaign(cfg), ConfigError);
    cfg = small_config(Strategy::Opportunistic, 2);
    cfg.puncture_file = "/nonexistent/masks.txt";
    CHECK_THROWS_AS(run_campaign(cfg), ConfigError);
}

TEST_CASE("campaigns are bit-exact across runs and thread counts")
{
    const auto cfg = small_config(Strategy::Opportunistic, 12);
    const auto a = run_campaign(cfg, CampaignOptions{1, true});
    const auto b = run_campaign(cfg, CampaignOptions{3, true});
    CHECK(a.metrics.r_avg == b.metrics.r_avg);
    CHECK(a.metrics.l_av == b.metrics.l_av);
    CHECK(a.metrics.coded_bits_total == b.metrics.coded_bits_total);
    CHECK(a.metrics.relay_usage_histogram == b.metrics.relay_usage_histogram);
    REQUIRE(a.outcomes.size() == 12);
    REQUIRE(b.outcomes.size() == 12);
    for (std::size_t i = 0; i < 12; ++i)
        CHECK(a.outcomes[i].transmitter_per_round == b.outcomes[i].transmitter_per_round);

    const auto c = run_campaign(cfg, CampaignOptions{1, false});
    CHECK(c.outcomes.empty());
    CHECK(c.metrics.r_avg == a.metrics.r_avg);
}

TEST_CASE("eager relay decoding gives the same campaign as lazy")
{
    auto cfg = small_config(Strategy::Opportunistic, 8);
    const auto lazy = run_campaign(cfg, CampaignOptions{1, true});
    cfg.relay_decoding = RelayDecoding::Eager;
    const auto eager = run_campaign(cfg, CampaignOptions{1, true});
    CHECK(eager.metrics.r_avg == lazy.metrics.r_avg);
    CHECK(eager.metrics.coded_bits_total == lazy.metrics.coded_bits_total);
    for (std::size_t i = 0; i < 8; ++i)
        CHECK(eager.outcomes[i].transmitter_per_round == lazy.outcomes[i].transmitter_per_round);
}

TEST_CASE("packet i of a campaign matches a standalone packet")
{
    auto cfg = small_config(Strategy::Harbinger, 3);
    const auto res = run_campaign(cfg, CampaignOptions{1, true});
    const auto topo_rng_seed = derive_seed(cfg.seed, Stream::Topology);
    Rng topo_rng(topo_rng_seed);
    const auto topo = place_relays(topo_rng, cfg.n_relays, cfg.path_loss());
    PacketOptions opt;
    opt.strategy = Strategy::Harbinger;
    opt.contention = cfg.contention();
    const PacketContext ctx{topo, chain(), cfg.path_loss(), cfg.noise(), opt};
    for (std::size_t i = 0; i < 3; ++i) {
        auto rng = make_rng(cfg.seed, Stream::Packet, i);
        const auto out = run_packet(ctx, rng);
        CHECK(out.coded_bits_sent == res.outcomes[i].coded_bits_sent);
        CHECK(out.transmitter_per_round == res.outcomes[i].transmitter_per_round);
    }
}

TEST_CASE("a better channel never lowers the rate")
{
    // Common random numbers: the same seeds at every SNR.
    double prev = 0.0;
    for (const double snr : {-4.0, 2.0, 8.0, 14.0}) {
        auto cfg = small_config(Strategy::PointToPoint, 30);
        cfg.avg_snr_db = snr;
        const auto m = run_campaign(cfg).metrics;
        CHECK(m.r_avg >= prev);
        prev = m.r_avg;
    }
    // At high SNR nearly every packet needs one round.
    CHECK(prev > 0.25);
}

TEST_CASE("relays help on average")
{
    auto cfg = small_config(Strategy::PointToPoint, 60);
    const auto p2p = run_campaign(cfg).metrics;
    cfg.strategies = {Strategy::Harbinger};
    const auto relay = run_campaign(cfg).metrics;
    CHECK(relay.r_avg > p2p.r_avg);
    CHECK(p2p.relay_usage_histogram[0] ==
          std::accumulate(p2p.relay_usage_histogram.begin(), p2p.relay_usage_histogram.end(),
                          std::uint64_t{0}));
}

TEST_CASE("sweep planning")
{
    auto cfg = small_config(Strategy::Opportunistic, 5);
    cfg.strategies = {Strategy::PointToPoint, Strategy::Opportunistic, Strategy::Harbinger};
    const std::vector<double> values{0.5, 0.1};
    const auto plan = plan_sweep(cfg, "feedback_prob", values);
    REQUIRE(plan.size() == 6);
    CHECK(plan[0].axis_value == 0.1);
    CHECK(plan[0].strategy == Strategy::Harbinger);
    CHECK(plan[1].strategy == Strategy::Opportunistic);
    CHECK(plan[2].strategy == Strategy::PointToPoint);
    CHECK(plan[3].axis_value == 0.5);
    for (const auto& p : plan) {
        CHECK(p.config.feedback_prob == p.axis_value);
        CHECK(p.config.strategies == std::vector<Strategy>{p.strategy});
        CHECK_FALSE(p.config.sweep.has_value());
        CHECK(p.config.seed == cfg.seed);
    }

    cfg.common_random_numbers = false;
    const auto fresh = plan_sweep(cfg, "feedback_prob", values);
    CHECK(fresh[0].config.seed != fresh[1].config.seed);

    CHECK_THROWS_AS(plan_sweep(cfg, "carrier_freq_hz", values), ConfigError);
}

TEST_CASE("a sweep point equals the single campaign it records")
{
    auto cfg = small_config(Strategy::Opportunistic, 4);
    const std::vector<double> values{-95.0};
    const auto pts = sweep(cfg, "gain_threshold_db", values, CampaignOptions{1, false});
    REQUIRE(pts.size() == 1);
    const auto single = run_campaign(pts[0].config);
    CHECK(single.metrics.r_avg == pts[0].metrics.r_avg);
    CHECK(pts[0].config.gain_threshold_db == -95.0);
}
