// relaysim: Monte Carlo throughput of relay-assisted incremental-redundancy
// HARQ. Writes one CSV row per (sweep value, strategy).
//
// Exit codes: 0 success, 2 configuration error, 3 runtime fault.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "relaysim/config.hpp"
#include "relaysim/engine.hpp"
#include "relaysim/report.hpp"
#include "relaysim/rng.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Args {
    std::string config_path;
    std::string preset;
    std::string strategy;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> packets;
    std::string sweep;
    std::string out;
    std::string meta;
    std::string transcripts;
    std::string topology_out;
    std::string replay;
    std::string row_hash;
    std::vector<std::string> overrides;
    unsigned threads = 0;
    bool print_config = false;
};

relaysim::SimConfig resolve(const Args& a)
{
    using namespace relaysim;
    SimConfig cfg;
    if (!a.replay.empty()) {
        std::ifstream in(a.replay);
        if (!in)
            throw ConfigError("cannot open metadata '" + a.replay + "'");
        nlohmann::json meta;
        try {
            meta = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("metadata '" + a.replay + "': " + e.what());
        }
        auto found = config_for_hash(meta, a.row_hash);
        if (!found)
            throw ConfigError("no row with config hash " + a.row_hash + " in " + a.replay);
        return *found;
    }
    if (!a.config_path.empty())
        cfg = load_config_file(a.config_path, cfg);
    if (!a.preset.empty())
        apply_preset(cfg, a.preset);
    if (!a.strategy.empty())
        apply_override(cfg, "strategy=\"" + a.strategy + "\"");
    if (a.seed)
        cfg.seed = *a.seed;
    if (a.packets)
        cfg.n_packets = *a.packets;
    if (!a.sweep.empty())
        cfg.sweep = parse_sweep(a.sweep);
    for (const auto& o : a.overrides)
        apply_override(cfg, o);
    cfg.validate();
    return cfg;
}

int run(const Args& a)
{
    using namespace relaysim;
    const SimConfig cfg = resolve(a);
    if (a.print_config) {
        std::cout << to_json(cfg).dump(2) << '\n';
        return 0;
    }

    if (!a.topology_out.empty()) {
        Rng trng = make_rng(cfg.seed, Stream::Topology);
        std::ofstream tout(a.topology_out);
        if (!tout)
            throw ConfigError("cannot write '" + a.topology_out + "'");
        write_topology(tout, place_relays(trng, cfg.n_relays, cfg.path_loss()));
    }

    std::vector<SweepPoint> points;
    const bool has_axis = cfg.sweep.has_value();
    if (has_axis) {
        points = plan_sweep(cfg, cfg.sweep->axis, cfg.sweep->values);
    } else {
        for (const auto s : cfg.strategies) {
            SweepPoint p;
            p.strategy = s;
            p.config = cfg;
            p.config.strategies = {s};
            points.push_back(std::move(p));
        }
    }

    std::unique_ptr<std::ofstream> transcript_file;
    if (!a.transcripts.empty()) {
        transcript_file = std::make_unique<std::ofstream>(a.transcripts);
        if (!*transcript_file)
            throw ConfigError("cannot write '" + a.transcripts + "'");
    }

    CampaignOptions opts;
    opts.threads = a.threads;
    opts.keep_outcomes = transcript_file != nullptr;
    for (auto& p : points) {
        auto result = run_campaign(p.config, opts);
        p.metrics = result.metrics;
        if (transcript_file)
            write_transcripts(*transcript_file, config_hash(p.config), result.outcomes);
        std::cerr << "[relaysim] " << to_string(p.strategy)
                  << (has_axis ? " " + cfg.sweep->axis + "=" + format_double(p.axis_value) : "")
                  << " r_avg=" << format_double(p.metrics.r_avg) << '\n';
    }

    std::ofstream file;
    std::ostream* os = &std::cout;
    if (!a.out.empty()) {
        file.open(a.out);
        if (!file)
            throw ConfigError("cannot write '" + a.out + "'");
        os = &file;
    }
    write_csv_header(*os);
    for (const auto& p : points)
        write_csv_row(*os, p, has_axis);

    const std::string meta_path = !a.meta.empty() ? a.meta : (a.out.empty() ? "" : a.out + ".meta.json");
    if (!meta_path.empty()) {
        std::ofstream mout(meta_path);
        if (!mout)
            throw ConfigError("cannot write '" + meta_path + "'");
        mout << run_metadata(cfg, points).dump(2) << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Two-hop relay network HARQ throughput simulator"};
    Args a;
    app.add_option("--config", a.config_path, "JSON configuration file");
    app.add_option("--preset", a.preset, "Experiment preset: fig3, fig4 or fig5");
    app.add_option("--strategy", a.strategy,
                   "opportunistic | harbinger | p2p (comma-separated for several)");
    app.add_option("--seed", a.seed, "Master seed");
    app.add_option("--packets", a.packets, "Packets per campaign");
    app.add_option("--sweep", a.sweep, "AXIS=V1,V2,... with AXIS one of feedback_prob, "
                                       "gain_threshold_db, avg_snr_db, minislots, n_relays");
    app.add_option("--out", a.out, "CSV output path (default: stdout)");
    app.add_option("--meta", a.meta, "Metadata JSON path (default: <out>.meta.json)");
    app.add_option("--transcripts", a.transcripts, "Per-packet JSON-lines transcript path");
    app.add_option("--topology-out", a.topology_out, "Write the campaign topology record");
    app.add_option("--set", a.overrides, "KEY=VALUE config override (repeatable)");
    app.add_option("--threads", a.threads, "Worker threads (0 = all cores)");
    auto* replay = app.add_option("--replay", a.replay, "Metadata JSON of an earlier run");
    app.add_option("--row-hash", a.row_hash, "Config hash of the row to re-run")->needs(replay);
    replay->needs(app.get_option("--row-hash"));
    app.add_flag("--print-config", a.print_config, "Print the resolved config and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        return run(a);
    } catch (const relaysim::ConfigError& e) {
        std::cerr << "relaysim: configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "relaysim: " << e.what() << '\n';
        return kExitRuntime;
    }
}
