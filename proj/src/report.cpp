#include "relaysim/report.hpp"

#include <charconv>
#include <ostream>

namespace relaysim {

using nlohmann::json;

std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_csv_header(std::ostream& os)
{
    os << "axis_value,strategy,r_avg,empirical_throughput,l_av,outage_rate,ci_halfwidth,"
          "packets,seed,config_hash\n";
}

void write_csv_row(std::ostream& os, const SweepPoint& point, bool has_axis)
{
    const Metrics& m = point.metrics;
    os << (has_axis ? format_double(point.axis_value) : std::string()) << ','
       << to_string(point.strategy) << ',' << format_double(m.r_avg) << ','
       << format_double(m.empirical_throughput) << ',' << format_double(m.l_av) << ','
       << format_double(m.outage_rate) << ',' << format_double(m.ci_halfwidth) << ','
       << m.packets << ',' << point.config.seed << ',' << config_hash(point.config) << '\n';
}

json run_metadata(const SimConfig& resolved, std::span<const SweepPoint> points)
{
    json rows = json::array();
    for (const auto& p : points) {
        const Metrics& m = p.metrics;
        rows.push_back(json{
            {"config_hash", config_hash(p.config)},
            {"config", to_json(p.config)},
            {"successes", m.successes},
            {"undetected_errors", m.undetected_errors},
            {"mean_rounds", m.mean_rounds},
            {"minislots_total", m.minislots_total},
            {"relay_usage_histogram", m.relay_usage_histogram},
            {"mother_length_n", m.mother_length},
        });
    }
    return json{{"resolved_config", to_json(resolved)},
                {"rate_formula", "r_avg = k/(n+M) * P/(P+l_av), n = k/R_m"},
                {"rows", rows}};
}

std::optional<SimConfig> config_for_hash(const json& metadata, const std::string& hash)
{
    if (!metadata.contains("rows"))
        return std::nullopt;
    for (const auto& row : metadata["rows"]) {
        if (row.value("config_hash", std::string()) == hash)
            return config_from_json(row["config"]);
    }
    return std::nullopt;
}

void write_transcripts(std::ostream& os, const std::string& hash,
                       std::span<const PacketOutcome> outcomes)
{
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const auto& o = outcomes[i];
        json rounds = json::array();
        for (const auto& r : o.transcript) {
            json jr{{"attempt", r.attempt},
                    {"round", r.round},
                    {"transmitter", r.transmitter.value},
                    {"bits", r.bits},
                    {"dest_decoded", r.dest_decoded}};
            if (r.contention_held) {
                jr["eligible"] = r.eligible;
                jr["minislots"] = json{{"success", r.successful_minislots},
                                       {"collision", r.collided_minislots},
                                       {"idle", r.idle_minislots}};
            }
            rounds.push_back(std::move(jr));
        }
        json line{{"config_hash", hash},
                  {"packet", i},
                  {"success", o.success},
                  {"undetected_error", o.undetected_error},
                  {"rounds_used", o.rounds_used},
                  {"coded_bits_sent", o.coded_bits_sent},
                  {"attempts", o.attempts},
                  {"rounds", std::move(rounds)}};
        os << line.dump() << '\n';
    }
}

} // namespace relaysim
