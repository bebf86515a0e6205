#ifndef RELAYSIM_REPORT_HPP_
#define RELAYSIM_REPORT_HPP_

#include <iosfwd>
#include <optional>
#include <span>
#include <string>

#include "json.hpp"
#include "relaysim/engine.hpp"

namespace relaysim {

/// Shortest text that parses back to the same double.
std::string format_double(double v);

/// CSV columns:
/// axis_value,strategy,r_avg,empirical_throughput,l_av,outage_rate,
/// ci_halfwidth,packets,seed,config_hash
void write_csv_header(std::ostream& os);
/// axis_value is left empty when the run is not a sweep.
void write_csv_row(std::ostream& os, const SweepPoint& point, bool has_axis);

/// Run metadata: the resolved invocation config plus, per output row, its
/// config hash and the exact single-campaign config that reproduces it.
nlohmann::json run_metadata(const SimConfig& resolved, std::span<const SweepPoint> points);

/// Looks up a row's config in metadata written by run_metadata().
std::optional<SimConfig> config_for_hash(const nlohmann::json& metadata, const std::string& hash);

/// One JSON object per packet: {"config_hash", "packet", "success", ...,
/// "rounds": [...]}.
void write_transcripts(std::ostream& os, const std::string& hash,
                       std::span<const PacketOutcome> outcomes);

} // namespace relaysim

#endif // RELAYSIM_REPORT_HPP_
