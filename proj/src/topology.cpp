#include "relaysim/topology.hpp"

#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace relaysim {

double distance(const Point& a, const Point& b)
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

PathLossParams PathLossParams::from_carrier_frequency(double carrier_hz,
                                                      double reference_distance_m,
                                                      double exponent,
                                                      double source_dest_distance_m)
{
    if (!(carrier_hz > 0.0))
        throw std::invalid_argument("carrier frequency must be positive");
    return PathLossParams{kSpeedOfLight / carrier_hz, reference_distance_m, exponent,
                          source_dest_distance_m};
}

void PathLossParams::validate() const
{
    if (!(carrier_wavelength_m > 0.0) || !std::isfinite(carrier_wavelength_m))
        throw std::invalid_argument("carrier wavelength must be positive");
    if (!(reference_distance_m > 0.0) || !std::isfinite(reference_distance_m))
        throw std::invalid_argument("reference distance must be positive");
    if (!(exponent >= 2.0) || !std::isfinite(exponent))
        throw std::invalid_argument("path-loss exponent must be >= 2");
    if (!(source_dest_distance_m > 0.0) || !std::isfinite(source_dest_distance_m))
        throw std::invalid_argument("source-destination distance must be positive");
}

double path_gain(double d, const PathLossParams& params)
{
    if (!(d > 0.0))
        throw std::domain_error("path_gain: distance must be positive");
    const double free_space =
        params.carrier_wavelength_m / (4.0 * std::numbers::pi * params.reference_distance_m);
    return free_space * free_space * std::pow(d / params.reference_distance_m, -params.exponent);
}

Topology::Topology(Point source, Point dest, std::vector<Point> relays)
    : source_(source), dest_(dest), relays_(std::move(relays))
{
}

const Point& Topology::position(NodeId id) const
{
    if (id == source_id())
        return source_;
    if (id == dest_id())
        return dest_;
    if (is_relay(id))
        return relays_[relay_index(id)];
    throw std::out_of_range("unknown node id " + std::to_string(id.value));
}

double Topology::distance_between(NodeId a, NodeId b) const
{
    return distance(position(a), position(b));
}

Topology place_relays(Rng& rng, std::size_t k_r, const PathLossParams& params)
{
    if (k_r < 1)
        throw std::invalid_argument("place_relays: need at least one relay");
    params.validate();

    const double r = params.source_dest_distance_m;
    const Point source{0.0, 0.0};
    const Point dest{r, 0.0};
    // Both disks have radius r and centres r apart.
    const double half_height = std::sqrt(r * r - 0.25 * r * r);
    std::uniform_real_distribution<double> ux(0.0, r);
    std::uniform_real_distribution<double> uy(-half_height, half_height);

    constexpr std::size_t kMaxAttempts = 1'000'000;
    std::vector<Point> relays;
    relays.reserve(k_r);
    for (std::size_t i = 0; i < k_r; ++i) {
        std::size_t attempts = 0;
        for (;;) {
            if (++attempts > kMaxAttempts)
                throw std::runtime_error("place_relays: rejection sampling did not converge");
            const Point p{ux(rng), uy(rng)};
            if (distance(p, dest) < r && distance(p, source) < r) {
                relays.push_back(p);
                break;
            }
        }
    }
    return Topology(source, dest, std::move(relays));
}

void write_topology(std::ostream& os, const Topology& topo)
{
    auto line = [&os](const char* role, NodeId id, const Point& p) {
        std::ostringstream ss;
        ss.precision(17);
        ss << role << ' ' << id.value << ' ' << p.x << ' ' << p.y << '\n';
        os << ss.str();
    };
    os << "# relaysim topology: role id x_m y_m\n";
    line("source", topo.source_id(), topo.source());
    for (std::size_t i = 0; i < topo.relay_count(); ++i)
        line("relay", topo.relay_id(i), topo.relays()[i]);
    line("destination", topo.dest_id(), topo.dest());
}

Topology read_topology(std::istream& is)
{
    bool have_source = false;
    bool have_dest = false;
    Point source;
    Point dest;
    std::vector<std::pair<std::uint32_t, Point>> relays;
    std::uint32_t dest_id = 0;

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#')
            continue;
        std::istringstream ls(line);
        std::string role;
        std::uint32_t id = 0;
        Point p;
        if (!(ls >> role >> id >> p.x >> p.y))
            throw std::invalid_argument("topology line " + std::to_string(lineno) + ": malformed");
        if (role == "source") {
            if (id != 0)
                throw std::invalid_argument("topology: source must have id 0");
            source = p;
            have_source = true;
        } else if (role == "destination") {
            dest = p;
            dest_id = id;
            have_dest = true;
        } else if (role == "relay") {
            relays.emplace_back(id, p);
        } else {
            throw std::invalid_argument("topology line " + std::to_string(lineno) +
                                        ": unknown role '" + role + "'");
        }
    }
    if (!have_source || !have_dest)
        throw std::invalid_argument("topology: missing source or destination");
    std::vector<Point> ordered(relays.size());
    std::vector<bool> seen(relays.size(), false);
    for (const auto& [id, p] : relays) {
        if (id < 1 || id > relays.size() || seen[id - 1])
            throw std::invalid_argument("topology: relay ids must be 1..K_r without gaps");
        seen[id - 1] = true;
        ordered[id - 1] = p;
    }
    if (dest_id != relays.size() + 1)
        throw std::invalid_argument("topology: destination id must be K_r + 1");
    return Topology(source, dest, std::move(ordered));
}

} // namespace relaysim
