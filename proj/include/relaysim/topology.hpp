#ifndef RELAYSIM_TOPOLOGY_HPP_
#define RELAYSIM_TOPOLOGY_HPP_

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "relaysim/rng.hpp"

namespace relaysim {

/// Speed of light in vacuum, m/s.
inline constexpr double kSpeedOfLight = 2.99792458e8;

/// Node identifier. The source is 0, relays are 1..K_r and the destination
/// is K_r + 1.
struct NodeId {
    std::uint32_t value = 0;

    constexpr auto operator<=>(const NodeId&) const = default;
};

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

double distance(const Point& a, const Point& b);

/// Large-scale propagation parameters of the log-distance path-loss model.
struct PathLossParams {
    double carrier_wavelength_m = kSpeedOfLight / 2.4e9;
    double reference_distance_m = 1.0;
    double exponent = 3.0;
    double source_dest_distance_m = 100.0;

    static PathLossParams from_carrier_frequency(double carrier_hz,
                                                 double reference_distance_m,
                                                 double exponent,
                                                 double source_dest_distance_m);

    /// Throws std::invalid_argument when a field is out of range.
    void validate() const;
};

/// Mean linear power gain (lambda / (4 pi d0))^2 (d / d0)^-mu.
/// Throws std::domain_error for d <= 0.
double path_gain(double d, const PathLossParams& params);

class Topology {
public:
    Topology(Point source, Point dest, std::vector<Point> relays);

    const Point& source() const { return source_; }
    const Point& dest() const { return dest_; }
    const std::vector<Point>& relays() const { return relays_; }
    std::size_t relay_count() const { return relays_.size(); }

    NodeId source_id() const { return NodeId{0}; }
    NodeId dest_id() const { return NodeId{static_cast<std::uint32_t>(relays_.size() + 1)}; }
    NodeId relay_id(std::size_t relay_index) const
    {
        return NodeId{static_cast<std::uint32_t>(relay_index + 1)};
    }
    bool is_relay(NodeId id) const { return id.value >= 1 && id.value <= relays_.size(); }
    std::size_t relay_index(NodeId id) const { return id.value - 1; }
    std::size_t node_count() const { return relays_.size() + 2; }

    const Point& position(NodeId id) const;
    double distance_between(NodeId a, NodeId b) const;

    friend bool operator==(const Topology&, const Topology&) = default;

private:
    Point source_;
    Point dest_;
    std::vector<Point> relays_;
};

/// Places k_r relays uniformly over the lens {p : |p - dest| < d_tr and
/// |p - source| < d_tr}, with the source at the origin and the destination at
/// (d_tr, 0). Rejection sampling from the lens bounding box; more than 10^6
/// rejections for a single relay throws std::runtime_error.
Topology place_relays(Rng& rng, std::size_t k_r, const PathLossParams& params);

/// Plain-text record, one node per line: "<role> <id> <x> <y>" with role one
/// of source, relay, destination. Lines starting with '#' are comments.
void write_topology(std::ostream& os, const Topology& topo);
Topology read_topology(std::istream& is);

} // namespace relaysim

#endif // RELAYSIM_TOPOLOGY_HPP_
