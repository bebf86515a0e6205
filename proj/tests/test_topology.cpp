#include "doctest.h"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "relaysim/topology.hpp"

using namespace relaysim;

namespace {

bool in_lens(double x, double y, double d)
{
    return std::hypot(x, y) < d && std::hypot(x - d, y) < d;
}

// Midpoint-rule integration of f over the lens, divided by its area.
template <class F>
double lens_average(F f, double d, int n = 1500)
{
    const double half_height = std::sqrt(d * d - d * d / 4.0);
    const double dx = d / n;
    const double dy = 2.0 * half_height / n;
    double sum = 0.0;
    double area = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = (i + 0.5) * dx;
        for (int j = 0; j < n; ++j) {
            const double y = -half_height + (j + 0.5) * dy;
            if (!in_lens(x, y, d))
                continue;
            sum += f(x, y);
            area += 1.0;
        }
    }
    return sum / area;
}

} // namespace

TEST_CASE("path gain at reference points")
{
    const auto p = PathLossParams::from_carrier_frequency(2.4e9, 1.0, 3.0, 100.0);
    const double lambda = kSpeedOfLight / 2.4e9;
    const double k = std::pow(lambda / (4.0 * std::acos(-1.0)), 2.0);

    CHECK(path_gain(1.0, p) == doctest::Approx(k).epsilon(1e-12));
    CHECK(path_gain(1.0, p) == doctest::Approx(9.8907e-5).epsilon(1e-3));
    CHECK(10.0 * std::log10(path_gain(50.0, p)) == doctest::Approx(-91.02).epsilon(1e-4));
    CHECK(10.0 * std::log10(path_gain(100.0, p)) == doctest::Approx(-100.05).epsilon(1e-4));
    CHECK(path_gain(80.0, p) / path_gain(40.0, p) == doctest::Approx(1.0 / 8.0));
}

TEST_CASE("path gain is decreasing")
{
    PathLossParams p;
    double prev = path_gain(0.01, p);
    for (double d = 0.02; d < 300.0; d *= 1.3) {
        const double g = path_gain(d, p);
        CHECK(g < prev);
        prev = g;
    }
}

TEST_CASE("path gain rejects non-positive distance")
{
    PathLossParams p;
    CHECK_THROWS_AS(path_gain(0.0, p), std::domain_error);
    CHECK_THROWS_AS(path_gain(-1.0, p), std::domain_error);
}

TEST_CASE("path loss parameter validation")
{
    PathLossParams p;
    CHECK_NOTHROW(p.validate());
    p.exponent = 1.5;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = PathLossParams{};
    p.reference_distance_m = 0.0;
    CHECK_THROWS(p.validate());
    p = PathLossParams{};
    p.source_dest_distance_m = -3.0;
    CHECK_THROWS(p.validate());
}

TEST_CASE("node ids")
{
    Topology t({0, 0}, {100, 0}, {{10, 0}, {50, 5}, {90, -1}});
    CHECK(t.source_id() == NodeId{0});
    CHECK(t.dest_id() == NodeId{4});
    CHECK(t.relay_id(0) == NodeId{1});
    CHECK(t.is_relay(NodeId{3}));
    CHECK_FALSE(t.is_relay(t.dest_id()));
    CHECK_FALSE(t.is_relay(t.source_id()));
    CHECK(t.node_count() == 5);
    CHECK(t.distance_between(t.relay_id(0), t.dest_id()) == doctest::Approx(90.0));
    CHECK_THROWS(t.position(NodeId{5}));
}

TEST_CASE("placement is deterministic under a seed")
{
    PathLossParams p;
    Rng a(42);
    Rng b(42);
    CHECK(place_relays(a, 20, p) == place_relays(b, 20, p));
    Rng c(43);
    Rng d(42);
    CHECK_FALSE(place_relays(c, 20, p) == place_relays(d, 20, p));
}

TEST_CASE("placement stays inside the lens")
{
    PathLossParams p;
    Rng rng(7);
    const auto t = place_relays(rng, 5000, p);
    CHECK(t.relay_count() == 5000);
    CHECK(t.source().x == 0.0);
    CHECK(t.dest().x == 100.0);
    for (const auto& r : t.relays()) {
        CHECK(distance(r, t.source()) < 100.0);
        CHECK(distance(r, t.dest()) < 100.0);
    }
}

TEST_CASE("placement needs at least one relay")
{
    PathLossParams p;
    Rng rng(1);
    CHECK_THROWS_AS(place_relays(rng, 0, p), std::invalid_argument);
}

TEST_CASE("mean relay-destination distance matches the lens integral")
{
    PathLossParams p;
    const double expected =
        lens_average([](double x, double y) { return std::hypot(x - 100.0, y); }, 100.0);
    Rng rng(2024);
    const auto t = place_relays(rng, 100000, p);
    double sum = 0.0;
    for (const auto& r : t.relays())
        sum += distance(r, t.dest());
    const double mean = sum / static_cast<double>(t.relay_count());
    CHECK(mean == doctest::Approx(expected).epsilon(0.01));
}

TEST_CASE("placement is uniform over a 4x4 grid of the bounding box")
{
    // Cell probability is its lens area share, estimated on a fine grid.
    const double d = 100.0;
    const double h = std::sqrt(d * d - d * d / 4.0);
    constexpr int cells = 4;
    constexpr int fine = 400;
    double area[cells][cells] = {};
    double total = 0.0;
    for (int i = 0; i < cells * fine; ++i) {
        const double x = (i + 0.5) * d / (cells * fine);
        for (int j = 0; j < cells * fine; ++j) {
            const double y = -h + (j + 0.5) * 2.0 * h / (cells * fine);
            if (in_lens(x, y, d)) {
                area[i / fine][j / fine] += 1.0;
                total += 1.0;
            }
        }
    }

    PathLossParams p;
    Rng rng(99);
    const std::size_t n = 200000;
    const auto t = place_relays(rng, n, p);
    double count[cells][cells] = {};
    for (const auto& r : t.relays()) {
        const int i = std::min(cells - 1, static_cast<int>(r.x / d * cells));
        const int j = std::min(cells - 1, static_cast<int>((r.y + h) / (2.0 * h) * cells));
        count[i][j] += 1.0;
    }
    double chi2 = 0.0;
    int dof = -1;
    for (int i = 0; i < cells; ++i)
        for (int j = 0; j < cells; ++j) {
            const double e = area[i][j] / total * static_cast<double>(n);
            if (e < 5.0) {
                CHECK(count[i][j] <= 20.0);
                continue;
            }
            chi2 += (count[i][j] - e) * (count[i][j] - e) / e;
            ++dof;
        }
    // 99.9% quantile of chi-square with 15 dof is 37.7.
    REQUIRE(dof <= 15);
    CHECK(chi2 < 37.7);
}

TEST_CASE("topology text round trip")
{
    PathLossParams p;
    Rng rng(5);
    const auto t = place_relays(rng, 20, p);
    std::stringstream ss;
    write_topology(ss, t);
    CHECK(read_topology(ss) == t);
}

TEST_CASE("topology parser accepts comments and any order")
{
    std::istringstream in("# hand made\n"
                          "relay 2 30 4\n"
                          "destination 3 100 0\n"
                          "\n"
                          "source 0 0 0\n"
                          "relay 1 50.5 -2\n");
    const auto t = read_topology(in);
    REQUIRE(t.relay_count() == 2);
    CHECK(t.relays()[0].x == 50.5);
    CHECK(t.relays()[1].y == 4.0);
    CHECK(t.dest().x == 100.0);
}

TEST_CASE("topology parser errors")
{
    auto parse = [](const char* text) {
        std::istringstream in(text);
        return read_topology(in);
    };
    CHECK_THROWS(parse("relay 1 3 4\ndestination 2 100 0\n"));
    CHECK_THROWS(parse("source 0 0 0\nrelay 1 3 4\n"));
    CHECK_THROWS(parse("source 0 0 0\nsatellite 1 3 4\ndestination 2 100 0\n"));
    CHECK_THROWS(parse("source 0 0 0\nrelay 1 3\ndestination 2 100 0\n"));
    CHECK_THROWS(parse("source 0 0 0\nrelay 1 3 4\nrelay 1 5 4\ndestination 3 100 0\n"));
    CHECK_THROWS(parse("source 0 0 0\nrelay 1 abc 4\ndestination 2 100 0\n"));
}
