#include "relaysim/phy.hpp"

#include <cmath>
#include <stdexcept>

namespace relaysim {

void NoiseParams::validate() const
{
    if (!(n0 > 0.0) || !std::isfinite(n0))
        throw std::invalid_argument("noise power N0 must be positive");
    if (!(tx_energy > 0.0) || !std::isfinite(tx_energy))
        throw std::invalid_argument("transmit energy must be positive");
}

Complex sample_fading(Rng& rng, double mean_gain)
{
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double scale = std::sqrt(mean_gain / 2.0);
    const double re = gauss(rng);
    const double im = gauss(rng);
    return {scale * re, scale * im};
}

std::vector<Complex> transmit(std::span<const std::uint8_t> bits, Complex h,
                              const NoiseParams& noise, Rng& rng)
{
    std::normal_distribution<double> gauss(0.0, std::sqrt(noise.n0 / 2.0));
    const double amplitude = std::sqrt(noise.tx_energy);
    std::vector<Complex> out;
    out.reserve(bits.size());
    for (const auto bit : bits) {
        const double s = bit ? -amplitude : amplitude;
        const double nr = gauss(rng);
        const double ni = gauss(rng);
        out.push_back(h * s + Complex{nr, ni});
    }
    return out;
}

std::vector<double> demodulate(std::span<const Complex> received, Complex h,
                               const NoiseParams& noise)
{
    const double scale = 4.0 * std::sqrt(noise.tx_energy) / noise.n0;
    const Complex hc = std::conj(h);
    std::vector<double> llrs;
    llrs.reserve(received.size());
    for (const auto& y : received)
        llrs.push_back(scale * (hc * y).real());
    return llrs;
}

SoftObservation demodulate(std::span<const Complex> received, Complex h,
                           const NoiseParams& noise, std::vector<std::uint32_t> positions)
{
    if (positions.size() != received.size())
        throw std::invalid_argument("demodulate: positions/received length mismatch");
    return SoftObservation{std::move(positions), demodulate(received, h, noise)};
}

SoftObservation observe(std::span<const std::uint8_t> codeword,
                        std::span<const std::uint32_t> positions, Complex h,
                        const NoiseParams& noise, Rng& rng)
{
    SoftObservation obs;
    obs.positions.assign(positions.begin(), positions.end());
    const double gain = std::norm(h);
    if (gain == 0.0) {
        obs.llrs.assign(positions.size(), 0.0);
        return obs;
    }
    const double scale = 4.0 * std::sqrt(noise.tx_energy) / noise.n0;
    const double signal = scale * gain * std::sqrt(noise.tx_energy);
    std::normal_distribution<double> gauss(0.0, scale * std::sqrt(gain * noise.n0 / 2.0));
    obs.llrs.reserve(positions.size());
    for (const auto p : positions) {
        const double mean = codeword[p] ? -signal : signal;
        obs.llrs.push_back(mean + gauss(rng));
    }
    return obs;
}

double calibrate_tx_energy(double target_avg_snr_db, double dist,
                           const PathLossParams& params, double n0)
{
    if (!std::isfinite(target_avg_snr_db))
        throw std::invalid_argument("calibrate_tx_energy: target SNR must be finite");
    return db_to_linear(target_avg_snr_db) * n0 / path_gain(dist, params);
}

} // namespace relaysim
