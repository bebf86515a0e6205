#ifndef RELAYSIM_PHY_HPP_
#define RELAYSIM_PHY_HPP_

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "relaysim/rng.hpp"
#include "relaysim/topology.hpp"

namespace relaysim {

using Complex = std::complex<double>;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

struct NoiseParams {
    double n0 = 0.0;         ///< total complex noise power
    double tx_energy = 0.0;  ///< energy per BPSK symbol

    void validate() const;
};

/// Fading coefficient of one (transmitter, receiver, slot) link.
struct LinkGain {
    Complex coefficient;
    NodeId transmitter;
    NodeId receiver;
    std::uint32_t slot = 0;
};

/// Soft information about a subset of mother-codeword bits.
/// positions is strictly increasing; llrs[i] belongs to positions[i].
struct SoftObservation {
    std::vector<std::uint32_t> positions;
    std::vector<double> llrs;
};

/// h = sqrt(mean_gain / 2) (g1 + j g2) with g1, g2 iid N(0, 1).
Complex sample_fading(Rng& rng, double mean_gain);

/// BPSK over a flat-faded AWGN channel: bit 0 -> +sqrt(E), bit 1 -> -sqrt(E),
/// y = h s + n with n ~ CN(0, N0).
std::vector<Complex> transmit(std::span<const std::uint8_t> bits, Complex h,
                              const NoiseParams& noise, Rng& rng);

/// Coherent LLRs, 4 sqrt(E) Re(conj(h) y) / N0. Positive favours bit 0.
std::vector<double> demodulate(std::span<const Complex> received, Complex h,
                               const NoiseParams& noise);

SoftObservation demodulate(std::span<const Complex> received, Complex h,
                           const NoiseParams& noise, std::vector<std::uint32_t> positions);

/// transmit() followed by demodulate() for the codeword bits at `positions`,
/// drawing only the in-phase noise projection Re(conj(h) n) ~ N(0, |h|^2 N0 / 2)
/// that the LLR depends on. Same output distribution, half the Gaussian draws.
SoftObservation observe(std::span<const std::uint8_t> codeword,
                        std::span<const std::uint32_t> positions, Complex h,
                        const NoiseParams& noise, Rng& rng);

/// Symbol energy E with path_gain(dist) E / N0 equal to the target SNR.
double calibrate_tx_energy(double target_avg_snr_db, double dist,
                           const PathLossParams& params, double n0);

} // namespace relaysim

#endif // RELAYSIM_PHY_HPP_
