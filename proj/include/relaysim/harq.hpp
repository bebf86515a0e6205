#ifndef RELAYSIM_HARQ_HPP_
#define RELAYSIM_HARQ_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "relaysim/conv_code.hpp"
#include "relaysim/phy.hpp"
#include "relaysim/rcpc.hpp"
#include "relaysim/reed_solomon.hpp"
#include "relaysim/topology.hpp"

namespace relaysim {

/// Bytes to bits, most significant bit first.
std::vector<std::uint8_t> bytes_to_bits(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> bits_to_bytes(std::span<const std::uint8_t> bits);

/// Outer Reed-Solomon code, inner RCPC family and its mother code. One RS
/// codeword (n bytes) is the inner information block, so k = 8 n bits.
class CodingChain {
public:
    CodingChain(ConvCode conv, RcpcFamily family, ReedSolomon rs);

    /// RS(255, 239), the rate-1/3 memory-6 mother code and the standard family.
    static CodingChain standard();

    const ConvCode& conv() const { return conv_; }
    const RcpcFamily& family() const { return family_; }
    const ReedSolomon& rs() const { return rs_; }

    std::size_t info_bits() const { return info_bits_; }
    std::size_t payload_bytes() const { return rs_.k(); }
    std::size_t codeword_length() const { return conv_.codeword_length(info_bits_); }
    std::size_t rounds() const { return family_.size(); }

    /// Cumulative positions of rate j and the positions released in round j.
    const std::vector<std::uint32_t>& positions(std::size_t rate_index) const;
    const std::vector<std::uint32_t>& released(std::size_t rate_index) const;

    /// Payload -> RS codeword -> mother codeword bits.
    std::vector<std::uint8_t> encode_payload(std::span<const std::uint8_t> payload) const;
    /// RS codeword bytes -> mother codeword bits.
    std::vector<std::uint8_t> encode_rs_codeword(std::span<const std::uint8_t> rs_word) const;

private:
    ConvCode conv_;
    RcpcFamily family_;
    ReedSolomon rs_;
    std::size_t info_bits_;
    std::vector<std::vector<std::uint32_t>> positions_;
    std::vector<std::vector<std::uint32_t>> released_;
};

/// Per-receiver LLR accumulator over the mother codeword.
class SoftBuffer {
public:
    SoftBuffer(NodeId owner, std::size_t length);

    NodeId owner() const { return owner_; }
    std::size_t length() const { return llr_acc_.size(); }
    std::span<const double> llrs() const { return llr_acc_; }
    std::span<const std::uint8_t> received_mask() const { return received_; }
    std::size_t received_count() const;
    /// Incremented by every absorb() that adds at least one position.
    std::uint64_t version() const { return version_; }

    /// Adds obs.llrs[i] at obs.positions[i]. Throws std::invalid_argument
    /// when positions and llrs differ in length, positions are not strictly
    /// increasing, or a position is out of range.
    void absorb(const SoftObservation& obs);
    void clear();

private:
    NodeId owner_;
    std::vector<double> llr_acc_;
    std::vector<std::uint8_t> received_;
    std::uint64_t version_ = 0;
};

struct DecodeOutcome {
    bool success = false;
    /// Decoded payload when success.
    std::optional<std::vector<std::uint8_t>> payload;
    /// Corrected RS codeword when success, used for regenerative forwarding.
    std::optional<std::vector<std::uint8_t>> rs_codeword;
    /// success with a payload different from the true message.
    bool undetected_error = false;
};

/// Viterbi on the accumulated LLRs, then RS decoding. Success iff some LLR
/// is nonzero and the RS decoder does not report failure. `truth`, when given, is only used to set
/// undetected_error.
DecodeOutcome attempt_decode(const SoftBuffer& buffer, const CodingChain& chain,
                             std::optional<std::span<const std::uint8_t>> truth = std::nullopt);

} // namespace relaysim

#endif // RELAYSIM_HARQ_HPP_
