#include "relaysim/harq.hpp"

#include <algorithm>
#include <stdexcept>

namespace relaysim {

std::vector<std::uint8_t> bytes_to_bits(std::span<const std::uint8_t> bytes)
{
    std::vector<std::uint8_t> bits;
    bits.reserve(bytes.size() * 8);
    for (const auto byte : bytes) {
        for (int b = 7; b >= 0; --b)
            bits.push_back(static_cast<std::uint8_t>((byte >> b) & 1u));
    }
    return bits;
}

std::vector<std::uint8_t> bits_to_bytes(std::span<const std::uint8_t> bits)
{
    if (bits.size() % 8 != 0)
        throw std::invalid_argument("bits_to_bytes: bit count must be a multiple of 8");
    std::vector<std::uint8_t> bytes(bits.size() / 8, 0);
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] & 1u)
            bytes[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
    }
    return bytes;
}

CodingChain::CodingChain(ConvCode conv, RcpcFamily family, ReedSolomon rs)
    : conv_(std::move(conv)), family_(std::move(family)), rs_(std::move(rs)),
      info_bits_(rs_.n() * 8)
{
    if (family_.rows() != conv_.outputs())
        throw std::invalid_argument("CodingChain: puncturing rows must match the code outputs");
    if (info_bits_ % family_.period() != 0)
        throw std::invalid_argument("CodingChain: information length must be a multiple of the "
                                    "puncturing period");
    for (std::size_t j = 1; j <= family_.size(); ++j) {
        positions_.push_back(family_.positions(j, info_bits_, conv_.memory()));
        released_.push_back(family_.incremental_positions(j, info_bits_, conv_.memory()));
    }
}

CodingChain CodingChain::standard()
{
    return CodingChain(ConvCode::standard(), RcpcFamily::standard(), ReedSolomon(255, 239));
}

const std::vector<std::uint32_t>& CodingChain::positions(std::size_t rate_index) const
{
    family_.mask(rate_index);
    return positions_[rate_index - 1];
}

const std::vector<std::uint32_t>& CodingChain::released(std::size_t rate_index) const
{
    family_.mask(rate_index);
    return released_[rate_index - 1];
}

std::vector<std::uint8_t> CodingChain::encode_payload(std::span<const std::uint8_t> payload) const
{
    return encode_rs_codeword(rs_.encode(payload));
}

std::vector<std::uint8_t> CodingChain::encode_rs_codeword(std::span<const std::uint8_t> rs_word) const
{
    if (rs_word.size() != rs_.n())
        throw std::invalid_argument("CodingChain: RS codeword has the wrong length");
    return conv_.encode(bytes_to_bits(rs_word));
}

SoftBuffer::SoftBuffer(NodeId owner, std::size_t length)
    : owner_(owner), llr_acc_(length, 0.0), received_(length, 0)
{
}

std::size_t SoftBuffer::received_count() const
{
    return static_cast<std::size_t>(std::count(received_.begin(), received_.end(), std::uint8_t{1}));
}

void SoftBuffer::absorb(const SoftObservation& obs)
{
    if (obs.positions.size() != obs.llrs.size())
        throw std::invalid_argument("SoftBuffer::absorb: positions and llrs differ in length");
    for (std::size_t i = 0; i < obs.positions.size(); ++i) {
        if (obs.positions[i] >= llr_acc_.size())
            throw std::invalid_argument("SoftBuffer::absorb: position out of range");
        if (i > 0 && obs.positions[i] <= obs.positions[i - 1])
            throw std::invalid_argument("SoftBuffer::absorb: positions must be strictly increasing");
    }
    for (std::size_t i = 0; i < obs.positions.size(); ++i) {
        llr_acc_[obs.positions[i]] += obs.llrs[i];
        received_[obs.positions[i]] = 1;
    }
    if (!obs.positions.empty())
        ++version_;
}

void SoftBuffer::clear()
{
    std::fill(llr_acc_.begin(), llr_acc_.end(), 0.0);
    std::fill(received_.begin(), received_.end(), std::uint8_t{0});
    ++version_;
}

DecodeOutcome attempt_decode(const SoftBuffer& buffer, const CodingChain& chain,
                             std::optional<std::span<const std::uint8_t>> truth)
{
    if (buffer.length() != chain.codeword_length())
        throw std::invalid_argument("attempt_decode: buffer length does not match the code");
    DecodeOutcome out;
    const auto llrs = buffer.llrs();
    if (std::all_of(llrs.begin(), llrs.end(), [](double l) { return l == 0.0; }))
        return out;
    const auto info = chain.conv().decode(llrs);
    const auto bytes = bits_to_bytes(info);
    auto decoded = chain.rs().decode(bytes);
    if (!decoded)
        return out;
    out.success = true;
    const auto payload = decoded->payload(chain.payload_bytes());
    out.payload.emplace(payload.begin(), payload.end());
    if (truth)
        out.undetected_error = !std::equal(payload.begin(), payload.end(), truth->begin(), truth->end());
    out.rs_codeword = std::move(decoded->codeword);
    return out;
}

} // namespace relaysim
