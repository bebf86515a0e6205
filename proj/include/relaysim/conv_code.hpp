#ifndef RELAYSIM_CONV_CODE_HPP_
#define RELAYSIM_CONV_CODE_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace relaysim {

/// Feedforward convolutional code with zero-tail termination.
///
/// Generators are tap masks of memory + 1 bits; the most significant bit taps
/// the current input. For every input step the encoder emits one bit per
/// generator, in generator order.
class ConvCode {
public:
    ConvCode(unsigned memory, std::vector<std::uint32_t> generators);

    /// Rate-1/3, memory-6 code with generators 145, 171, 133 (octal).
    static ConvCode standard();

    unsigned memory() const { return memory_; }
    unsigned constraint_length() const { return memory_ + 1; }
    std::size_t outputs() const { return generators_.size(); }
    std::size_t state_count() const { return std::size_t{1} << memory_; }
    const std::vector<std::uint32_t>& generators() const { return generators_; }

    /// Number of trellis steps for k information bits (k + memory).
    std::size_t steps(std::size_t k) const { return k + memory_; }
    std::size_t codeword_length(std::size_t k) const { return outputs() * steps(k); }

    /// Output bits for shift-register contents `reg` (bit g = generator g).
    std::uint32_t output_pattern(std::uint32_t reg) const { return patterns_[reg]; }

    std::vector<std::uint8_t> encode(std::span<const std::uint8_t> info) const;

    /// Soft-decision Viterbi decoding of a zero-tailed codeword.
    ///
    /// Maximises sum_i llr_i (1 - 2 c_i) over all codewords; an LLR of 0 is an
    /// erasure. Among equal-metric paths the lexicographically smallest
    /// information sequence wins, so the output is reproducible bit for bit.
    /// `llrs` must have codeword_length(k) finite entries.
    std::vector<std::uint8_t> decode(std::span<const double> llrs) const;

private:
    unsigned memory_;
    std::vector<std::uint32_t> generators_;
    std::vector<std::uint32_t> patterns_;
    bool antipodal_ = false;
};

} // namespace relaysim

#endif // RELAYSIM_CONV_CODE_HPP_
