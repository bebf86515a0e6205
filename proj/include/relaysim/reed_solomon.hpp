#ifndef RELAYSIM_REED_SOLOMON_HPP_
#define RELAYSIM_REED_SOLOMON_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace relaysim {

/// GF(2^8) arithmetic modulo the primitive polynomial x^8+x^4+x^3+x^2+1.
class Gf256 {
public:
    static constexpr unsigned kPrimitive = 0x11D;

    static std::uint8_t add(std::uint8_t a, std::uint8_t b) { return a ^ b; }
    static std::uint8_t mul(std::uint8_t a, std::uint8_t b);
    static std::uint8_t div(std::uint8_t a, std::uint8_t b);
    static std::uint8_t inv(std::uint8_t a);
    /// alpha^e for any integer exponent (alpha = 2).
    static std::uint8_t exp(int e);
    /// Discrete log base alpha; undefined for 0.
    static int log(std::uint8_t a);

private:
    struct Tables {
        std::array<std::uint8_t, 512> exp{};
        std::array<int, 256> log{};
        Tables();
    };
    static const Tables& tables();
};

/// Systematic Reed-Solomon code over GF(2^8) with generator roots
/// alpha^0 .. alpha^(n-k-1). Codeword byte 0 is the highest-degree
/// coefficient; the payload occupies bytes [0, k).
class ReedSolomon {
public:
    ReedSolomon(std::size_t n = 255, std::size_t k = 239);

    std::size_t n() const { return n_; }
    std::size_t k() const { return k_; }
    /// Correctable symbol errors, (n - k) / 2.
    std::size_t t() const { return (n_ - k_) / 2; }

    std::vector<std::uint8_t> encode(std::span<const std::uint8_t> payload) const;

    struct Decoded {
        std::vector<std::uint8_t> codeword;
        std::size_t corrected = 0;

        std::span<const std::uint8_t> payload(std::size_t k) const
        {
            return std::span<const std::uint8_t>(codeword).first(k);
        }
    };

    /// Berlekamp-Massey decoding. Returns std::nullopt (decoder failure) when
    /// the error locator is inconsistent with the received word; more than t
    /// errors may also be miscorrected into a different codeword.
    std::optional<Decoded> decode(std::span<const std::uint8_t> word) const;

    std::vector<std::uint8_t> syndromes(std::span<const std::uint8_t> word) const;

private:
    std::size_t n_;
    std::size_t k_;
    std::vector<std::uint8_t> generator_;  // ascending powers, monic
};

} // namespace relaysim

#endif // RELAYSIM_REED_SOLOMON_HPP_
