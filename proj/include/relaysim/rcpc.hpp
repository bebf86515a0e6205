#ifndef RELAYSIM_RCPC_HPP_
#define RELAYSIM_RCPC_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace relaysim {

/// Puncturing mask over one period: rows are generator indices, columns are
/// positions within the period. Stored row-major.
class PunctureMask {
public:
    PunctureMask(std::size_t rows, std::size_t period);
    PunctureMask(std::size_t rows, std::size_t period, std::vector<std::uint8_t> bits);

    std::size_t rows() const { return rows_; }
    std::size_t period() const { return period_; }
    bool at(std::size_t row, std::size_t col) const { return bits_[row * period_ + col] != 0; }
    void set(std::size_t row, std::size_t col, bool v = true)
    {
        bits_[row * period_ + col] = v ? 1 : 0;
    }
    std::size_t popcount() const;
    bool is_subset_of(const PunctureMask& other) const;

    friend bool operator==(const PunctureMask&, const PunctureMask&) = default;

private:
    std::size_t rows_;
    std::size_t period_;
    std::vector<std::uint8_t> bits_;
};

/// Rate-compatible family of punctured codes derived from one mother code.
/// Rate index j is 1-based: j = 1 is the highest rate, j = size() the mother
/// code.
class RcpcFamily {
public:
    /// Validates period, nesting (mask j subset of mask j + 1), strictly
    /// increasing popcounts and an all-ones final mask. Throws
    /// std::invalid_argument otherwise.
    RcpcFamily(std::size_t period, std::vector<PunctureMask> masks);

    /// Period-8 family of rates {4/5, 2/3, 4/7, 1/2, 1/3} for a three-output
    /// mother code. The rate-4/5 mask keeps row 0 and row 1 columns 1 and 5;
    /// denser rates add bits row by row, visiting columns in the order
    /// 0 4 2 6 1 5 3 7.
    static RcpcFamily standard();

    std::size_t period() const { return period_; }
    std::size_t size() const { return masks_.size(); }
    std::size_t rows() const { return masks_.front().rows(); }
    const PunctureMask& mask(std::size_t rate_index) const;
    const std::vector<PunctureMask>& masks() const { return masks_; }

    /// Nominal rate P / popcount of the rate-j mask.
    double rate(std::size_t rate_index) const;

    /// Mother-codeword indices transmitted by the rate-j code for k
    /// information bits (k + memory trellis steps), strictly increasing.
    std::vector<std::uint32_t> positions(std::size_t rate_index, std::size_t k,
                                         std::size_t memory) const;

    /// positions(j) minus positions(j - 1): the parity released in round j.
    /// Round 1 releases positions(1).
    std::vector<std::uint32_t> incremental_positions(std::size_t rate_index, std::size_t k,
                                                     std::size_t memory) const;

    friend bool operator==(const RcpcFamily&, const RcpcFamily&) = default;

private:
    void check_index(std::size_t rate_index) const;

    std::size_t period_;
    std::vector<PunctureMask> masks_;
};

/// Text format: an optional "period P" line, then one block per rate
/// separated by blank lines. A block is an optional "rate P/N" header
/// followed by one row of 0/1 characters per generator. '#' starts a comment.
RcpcFamily read_rcpc_family(std::istream& is);
void write_rcpc_family(std::ostream& os, const RcpcFamily& family);

} // namespace relaysim

#endif // RELAYSIM_RCPC_HPP_
