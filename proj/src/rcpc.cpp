#include "relaysim/rcpc.hpp"

#include <algorithm>
#include <array>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace relaysim {

PunctureMask::PunctureMask(std::size_t rows, std::size_t period)
    : rows_(rows), period_(period), bits_(rows * period, 0)
{
}

PunctureMask::PunctureMask(std::size_t rows, std::size_t period, std::vector<std::uint8_t> bits)
    : rows_(rows), period_(period), bits_(std::move(bits))
{
    if (bits_.size() != rows_ * period_)
        throw std::invalid_argument("PunctureMask: bit count does not match rows x period");
    for (auto& b : bits_)
        b = b ? 1 : 0;
}

std::size_t PunctureMask::popcount() const
{
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

bool PunctureMask::is_subset_of(const PunctureMask& other) const
{
    if (rows_ != other.rows_ || period_ != other.period_)
        return false;
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        if (bits_[i] && !other.bits_[i])
            return false;
    }
    return true;
}

RcpcFamily::RcpcFamily(std::size_t period, std::vector<PunctureMask> masks)
    : period_(period), masks_(std::move(masks))
{
    if (period_ == 0)
        throw std::invalid_argument("RCPC family: period must be positive");
    if (masks_.empty())
        throw std::invalid_argument("RCPC family: no masks");
    const std::size_t rows = masks_.front().rows();
    for (std::size_t j = 0; j < masks_.size(); ++j) {
        const auto& m = masks_[j];
        if (m.rows() != rows || m.period() != period_)
            throw std::invalid_argument("RCPC family: mask " + std::to_string(j + 1) +
                                        " has the wrong shape");
        if (m.popcount() < period_)
            throw std::invalid_argument("RCPC family: mask " + std::to_string(j + 1) +
                                        " has rate above 1");
        if (j > 0) {
            if (!masks_[j - 1].is_subset_of(m))
                throw std::invalid_argument("RCPC family: mask " + std::to_string(j) +
                                            " is not contained in mask " + std::to_string(j + 1));
            if (masks_[j - 1].popcount() >= m.popcount())
                throw std::invalid_argument("RCPC family: rates must be strictly decreasing");
        }
    }
    if (masks_.back().popcount() != rows * period_)
        throw std::invalid_argument("RCPC family: last mask must be the unpunctured mother code");
}

RcpcFamily RcpcFamily::standard()
{
    constexpr std::size_t kRows = 3;
    constexpr std::size_t kPeriod = 8;
    constexpr std::array<std::size_t, kPeriod> kColumnOrder{0, 4, 2, 6, 1, 5, 3, 7};
    constexpr std::array<std::size_t, 4> kTargets{12, 14, 16, 24};

    PunctureMask start(kRows, kPeriod);
    for (std::size_t c = 0; c < kPeriod; ++c)
        start.set(0, c);
    start.set(1, 1);
    start.set(1, 5);

    std::vector<PunctureMask> masks{start};
    for (const auto target : kTargets) {
        PunctureMask m = masks.back();
        std::size_t count = m.popcount();
        for (std::size_t r = 0; r < kRows && count < target; ++r) {
            for (const auto c : kColumnOrder) {
                if (count == target)
                    break;
                if (!m.at(r, c)) {
                    m.set(r, c);
                    ++count;
                }
            }
        }
        masks.push_back(m);
    }
    return RcpcFamily(kPeriod, std::move(masks));
}

void RcpcFamily::check_index(std::size_t rate_index) const
{
    if (rate_index < 1 || rate_index > masks_.size())
        throw std::out_of_range("RCPC rate index " + std::to_string(rate_index) +
                                " outside 1.." + std::to_string(masks_.size()));
}

const PunctureMask& RcpcFamily::mask(std::size_t rate_index) const
{
    check_index(rate_index);
    return masks_[rate_index - 1];
}

double RcpcFamily::rate(std::size_t rate_index) const
{
    return static_cast<double>(period_) / static_cast<double>(mask(rate_index).popcount());
}

std::vector<std::uint32_t> RcpcFamily::positions(std::size_t rate_index, std::size_t k,
                                                 std::size_t memory) const
{
    const PunctureMask& m = mask(rate_index);
    const std::size_t n = m.rows();
    const std::size_t steps = k + memory;
    std::vector<std::uint32_t> out;
    out.reserve(steps * m.popcount() / period_ + n);
    for (std::size_t t = 0; t < steps; ++t) {
        const std::size_t phase = t % period_;
        for (std::size_t r = 0; r < n; ++r) {
            if (m.at(r, phase))
                out.push_back(static_cast<std::uint32_t>(t * n + r));
        }
    }
    return out;
}

std::vector<std::uint32_t> RcpcFamily::incremental_positions(std::size_t rate_index,
                                                             std::size_t k,
                                                             std::size_t memory) const
{
    check_index(rate_index);
    if (rate_index == 1)
        return positions(1, k, memory);
    const auto now = positions(rate_index, k, memory);
    const auto before = positions(rate_index - 1, k, memory);
    std::vector<std::uint32_t> out;
    out.reserve(now.size() - before.size());
    std::set_difference(now.begin(), now.end(), before.begin(), before.end(),
                        std::back_inserter(out));
    return out;
}

namespace {

std::string strip(const std::string& s)
{
    auto text = s.substr(0, s.find('#'));
    const auto b = text.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = text.find_last_not_of(" \t\r");
    return text.substr(b, e - b + 1);
}

} // namespace

RcpcFamily read_rcpc_family(std::istream& is)
{
    std::size_t period = 0;
    std::vector<std::vector<std::string>> blocks;
    std::vector<std::string> current;
    std::vector<std::string> headers;
    std::string pending_header;

    auto flush = [&] {
        if (!current.empty()) {
            blocks.push_back(current);
            headers.push_back(pending_header);
        }
        current.clear();
        pending_header.clear();
    };

    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(is, raw)) {
        ++lineno;
        const std::string line = strip(raw);
        if (line.empty()) {
            flush();
            continue;
        }
        if (line.rfind("period", 0) == 0) {
            std::istringstream ls(line.substr(6));
            if (!(ls >> period) || period == 0)
                throw std::invalid_argument("RCPC file line " + std::to_string(lineno) +
                                            ": bad period");
            continue;
        }
        if (line.rfind("rate", 0) == 0) {
            flush();
            pending_header = strip(line.substr(4));
            continue;
        }
        if (line.find_first_not_of("01") != std::string::npos)
            throw std::invalid_argument("RCPC file line " + std::to_string(lineno) +
                                        ": mask rows may only contain 0 and 1");
        current.push_back(line);
    }
    flush();

    if (blocks.empty())
        throw std::invalid_argument("RCPC file: no masks");
    if (period == 0)
        period = blocks.front().front().size();

    std::vector<PunctureMask> masks;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        const auto& rows = blocks[b];
        std::vector<std::uint8_t> bits;
        for (const auto& row : rows) {
            if (row.size() != period)
                throw std::invalid_argument("RCPC file: mask " + std::to_string(b + 1) +
                                            " row length differs from the period");
            for (const char c : row)
                bits.push_back(c == '1' ? 1 : 0);
        }
        PunctureMask m(rows.size(), period, std::move(bits));
        if (!headers[b].empty()) {
            const auto slash = headers[b].find('/');
            std::size_t num = 0;
            std::size_t den = 0;
            try {
                num = std::stoul(headers[b].substr(0, slash));
                den = std::stoul(headers[b].substr(slash + 1));
            } catch (const std::exception&) {
                throw std::invalid_argument("RCPC file: bad rate header '" + headers[b] + "'");
            }
            if (slash == std::string::npos || num * m.popcount() != den * period)
                throw std::invalid_argument("RCPC file: rate header '" + headers[b] +
                                            "' disagrees with the mask");
        }
        masks.push_back(std::move(m));
    }
    return RcpcFamily(period, std::move(masks));
}

void write_rcpc_family(std::ostream& os, const RcpcFamily& family)
{
    os << "# rows: generator index, columns: position within the period\n";
    os << "period " << family.period() << "\n";
    for (const auto& m : family.masks()) {
        os << "\nrate " << family.period() << "/" << m.popcount() << "\n";
        for (std::size_t r = 0; r < m.rows(); ++r) {
            for (std::size_t c = 0; c < m.period(); ++c)
                os << (m.at(r, c) ? '1' : '0');
            os << "\n";
        }
    }
}

} // namespace relaysim
