#include "relaysim/conv_code.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace relaysim {

ConvCode::ConvCode(unsigned memory, std::vector<std::uint32_t> generators)
    : memory_(memory), generators_(std::move(generators))
{
    if (memory_ < 1 || memory_ > 6)
        throw std::invalid_argument("ConvCode: memory must be in 1..6");
    if (generators_.empty() || generators_.size() > 4)
        throw std::invalid_argument("ConvCode: need 1..4 generators");
    const std::uint32_t limit = 1u << (memory_ + 1);
    for (const auto g : generators_) {
        if (g == 0 || g >= limit)
            throw std::invalid_argument("ConvCode: generator does not fit the constraint length");
    }
    patterns_.resize(limit);
    for (std::uint32_t reg = 0; reg < limit; ++reg) {
        std::uint32_t pattern = 0;
        for (std::size_t g = 0; g < generators_.size(); ++g)
            pattern |= static_cast<std::uint32_t>(std::popcount(reg & generators_[g]) & 1) << g;
        patterns_[reg] = pattern;
    }
    // Every generator tapping both the newest and the oldest register cell
    // makes the branches of each butterfly complementary.
    const std::uint32_t all = (1u << generators_.size()) - 1;
    const std::uint32_t newest = 1u << memory_;
    antipodal_ = true;
    for (std::uint32_t reg = 0; reg < limit; ++reg)
        antipodal_ = antipodal_ && patterns_[reg ^ newest] == (patterns_[reg] ^ all) &&
                     patterns_[reg ^ 1u] == (patterns_[reg] ^ all);
}

ConvCode ConvCode::standard()
{
    return ConvCode(6, {0145, 0171, 0133});
}

std::vector<std::uint8_t> ConvCode::encode(std::span<const std::uint8_t> info) const
{
    const std::size_t n = outputs();
    std::vector<std::uint8_t> out;
    out.reserve(codeword_length(info.size()));
    std::uint32_t state = 0;
    const std::size_t total = steps(info.size());
    for (std::size_t t = 0; t < total; ++t) {
        const std::uint32_t bit = t < info.size() ? (info[t] & 1u) : 0u;
        const std::uint32_t reg = (bit << memory_) | state;
        const std::uint32_t pattern = patterns_[reg];
        for (std::size_t g = 0; g < n; ++g)
            out.push_back(static_cast<std::uint8_t>((pattern >> g) & 1u));
        state = reg >> 1;
    }
    return out;
}

namespace {

// Survivor histories ending in distinct states a and b at time t. Returns
// true when b's history is lexicographically smaller. Both histories are
// walked back until they merge; the input bits right after the merge decide.
bool second_is_smaller(const std::vector<std::uint64_t>& decisions, std::size_t t,
                       std::uint32_t a, std::uint32_t b, unsigned top, std::uint32_t half_mask)
{
    while (t > 0) {
        const std::uint64_t dec = decisions[t - 1];
        const std::uint32_t pa = ((a & half_mask) << 1) | static_cast<std::uint32_t>((dec >> a) & 1u);
        const std::uint32_t pb = ((b & half_mask) << 1) | static_cast<std::uint32_t>((dec >> b) & 1u);
        if (pa == pb)
            return (b >> top) < (a >> top);
        a = pa;
        b = pb;
        --t;
    }
    return false;
}

} // namespace

std::vector<std::uint8_t> ConvCode::decode(std::span<const double> llrs) const
{
    const std::size_t n = outputs();
    if (llrs.size() % n != 0 || llrs.size() / n < memory_)
        throw std::invalid_argument("viterbi: LLR length is not a zero-tailed codeword length");
    for (const double l : llrs) {
        if (!std::isfinite(l))
            throw std::invalid_argument("viterbi: LLRs must be finite");
    }
    const std::size_t total = llrs.size() / n;
    const std::size_t k = total - memory_;
    const std::uint32_t n_states = static_cast<std::uint32_t>(state_count());
    const std::uint32_t half = n_states / 2;
    const std::uint32_t half_mask = half - 1;
    const unsigned top = memory_ - 1;
    const std::uint32_t input_bit = 1u << memory_;
    constexpr double kNegInf = -std::numeric_limits<double>::infinity();

    std::vector<double> metric(n_states, kNegInf);
    std::vector<double> next(n_states);
    std::vector<std::uint64_t> decisions(total);
    std::vector<double> branch(std::size_t{1} << n);
    metric[0] = 0.0;

    // Branch pattern indices per butterfly: [a][0..3] = s0, s1, s0 | in, s1 | in.
    std::vector<std::uint32_t> fly(4 * half);
    for (std::uint32_t a = 0; a < half; ++a) {
        fly[4 * a + 0] = patterns_[a << 1];
        fly[4 * a + 1] = patterns_[(a << 1) | 1u];
        fly[4 * a + 2] = patterns_[input_bit | (a << 1)];
        fly[4 * a + 3] = patterns_[input_bit | (a << 1) | 1u];
    }

    for (std::size_t t = 0; t < total; ++t) {
        const double* l = llrs.data() + t * n;
        for (std::size_t pattern = 0; pattern < branch.size(); ++pattern) {
            double v = 0.0;
            for (std::size_t g = 0; g < n; ++g)
                v += ((pattern >> g) & 1u) ? -l[g] : l[g];
            branch[pattern] = v;
        }
        const double* bm = branch.data();
        const double* pm = metric.data();
        double* out = next.data();
        const std::uint32_t* f = fly.data();
        const std::uint32_t upper = t >= k ? 0 : half;  // tail steps force input 0
        std::uint64_t dec = 0;
        // Butterfly: states 2a and 2a+1 feed a (input 0) and a + half (input 1).
        // Equal finite metrics go to the lexicographically smaller history.
        for (std::uint32_t a = 0; a < half; ++a, f += 4) {
            const std::uint32_t s0 = a << 1;
            const double p0 = pm[s0];
            const double p1 = pm[s0 + 1];
            double m00;
            double m10;
            double m01;
            double m11;
            if (antipodal_) {
                // The four branches carry +b, -b, -b, +b exactly.
                const double b = bm[f[0]];
                m00 = p0 + b;
                m10 = p1 - b;
                m01 = p0 - b;
                m11 = p1 + b;
            } else {
                m00 = p0 + bm[f[0]];
                m10 = p1 + bm[f[1]];
                m01 = p0 + bm[f[2]];
                m11 = p1 + bm[f[3]];
            }

            bool lo = m10 > m00;
            if (m10 == m00 && m00 != kNegInf) [[unlikely]]
                lo = second_is_smaller(decisions, t, s0, s0 + 1, top, half_mask);
            out[a] = std::max(m00, m10);
            dec |= static_cast<std::uint64_t>(lo) << a;

            bool hi = m11 > m01;
            if (m11 == m01 && m01 != kNegInf) [[unlikely]]
                hi = second_is_smaller(decisions, t, s0, s0 + 1, top, half_mask);
            out[a + half] = upper ? std::max(m01, m11) : kNegInf;
            dec |= static_cast<std::uint64_t>(hi) << (a + half);
        }
        decisions[t] = dec;
        metric.swap(next);
    }

    std::vector<std::uint8_t> info(k);
    std::uint32_t state = 0;
    for (std::size_t t = total; t-- > 0;) {
        const std::uint32_t x = static_cast<std::uint32_t>((decisions[t] >> state) & 1u);
        const std::uint32_t bit = state >> top;
        if (t < k)
            info[t] = static_cast<std::uint8_t>(bit);
        state = ((state & half_mask) << 1) | x;
    }
    return info;
}

} // namespace relaysim
