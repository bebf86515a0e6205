#include "relaysim/reed_solomon.hpp"

#include <algorithm>
#include <stdexcept>

namespace relaysim {

Gf256::Tables::Tables()
{
    unsigned x = 1;
    for (int i = 0; i < 255; ++i) {
        exp[i] = static_cast<std::uint8_t>(x);
        log[x] = i;
        x <<= 1;
        if (x & 0x100)
            x ^= kPrimitive;
    }
    for (int i = 255; i < 512; ++i)
        exp[i] = exp[i - 255];
    log[0] = -1;
}

const Gf256::Tables& Gf256::tables()
{
    static const Tables t;
    return t;
}

std::uint8_t Gf256::mul(std::uint8_t a, std::uint8_t b)
{
    if (a == 0 || b == 0)
        return 0;
    const auto& t = tables();
    return t.exp[t.log[a] + t.log[b]];
}

std::uint8_t Gf256::div(std::uint8_t a, std::uint8_t b)
{
    if (b == 0)
        throw std::domain_error("GF(256) division by zero");
    if (a == 0)
        return 0;
    const auto& t = tables();
    return t.exp[t.log[a] + 255 - t.log[b]];
}

std::uint8_t Gf256::inv(std::uint8_t a)
{
    return div(1, a);
}

std::uint8_t Gf256::exp(int e)
{
    e %= 255;
    if (e < 0)
        e += 255;
    return tables().exp[e];
}

int Gf256::log(std::uint8_t a)
{
    return tables().log[a];
}

namespace {

// Polynomials in ascending powers.
std::uint8_t eval(std::span<const std::uint8_t> poly, std::uint8_t x)
{
    std::uint8_t acc = 0;
    for (std::size_t i = poly.size(); i-- > 0;)
        acc = Gf256::add(Gf256::mul(acc, x), poly[i]);
    return acc;
}

} // namespace

ReedSolomon::ReedSolomon(std::size_t n, std::size_t k) : n_(n), k_(k)
{
    if (n_ > 255 || k_ == 0 || k_ >= n_ || (n_ - k_) % 2 != 0)
        throw std::invalid_argument("ReedSolomon: need 0 < k < n <= 255 with n - k even");
    generator_ = {1};
    for (std::size_t i = 0; i < n_ - k_; ++i) {
        // multiply by (x + alpha^i)
        const std::uint8_t root = Gf256::exp(static_cast<int>(i));
        std::vector<std::uint8_t> next(generator_.size() + 1, 0);
        for (std::size_t j = 0; j < generator_.size(); ++j) {
            next[j + 1] ^= generator_[j];
            next[j] ^= Gf256::mul(generator_[j], root);
        }
        generator_ = std::move(next);
    }
}

std::vector<std::uint8_t> ReedSolomon::encode(std::span<const std::uint8_t> payload) const
{
    if (payload.size() != k_)
        throw std::invalid_argument("ReedSolomon::encode: payload must be k bytes");
    const std::size_t parity = n_ - k_;
    // Long division of payload(x) x^parity by the generator, highest degree first.
    std::vector<std::uint8_t> rem(parity, 0);
    for (const auto byte : payload) {
        const std::uint8_t feedback = Gf256::add(byte, rem[0]);
        for (std::size_t j = 0; j + 1 < parity; ++j)
            rem[j] = Gf256::add(rem[j + 1], Gf256::mul(feedback, generator_[parity - 1 - j]));
        rem[parity - 1] = Gf256::mul(feedback, generator_[0]);
    }
    std::vector<std::uint8_t> word(payload.begin(), payload.end());
    word.insert(word.end(), rem.begin(), rem.end());
    return word;
}

std::vector<std::uint8_t> ReedSolomon::syndromes(std::span<const std::uint8_t> word) const
{
    std::vector<std::uint8_t> s(n_ - k_);
    for (std::size_t i = 0; i < s.size(); ++i) {
        const std::uint8_t x = Gf256::exp(static_cast<int>(i));
        std::uint8_t acc = 0;
        for (const auto byte : word)
            acc = Gf256::add(Gf256::mul(acc, x), byte);
        s[i] = acc;
    }
    return s;
}

std::optional<ReedSolomon::Decoded> ReedSolomon::decode(std::span<const std::uint8_t> word) const
{
    if (word.size() != n_)
        throw std::invalid_argument("ReedSolomon::decode: word must be n bytes");
    Decoded out{std::vector<std::uint8_t>(word.begin(), word.end()), 0};
    const auto synd = syndromes(word);
    if (std::all_of(synd.begin(), synd.end(), [](std::uint8_t s) { return s == 0; }))
        return out;

    // Berlekamp-Massey.
    const std::size_t two_t = n_ - k_;
    std::vector<std::uint8_t> locator{1};
    std::vector<std::uint8_t> prev{1};
    std::size_t degree = 0;
    std::size_t shift = 1;
    std::uint8_t prev_discrepancy = 1;
    for (std::size_t r = 0; r < two_t; ++r) {
        std::uint8_t d = synd[r];
        for (std::size_t i = 1; i <= degree && i < locator.size(); ++i)
            d ^= Gf256::mul(locator[i], synd[r - i]);
        if (d == 0) {
            ++shift;
            continue;
        }
        const std::uint8_t coef = Gf256::div(d, prev_discrepancy);
        std::vector<std::uint8_t> updated = locator;
        if (updated.size() < prev.size() + shift)
            updated.resize(prev.size() + shift, 0);
        for (std::size_t i = 0; i < prev.size(); ++i)
            updated[i + shift] ^= Gf256::mul(coef, prev[i]);
        if (2 * degree <= r) {
            prev = locator;
            degree = r + 1 - degree;
            prev_discrepancy = d;
            shift = 1;
        } else {
            ++shift;
        }
        locator = std::move(updated);
    }
    while (locator.size() > 1 && locator.back() == 0)
        locator.pop_back();
    if (degree > t() || locator.size() - 1 != degree)
        return std::nullopt;

    // Error evaluator: synd(x) locator(x) mod x^{2t}.
    std::vector<std::uint8_t> evaluator(two_t, 0);
    for (std::size_t i = 0; i < locator.size(); ++i) {
        for (std::size_t j = 0; j + i < two_t; ++j)
            evaluator[i + j] ^= Gf256::mul(locator[i], synd[j]);
    }
    // Formal derivative: odd-power coefficients survive in characteristic 2.
    std::vector<std::uint8_t> derivative(locator.size() > 1 ? locator.size() - 1 : 1, 0);
    for (std::size_t i = 1; i < locator.size(); i += 2)
        derivative[i - 1] = locator[i];

    // Chien search over the n valid positions; byte j has power n - 1 - j.
    std::size_t found = 0;
    for (std::size_t j = 0; j < n_; ++j) {
        const int power = static_cast<int>(n_ - 1 - j);
        const std::uint8_t x_inv = Gf256::exp(-power);
        if (eval(locator, x_inv) != 0)
            continue;
        const std::uint8_t denom = eval(derivative, x_inv);
        if (denom == 0)
            return std::nullopt;
        const std::uint8_t magnitude =
            Gf256::mul(Gf256::exp(power), Gf256::div(eval(evaluator, x_inv), denom));
        out.codeword[j] ^= magnitude;
        ++found;
    }
    if (found != degree)
        return std::nullopt;
    const auto check = syndromes(out.codeword);
    if (!std::all_of(check.begin(), check.end(), [](std::uint8_t s) { return s == 0; }))
        return std::nullopt;
    out.corrected = found;
    return out;
}

} // namespace relaysim
