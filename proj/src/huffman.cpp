// SPDX-License-Identifier: Apache-2.0

#include "mocz/huffman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mocz/errors.hpp"

namespace mocz {

double derive_radius(int K, double lambda)
{
    if (K < 2)
        throw InvalidParameter("derive_radius: K must be >= 2 (K=1 gives R=1)");
    if (!(lambda > 0.0))
        throw InvalidParameter("derive_radius: lambda must be positive");
    return std::sqrt(1.0 + 2.0 * lambda * std::sin(kPi / K));
}

double derive_eta(double R, int K)
{
    if (K < 1)
        throw InvalidParameter("derive_eta: K must be >= 1");
    if (!(R > 1.0))
        throw InvalidParameter("derive_eta: R must exceed 1");
    const double rk = std::pow(R, K);
    return 1.0 / (rk + 1.0 / rk);
}

ModulationParams ModulationParams::make(int K, double lambda)
{
    ModulationParams p;
    p.K = K;
    p.lambda = lambda;
    p.R = derive_radius(K, lambda);
    p.eta = derive_eta(p.R, K);
    return p;
}

ModulationParams ModulationParams::from_radius(int K, double R)
{
    ModulationParams p;
    p.K = K;
    p.R = R;
    p.eta = derive_eta(R, K);
    p.lambda = K >= 2 ? (R * R - 1.0) / (2.0 * std::sin(kPi / K))
                      : std::numeric_limits<double>::quiet_NaN();
    return p;
}

BitMessage::BitMessage(std::vector<std::uint8_t> b) : bits(std::move(b))
{
    for (auto v : bits)
        if (v > 1)
            throw InvalidParameter("BitMessage: bits must be 0 or 1");
}

BitMessage BitMessage::from_index(std::uint64_t index, int K)
{
    if (K < 1 || K > 64)
        throw InvalidParameter("BitMessage::from_index: K out of range");
    std::vector<std::uint8_t> b(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k)
        b[static_cast<std::size_t>(k)] = static_cast<std::uint8_t>((index >> (K - 1 - k)) & 1U);
    return BitMessage(std::move(b));
}

BitMessage BitMessage::from_binary(std::string_view s)
{
    std::vector<std::uint8_t> b;
    b.reserve(s.size());
    for (char c : s) {
        if (c != '0' && c != '1')
            throw InvalidParameter("BitMessage::from_binary: expected only '0'/'1'");
        b.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    return BitMessage(std::move(b));
}

int BitMessage::weight() const
{
    return static_cast<int>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

std::string BitMessage::to_string() const
{
    std::string s;
    s.reserve(bits.size());
    for (auto v : bits)
        s.push_back(static_cast<char>('0' + v));
    return s;
}

double BasebandSequence::energy() const
{
    double e = 0.0;
    for (const auto& v : samples)
        e += std::norm(v);
    return e;
}

namespace {
void check_length(const BitMessage& m, const ModulationParams& p)
{
    if (p.K < 1 || m.size() != static_cast<std::size_t>(p.K))
        throw InvalidParameter("message length " + std::to_string(m.size()) +
                               " does not match K=" + std::to_string(p.K));
}
} // namespace

ZeroPattern encode_zeros(const BitMessage& m, const ModulationParams& p)
{
    check_length(m, p);
    ZeroPattern z;
    z.zeros.reserve(m.size());
    for (int k = 0; k < p.K; ++k) {
        const double radius = m.bits[static_cast<std::size_t>(k)] ? p.R : 1.0 / p.R;
        z.zeros.push_back(std::polar(radius, p.base_angle() * k));
    }
    return z;
}

std::vector<int> leja_order(int K)
{
    std::vector<int> order;
    if (K < 1)
        return order;
    order.reserve(static_cast<std::size_t>(K));
    // log-distance from every candidate root to the already chosen set
    std::vector<double> score(static_cast<std::size_t>(K), 0.0);
    std::vector<bool> used(static_cast<std::size_t>(K), false);
    auto add = [&](int j) {
        order.push_back(j);
        used[static_cast<std::size_t>(j)] = true;
        for (int i = 0; i < K; ++i) {
            if (used[static_cast<std::size_t>(i)])
                continue;
            // |e^{ja} - e^{jb}| = 2 |sin((a-b)/2)|
            const double d = 2.0 * std::abs(std::sin(kPi * (i - j) / K));
            score[static_cast<std::size_t>(i)] += std::log(d);
        }
    };
    add(0);
    while (static_cast<int>(order.size()) < K) {
        int best = -1;
        for (int i = 0; i < K; ++i)
            if (!used[static_cast<std::size_t>(i)] &&
                (best < 0 || score[static_cast<std::size_t>(i)] > score[static_cast<std::size_t>(best)]))
                best = i;
        add(best);
    }
    return order;
}

HuffmanEncoder::HuffmanEncoder(const ModulationParams& p) : params_(p), order_(leja_order(p.K))
{
    if (p.K < 1 || !(p.R > 1.0))
        throw InvalidParameter("HuffmanEncoder: invalid modulation parameters");
}

BasebandSequence HuffmanEncoder::encode(const BitMessage& m, double sample_period) const
{
    const auto zp = encode_zeros(m, params_);
    const int K = params_.K;

    // Monic expansion, coefficients in ascending powers of z.
    CVec c(static_cast<std::size_t>(K) + 1, cdouble{0.0});
    c[0] = 1.0;
    std::size_t deg = 0;
    for (int idx : order_) {
        const cdouble a = zp.zeros[static_cast<std::size_t>(idx)];
        ++deg;
        c[deg] = c[deg - 1];
        for (std::size_t n = deg - 1; n > 0; --n)
            c[n] = c[n - 1] - a * c[n];
        c[0] = -a * c[0];
    }

    const double lead = -std::sqrt(params_.eta * std::pow(params_.R, K - 2 * m.weight()));
    BasebandSequence out;
    out.sample_period = sample_period;
    out.samples.resize(c.size());
    for (std::size_t n = 0; n < c.size(); ++n)
        out.samples[n] = lead * c[n];

    // x_0 is real positive analytically; strip the round-off phase.
    const double ph = std::arg(out.samples[0]);
    if (ph != 0.0) {
        const cdouble rot = std::polar(1.0, -ph);
        for (auto& v : out.samples)
            v *= rot;
        out.samples[0] = {std::abs(out.samples[0]), 0.0};
    }
    return out;
}

BasebandSequence encode(const BitMessage& m, const ModulationParams& p)
{
    return HuffmanEncoder(p).encode(m);
}

Autocorrelation autocorrelation(std::span<const cdouble> x)
{
    Autocorrelation a;
    if (x.empty())
        return a;
    const auto L = static_cast<std::ptrdiff_t>(x.size());
    a.coeffs.assign(static_cast<std::size_t>(2 * L - 1), cdouble{0.0});
    for (std::ptrdiff_t lag = -(L - 1); lag <= L - 1; ++lag) {
        cdouble acc{0.0};
        const auto lo = std::max<std::ptrdiff_t>(0, lag);
        const auto hi = std::min<std::ptrdiff_t>(L - 1, L - 1 + lag);
        for (std::ptrdiff_t m = lo; m <= hi; ++m)
            acc += x[static_cast<std::size_t>(m)] * std::conj(x[static_cast<std::size_t>(m - lag)]);
        a.coeffs[static_cast<std::size_t>(lag + L - 1)] = acc;
    }
    return a;
}

double expected_end_energy(const ModulationParams& p)
{
    if (p.K < 1 || !(p.R > 1.0))
        throw InvalidParameter("expected_end_energy: invalid modulation parameters");
    const double r2 = p.R * p.R;
    // 2^-K (1+R^2)^K / (1+R^2K), evaluated in log space for large K
    const double log_num = p.K * (std::log1p(r2) - std::log(2.0));
    const double log_den = std::log1p(std::pow(r2, p.K));
    return std::exp(log_num - log_den);
}

std::pair<double, double> end_coefficients(int weight, const ModulationParams& p)
{
    const double denom = 1.0 + std::pow(p.R, 2 * p.K);
    const double x0 = std::sqrt(std::pow(p.R, 2 * weight) / denom);
    const double xK = -std::sqrt(std::pow(p.R, 2 * p.K - 2 * weight) / denom);
    return {x0, xK};
}

} // namespace mocz
