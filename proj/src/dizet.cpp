// SPDX-License-Identifier: Apache-2.0

#include "mocz/dizet.hpp"

#include <cmath>
#include <string>

#include "mocz/errors.hpp"

namespace mocz {

cdouble eval_at_point(std::span<const cdouble> y, cdouble z)
{
    cdouble acc{0.0};
    for (auto it = y.rbegin(); it != y.rend(); ++it)
        acc = acc * z + *it;
    return acc;
}

std::pair<double, double> dizet_weights(double R, std::size_t N)
{
    double sp = 0.0, sm = 0.0;
    const double r2 = R * R;
    double wp = 1.0, wm = 1.0;
    for (std::size_t n = 0; n < N; ++n) {
        sp += wp;
        sm += wm;
        wp *= r2;
        wm /= r2;
    }
    return {std::sqrt(sp), std::sqrt(sm)};
}

namespace {

void check_input(std::span<const cdouble> y, const ModulationParams& p)
{
    if (p.K < 1)
        throw InvalidParameter("dizet: K must be positive");
    if (y.size() < static_cast<std::size_t>(p.K) + 1)
        throw InsufficientLength("dizet: received " + std::to_string(y.size()) +
                                 " samples, need at least K+1=" + std::to_string(p.K + 1));
}

DecodedBits decide(std::span<const double> outer, std::span<const double> inner,
                   double c_plus, double c_minus)
{
    DecodedBits out;
    const std::size_t K = outer.size();
    out.bits.bits.resize(K);
    out.margins.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
        const double o = outer[k] / c_plus;
        const double i = inner[k] / c_minus;
        // ties (including 0 == 0) resolve to bit 0
        double margin = 0.0;
        if (o != i)
            margin = std::log(i) - std::log(o);
        out.bits.bits[k] = margin > 0.0 ? 1 : 0;
        out.margins[k] = margin;
    }
    return out;
}

} // namespace

DecodedBits dizet_decode(std::span<const cdouble> y, const ModulationParams& p)
{
    check_input(y, p);
    const auto K = static_cast<std::size_t>(p.K);
    std::vector<double> outer(K), inner(K);
    for (std::size_t k = 0; k < K; ++k) {
        const double theta = p.base_angle() * static_cast<double>(k);
        outer[k] = std::abs(eval_at_point(y, std::polar(p.R, theta)));
        inner[k] = std::abs(eval_at_point(y, std::polar(1.0 / p.R, theta)));
    }
    const auto [cp, cm] = dizet_weights(p.R, y.size());
    return decide(outer, inner, cp, cm);
}

DizetDecoder::DizetDecoder(const ModulationParams& p)
    : params_(p), plan_(static_cast<std::size_t>(p.K), FftPlan::Direction::Backward)
{
    if (p.K < 1 || !(p.R > 1.0))
        throw InvalidParameter("DizetDecoder: invalid modulation parameters");
}

void DizetDecoder::test_magnitudes(std::span<const cdouble> y, std::span<double> outer,
                                   std::span<double> inner) const
{
    check_input(y, params_);
    const auto K = static_cast<std::size_t>(params_.K);
    if (outer.size() != K || inner.size() != K)
        throw InvalidParameter("DizetDecoder: output spans must have K entries");

    // Y(r e^{j2pi k/K}) = sum_j u_j e^{+j2pi jk/K} with u_j = sum_{n = j mod K} y_n r^n,
    // i.e. an unnormalized backward DFT of the folded, radius-weighted input.
    CVec up(K, cdouble{0.0}), um(K, cdouble{0.0});
    double wp = 1.0, wm = 1.0;
    const double inv_r = 1.0 / params_.R;
    for (std::size_t n = 0; n < y.size(); ++n) {
        up[n % K] += y[n] * wp;
        um[n % K] += y[n] * wm;
        wp *= params_.R;
        wm *= inv_r;
    }
    plan_.execute(up, up);
    plan_.execute(um, um);
    for (std::size_t k = 0; k < K; ++k) {
        outer[k] = std::abs(up[k]);
        inner[k] = std::abs(um[k]);
    }
}

DecodedBits DizetDecoder::decode(std::span<const cdouble> y) const
{
    const auto K = static_cast<std::size_t>(params_.K);
    std::vector<double> outer(K), inner(K);
    test_magnitudes(y, outer, inner);
    const auto [cp, cm] = dizet_weights(params_.R, y.size());
    return decide(outer, inner, cp, cm);
}

} // namespace mocz
