// SPDX-License-Identifier: Apache-2.0

#include "mocz/array_channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "mocz/errors.hpp"
#include "mocz/fft.hpp"

namespace mocz {

namespace {
constexpr double kAngleSlack = 1e-12;
}

void ArrayConfig::validate() const
{
    if (num_antennas < 1 || num_rf_chains < 1)
        throw InvalidParameter("ArrayConfig: antenna and RF chain counts must be positive");
    if (num_rf_chains > num_antennas)
        throw InvalidParameter("ArrayConfig: N_rf must not exceed N_a");
}

void LinkBudget::validate() const
{
    if (!(carrier_freq > 0.0 && bandwidth > 0.0 && noise_psd > 0.0 && range > 0.0))
        throw InvalidParameter("LinkBudget: carrier, bandwidth, noise PSD and range must be positive");
}

Eigen::VectorXcd steering(double angle, int num_antennas)
{
    if (!(std::abs(angle) <= kPi / 2 + kAngleSlack))
        throw InvalidParameter("steering: angle outside [-pi/2, pi/2]");
    if (num_antennas < 1)
        throw InvalidParameter("steering: need at least one antenna");
    Eigen::VectorXcd a(num_antennas);
    const double psi = kPi * std::sin(angle);
    for (int n = 0; n < num_antennas; ++n)
        a[n] = std::polar(1.0, psi * n);
    return a;
}

double dft_beam_angle(int d, int num_antennas)
{
    double u = 2.0 * d / num_antennas;
    if (u >= 1.0)
        u -= 2.0;
    return std::asin(std::clamp(u, -1.0, 1.0));
}

Eigen::VectorXcd dft_beam(int d, int num_antennas)
{
    Eigen::VectorXcd u(num_antennas);
    const double inv = 1.0 / std::sqrt(static_cast<double>(num_antennas));
    for (int n = 0; n < num_antennas; ++n)
        u[n] = std::polar(inv, 2.0 * kPi * d * n / num_antennas);
    return u;
}

Beamformer make_beamformers(double segment_center, double segment_width, const ArrayConfig& cfg)
{
    cfg.validate();
    if (!(segment_width >= 0.0))
        throw InvalidParameter("make_beamformers: negative segment width");
    const int Na = cfg.num_antennas;

    Beamformer bf;
    bf.tx_beam = steering(segment_center, Na) / std::sqrt(static_cast<double>(Na));

    const double lo = segment_center - segment_width / 2;
    const double hi = segment_center + segment_width / 2;
    std::vector<std::tuple<double, double, int>> ranked;
    ranked.reserve(static_cast<std::size_t>(Na));
    for (int d = 0; d < Na; ++d) {
        const double phi = dft_beam_angle(d, Na);
        const double outside = phi < lo ? lo - phi : (phi > hi ? phi - hi : 0.0);
        ranked.emplace_back(outside, std::abs(phi - segment_center), d);
    }
    std::sort(ranked.begin(), ranked.end());

    for (int i = 0; i < cfg.num_rf_chains; ++i)
        bf.codebook_indices.push_back(std::get<2>(ranked[static_cast<std::size_t>(i)]));
    std::sort(bf.codebook_indices.begin(), bf.codebook_indices.end(), [Na](int a, int b) {
        return dft_beam_angle(a, Na) < dft_beam_angle(b, Na);
    });

    bf.rx_matrix.resize(Na, cfg.num_rf_chains);
    for (int i = 0; i < cfg.num_rf_chains; ++i)
        bf.rx_matrix.col(i) = dft_beam(bf.codebook_indices[static_cast<std::size_t>(i)], Na);
    return bf;
}

double radar_gain(const LinkBudget& lb, double rcs_dbsm)
{
    lb.validate();
    const double lambda = lb.wavelength();
    const double sigma = db_to_linear(rcs_dbsm);
    return lambda * lambda * sigma / (std::pow(4.0 * kPi, 3) * std::pow(lb.range, 4));
}

double comm_gain(const LinkBudget& lb, double range)
{
    lb.validate();
    if (!(range > 0.0))
        throw InvalidParameter("comm_gain: range must be positive");
    const double lambda = lb.wavelength();
    return lambda * lambda / (std::pow(4.0 * kPi, 2) * range * range);
}

CVec delay_signal(std::span<const cdouble> s, double delay_samples, std::size_t out_len)
{
    if (out_len < s.size())
        throw InvalidParameter("delay_signal: output shorter than input");
    if (!(delay_samples >= 0.0))
        throw InvalidParameter("delay_signal: delay must be non-negative");
    CVec out(out_len, cdouble{0.0});
    if (out_len == 0)
        return out;

    const double rounded = std::round(delay_samples);
    if (std::abs(delay_samples - rounded) < 1e-12) {
        const auto shift = static_cast<std::size_t>(rounded) % out_len;
        for (std::size_t n = 0; n < s.size(); ++n)
            out[(n + shift) % out_len] = s[n];
        return out;
    }

    std::copy(s.begin(), s.end(), out.begin());
    auto spec = fft(out);
    const auto M = static_cast<std::ptrdiff_t>(out_len);
    for (std::ptrdiff_t k = 0; k < M; ++k) {
        const std::ptrdiff_t f = k < (M + 1) / 2 ? k : k - M; // bin M/2 maps to -M/2
        spec[static_cast<std::size_t>(k)] *=
            std::polar(1.0, -2.0 * kPi * static_cast<double>(f) * delay_samples / static_cast<double>(M));
    }
    return ifft(spec);
}

Eigen::MatrixXcd apply_radar_channel(std::span<const cdouble> s, std::span<const RadarTarget> targets,
                                     const Beamformer& bf, double T, double t0)
{
    if (!(T > 0.0))
        throw InvalidParameter("apply_radar_channel: sample period must be positive");
    const auto N = static_cast<Eigen::Index>(s.size());
    const int Na = static_cast<int>(bf.tx_beam.size());
    Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(bf.rx_matrix.cols(), N);

    for (const auto& tg : targets) {
        if (!(tg.delay >= 0.0))
            throw InvalidParameter("apply_radar_channel: negative target delay");
        const Eigen::VectorXcd a = steering(tg.angle, Na);
        const cdouble tx_gain = a.dot(bf.tx_beam); // a^H f
        const Eigen::VectorXcd g = tg.gain * tx_gain * (bf.rx_matrix.adjoint() * a);
        const CVec sd = delay_signal(s, tg.delay / T, s.size());
        for (Eigen::Index n = 0; n < N; ++n) {
            const double t = t0 + static_cast<double>(n) * T;
            const cdouble v = sd[static_cast<std::size_t>(n)] * std::polar(1.0, 2.0 * kPi * tg.doppler * t);
            y.col(n) += g * v;
        }
    }
    return y;
}

CVec apply_comm_channel(std::span<const cdouble> s, std::span<const CommPath> paths,
                        const Eigen::VectorXcd& tx_beam, double T, double t0)
{
    if (paths.empty())
        throw InvalidParameter("apply_comm_channel: need at least one path");
    if (!(T > 0.0))
        throw InvalidParameter("apply_comm_channel: sample period must be positive");
    double max_delay = 0.0;
    for (const auto& p : paths) {
        if (!(p.delay >= 0.0))
            throw InvalidParameter("apply_comm_channel: negative path delay");
        max_delay = std::max(max_delay, p.delay / T);
    }
    const auto spread = static_cast<std::size_t>(std::ceil(max_delay - 1e-9));
    const std::size_t out_len = s.size() + spread;
    const int Na = static_cast<int>(tx_beam.size());

    CVec r(out_len, cdouble{0.0});
    for (const auto& p : paths) {
        const cdouble g = p.gain * steering(p.aod, Na).dot(tx_beam);
        const CVec sd = delay_signal(s, p.delay / T, out_len);
        for (std::size_t n = 0; n < out_len; ++n) {
            const double t = t0 + static_cast<double>(n) * T;
            r[n] += g * sd[n] * std::polar(1.0, 2.0 * kPi * p.doppler * t);
        }
    }
    return r;
}

cdouble rician_tap(Rng& rng, double power, double kappa)
{
    if (!(power >= 0.0) || !(kappa >= 0.0))
        throw InvalidParameter("rician_tap: power and kappa must be non-negative");
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    const double los = std::sqrt(power * kappa / (kappa + 1.0));
    const cdouble diffuse = complex_gaussian(rng, power / (kappa + 1.0));
    return std::polar(los, phase(rng)) + diffuse;
}

CVec awgn(std::span<const cdouble> x, double noise_variance, Rng& rng)
{
    if (!(noise_variance >= 0.0))
        throw InvalidParameter("awgn: noise variance must be non-negative");
    CVec y(x.begin(), x.end());
    if (noise_variance == 0.0)
        return y;
    for (auto& v : y)
        v += complex_gaussian(rng, noise_variance);
    return y;
}

CVec awgn(std::span<const cdouble> x, double noise_variance, std::uint64_t seed)
{
    Rng rng = substream(seed, 0);
    return awgn(x, noise_variance, rng);
}

void add_awgn(Eigen::MatrixXcd& y, double noise_variance, Rng& rng)
{
    if (!(noise_variance >= 0.0))
        throw InvalidParameter("add_awgn: noise variance must be non-negative");
    if (noise_variance == 0.0)
        return;
    for (Eigen::Index c = 0; c < y.cols(); ++c)
        for (Eigen::Index r = 0; r < y.rows(); ++r)
            y(r, c) += complex_gaussian(rng, noise_variance);
}

} // namespace mocz
