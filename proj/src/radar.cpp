// SPDX-License-Identifier: Apache-2.0

#include "mocz/radar.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "mocz/array_channel.hpp"
#include "mocz/errors.hpp"
#include "mocz/fft.hpp"

namespace mocz {

std::vector<double> CorrelationProfile::magnitude() const
{
    std::vector<double> m(values.size());
    std::transform(values.begin(), values.end(), m.begin(), [](cdouble v) { return std::abs(v); });
    return m;
}

std::vector<double> CorrelationProfile::power() const
{
    std::vector<double> m(values.size());
    std::transform(values.begin(), values.end(), m.begin(), [](cdouble v) { return std::norm(v); });
    return m;
}

CorrelationProfile cross_correlate(std::span<const cdouble> x, std::span<const cdouble> y)
{
    if (y.empty())
        throw InvalidParameter("cross_correlate: empty frame");
    if (x.size() > y.size())
        throw InvalidParameter("cross_correlate: reference longer than frame (" +
                               std::to_string(x.size()) + " > " + std::to_string(y.size()) + ")");
    CVec xp(y.size(), cdouble{0.0});
    std::copy(x.begin(), x.end(), xp.begin());
    const CVec X = fft(xp);
    CVec Z = fft(y);
    for (std::size_t k = 0; k < Z.size(); ++k)
        Z[k] *= std::conj(X[k]);
    return CorrelationProfile{ifft(Z)};
}

void CfarConfig::validate() const
{
    if (window < 1 || guard < 0)
        throw InvalidParameter("CfarConfig: window must be >= 1 and guard >= 0");
    if (os_rank < 1 || os_rank > 2 * window)
        throw InvalidParameter("CfarConfig: os_rank must lie in [1, 2*window]");
    if (!(pfa > 0.0 && pfa <= 1.0))
        throw InvalidParameter("CfarConfig: pfa must lie in (0, 1]");
    if (!(alpha >= 0.0))
        throw InvalidParameter("CfarConfig: alpha must be non-negative");
}

CfarConfig CfarConfig::make(int window, int guard, int os_rank, double pfa)
{
    CfarConfig c{window, guard, os_rank, pfa, 0.0};
    c.validate();
    c.alpha = calibrate_os_alpha(window, os_rank, pfa);
    return c;
}

double os_cfar_pfa(int num_reference, int os_rank, double alpha)
{
    double log_p = 0.0;
    for (int i = 0; i < os_rank; ++i) {
        const double m = num_reference - i;
        log_p += std::log(m) - std::log(m + alpha);
    }
    return std::exp(log_p);
}

double calibrate_os_alpha(int window, int os_rank, double pfa)
{
    if (window < 1 || os_rank < 1 || os_rank > 2 * window)
        throw InvalidParameter("calibrate_os_alpha: need 1 <= os_rank <= 2*window");
    if (!(pfa > 0.0 && pfa <= 1.0))
        throw InvalidParameter("calibrate_os_alpha: pfa must lie in (0, 1]");
    if (pfa == 1.0)
        return 0.0;
    const int M = 2 * window;
    const double target = std::log(pfa);
    auto excess = [&](double a) { return std::log(os_cfar_pfa(M, os_rank, a)) - target; };

    double lo = 0.0, hi = 1.0;
    while (excess(hi) > 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300)
            throw InvalidParameter("calibrate_os_alpha: no root bracket for requested pfa");
    }
    while (hi - lo > 1e-13 * hi) {
        const double mid = 0.5 * (lo + hi);
        (excess(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<double> os_cfar_thresholds(std::span<const double> power, const CfarConfig& cfg)
{
    cfg.validate();
    const auto N = static_cast<std::ptrdiff_t>(power.size());
    const std::ptrdiff_t span_half = cfg.window + cfg.guard;
    if (N < 2 * span_half + 1)
        throw InsufficientLength("os_cfar: frame of " + std::to_string(N) + " cells shorter than " +
                                 std::to_string(2 * span_half + 1));

    std::vector<double> thresholds(power.size());
    std::vector<double> ref(static_cast<std::size_t>(2 * cfg.window));
    auto at = [&](std::ptrdiff_t i) { return power[static_cast<std::size_t>(((i % N) + N) % N)]; };
    for (std::ptrdiff_t i = 0; i < N; ++i) {
        std::size_t r = 0;
        for (std::ptrdiff_t d = cfg.guard + 1; d <= span_half; ++d) {
            ref[r++] = at(i - d);
            ref[r++] = at(i + d);
        }
        auto kth = ref.begin() + (cfg.os_rank - 1);
        std::nth_element(ref.begin(), kth, ref.end());
        thresholds[static_cast<std::size_t>(i)] = cfg.alpha * *kth;
    }
    return thresholds;
}

DetectionList os_cfar(const CorrelationProfile& profile, const CfarConfig& cfg)
{
    const auto power = profile.power();
    const auto thresholds = os_cfar_thresholds(power, cfg);
    DetectionList out;
    for (std::size_t i = 0; i < power.size(); ++i)
        if (power[i] > thresholds[i])
            out.push_back({i, power[i], thresholds[i]});
    return out;
}

double parabolic_offset(double left, double center, double right)
{
    const double denom = left - 2.0 * center + right;
    if (denom == 0.0)
        return 0.0;
    return 0.5 * (left - right) / denom;
}

cdouble interpolate_profile(std::span<const cdouble> spectrum, double t)
{
    const auto N = static_cast<std::ptrdiff_t>(spectrum.size());
    cdouble acc{0.0};
    for (std::ptrdiff_t k = 0; k < N; ++k) {
        const auto z = spectrum[static_cast<std::size_t>(k)];
        if (2 * k == N) {
            acc += z * std::cos(kPi * t); // split Nyquist bin symmetrically
            continue;
        }
        const std::ptrdiff_t f = 2 * k < N ? k : k - N;
        acc += z * std::polar(1.0, 2.0 * kPi * static_cast<double>(f) * t / static_cast<double>(N));
    }
    return acc / static_cast<double>(N);
}

double estimate_delay(const CorrelationProfile& profile, std::size_t peak_cell, double T, int upsample)
{
    const std::size_t N = profile.size();
    if (N < 3)
        throw InsufficientLength("estimate_delay: profile needs at least 3 cells");
    if (peak_cell >= N)
        throw InvalidParameter("estimate_delay: peak cell outside profile");
    if (upsample < 1)
        throw InvalidParameter("estimate_delay: upsample factor must be >= 1");

    double delta = 0.0;
    if (upsample == 1) {
        const double left = std::abs(profile.values[(peak_cell + N - 1) % N]);
        const double mid = std::abs(profile.values[peak_cell]);
        const double right = std::abs(profile.values[(peak_cell + 1) % N]);
        delta = parabolic_offset(left, mid, right);
    } else {
        const CVec spectrum = fft(profile.values);
        const int U = upsample;
        std::vector<double> mag(static_cast<std::size_t>(2 * U + 1));
        for (int j = -U; j <= U; ++j)
            mag[static_cast<std::size_t>(j + U)] =
                std::abs(interpolate_profile(spectrum, static_cast<double>(peak_cell) + double(j) / U));
        const auto best = static_cast<int>(std::max_element(mag.begin(), mag.end()) - mag.begin());
        double fine = best - U;
        if (best > 0 && best < 2 * U)
            fine += parabolic_offset(mag[static_cast<std::size_t>(best - 1)], mag[static_cast<std::size_t>(best)],
                                     mag[static_cast<std::size_t>(best + 1)]);
        delta = fine / U;
    }
    delta = std::clamp(delta, -0.5, 0.5);
    return (static_cast<double>(peak_cell) + delta) * T;
}

double wrap_phase(double phase)
{
    double w = std::remainder(phase, 2.0 * kPi);
    if (w <= -kPi)
        w += 2.0 * kPi;
    return w;
}

std::vector<double> unwrap_phases(std::span<const double> phases)
{
    std::vector<double> out(phases.begin(), phases.end());
    for (std::size_t i = 1; i < out.size(); ++i)
        out[i] = out[i - 1] + wrap_phase(phases[i] - phases[i - 1]);
    return out;
}

double estimate_doppler(std::span<const double> peak_phases, std::span<const double> frame_times,
                        std::span<const double> weights)
{
    const std::size_t F = peak_phases.size();
    if (F < 2)
        throw InsufficientLength("estimate_doppler: need at least 2 frames");
    if (frame_times.size() != F || (!weights.empty() && weights.size() != F))
        throw InvalidParameter("estimate_doppler: phase/time/weight lengths differ");

    const auto phi = unwrap_phases(peak_phases);
    auto w = [&](std::size_t i) { return weights.empty() ? 1.0 : weights[i]; };
    double sw = 0.0, st = 0.0, sp = 0.0;
    for (std::size_t i = 0; i < F; ++i) {
        sw += w(i);
        st += w(i) * frame_times[i];
        sp += w(i) * phi[i];
    }
    if (!(sw > 0.0))
        throw InvalidParameter("estimate_doppler: weights must have positive sum");
    const double tm = st / sw, pm = sp / sw;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < F; ++i) {
        num += w(i) * (frame_times[i] - tm) * (phi[i] - pm);
        den += w(i) * (frame_times[i] - tm) * (frame_times[i] - tm);
    }
    if (!(den > 0.0))
        throw InvalidParameter("estimate_doppler: frame times must not all coincide");
    return num / den / (2.0 * kPi);
}

Eigen::MatrixXcd sample_covariance(const Eigen::MatrixXcd& y)
{
    if (y.cols() < 1)
        throw InsufficientLength("sample_covariance: need at least one snapshot");
    Eigen::MatrixXcd C = y * y.adjoint() / static_cast<double>(y.cols());
    // exact Hermitian symmetry
    return 0.5 * (C + C.adjoint());
}

namespace {
std::vector<double> scan_grid(const AngleScan& scan)
{
    const double lo = std::max(scan.lo, -kPi / 2);
    const double hi = std::min(scan.hi, kPi / 2);
    if (!(scan.step > 0.0) || !(hi >= lo))
        throw InvalidParameter("music: invalid angle scan");
    // anchored on the center so a target on the segment axis is a grid point
    const double c = 0.5 * (lo + hi);
    const auto half = static_cast<long>(std::floor((hi - c) / scan.step + 1e-9));
    std::vector<double> g;
    g.reserve(static_cast<std::size_t>(2 * half + 1));
    for (long k = -half; k <= half; ++k)
        g.push_back(c + scan.step * static_cast<double>(k));
    return g;
}
} // namespace

std::vector<double> music_spectrum(const Eigen::MatrixXcd& C, const Eigen::MatrixXcd& U, int Q,
                                   const AngleScan& scan, std::vector<double>* grid)
{
    const auto nrf = U.cols();
    if (C.rows() != nrf || C.cols() != nrf)
        throw InvalidParameter("music: covariance size does not match reduction matrix");
    if (Q < 0 || Q >= nrf)
        throw InvalidParameter("music: source count must satisfy 0 <= Q < N_rf");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(C);
    const Eigen::MatrixXcd En = eig.eigenvectors().leftCols(nrf - Q); // ascending eigenvalues
    const Eigen::MatrixXcd Uh = U.adjoint();
    const Eigen::MatrixXcd EnH = En.adjoint();

    const auto g = scan_grid(scan);
    std::vector<double> p(g.size());
    const int Na = static_cast<int>(U.rows());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Eigen::VectorXcd b = Uh * steering(g[i], Na);
        double d = (EnH * b).squaredNorm();
        if (scan.normalized)
            d /= std::max(b.squaredNorm(), 1e-300);
        p[i] = 1.0 / std::max(d, 1e-300);
    }
    if (grid)
        *grid = g;
    return p;
}

std::vector<double> music_angles(const Eigen::MatrixXcd& C, const Eigen::MatrixXcd& U, int Q,
                                 const AngleScan& scan)
{
    if (Q >= U.cols())
        throw InvalidParameter("music: source count must be below N_rf");
    if (Q <= 0)
        return {};
    std::vector<double> grid;
    const auto p = music_spectrum(C, U, Q, scan, &grid);
    std::vector<double> db(p.size());
    std::transform(p.begin(), p.end(), db.begin(), [](double v) { return 10.0 * std::log10(v); });

    std::vector<std::size_t> peaks;
    const std::size_t n = db.size();
    for (std::size_t i = 0; i < n; ++i) {
        const bool left_ok = i == 0 || db[i] > db[i - 1];
        const bool right_ok = i + 1 == n || db[i] >= db[i + 1];
        if (left_ok && right_ok)
            peaks.push_back(i);
    }
    std::sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) { return db[a] > db[b]; });
    if (peaks.size() > static_cast<std::size_t>(Q))
        peaks.resize(static_cast<std::size_t>(Q));

    std::vector<double> out;
    const double step = n > 1 ? grid[1] - grid[0] : 0.0;
    for (auto i : peaks) {
        double offset = 0.0;
        if (i > 0 && i + 1 < n)
            offset = std::clamp(parabolic_offset(db[i - 1], db[i], db[i + 1]), -0.5, 0.5);
        out.push_back(grid[i] + offset * step);
    }
    return out;
}

AmbiguityMap ambiguity_function(std::span<const cdouble> x, int max_lag, int doppler_bins)
{
    if (x.empty())
        throw InvalidParameter("ambiguity_function: empty sequence");
    const auto L = static_cast<int>(x.size());
    if (max_lag < 0 || max_lag > L - 1)
        throw InvalidParameter("ambiguity_function: max_lag must lie in [0, K]");
    if (doppler_bins < 1)
        throw InvalidParameter("ambiguity_function: need at least one Doppler bin");

    AmbiguityMap af;
    af.max_lag = max_lag;
    af.doppler_bins = doppler_bins;
    af.values.resize(2 * max_lag + 1, doppler_bins);

    const auto D = static_cast<std::size_t>(doppler_bins);
    FftPlan plan(D, FftPlan::Direction::Backward);
    CVec folded(D);
    for (int lag = -max_lag; lag <= max_lag; ++lag) {
        std::fill(folded.begin(), folded.end(), cdouble{0.0});
        for (int n = std::max(0, lag); n < std::min(L, L + lag); ++n)
            folded[static_cast<std::size_t>(n) % D] +=
                x[static_cast<std::size_t>(n)] * std::conj(x[static_cast<std::size_t>(n - lag)]);
        plan.execute(folded, folded);
        for (int col = 0; col < doppler_bins; ++col) {
            const int p = af.first_bin() + col;
            const auto k = static_cast<std::size_t>(((p % doppler_bins) + doppler_bins) % doppler_bins);
            af.values(lag + max_lag, col) = std::abs(folded[k]);
        }
    }
    return af;
}

double peak_sidelobe_level(const AmbiguityMap& af)
{
    const double peak = af.at(0, 0);
    double side = 0.0;
    for (int lag = -af.max_lag; lag <= af.max_lag; ++lag)
        if (lag != 0)
            side = std::max(side, af.at(lag, 0));
    return side / peak;
}

EstimateReport EstimateReport::from_estimates(std::size_t cell, double delay_s, double doppler_hz,
                                              double angle_rad, double carrier_freq)
{
    EstimateReport r;
    r.cell = cell;
    r.delay_s = delay_s;
    r.range_m = delay_to_range(delay_s);
    r.doppler_hz = doppler_hz;
    r.velocity_mps = doppler_to_velocity(doppler_hz, carrier_freq);
    r.angle_rad = angle_rad;
    return r;
}

} // namespace mocz
