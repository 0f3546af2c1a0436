// SPDX-License-Identifier: Apache-2.0
//
// Radar detection and estimation on the correlation between the received
// frame and the transmitted packet: OS-CFAR detection, integer + fractional
// delay, multi-frame Doppler, beam-domain MUSIC and the ambiguity function.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mocz/types.hpp"

namespace mocz {

struct CorrelationProfile {
    CVec values;

    std::size_t size() const { return values.size(); }
    std::vector<double> magnitude() const;
    std::vector<double> power() const;
};

// zeta[n] = sum_m conj(x[m - n]) y[m], circular over N = y.size(); x is
// zero-padded to N. Computed spectrally. Throws InvalidParameter when x is
// longer than y.
CorrelationProfile cross_correlate(std::span<const cdouble> x, std::span<const cdouble> y);

struct CfarConfig {
    int window = 12;  // reference cells per side
    int guard = 2;    // guard cells per side
    int os_rank = 18; // 1-based rank among the 2*window reference cells
    double pfa = 1e-4;
    double alpha = 0.0; // threshold multiplier on the ordered statistic

    // Fills alpha from pfa via calibrate_os_alpha.
    static CfarConfig make(int window = 12, int guard = 2, int os_rank = 18, double pfa = 1e-4);
    void validate() const;
};

struct Detection {
    std::size_t cell = 0;
    double statistic = 0.0; // |zeta|^2
    double threshold = 0.0;
};
using DetectionList = std::vector<Detection>;

// False-alarm probability of OS-CFAR in exponential noise:
// prod_{i=0}^{k-1} (M - i) / (M - i + alpha).
double os_cfar_pfa(int num_reference, int os_rank, double alpha);

// Inverts os_cfar_pfa for alpha (relative accuracy 1e-10).
double calibrate_os_alpha(int window, int os_rank, double pfa);

// Per-cell thresholds alpha * (os_rank-th smallest reference power), with
// circular wrap and guard cells excluded.
std::vector<double> os_cfar_thresholds(std::span<const double> power, const CfarConfig& cfg);

DetectionList os_cfar(const CorrelationProfile& profile, const CfarConfig& cfg);

// Vertex offset of the parabola through (-1, left), (0, center), (1, right);
// 0 when the three points are collinear.
double parabolic_offset(double left, double center, double right);

// Band-limited value of the profile at fractional lag t (in cells).
cdouble interpolate_profile(std::span<const cdouble> spectrum, double t);

// tau = (peak_cell + delta) * T. With upsample == 1, delta is the 3-point
// parabola on |zeta| at peak_cell -+ 1. With upsample > 1 the profile is
// band-limited-interpolated on a 1/upsample grid around peak_cell and the
// parabola is fitted at the finest-grid maximum. delta is clamped to
// [-0.5, 0.5].
double estimate_delay(const CorrelationProfile& profile, std::size_t peak_cell, double T,
                      int upsample = 8);

// Wraps to (-pi, pi].
double wrap_phase(double phase);
std::vector<double> unwrap_phases(std::span<const double> phases);

// Weighted LS slope of the unwrapped peak phases against frame time,
// divided by 2 pi. Empty weights mean ordinary LS.
double estimate_doppler(std::span<const double> peak_phases, std::span<const double> frame_times,
                        std::span<const double> weights = {});

// (1/N) sum_n y[:, n] y[:, n]^H.
Eigen::MatrixXcd sample_covariance(const Eigen::MatrixXcd& y);

// Grid c + k*step within [lo, hi], c the midpoint.
struct AngleScan {
    double lo = -kPi / 2;
    double hi = kPi / 2;
    double step = kPi / 360; // 0.5 deg
    // Divide by ||U^H a||^2. The DFT beamspace response vanishes at every
    // unselected codebook direction, where the plain form diverges.
    bool normalized = true;
};

// Beam-domain MUSIC pseudo-spectrum 1 / ||E_n^H U^H a(phi)||^2 on the scan
// grid (see AngleScan::normalized).
std::vector<double> music_spectrum(const Eigen::MatrixXcd& C, const Eigen::MatrixXcd& U, int Q,
                                   const AngleScan& scan, std::vector<double>* grid = nullptr);

// The Q strongest local maxima of the pseudo-spectrum, refined by a
// parabola on the dB spectrum, strongest first. Throws InvalidParameter
// when Q >= N_rf.
std::vector<double> music_angles(const Eigen::MatrixXcd& C, const Eigen::MatrixXcd& U, int Q,
                                 const AngleScan& scan = {});

struct AmbiguityMap {
    int max_lag = 0;
    int doppler_bins = 0;   // DFT size along Doppler
    Eigen::MatrixXd values; // (2 max_lag + 1) x doppler_bins, centered

    int first_bin() const { return -(doppler_bins / 2); }
    double at(int lag, int bin) const
    {
        return values(lag + max_lag, bin - first_bin());
    }
};

// |AF[l, p]| = |sum_n x[n] conj(x[n - l]) e^{j2pi pn / doppler_bins}| for
// l in [-max_lag, max_lag] and p in [-doppler_bins/2, doppler_bins/2).
AmbiguityMap ambiguity_function(std::span<const cdouble> x, int max_lag, int doppler_bins);

// Largest off-peak magnitude of the zero-Doppler cut divided by the peak.
double peak_sidelobe_level(const AmbiguityMap& af);

struct EstimateReport {
    std::size_t cell = 0;
    double delay_s = 0.0;
    double range_m = 0.0;
    double doppler_hz = 0.0;
    double velocity_mps = 0.0;
    double angle_rad = 0.0;
    double statistic = 0.0;
    double threshold = 0.0;

    static EstimateReport from_estimates(std::size_t cell, double delay_s, double doppler_hz,
                                         double angle_rad, double carrier_freq);
};

inline double delay_to_range(double delay_s) { return kSpeedOfLight * delay_s / 2.0; }
inline double doppler_to_velocity(double doppler_hz, double carrier_freq)
{
    return kSpeedOfLight * doppler_hz / (2.0 * carrier_freq);
}

} // namespace mocz
