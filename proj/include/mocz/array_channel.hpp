// SPDX-License-Identifier: Apache-2.0
//
// Half-wavelength ULA, hybrid Tx/Rx beamforming, link budgets and the
// discrete-time comm/radar channels. Pulse shaping is ideal Nyquist, so a
// fractional delay is a linear phase ramp on the (zero-padded) spectrum.

#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mocz/rng.hpp"
#include "mocz/types.hpp"

namespace mocz {

struct ArrayConfig {
    int num_antennas = 64;
    int num_rf_chains = 4;

    void validate() const;
};

struct Beamformer {
    Eigen::VectorXcd tx_beam;   // f, unit norm, length N_a
    Eigen::MatrixXcd rx_matrix; // U, N_a x N_rf, orthonormal columns
    std::vector<int> codebook_indices; // DFT beam index of each column of U
};

struct RadarTarget {
    cdouble gain{1.0}; // rho
    double angle = 0.0;   // rad, [-pi/2, pi/2]
    double delay = 0.0;   // s, round trip
    double doppler = 0.0; // Hz
    double rcs_dbsm = 10.0;
};

struct CommPath {
    cdouble gain{1.0};
    double aod = 0.0;     // rad
    double delay = 0.0;   // s
    double doppler = 0.0; // Hz
};

struct LinkBudget {
    double eirp_dbm = 35.0;
    double carrier_freq = 60.0e9; // Hz
    double bandwidth = 100.0e6;   // Hz
    double noise_psd = 2.0e-21;   // W/Hz
    double range = 50.0;          // m

    void validate() const;
    double wavelength() const { return kSpeedOfLight / carrier_freq; }
    double sample_period() const { return 1.0 / bandwidth; }
    double noise_variance() const { return noise_psd * bandwidth; }
    double eirp_watts() const { return 1e-3 * db_to_linear(eirp_dbm); }
};

Eigen::VectorXcd steering(double angle, int num_antennas);

// Broadside angle of DFT codebook beam d (spatial frequency 2d/N_a wrapped
// to [-1, 1)).
double dft_beam_angle(int d, int num_antennas);
Eigen::VectorXcd dft_beam(int d, int num_antennas);

// Tx beam matched to the segment center; Rx reduction matrix made of the
// N_rf DFT beams nearest the segment (ties to the lower index).
Beamformer make_beamformers(double segment_center, double segment_width, const ArrayConfig& cfg);

// |rho|^2 = lambda^2 sigma / ((4 pi)^3 r^4) with r = lb.range.
double radar_gain(const LinkBudget& lb, double rcs_dbsm);
// |h|^2 = lambda^2 / ((4 pi)^2 d^2), free-space exponent 2.
double comm_gain(const LinkBudget& lb, double range);

// s delayed by delay_samples (any real >= 0) on a circular grid of length
// out_len >= s.size(): exact shift for integer delays, band-limited
// (spectral phase ramp) otherwise. Energy preserving.
CVec delay_signal(std::span<const cdouble> s, double delay_samples, std::size_t out_len);

// y[n] = sum_q rho_q U^H a(phi_q) a^H(phi_q) f s(nT - tau_q) e^{j2pi nu_q (t0 + nT)}.
// Output is N_rf x s.size(); s is the (zero-padded) frame.
Eigen::MatrixXcd apply_radar_channel(std::span<const cdouble> s, std::span<const RadarTarget> targets,
                                     const Beamformer& bf, double T, double t0 = 0.0);

// r[n] = sum_p h_p (a^H(phi_p) f) s(nT - tau_p) e^{j2pi nu_p (t0 + nT)}; the Rx
// is a single isotropic element. Output length s.size() + ceil(max delay / T).
CVec apply_comm_channel(std::span<const cdouble> s, std::span<const CommPath> paths,
                        const Eigen::VectorXcd& tx_beam, double T, double t0 = 0.0);

// Rician tap with mean power `power`: LOS part of power kappa/(kappa+1)
// with uniform random phase plus diffuse CN(0, power/(kappa+1)).
cdouble rician_tap(Rng& rng, double power, double kappa);

CVec awgn(std::span<const cdouble> x, double noise_variance, Rng& rng);
CVec awgn(std::span<const cdouble> x, double noise_variance, std::uint64_t seed);
void add_awgn(Eigen::MatrixXcd& y, double noise_variance, Rng& rng);

} // namespace mocz
