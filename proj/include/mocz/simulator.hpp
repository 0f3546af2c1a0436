// SPDX-License-Identifier: Apache-2.0
//
// End-to-end Monte Carlo experiments: uncoded BER of DiZeT decoding over
// AWGN / Rayleigh / Rician channels, radar estimation sweeps and OS-CFAR
// calibration runs. Every trial draws from its own RNG substream derived
// from (seed, sweep point, trial), and partial results are reduced in trial
// order, so the worker count never changes the output.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mocz/array_channel.hpp"
#include "mocz/huffman.hpp"
#include "mocz/radar.hpp"

namespace mocz {

enum class ChannelModel { Awgn, RayleighFlat, RicianSelective };

std::string to_string(ChannelModel m);
ChannelModel channel_model_from_string(const std::string& s);

// Angular interval Omega_i in radians.
struct Segment {
    double lo = 0.0;
    double hi = 0.0;

    double center() const { return 0.5 * (lo + hi); }
    double width() const { return hi - lo; }
    bool contains(double angle) const { return angle >= lo && angle <= hi; }
};

struct FrameSchedule {
    std::vector<Segment> segments{Segment{-0.0625, 0.0625}};
    int frames_per_cpi = 16;
    double t_swc = 0.0; // beam switching dead time, s

    void validate() const;
    const Segment* find(double angle) const;
    double t_cpi(double frame_duration) const { return frames_per_cpi * frame_duration; }
};

// Scenario units: metres, m/s, degrees, dBsm.
struct TargetSpec {
    double range_m = 50.0;
    double velocity_mps = 0.0;
    double angle_deg = 0.0;
    double rcs_dbsm = 10.0;
};

struct PathSpec {
    double range_m = 100.0;
    double velocity_mps = 0.0;
    double angle_deg = 0.0;
    double kappa = 10.0;
};

struct RadarSweep {
    enum class Kind { Snr, Range };
    Kind kind = Kind::Range;
    std::vector<double> values{50.0};
};

struct SimConfig {
    ModulationParams modulation = ModulationParams::make(127, 0.5);
    ArrayConfig array;
    LinkBudget link;
    FrameSchedule schedule;
    CfarConfig cfar = CfarConfig::make();
    ChannelModel channel_model = ChannelModel::Awgn;
    std::vector<double> snr_grid_db{0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0};
    int trials = 1000;
    std::uint64_t seed = 1;
    int threads = 0;      // 0: MOCZSIM_THREADS or hardware concurrency
    int frame_length = 0; // radar frame length in samples; 0 picks one
    std::vector<TargetSpec> targets{TargetSpec{}};
    std::vector<PathSpec> paths;
    RadarSweep radar_sweep;

    void validate() const;
};

// Worker count: cfg.threads if positive, else MOCZSIM_THREADS, else the
// hardware concurrency; never above `jobs`.
int resolve_threads(int requested, std::size_t jobs);

// Runs fn(i) for i in [0, count) on up to `threads` workers.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

// Per-sample noise variance for a packet of unit energy carrying K bits.
double noise_variance_for_ebn0(double ebn0_db, int K);
// Coherent BPSK in AWGN, Q(sqrt(2 Eb/N0)).
double bpsk_ber(double ebn0_db);

struct BerPoint {
    double snr_db = 0.0;
    double ber = 0.0;
    std::uint64_t packets = 0;
    std::uint64_t bit_errors = 0;
    double noise_variance = 0.0;
    double bpsk_ber = 0.0;
};

struct BerResult {
    ChannelModel channel_model = ChannelModel::Awgn;
    int K = 0;
    std::vector<BerPoint> points;
};

// Channel taps (in sample-spaced delays) drawn for one packet.
std::vector<CommPath> draw_comm_channel(ChannelModel model, Rng& rng);

BerResult run_ber(const SimConfig& cfg);

// Eb/N0 where the curve crosses target_ber, by linear interpolation of
// log10(BER) in dB; nullopt when the curve never brackets the target.
std::optional<double> snr_at_ber(std::span<const BerPoint> points, double target_ber);
// Same for the BPSK reference (bisection on the closed form).
double bpsk_snr_at_ber(double target_ber);

struct RadarPoint {
    double value = 0.0; // sweep value (dB or metres)
    double post_correlation_snr_db = 0.0;
    double rmse_range_m = 0.0;
    double rmse_velocity_mps = 0.0;
    double rmse_angle_deg = 0.0;
    double detection_rate = 0.0;
    double false_alarm_rate = 0.0; // per examined noise cell, first frame
    int trials = 0;
};

struct RadarResult {
    RadarSweep::Kind sweep = RadarSweep::Kind::Range;
    std::vector<RadarPoint> points;
};

// Per-trial outcome of the radar chain, exposed for diagnostics and tests.
struct RadarTrial {
    std::vector<bool> detected;           // per target
    std::vector<EstimateReport> estimates; // per target (valid when detected)
    std::uint64_t false_alarms = 0;
    std::uint64_t noise_cells = 0;
};

int radar_frame_length(const SimConfig& cfg, std::span<const TargetSpec> targets);

// One CPI: F frames into the segment containing the first target. noise
// variance < 0 selects the physical N0 W.
RadarTrial run_radar_trial(const SimConfig& cfg, std::span<const TargetSpec> targets,
                           double noise_variance, Rng& rng);

// Noise variance giving the requested post-correlation SNR on the first
// target (combined beam, integer-delay peak).
double radar_noise_for_snr(const SimConfig& cfg, std::span<const TargetSpec> targets, double snr_db);
double radar_post_correlation_snr_db(const SimConfig& cfg, std::span<const TargetSpec> targets,
                                     double noise_variance);

RadarResult run_radar(const SimConfig& cfg, std::span<const TargetSpec> targets);

struct CfarCalibration {
    double pfa_target = 0.0;
    double alpha = 0.0;
    std::uint64_t cells = 0;
    std::uint64_t false_alarms = 0;
    double empirical_pfa = 0.0;
    double ci_low = 0.0; // Wilson 95%
    double ci_high = 0.0;
};

// Noise-only OS-CFAR on correlation profiles of random packets. Throws
// InsufficientLength when cells < 100 / pfa.
CfarCalibration run_cfar_calibration(const SimConfig& cfg, std::uint64_t cells);

} // namespace mocz
