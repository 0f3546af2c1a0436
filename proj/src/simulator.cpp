// SPDX-License-Identifier: Apache-2.0

#include "mocz/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "mocz/dizet.hpp"
#include "mocz/errors.hpp"
#include "mocz/fft.hpp"

namespace mocz {

std::string to_string(ChannelModel m)
{
    switch (m) {
    case ChannelModel::Awgn:
        return "awgn";
    case ChannelModel::RayleighFlat:
        return "rayleigh_flat";
    case ChannelModel::RicianSelective:
        return "rician_selective";
    }
    return "unknown";
}

ChannelModel channel_model_from_string(const std::string& s)
{
    if (s == "awgn")
        return ChannelModel::Awgn;
    if (s == "rayleigh_flat")
        return ChannelModel::RayleighFlat;
    if (s == "rician_selective")
        return ChannelModel::RicianSelective;
    throw ConfigError("unknown channel model '" + s + "'");
}

void FrameSchedule::validate() const
{
    if (segments.empty())
        throw ConfigError("schedule: need at least one segment");
    if (frames_per_cpi < 1)
        throw ConfigError("schedule: frames_per_cpi must be >= 1");
    if (!(t_swc >= 0.0))
        throw ConfigError("schedule: t_swc must be non-negative");
    auto sorted = segments;
    std::sort(sorted.begin(), sorted.end(), [](const Segment& a, const Segment& b) { return a.lo < b.lo; });
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const auto& s = sorted[i];
        if (!(s.lo < s.hi) || s.lo < -kPi / 2 || s.hi > kPi / 2)
            throw ConfigError("schedule: segments must be non-empty intervals within [-90, 90] deg");
        if (i > 0 && s.lo < sorted[i - 1].hi)
            throw ConfigError("schedule: segments overlap");
    }
}

const Segment* FrameSchedule::find(double angle) const
{
    for (const auto& s : segments)
        if (s.contains(angle))
            return &s;
    return nullptr;
}

void SimConfig::validate() const
{
    if (modulation.K < 2 || !(modulation.R > 1.0))
        throw ConfigError("modulation: K must be >= 2 with R > 1");
    try {
        array.validate();
        link.validate();
        cfar.validate();
    } catch (const InvalidParameter& e) {
        throw ConfigError(e.what());
    }
    schedule.validate();
    if (trials < 1)
        throw ConfigError("trials must be >= 1");
    if (snr_grid_db.empty())
        throw ConfigError("snr_grid_db must not be empty");
    if (frame_length < 0)
        throw ConfigError("frame_length must be non-negative");
    for (const auto& t : targets)
        if (!(t.range_m > 0.0) || std::abs(t.angle_deg) > 90.0)
            throw ConfigError("targets: range must be positive and |angle| <= 90 deg");
    for (const auto& p : paths)
        if (!(p.range_m > 0.0) || std::abs(p.angle_deg) > 90.0 || !(p.kappa >= 0.0))
            throw ConfigError("paths: range must be positive, |angle| <= 90 deg, kappa >= 0");
    if (radar_sweep.values.empty())
        throw ConfigError("radar sweep needs at least one value");
}

int resolve_threads(int requested, std::size_t jobs)
{
    int n = requested;
    if (n <= 0) {
        if (const char* env = std::getenv("MOCZSIM_THREADS")) {
            char* end = nullptr;
            const long v = std::strtol(env, &end, 10);
            if (end != env && v > 0)
                n = static_cast<int>(v);
        }
    }
    if (n <= 0)
        n = static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
    return static_cast<int>(std::clamp<std::size_t>(static_cast<std::size_t>(n), 1, std::max<std::size_t>(jobs, 1)));
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn)
{
    const int workers = resolve_threads(threads, count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                    next = count;
                }
            }
        });
    for (auto& t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

double noise_variance_for_ebn0(double ebn0_db, int K)
{
    return 1.0 / (K * db_to_linear(ebn0_db));
}

double bpsk_ber(double ebn0_db)
{
    return 0.5 * std::erfc(std::sqrt(db_to_linear(ebn0_db)));
}

// ---------------------------------------------------------------------------
// BER

std::vector<CommPath> draw_comm_channel(ChannelModel model, Rng& rng)
{
    switch (model) {
    case ChannelModel::Awgn:
        return {CommPath{cdouble{1.0}, 0.0, 0.0, 0.0}};
    case ChannelModel::RayleighFlat:
        return {CommPath{complex_gaussian(rng, 1.0), 0.0, 0.0, 0.0}};
    case ChannelModel::RicianSelective: {
        // LOS tap plus three sample-spaced taps, 3 dB decay per tap, unit total power
        constexpr int kTaps = 4;
        constexpr double kKappa = 10.0;
        double total = 0.0;
        for (int l = 0; l < kTaps; ++l)
            total += db_to_linear(-3.0 * l);
        std::vector<CommPath> paths;
        for (int l = 0; l < kTaps; ++l)
            paths.push_back({rician_tap(rng, db_to_linear(-3.0 * l) / total, kKappa), 0.0, double(l), 0.0});
        return paths;
    }
    }
    return {};
}

BerResult run_ber(const SimConfig& cfg)
{
    cfg.validate();
    const auto& p = cfg.modulation;
    const HuffmanEncoder encoder(p);
    const DizetDecoder decoder(p);
    const Eigen::VectorXcd iso = Eigen::VectorXcd::Ones(1); // single-element beam, a^H f = 1

    constexpr std::uint64_t kChunk = 256;
    const auto packets = static_cast<std::uint64_t>(cfg.trials);
    const std::uint64_t chunks = (packets + kChunk - 1) / kChunk;

    BerResult result;
    result.channel_model = cfg.channel_model;
    result.K = p.K;
    for (std::size_t pi = 0; pi < cfg.snr_grid_db.size(); ++pi) {
        const double snr = cfg.snr_grid_db[pi];
        const double var = noise_variance_for_ebn0(snr, p.K);
        std::vector<std::uint64_t> errors(chunks, 0);
        parallel_for(chunks, cfg.threads, [&](std::size_t c) {
            Rng rng = substream(cfg.seed, pi, c);
            std::bernoulli_distribution coin(0.5);
            BitMessage m;
            m.bits.resize(static_cast<std::size_t>(p.K));
            const std::uint64_t begin = c * kChunk;
            const std::uint64_t end = std::min(packets, begin + kChunk);
            std::uint64_t errs = 0;
            for (std::uint64_t t = begin; t < end; ++t) {
                for (auto& b : m.bits)
                    b = coin(rng) ? 1 : 0;
                const auto x = encoder.encode(m);
                const auto paths = draw_comm_channel(cfg.channel_model, rng);
                const CVec r = apply_comm_channel(x.samples, paths, iso, 1.0);
                const CVec y = awgn(r, var, rng);
                const auto dec = decoder.decode(y);
                for (std::size_t k = 0; k < m.bits.size(); ++k)
                    errs += dec.bits.bits[k] != m.bits[k];
            }
            errors[c] = errs;
        });
        BerPoint pt;
        pt.snr_db = snr;
        pt.packets = packets;
        pt.bit_errors = std::accumulate(errors.begin(), errors.end(), std::uint64_t{0});
        pt.ber = static_cast<double>(pt.bit_errors) / static_cast<double>(packets * static_cast<std::uint64_t>(p.K));
        pt.noise_variance = var;
        pt.bpsk_ber = bpsk_ber(snr);
        result.points.push_back(pt);
    }
    return result;
}

std::optional<double> snr_at_ber(std::span<const BerPoint> points, double target_ber)
{
    for (std::size_t i = 1; i < points.size(); ++i) {
        const auto& a = points[i - 1];
        const auto& b = points[i];
        if (a.ber >= target_ber && b.ber <= target_ber && a.ber > 0.0) {
            if (b.ber <= 0.0)
                return b.snr_db; // crossing somewhere in (a, b]; report the conservative end
            const double la = std::log10(a.ber), lb = std::log10(b.ber), lt = std::log10(target_ber);
            if (la == lb)
                return a.snr_db;
            return a.snr_db + (lt - la) / (lb - la) * (b.snr_db - a.snr_db);
        }
    }
    return std::nullopt;
}

double bpsk_snr_at_ber(double target_ber)
{
    double lo = -10.0, hi = 30.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (bpsk_ber(mid) > target_ber ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Radar

namespace {

struct RadarGeometry {
    const Segment* segment = nullptr;
    Beamformer bf;
    Eigen::VectorXcd combiner; // w, unit norm, over RF chains
    double T = 0.0;
    double tx_amplitude = 0.0; // scales the unit-energy packet
    int frame_length = 0;
};

RadarGeometry make_geometry(const SimConfig& cfg, std::span<const TargetSpec> targets)
{
    RadarGeometry g;
    const double probe = targets.empty() ? cfg.schedule.segments.front().center()
                                         : deg_to_rad(targets.front().angle_deg);
    g.segment = cfg.schedule.find(probe);
    if (!g.segment)
        throw ConfigError("radar: first target is outside every scheduled segment");
    for (const auto& t : targets)
        if (!g.segment->contains(deg_to_rad(t.angle_deg)))
            throw ConfigError("radar: all targets must lie in the same scheduled segment");
    g.bf = make_beamformers(g.segment->center(), g.segment->width(), cfg.array);
    const Eigen::VectorXcd a0 = steering(g.segment->center(), cfg.array.num_antennas);
    g.combiner = g.bf.rx_matrix.adjoint() * a0;
    g.combiner.normalize();
    g.T = cfg.link.sample_period();
    // EIRP = P_tx * N_a for the matched Tx beam; unit-energy packet over K+1 samples
    const double p_tx = cfg.link.eirp_watts() / cfg.array.num_antennas;
    g.tx_amplitude = std::sqrt(p_tx * (cfg.modulation.K + 1));
    g.frame_length = radar_frame_length(cfg, targets);
    return g;
}

RadarTarget to_radar_target(const SimConfig& cfg, const TargetSpec& t, double phase)
{
    LinkBudget lb = cfg.link;
    lb.range = t.range_m;
    RadarTarget rt;
    rt.gain = std::polar(std::sqrt(radar_gain(lb, t.rcs_dbsm)), phase);
    rt.angle = deg_to_rad(t.angle_deg);
    rt.delay = 2.0 * t.range_m / kSpeedOfLight;
    rt.doppler = 2.0 * t.velocity_mps * cfg.link.carrier_freq / kSpeedOfLight;
    rt.rcs_dbsm = t.rcs_dbsm;
    return rt;
}

// |signal peak|^2 / noise variance at the correlator output, per unit noise variance.
double peak_gain(const SimConfig& cfg, const RadarGeometry& g, const TargetSpec& t)
{
    const auto rt = to_radar_target(cfg, t, 0.0);
    const Eigen::VectorXcd a = steering(rt.angle, cfg.array.num_antennas);
    const double tx = std::norm(a.dot(g.bf.tx_beam));
    const double rx = std::norm(g.combiner.dot(g.bf.rx_matrix.adjoint() * a));
    const double es = g.tx_amplitude * g.tx_amplitude; // packet energy
    return std::norm(rt.gain) * tx * rx * es;
}

std::size_t circular_distance(std::size_t a, std::size_t b, std::size_t n)
{
    const std::size_t d = a > b ? a - b : b - a;
    return std::min(d, n - d);
}

} // namespace

int radar_frame_length(const SimConfig& cfg, std::span<const TargetSpec> targets)
{
    if (cfg.frame_length > 0)
        return cfg.frame_length;
    double max_delay = 0.0;
    for (const auto& t : targets)
        max_delay = std::max(max_delay, 2.0 * t.range_m / kSpeedOfLight * cfg.link.bandwidth);
    const auto needed = static_cast<std::size_t>(cfg.modulation.K + 1) +
                        static_cast<std::size_t>(std::ceil(max_delay)) +
                        static_cast<std::size_t>(2 * (cfg.cfar.window + cfg.cfar.guard) + 2);
    return static_cast<int>(next_pow2(needed));
}

double radar_noise_for_snr(const SimConfig& cfg, std::span<const TargetSpec> targets, double snr_db)
{
    if (targets.empty())
        throw ConfigError("radar: SNR sweep needs a target");
    const auto g = make_geometry(cfg, targets);
    return peak_gain(cfg, g, targets.front()) / (g.tx_amplitude * g.tx_amplitude) / db_to_linear(snr_db);
}

double radar_post_correlation_snr_db(const SimConfig& cfg, std::span<const TargetSpec> targets,
                                     double noise_variance)
{
    if (targets.empty())
        return -std::numeric_limits<double>::infinity();
    const auto g = make_geometry(cfg, targets);
    // noise power at the correlator output is sigma^2 * E_s
    return linear_to_db(peak_gain(cfg, g, targets.front()) / (noise_variance * g.tx_amplitude * g.tx_amplitude));
}

RadarTrial run_radar_trial(const SimConfig& cfg, std::span<const TargetSpec> targets,
                           double noise_variance, Rng& rng)
{
    const auto g = make_geometry(cfg, targets);
    const double var = noise_variance < 0.0 ? cfg.link.noise_variance() : noise_variance;
    const auto& p = cfg.modulation;
    const HuffmanEncoder encoder(p);
    const auto Nf = static_cast<std::size_t>(g.frame_length);
    const int F = cfg.schedule.frames_per_cpi;
    const double frame_duration = static_cast<double>(Nf) * g.T;

    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    std::vector<RadarTarget> rts;
    for (const auto& t : targets)
        rts.push_back(to_radar_target(cfg, t, phase(rng)));

    std::bernoulli_distribution coin(0.5);
    BitMessage m;
    m.bits.resize(static_cast<std::size_t>(p.K));

    std::vector<CorrelationProfile> profiles;
    Eigen::MatrixXcd snapshots(cfg.array.num_rf_chains, static_cast<Eigen::Index>(Nf) * F);
    std::vector<double> frame_times;
    for (int f = 0; f < F; ++f) {
        for (auto& b : m.bits)
            b = coin(rng) ? 1 : 0;
        auto x = encoder.encode(m, g.T).samples;
        for (auto& v : x)
            v *= g.tx_amplitude;
        CVec frame(Nf, cdouble{0.0});
        std::copy(x.begin(), x.end(), frame.begin());

        const double t0 = f * frame_duration;
        Eigen::MatrixXcd y = apply_radar_channel(frame, rts, g.bf, g.T, t0);
        add_awgn(y, var, rng);
        snapshots.middleCols(static_cast<Eigen::Index>(f) * static_cast<Eigen::Index>(Nf),
                             static_cast<Eigen::Index>(Nf)) = y;

        const Eigen::VectorXcd r = y.transpose() * g.combiner.conjugate(); // w^H y[n]
        CVec rv(r.data(), r.data() + r.size());
        profiles.push_back(cross_correlate(x, rv));
        frame_times.push_back(t0);
    }

    // Peaks of the first frame: CFAR detections that are local maxima, minus
    // the Huffman side-peak ghosts at -+K lags of a stronger peak.
    const auto& prof0 = profiles.front();
    const auto pow0 = prof0.power();
    const auto dets = os_cfar(prof0, cfg.cfar);
    std::vector<std::size_t> peaks;
    for (const auto& d : dets) {
        const double l = pow0[(d.cell + Nf - 1) % Nf];
        const double r = pow0[(d.cell + 1) % Nf];
        if (d.statistic > l && d.statistic >= r)
            peaks.push_back(d.cell);
    }
    const double ghost_ratio = 4.0 * p.eta * p.eta;
    std::vector<std::size_t> kept;
    const auto K = static_cast<std::size_t>(p.K);
    for (auto c : peaks) {
        bool ghost = false;
        for (auto o : peaks) {
            if (o == c)
                continue;
            const std::size_t d = circular_distance(c, o, Nf);
            if ((d + 1 >= K && d <= K + 1) && pow0[c] < ghost_ratio * pow0[o])
                ghost = true;
        }
        if (!ghost)
            kept.push_back(c);
    }

    RadarTrial trial;
    trial.detected.assign(targets.size(), false);
    trial.estimates.resize(targets.size());

    // Noise cells: away from every target main lobe and its ghosts.
    const auto exclusion = static_cast<std::size_t>(cfg.cfar.window + cfg.cfar.guard);
    std::vector<bool> noise_cell(Nf, true);
    for (const auto& rt : rts) {
        const auto c = static_cast<std::size_t>(std::llround(rt.delay / g.T)) % Nf;
        for (std::size_t n = 0; n < Nf; ++n) {
            const std::size_t d = circular_distance(n, c, Nf);
            if (d <= exclusion || (d + exclusion >= K && d <= K + exclusion))
                noise_cell[n] = false;
        }
    }
    for (std::size_t n = 0; n < Nf; ++n)
        trial.noise_cells += noise_cell[n];
    for (const auto& d : dets)
        trial.false_alarms += noise_cell[d.cell];

    // Angle: beam-domain MUSIC over the whole CPI.
    const int Q = std::clamp(static_cast<int>(kept.size()), 1, static_cast<int>(cfg.array.num_rf_chains) - 1);
    std::vector<double> angles;
    if (!kept.empty() && cfg.array.num_rf_chains > 1) {
        const Eigen::MatrixXcd C = sample_covariance(snapshots);
        angles = music_angles(C, g.bf.rx_matrix, Q, AngleScan{g.segment->lo, g.segment->hi, deg_to_rad(0.5)});
    }

    for (std::size_t q = 0; q < rts.size(); ++q) {
        const double true_cell = rts[q].delay / g.T;
        const auto nearest = static_cast<std::size_t>(std::llround(true_cell)) % Nf;
        const std::size_t* hit = nullptr;
        for (const auto& c : kept)
            if (circular_distance(c, nearest, Nf) <= 1 && (!hit || pow0[c] > pow0[*hit]))
                hit = &c;
        if (!hit)
            continue;
        trial.detected[q] = true;

        std::vector<double> phases;
        double delay_sum = 0.0;
        for (const auto& prof : profiles) {
            // per-frame integer peak within one cell of the first-frame peak
            std::size_t best = *hit;
            for (std::size_t c : {(*hit + Nf - 1) % Nf, (*hit + 1) % Nf})
                if (std::norm(prof.values[c]) > std::norm(prof.values[best]))
                    best = c;
            double tau = estimate_delay(prof, best, g.T);
            if (tau > 0.5 * static_cast<double>(Nf) * g.T)
                tau -= static_cast<double>(Nf) * g.T;
            delay_sum += tau;
            phases.push_back(std::arg(prof.values[best]));
        }
        const double delay = delay_sum / static_cast<double>(profiles.size());
        const double doppler = profiles.size() >= 2 ? estimate_doppler(phases, frame_times) : 0.0;

        double angle = std::numeric_limits<double>::quiet_NaN();
        double best_err = std::numeric_limits<double>::infinity();
        for (double a : angles)
            if (std::abs(a - rts[q].angle) < best_err) {
                best_err = std::abs(a - rts[q].angle);
                angle = a;
            }
        auto rep = EstimateReport::from_estimates(*hit, delay, doppler, angle, cfg.link.carrier_freq);
        rep.statistic = pow0[*hit];
        for (const auto& d : dets)
            if (d.cell == *hit)
                rep.threshold = d.threshold;
        trial.estimates[q] = rep;
    }
    return trial;
}

RadarResult run_radar(const SimConfig& cfg, std::span<const TargetSpec> targets)
{
    cfg.validate();
    if (targets.empty() && cfg.radar_sweep.kind == RadarSweep::Kind::Snr)
        throw ConfigError("radar: SNR sweep needs at least one target");

    RadarResult result;
    result.sweep = cfg.radar_sweep.kind;
    for (std::size_t pi = 0; pi < cfg.radar_sweep.values.size(); ++pi) {
        const double value = cfg.radar_sweep.values[pi];
        std::vector<TargetSpec> tg(targets.begin(), targets.end());
        double var = cfg.link.noise_variance();
        if (cfg.radar_sweep.kind == RadarSweep::Kind::Range) {
            if (!tg.empty())
                tg.front().range_m = value;
        } else {
            var = radar_noise_for_snr(cfg, tg, value);
        }

        std::vector<RadarTrial> trials(static_cast<std::size_t>(cfg.trials));
        parallel_for(trials.size(), cfg.threads, [&](std::size_t t) {
            Rng rng = substream(cfg.seed, pi, t);
            trials[t] = run_radar_trial(cfg, tg, var, rng);
        });

        RadarPoint pt;
        pt.value = value;
        pt.trials = cfg.trials;
        pt.post_correlation_snr_db = radar_post_correlation_snr_db(cfg, tg, var);
        double se_r = 0.0, se_v = 0.0, se_a = 0.0;
        std::uint64_t hits = 0, angle_hits = 0, fa = 0, cells = 0;
        for (const auto& tr : trials) {
            fa += tr.false_alarms;
            cells += tr.noise_cells;
            for (std::size_t q = 0; q < tg.size(); ++q) {
                if (!tr.detected[q])
                    continue;
                ++hits;
                const auto& e = tr.estimates[q];
                se_r += std::pow(e.range_m - tg[q].range_m, 2);
                se_v += std::pow(e.velocity_mps - tg[q].velocity_mps, 2);
                if (std::isfinite(e.angle_rad)) {
                    se_a += std::pow(rad_to_deg(e.angle_rad) - tg[q].angle_deg, 2);
                    ++angle_hits;
                }
            }
        }
        const double nan = std::numeric_limits<double>::quiet_NaN();
        pt.rmse_range_m = hits ? std::sqrt(se_r / double(hits)) : nan;
        pt.rmse_velocity_mps = hits ? std::sqrt(se_v / double(hits)) : nan;
        pt.rmse_angle_deg = angle_hits ? std::sqrt(se_a / double(angle_hits)) : nan;
        pt.detection_rate = tg.empty() ? 0.0 : double(hits) / double(tg.size() * trials.size());
        pt.false_alarm_rate = cells ? double(fa) / double(cells) : 0.0;
        result.points.push_back(pt);
    }
    return result;
}

// ---------------------------------------------------------------------------
// CFAR calibration

CfarCalibration run_cfar_calibration(const SimConfig& cfg, std::uint64_t cells)
{
    cfg.cfar.validate();
    if (static_cast<double>(cells) < 100.0 / cfg.cfar.pfa)
        throw InsufficientLength("cfar calibration: need at least 100/pfa cells");
    const auto& p = cfg.modulation;
    const HuffmanEncoder encoder(p);
    const auto Nf = static_cast<std::uint64_t>(radar_frame_length(cfg, {}));
    const std::uint64_t frames = (cells + Nf - 1) / Nf;

    std::vector<std::uint64_t> alarms(frames, 0);
    parallel_for(frames, cfg.threads, [&](std::size_t f) {
        Rng rng = substream(cfg.seed, 0xCFA2, f);
        std::bernoulli_distribution coin(0.5);
        BitMessage m;
        m.bits.resize(static_cast<std::size_t>(p.K));
        for (auto& b : m.bits)
            b = coin(rng) ? 1 : 0;
        const auto x = encoder.encode(m).samples;
        CVec noise(Nf);
        for (auto& v : noise)
            v = complex_gaussian(rng, 1.0);
        alarms[f] = os_cfar(cross_correlate(x, noise), cfg.cfar).size();
    });

    CfarCalibration out;
    out.pfa_target = cfg.cfar.pfa;
    out.alpha = cfg.cfar.alpha;
    out.cells = frames * Nf;
    out.false_alarms = std::accumulate(alarms.begin(), alarms.end(), std::uint64_t{0});
    const double n = static_cast<double>(out.cells);
    const double phat = static_cast<double>(out.false_alarms) / n;
    out.empirical_pfa = phat;
    constexpr double z = 1.959963984540054;
    const double denom = 1.0 + z * z / n;
    const double center = (phat + z * z / (2.0 * n)) / denom;
    const double half = z * std::sqrt(phat * (1.0 - phat) / n + z * z / (4.0 * n * n)) / denom;
    out.ci_low = std::max(0.0, center - half);
    out.ci_high = std::min(1.0, center + half);
    return out;
}

} // namespace mocz
