// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "mocz/errors.hpp"
#include "mocz/simulator.hpp"

using namespace mocz;

namespace {

SimConfig small_ber_config(ChannelModel model)
{
    SimConfig cfg;
    cfg.modulation = ModulationParams::make(31);
    cfg.channel_model = model;
    cfg.trials = 300;
    cfg.threads = 1;
    cfg.seed = 99;
    return cfg;
}

} // namespace

TEST_CASE("SNR conventions")
{
    CHECK(noise_variance_for_ebn0(0.0, 127) == doctest::Approx(1.0 / 127));
    CHECK(noise_variance_for_ebn0(10.0, 10) == doctest::Approx(0.01));
    CHECK(bpsk_ber(0.0) == doctest::Approx(0.5 * std::erfc(1.0)).epsilon(1e-14));
    CHECK(bpsk_snr_at_ber(1e-3) == doctest::Approx(6.79).epsilon(2e-3));
    CHECK(bpsk_ber(bpsk_snr_at_ber(1e-3)) == doctest::Approx(1e-3).epsilon(1e-6));

    std::vector<BerPoint> pts(3);
    pts[0].snr_db = 0;
    pts[0].ber = 1e-1;
    pts[1].snr_db = 5;
    pts[1].ber = 1e-2;
    pts[2].snr_db = 10;
    pts[2].ber = 1e-4;
    CHECK(*snr_at_ber(pts, 1e-3) == doctest::Approx(7.5));
    CHECK(!snr_at_ber(pts, 1e-6).has_value());
}

TEST_CASE("comm channel draws")
{
    Rng rng(1);
    const auto a = draw_comm_channel(ChannelModel::Awgn, rng);
    REQUIRE(a.size() == 1);
    CHECK(a[0].gain == cdouble(1.0));
    CHECK(draw_comm_channel(ChannelModel::RayleighFlat, rng).size() == 1);
    double total = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const auto taps = draw_comm_channel(ChannelModel::RicianSelective, rng);
        REQUIRE(taps.size() == 4);
        for (std::size_t k = 0; k < taps.size(); ++k) {
            CHECK(taps[k].delay == doctest::Approx(static_cast<double>(k)));
            total += std::norm(taps[k].gain);
        }
    }
    CHECK(total / n == doctest::Approx(1.0).epsilon(0.02));
    CHECK(channel_model_from_string(to_string(ChannelModel::RicianSelective)) == ChannelModel::RicianSelective);
    CHECK_THROWS_AS(channel_model_from_string("nope"), ConfigError);
}

TEST_CASE("noise-free BER is zero on every channel model")
{
    for (auto model : {ChannelModel::Awgn, ChannelModel::RayleighFlat, ChannelModel::RicianSelective}) {
        auto cfg = small_ber_config(model);
        cfg.snr_grid_db = {200.0};
        const auto r = run_ber(cfg);
        REQUIRE(r.points.size() == 1);
        CHECK(r.points[0].bit_errors == 0);
        CHECK(r.points[0].packets == 300);
    }
}

TEST_CASE("BER is reproducible and independent of the worker count")
{
    auto cfg = small_ber_config(ChannelModel::RicianSelective);
    cfg.snr_grid_db = {2.0, 6.0};
    cfg.trials = 700;
    const auto a = run_ber(cfg);
    cfg.threads = 3;
    const auto b = run_ber(cfg);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        CHECK(a.points[i].bit_errors == b.points[i].bit_errors);
        CHECK(a.points[i].ber == b.points[i].ber);
    }
    cfg.seed = 100;
    const auto c = run_ber(cfg);
    CHECK(c.points[0].bit_errors != a.points[0].bit_errors);
}

TEST_CASE("AWGN BER falls with SNR")
{
    auto cfg = small_ber_config(ChannelModel::Awgn);
    cfg.snr_grid_db = {0.0, 3.0, 6.0};
    cfg.trials = 2000;
    const auto r = run_ber(cfg);
    for (std::size_t i = 1; i < r.points.size(); ++i) {
        const auto& lo = r.points[i - 1];
        const auto& hi = r.points[i];
        const double bits = static_cast<double>(hi.packets) * 31;
        const double sigma = std::sqrt(lo.ber * (1 - lo.ber) / bits + hi.ber * (1 - hi.ber) / bits);
        CHECK(hi.ber <= lo.ber + 2 * sigma);
        CHECK(hi.ber == doctest::Approx(static_cast<double>(hi.bit_errors) / bits));
    }
}

TEST_CASE("noiseless radar trial on the grid is exact")
{
    SimConfig cfg;
    cfg.modulation = ModulationParams::make(127);
    cfg.schedule.frames_per_cpi = 4;
    const double cell = kSpeedOfLight / (2 * cfg.link.bandwidth);
    TargetSpec t;
    t.range_m = 20 * cell;
    t.angle_deg = 0.0;
    const std::vector<TargetSpec> targets{t};
    Rng rng(5);
    const auto trial = run_radar_trial(cfg, targets, 0.0, rng);
    REQUIRE(trial.detected.size() == 1);
    REQUIRE(trial.detected[0]);
    const auto& e = trial.estimates[0];
    CHECK(std::abs(e.range_m - t.range_m) < 1e-6 * cell);
    CHECK(std::abs(e.velocity_mps) < 1e-6);
    CHECK(std::abs(rad_to_deg(e.angle_rad)) < 0.01); // on the scan grid; only the dB-parabola nudge remains
}

TEST_CASE("radar sweep is deterministic")
{
    SimConfig cfg;
    cfg.modulation = ModulationParams::make(31);
    cfg.schedule.frames_per_cpi = 4;
    cfg.trials = 6;
    cfg.radar_sweep.kind = RadarSweep::Kind::Snr;
    cfg.radar_sweep.values = {20.0, 30.0};
    cfg.threads = 1;
    const auto a = run_radar(cfg, cfg.targets);
    cfg.threads = 2;
    const auto b = run_radar(cfg, cfg.targets);
    REQUIRE(a.points.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(a.points[i].rmse_range_m == b.points[i].rmse_range_m);
        CHECK(a.points[i].rmse_angle_deg == b.points[i].rmse_angle_deg);
        CHECK(a.points[i].post_correlation_snr_db == doctest::Approx(a.points[i].value).epsilon(1e-9));
    }
}

TEST_CASE("CFAR calibration sanity")
{
    SimConfig cfg;
    cfg.modulation = ModulationParams::make(31);
    cfg.cfar = CfarConfig::make(12, 2, 18, 0.5);
    const auto half = run_cfar_calibration(cfg, 100000);
    CHECK(half.empirical_pfa == doctest::Approx(0.5).epsilon(0.1));
    CHECK(half.ci_low <= half.empirical_pfa);
    CHECK(half.ci_high >= half.empirical_pfa);

    cfg.cfar = CfarConfig::make(12, 2, 18, 1e-2);
    const auto base = run_cfar_calibration(cfg, 200000);
    cfg.cfar.alpha *= 2;
    const auto stricter = run_cfar_calibration(cfg, 200000);
    CHECK(stricter.empirical_pfa < base.empirical_pfa);

    cfg.cfar = CfarConfig::make();
    CHECK_THROWS_AS(run_cfar_calibration(cfg, 1000), InsufficientLength);
}

TEST_CASE("config validation")
{
    SimConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.trials = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = SimConfig{};
    cfg.schedule.segments = {Segment{-0.1, 0.1}, Segment{0.05, 0.2}};
    CHECK_THROWS(cfg.validate());
}
