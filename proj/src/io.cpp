// SPDX-License-Identifier: Apache-2.0

#include "mocz/io.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <unistd.h>

#include "mocz/errors.hpp"

namespace mocz {

using nlohmann::json;

namespace {

std::string fmt_g(double v, int precision = 10)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return buf;
}

json number_or_null(double v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where)
{
    if (!j.is_object())
        throw ConfigError(where + ": expected an object");
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k))
            throw ConfigError(where + ": unknown field '" + k + "'");
}

template <class T>
void read_opt(const json& j, const char* key, T& out, const std::string& where)
{
    if (!j.contains(key))
        return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

} // namespace

void write_sequence_csv(std::ostream& os, std::span<const cdouble> x)
{
    for (const auto& v : x)
        os << fmt_g(v.real(), 17) << ',' << fmt_g(v.imag(), 17) << '\n';
}

std::string sequence_csv(std::span<const cdouble> x)
{
    std::ostringstream os;
    write_sequence_csv(os, x);
    return os.str();
}

CVec read_sequence_csv(std::istream& is)
{
    CVec out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line[0] == '#')
            continue;
        if (out.empty() && lineno == 1 && line == "re,im")
            continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ConfigError("sequence CSV line " + std::to_string(lineno) + ": expected 're,im'");
        try {
            std::size_t p1 = 0, p2 = 0;
            const std::string re = line.substr(0, comma), im = line.substr(comma + 1);
            const double a = std::stod(re, &p1);
            const double b = std::stod(im, &p2);
            if (p1 != re.size() || p2 != im.size())
                throw std::invalid_argument("trailing characters");
            out.emplace_back(a, b);
        } catch (const std::exception&) {
            throw ConfigError("sequence CSV line " + std::to_string(lineno) + ": malformed number");
        }
    }
    return out;
}

CVec read_sequence_csv(const std::filesystem::path& path)
{
    std::ifstream f(path);
    if (!f)
        throw IoError("cannot open " + path.string());
    return read_sequence_csv(f);
}

void atomic_write(const std::filesystem::path& path, const std::string& content)
{
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f)
            throw IoError("cannot create " + tmp.string());
        f << content;
        f.flush();
        if (!f)
            throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot rename onto " + path.string());
    }
}

std::string read_text(const std::filesystem::path& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

SimConfig sim_config_from_json(const json& j)
{
    check_keys(j, {"modulation", "array", "link", "cfar", "schedule", "channel_model", "snr_grid_db", "trials",
                   "seed", "threads", "frame_length", "targets", "paths", "radar"},
               "config");
    SimConfig cfg;

    if (j.contains("modulation")) {
        const auto& m = j["modulation"];
        check_keys(m, {"K", "lambda"}, "modulation");
        int K = cfg.modulation.K;
        double lambda = cfg.modulation.lambda;
        read_opt(m, "K", K, "modulation");
        read_opt(m, "lambda", lambda, "modulation");
        try {
            cfg.modulation = ModulationParams::make(K, lambda);
        } catch (const InvalidParameter& e) {
            throw ConfigError(std::string("modulation: ") + e.what());
        }
    }
    if (j.contains("array")) {
        const auto& a = j["array"];
        check_keys(a, {"num_antennas", "num_rf_chains"}, "array");
        read_opt(a, "num_antennas", cfg.array.num_antennas, "array");
        read_opt(a, "num_rf_chains", cfg.array.num_rf_chains, "array");
    }
    if (j.contains("link")) {
        const auto& l = j["link"];
        check_keys(l, {"fc_hz", "bandwidth_hz", "eirp_dbm", "noise_psd_w_per_hz"}, "link");
        read_opt(l, "fc_hz", cfg.link.carrier_freq, "link");
        read_opt(l, "bandwidth_hz", cfg.link.bandwidth, "link");
        read_opt(l, "eirp_dbm", cfg.link.eirp_dbm, "link");
        read_opt(l, "noise_psd_w_per_hz", cfg.link.noise_psd, "link");
    }
    if (j.contains("cfar")) {
        const auto& c = j["cfar"];
        check_keys(c, {"window", "guard", "os_rank", "pfa"}, "cfar");
        int window = 12, guard = 2, rank = -1;
        double pfa = 1e-4;
        read_opt(c, "window", window, "cfar");
        read_opt(c, "guard", guard, "cfar");
        read_opt(c, "os_rank", rank, "cfar");
        read_opt(c, "pfa", pfa, "cfar");
        if (rank < 0)
            rank = static_cast<int>(std::ceil(0.75 * 2 * window));
        try {
            cfg.cfar = CfarConfig::make(window, guard, rank, pfa);
        } catch (const InvalidParameter& e) {
            throw ConfigError(std::string("cfar: ") + e.what());
        }
    }
    if (j.contains("schedule")) {
        const auto& s = j["schedule"];
        check_keys(s, {"segments_deg", "frames_per_cpi", "t_swc_s"}, "schedule");
        if (s.contains("segments_deg")) {
            std::vector<std::array<double, 2>> segs;
            read_opt(s, "segments_deg", segs, "schedule");
            cfg.schedule.segments.clear();
            for (const auto& [lo, hi] : segs)
                cfg.schedule.segments.push_back({deg_to_rad(lo), deg_to_rad(hi)});
        }
        read_opt(s, "frames_per_cpi", cfg.schedule.frames_per_cpi, "schedule");
        read_opt(s, "t_swc_s", cfg.schedule.t_swc, "schedule");
    }
    if (j.contains("channel_model")) {
        std::string m;
        read_opt(j, "channel_model", m, "config");
        cfg.channel_model = channel_model_from_string(m);
    }
    read_opt(j, "snr_grid_db", cfg.snr_grid_db, "config");
    read_opt(j, "trials", cfg.trials, "config");
    read_opt(j, "seed", cfg.seed, "config");
    read_opt(j, "threads", cfg.threads, "config");
    read_opt(j, "frame_length", cfg.frame_length, "config");

    if (j.contains("targets")) {
        if (!j["targets"].is_array())
            throw ConfigError("targets: expected an array");
        cfg.targets.clear();
        for (const auto& t : j["targets"]) {
            check_keys(t, {"range_m", "velocity_mps", "angle_deg", "rcs_dbsm"}, "targets[]");
            TargetSpec ts;
            read_opt(t, "range_m", ts.range_m, "targets[]");
            read_opt(t, "velocity_mps", ts.velocity_mps, "targets[]");
            read_opt(t, "angle_deg", ts.angle_deg, "targets[]");
            read_opt(t, "rcs_dbsm", ts.rcs_dbsm, "targets[]");
            cfg.targets.push_back(ts);
        }
    }
    if (j.contains("paths")) {
        if (!j["paths"].is_array())
            throw ConfigError("paths: expected an array");
        for (const auto& p : j["paths"]) {
            check_keys(p, {"range_m", "velocity_mps", "angle_deg", "kappa"}, "paths[]");
            PathSpec ps;
            read_opt(p, "range_m", ps.range_m, "paths[]");
            read_opt(p, "velocity_mps", ps.velocity_mps, "paths[]");
            read_opt(p, "angle_deg", ps.angle_deg, "paths[]");
            read_opt(p, "kappa", ps.kappa, "paths[]");
            cfg.paths.push_back(ps);
        }
    }
    if (j.contains("radar")) {
        const auto& r = j["radar"];
        check_keys(r, {"sweep", "values"}, "radar");
        std::string kind = "range";
        read_opt(r, "sweep", kind, "radar");
        if (kind == "range")
            cfg.radar_sweep.kind = RadarSweep::Kind::Range;
        else if (kind == "snr")
            cfg.radar_sweep.kind = RadarSweep::Kind::Snr;
        else
            throw ConfigError("radar.sweep: expected 'range' or 'snr'");
        read_opt(r, "values", cfg.radar_sweep.values, "radar");
    }
    cfg.validate();
    return cfg;
}

json to_json(const SimConfig& cfg)
{
    json segs = json::array();
    for (const auto& s : cfg.schedule.segments)
        segs.push_back({rad_to_deg(s.lo), rad_to_deg(s.hi)});
    json targets = json::array();
    for (const auto& t : cfg.targets)
        targets.push_back({{"range_m", t.range_m}, {"velocity_mps", t.velocity_mps},
                           {"angle_deg", t.angle_deg}, {"rcs_dbsm", t.rcs_dbsm}});
    json paths = json::array();
    for (const auto& p : cfg.paths)
        paths.push_back({{"range_m", p.range_m}, {"velocity_mps", p.velocity_mps},
                         {"angle_deg", p.angle_deg}, {"kappa", p.kappa}});
    return {
        {"modulation", {{"K", cfg.modulation.K}, {"lambda", cfg.modulation.lambda}}},
        {"array", {{"num_antennas", cfg.array.num_antennas}, {"num_rf_chains", cfg.array.num_rf_chains}}},
        {"link",
         {{"fc_hz", cfg.link.carrier_freq},
          {"bandwidth_hz", cfg.link.bandwidth},
          {"eirp_dbm", cfg.link.eirp_dbm},
          {"noise_psd_w_per_hz", cfg.link.noise_psd}}},
        {"cfar",
         {{"window", cfg.cfar.window}, {"guard", cfg.cfar.guard}, {"os_rank", cfg.cfar.os_rank},
          {"pfa", cfg.cfar.pfa}}},
        {"schedule",
         {{"segments_deg", segs}, {"frames_per_cpi", cfg.schedule.frames_per_cpi}, {"t_swc_s", cfg.schedule.t_swc}}},
        {"channel_model", to_string(cfg.channel_model)},
        {"snr_grid_db", cfg.snr_grid_db},
        {"trials", cfg.trials},
        {"seed", cfg.seed},
        {"threads", cfg.threads},
        {"frame_length", cfg.frame_length},
        {"targets", targets},
        {"paths", paths},
        {"radar",
         {{"sweep", cfg.radar_sweep.kind == RadarSweep::Kind::Snr ? "snr" : "range"},
          {"values", cfg.radar_sweep.values}}},
    };
}

SimConfig load_sim_config(const std::filesystem::path& path)
{
    const std::string text = read_text(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return sim_config_from_json(j);
}

json to_json(const EstimateReport& r)
{
    return {{"cell", r.cell},
            {"range_m", number_or_null(r.range_m)},
            {"velocity_mps", number_or_null(r.velocity_mps)},
            {"angle_deg", number_or_null(rad_to_deg(r.angle_rad))},
            {"statistic", number_or_null(r.statistic)},
            {"threshold", number_or_null(r.threshold)}};
}

json to_json(const BerResult& r)
{
    json pts = json::array();
    for (const auto& p : r.points)
        pts.push_back({{"snr_db", p.snr_db},
                       {"ber", p.ber},
                       {"packets", p.packets},
                       {"bit_errors", p.bit_errors},
                       {"noise_variance", p.noise_variance},
                       {"bpsk_ber", p.bpsk_ber}});
    json j = {{"channel_model", to_string(r.channel_model)}, {"K", r.K}, {"points", pts}};
    const auto at = snr_at_ber(r.points, 1e-3);
    j["snr_db_at_ber_1e-3"] = at ? json(*at) : json(nullptr);
    j["gap_db_at_ber_1e-3"] = at ? json(*at - bpsk_snr_at_ber(1e-3)) : json(nullptr);
    return j;
}

json to_json(const RadarResult& r)
{
    json pts = json::array();
    for (const auto& p : r.points)
        pts.push_back({{"value", p.value},
                       {"post_correlation_snr_db", number_or_null(p.post_correlation_snr_db)},
                       {"rmse_range_m", number_or_null(p.rmse_range_m)},
                       {"rmse_velocity_mps", number_or_null(p.rmse_velocity_mps)},
                       {"rmse_angle_deg", number_or_null(p.rmse_angle_deg)},
                       {"detection_rate", p.detection_rate},
                       {"false_alarm_rate", p.false_alarm_rate},
                       {"trials", p.trials}});
    return {{"sweep", r.sweep == RadarSweep::Kind::Snr ? "snr_db" : "range_m"}, {"points", pts}};
}

json to_json(const CfarCalibration& c)
{
    return {{"pfa_target", c.pfa_target}, {"alpha", c.alpha},       {"cells", c.cells},
            {"false_alarms", c.false_alarms}, {"empirical_pfa", c.empirical_pfa},
            {"ci_low", c.ci_low},           {"ci_high", c.ci_high}};
}

std::string ber_csv(const BerResult& r)
{
    std::ostringstream os;
    os << "snr_db,ber,packets,bit_errors,noise_variance,bpsk_ber\n";
    for (const auto& p : r.points)
        os << fmt_g(p.snr_db) << ',' << fmt_g(p.ber) << ',' << p.packets << ',' << p.bit_errors << ','
           << fmt_g(p.noise_variance) << ',' << fmt_g(p.bpsk_ber) << '\n';
    return os.str();
}

std::string radar_csv(const RadarResult& r)
{
    std::ostringstream os;
    os << (r.sweep == RadarSweep::Kind::Snr ? "snr_db" : "range_m")
       << ",post_correlation_snr_db,rmse_range_m,rmse_velocity_mps,rmse_angle_deg,detection_rate,"
          "false_alarm_rate,trials\n";
    for (const auto& p : r.points)
        os << fmt_g(p.value) << ',' << fmt_g(p.post_correlation_snr_db) << ',' << fmt_g(p.rmse_range_m) << ','
           << fmt_g(p.rmse_velocity_mps) << ',' << fmt_g(p.rmse_angle_deg) << ',' << fmt_g(p.detection_rate)
           << ',' << fmt_g(p.false_alarm_rate) << ',' << p.trials << '\n';
    return os.str();
}

std::string ambiguity_grid(const AmbiguityMap& af)
{
    std::ostringstream os;
    os << "# lag doppler_bin magnitude (doppler_bins=" << af.doppler_bins << ")\n";
    for (int lag = -af.max_lag; lag <= af.max_lag; ++lag) {
        for (int col = 0; col < af.doppler_bins; ++col) {
            const int bin = af.first_bin() + col;
            os << lag << ' ' << bin << ' ' << fmt_g(af.at(lag, bin)) << '\n';
        }
        os << '\n';
    }
    return os.str();
}

} // namespace mocz
