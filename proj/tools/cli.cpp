// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "mocz/dizet.hpp"
#include "mocz/errors.hpp"
#include "mocz/io.hpp"
#include "mocz/radar.hpp"
#include "mocz/simulator.hpp"

namespace fs = std::filesystem;

namespace mocz::cli {

BitMessage parse_bits(const std::string& text, int K)
{
    if (K < 1)
        throw InvalidParameter("--k must be positive");
    auto lower = text;
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });

    std::string binary;
    if (lower.rfind("0b", 0) == 0) {
        binary = lower.substr(2);
    } else {
        std::string hex = lower.rfind("0x", 0) == 0 ? lower.substr(2) : lower;
        const bool plain_binary = lower.size() == static_cast<std::size_t>(K) &&
                                  lower.find_first_not_of("01") == std::string::npos;
        if (plain_binary) {
            binary = lower;
        } else {
            if (hex.empty() || hex.find_first_not_of("0123456789abcdef") != std::string::npos)
                throw InvalidParameter("--bits: '" + text + "' is neither binary nor hex");
            for (char c : hex) {
                const int v = std::isdigit(static_cast<unsigned char>(c)) ? c - '0' : c - 'a' + 10;
                for (int b = 3; b >= 0; --b)
                    binary.push_back(static_cast<char>('0' + ((v >> b) & 1)));
            }
            if (binary.size() < static_cast<std::size_t>(K))
                binary.insert(0, static_cast<std::size_t>(K) - binary.size(), '0');
            const std::size_t extra = binary.size() - static_cast<std::size_t>(K);
            if (binary.find('1') < extra)
                throw InvalidParameter("--bits: hex value does not fit in K bits");
            binary.erase(0, extra);
        }
    }
    if (binary.size() != static_cast<std::size_t>(K))
        throw InvalidParameter("--bits: got " + std::to_string(binary.size()) + " bits, expected K=" +
                               std::to_string(K));
    return BitMessage::from_binary(binary);
}

namespace {

struct Options {
    std::string config;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    int k = 0;
    double lambda = 0.5;
    std::string bits;
    std::string in_file;
    std::vector<double> snr_db;
    int trials = 0;
    int max_lag = -1;
    int doppler_bins = 0;
    double cells = 0;
};

void emit(const Options& o, const std::string& name, const std::string& content, std::ostream& out)
{
    if (o.out_dir.empty()) {
        out << content;
        return;
    }
    std::error_code ec;
    fs::create_directories(o.out_dir, ec);
    if (ec)
        throw IoError("cannot create output directory " + o.out_dir);
    atomic_write(fs::path(o.out_dir) / name, content);
}

SimConfig resolve_config(const Options& o)
{
    SimConfig cfg = o.config.empty() ? SimConfig{} : load_sim_config(o.config);
    if (o.seed)
        cfg.seed = *o.seed;
    if (o.k > 0)
        cfg.modulation = ModulationParams::make(o.k, o.lambda);
    if (!o.snr_db.empty())
        cfg.snr_grid_db = o.snr_db;
    if (o.trials > 0)
        cfg.trials = o.trials;
    cfg.validate();
    return cfg;
}

ModulationParams require_params(const Options& o)
{
    if (o.k < 1)
        throw ConfigError("--k is required");
    return ModulationParams::make(o.k, o.lambda);
}

int cmd_encode(const Options& o, std::ostream& out)
{
    const auto p = require_params(o);
    const auto x = encode(parse_bits(o.bits, p.K), p);
    emit(o, "sequence.csv", sequence_csv(x.samples), out);
    return kOk;
}

int cmd_decode(const Options& o, std::ostream& out)
{
    const auto p = require_params(o);
    if (o.in_file.empty())
        throw ConfigError("--in is required");
    const auto y = read_sequence_csv(fs::path(o.in_file));
    const auto d = DizetDecoder(p).decode(y);
    nlohmann::json margins = nlohmann::json::array();
    for (double m : d.margins)
        margins.push_back(std::isfinite(m) ? nlohmann::json(m) : nlohmann::json(m > 0 ? 1e308 : -1e308));
    const nlohmann::json j = {{"K", p.K}, {"bits", d.bits.to_string()}, {"margins", margins}};
    emit(o, "decode.json", j.dump(2) + "\n", out);
    return kOk;
}

int cmd_autocorr(const Options& o, std::ostream& out)
{
    const auto p = require_params(o);
    const auto a = autocorrelation(encode(parse_bits(o.bits, p.K), p));
    std::ostringstream os;
    os << "lag,re,im\n";
    char buf[96];
    for (int lag = -a.max_lag(); lag <= a.max_lag(); ++lag) {
        const auto v = a.at_lag(lag);
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", lag, v.real(), v.imag());
        os << buf;
    }
    emit(o, "autocorr.csv", os.str(), out);
    return kOk;
}

int cmd_af(const Options& o, std::ostream& out)
{
    const auto p = require_params(o);
    BitMessage m;
    if (!o.bits.empty()) {
        m = parse_bits(o.bits, p.K);
    } else {
        Rng rng = substream(o.seed.value_or(1), 0xAF);
        std::bernoulli_distribution coin(0.5);
        m.bits.resize(static_cast<std::size_t>(p.K));
        for (auto& b : m.bits)
            b = coin(rng) ? 1 : 0;
    }
    const auto x = encode(m, p);
    const int max_lag = o.max_lag < 0 ? p.K : o.max_lag;
    const int bins = o.doppler_bins > 0 ? o.doppler_bins : static_cast<int>(next_pow2(2 * (p.K + 1)));
    emit(o, "af.dat", ambiguity_grid(ambiguity_function(x.samples, max_lag, bins)), out);
    return kOk;
}

void write_results(const Options& o, const std::string& stem, const std::string& csv,
                   const nlohmann::json& summary, std::ostream& out)
{
    const std::string dir = o.out_dir.empty() ? "." : o.out_dir;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create output directory " + dir);
    if (!csv.empty())
        atomic_write(fs::path(dir) / (stem + ".csv"), csv);
    atomic_write(fs::path(dir) / (stem + "_summary.json"), summary.dump(2) + "\n");
    out << summary.dump(2) << "\n";
}

int cmd_ber(const Options& o, std::ostream& out)
{
    const auto cfg = resolve_config(o);
    const auto r = run_ber(cfg);
    auto summary = to_json(r);
    summary["seed"] = cfg.seed;
    summary["lambda"] = cfg.modulation.lambda;
    summary["eta"] = cfg.modulation.eta;
    write_results(o, "ber", ber_csv(r), summary, out);
    return kOk;
}

int cmd_radar(const Options& o, std::ostream& out)
{
    const auto cfg = resolve_config(o);
    const auto r = run_radar(cfg, cfg.targets);
    auto summary = to_json(r);
    summary["seed"] = cfg.seed;
    write_results(o, "radar", radar_csv(r), summary, out);
    return kOk;
}

int cmd_calibrate(const Options& o, std::ostream& out)
{
    const auto cfg = resolve_config(o);
    const double cells = o.cells > 0 ? o.cells : 1000.0 / cfg.cfar.pfa;
    const auto c = run_cfar_calibration(cfg, static_cast<std::uint64_t>(cells));
    auto summary = to_json(c);
    summary["seed"] = cfg.seed;
    write_results(o, "cfar_calibration", "", summary, out);
    return kOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"BMOCZ ISAC simulator", "moczsim"};
    app.require_subcommand(1, 1);
    Options o;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out", o.out_dir, "Output directory");
        sub->add_option("--seed", o.seed, "RNG seed");
    };
    auto add_code = [&](CLI::App* sub, bool bits_required) {
        sub->add_option("--k", o.k, "Bits per packet (number of zeros)")->required();
        sub->add_option("--lambda", o.lambda, "Radius tuning parameter")->capture_default_str();
        auto* b = sub->add_option("--bits", o.bits, "Message: 0b... binary or hex (right-aligned to K)");
        if (bits_required)
            b->required();
    };
    auto add_sim = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "Simulation config (JSON)");
        sub->add_option("--k", o.k, "Override K");
        sub->add_option("--lambda", o.lambda, "Override lambda (with --k)");
        sub->add_option("--snr-db", o.snr_db, "Override SNR grid [dB]")->delimiter(',');
        sub->add_option("--trials", o.trials, "Override trial count");
    };

    auto* enc = app.add_subcommand("encode", "Encode bits into a Huffman sequence (CSV)");
    add_code(enc, true);
    add_common(enc);
    auto* dec = app.add_subcommand("decode", "DiZeT-decode a received sequence CSV");
    dec->add_option("--k", o.k, "Bits per packet")->required();
    dec->add_option("--lambda", o.lambda, "Radius tuning parameter")->capture_default_str();
    dec->add_option("--in,input", o.in_file, "Sequence CSV (re,im per row)");
    add_common(dec);
    auto* ac = app.add_subcommand("autocorr", "Aperiodic autocorrelation of an encoded message");
    add_code(ac, true);
    add_common(ac);
    auto* af = app.add_subcommand("af", "Ambiguity-function magnitude grid");
    add_code(af, false);
    af->add_option("--max-lag", o.max_lag, "Largest |lag| (default K)");
    af->add_option("--doppler-bins", o.doppler_bins, "Doppler DFT size");
    add_common(af);
    auto* ber = app.add_subcommand("ber", "Monte Carlo BER sweep");
    add_sim(ber);
    add_common(ber);
    auto* radar = app.add_subcommand("radar", "Monte Carlo radar estimation sweep");
    add_sim(radar);
    add_common(radar);
    auto* cal = app.add_subcommand("calibrate-cfar", "Noise-only OS-CFAR false-alarm calibration");
    add_sim(cal);
    cal->add_option("--cells", o.cells, "Number of noise cells (default 1000/pfa)");
    add_common(cal);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "moczsim: " << e.what() << "\n";
        return kBadConfig;
    }

    try {
        if (enc->parsed())
            return cmd_encode(o, out);
        if (dec->parsed())
            return cmd_decode(o, out);
        if (ac->parsed())
            return cmd_autocorr(o, out);
        if (af->parsed())
            return cmd_af(o, out);
        if (ber->parsed())
            return cmd_ber(o, out);
        if (radar->parsed())
            return cmd_radar(o, out);
        if (cal->parsed())
            return cmd_calibrate(o, out);
    } catch (const ConfigError& e) {
        err << "moczsim: config error: " << e.what() << "\n";
        return kBadConfig;
    } catch (const InvalidParameter& e) {
        err << "moczsim: invalid parameter: " << e.what() << "\n";
        return kBadConfig;
    } catch (const InsufficientLength& e) {
        err << "moczsim: " << e.what() << "\n";
        return kBadConfig;
    } catch (const IoError& e) {
        err << "moczsim: I/O error: " << e.what() << "\n";
        return kIoFailure;
    } catch (const std::exception& e) {
        err << "moczsim: internal error: " << e.what() << "\n";
        return kInternal;
    }
    err << "moczsim: no subcommand\n";
    return kBadConfig;
}

} // namespace mocz::cli
