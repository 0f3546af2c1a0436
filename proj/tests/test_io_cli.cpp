// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "json.hpp"
#include "mocz/dizet.hpp"
#include "mocz/errors.hpp"
#include "mocz/io.hpp"

using namespace mocz;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run moczsim(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch_dir(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / ("moczsim_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p)
{
    std::ifstream is(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), {}};
}

} // namespace

TEST_CASE("sequence CSV round trip is exact")
{
    Rng rng(3);
    CVec x(50);
    for (auto& v : x)
        v = complex_gaussian(rng, 1.0);
    std::istringstream is(sequence_csv(x));
    CHECK(read_sequence_csv(is) == x);

    std::istringstream annotated("re,im\n# comment\n\n1.5,-2\n0,3e-3\n");
    const auto y = read_sequence_csv(annotated);
    REQUIRE(y.size() == 2);
    CHECK(y[0] == cdouble(1.5, -2));
    CHECK(y[1] == cdouble(0, 3e-3));

    std::istringstream bad("1.0;2.0\n");
    CHECK_THROWS_AS(read_sequence_csv(bad), ConfigError);
    CHECK_THROWS_AS(read_sequence_csv(fs::path("/nonexistent/seq.csv")), IoError);
}

TEST_CASE("config JSON round trip")
{
    SimConfig cfg;
    cfg.modulation = ModulationParams::make(31, 0.7);
    cfg.channel_model = ChannelModel::RayleighFlat;
    cfg.snr_grid_db = {1, 2.5};
    cfg.seed = 1234567890123ULL;
    cfg.targets = {TargetSpec{30, 5, 1.5, 3}};
    const auto j = to_json(cfg);
    const auto back = sim_config_from_json(j);
    CHECK(to_json(back) == j);
    CHECK(back.modulation.R == doctest::Approx(cfg.modulation.R).epsilon(1e-15));

    auto bad = j;
    bad["modulation"]["KK"] = 3;
    CHECK_THROWS_AS(sim_config_from_json(bad), ConfigError);
    bad = j;
    bad["channel_model"] = "tdl";
    CHECK_THROWS_AS(sim_config_from_json(bad), ConfigError);
}

TEST_CASE("atomic writes leave no temporaries")
{
    const auto dir = scratch_dir("atomic");
    atomic_write(dir / "a.txt", "hello\n");
    atomic_write(dir / "a.txt", "world\n");
    CHECK(slurp(dir / "a.txt") == "world\n");
    int files = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir))
        ++files;
    CHECK(files == 1);
    CHECK_THROWS_AS(atomic_write(dir / "missing" / "a.txt", "x"), IoError);
}

TEST_CASE("bit string parsing")
{
    CHECK(cli::parse_bits("10", 2).to_string() == "10");
    CHECK(cli::parse_bits("0b0011", 4).to_string() == "0011");
    CHECK(cli::parse_bits("0x1f", 5).to_string() == "11111");
    CHECK(cli::parse_bits("1f", 8).to_string() == "00011111");
    CHECK(cli::parse_bits("0x07", 3).to_string() == "111");
    CHECK_THROWS_AS(cli::parse_bits("0x1f", 4), InvalidParameter);
    CHECK_THROWS_AS(cli::parse_bits("0b101", 4), InvalidParameter);
    CHECK_THROWS_AS(cli::parse_bits("xyz", 4), InvalidParameter);
}

TEST_CASE("encode prints the K=2 sequence and decode inverts it")
{
    const auto r = moczsim({"encode", "--k", "2", "--bits", "10"});
    REQUIRE(r.code == 0);
    std::istringstream is(r.out);
    const auto x = read_sequence_csv(is);
    REQUIRE(x.size() == 3);
    const double want[] = {0.632456, 0.447214, -0.632456};
    for (int i = 0; i < 3; ++i)
        CHECK(std::abs(x[i] - want[i]) < 1e-6);

    const auto dir = scratch_dir("roundtrip");
    std::ofstream(dir / "x.csv") << r.out;
    const auto d = moczsim({"decode", "--k", "2", "--in", (dir / "x.csv").string()});
    REQUIRE(d.code == 0);
    CHECK(nlohmann::json::parse(d.out)["bits"] == "10");
}

TEST_CASE("encode/decode round trip over random strings")
{
    const auto dir = scratch_dir("property");
    Rng rng(21);
    for (int t = 0; t < 40; ++t) {
        const int K = 2 + static_cast<int>(rng() % 63);
        std::string bits;
        for (int k = 0; k < K; ++k)
            bits.push_back((rng() & 1) ? '1' : '0');
        const auto e = moczsim({"encode", "--k", std::to_string(K), "--bits", "0b" + bits, "--out",
                                dir.string()});
        REQUIRE(e.code == 0);
        const auto d = moczsim({"decode", "--k", std::to_string(K), "--in", (dir / "sequence.csv").string()});
        REQUIRE(d.code == 0);
        CHECK(nlohmann::json::parse(d.out)["bits"] == bits);
    }
}

TEST_CASE("autocorr and af outputs")
{
    const auto a = moczsim({"autocorr", "--k", "2", "--bits", "00"});
    REQUIRE(a.code == 0);
    CHECK(a.out.rfind("lag,re,im\n-2,", 0) == 0);

    const auto g = moczsim({"af", "--k", "7", "--max-lag", "3", "--doppler-bins", "8", "--seed", "4"});
    REQUIRE(g.code == 0);
    std::istringstream is(g.out);
    std::string line;
    int rows = 0, blanks = 0;
    while (std::getline(is, line)) {
        if (line.empty()) {
            ++blanks;
            continue;
        }
        if (line[0] == '#')
            continue;
        std::istringstream ls(line);
        int lag = 0, bin = 0;
        double mag = -1;
        REQUIRE(static_cast<bool>(ls >> lag >> bin >> mag));
        CHECK(mag >= 0);
        if (lag == 0 && bin == 0)
            CHECK(mag == doctest::Approx(1.0).epsilon(1e-12));
        ++rows;
    }
    CHECK(rows == 7 * 8);
    CHECK(blanks >= 6);
}

TEST_CASE("ber runs are byte-identical for a fixed seed")
{
    const auto dir = scratch_dir("ber");
    {
        nlohmann::json cfg = {{"modulation", {{"K", 15}}}, {"snr_grid_db", {2, 4}}, {"trials", 200}};
        std::ofstream(dir / "awgn.json") << cfg.dump();
    }
    const auto args = [&](const std::string& sub) {
        return std::vector<std::string>{"ber", "--config", (dir / "awgn.json").string(), "--seed", "7",
                                        "--out", (dir / sub).string()};
    };
    REQUIRE(moczsim(args("a")).code == 0);
    REQUIRE(moczsim(args("b")).code == 0);
    CHECK(slurp(dir / "a" / "ber.csv") == slurp(dir / "b" / "ber.csv"));
    CHECK(slurp(dir / "a" / "ber_summary.json") == slurp(dir / "b" / "ber_summary.json"));
    CHECK(slurp(dir / "a" / "ber.csv").rfind("snr_db,ber,packets,bit_errors,noise_variance,bpsk_ber\n", 0) == 0);

    const auto ov = moczsim({"ber", "--config", (dir / "awgn.json").string(), "--snr-db", "1,3,5", "--trials",
                             "50", "--out", (dir / "c").string()});
    REQUIRE(ov.code == 0);
    CHECK(nlohmann::json::parse(slurp(dir / "c" / "ber_summary.json"))["points"].size() == 3);
}

TEST_CASE("exit codes")
{
    CHECK(moczsim({}).code == 2);
    CHECK(moczsim({"encode", "--k", "2"}).code == 2);
    CHECK(moczsim({"encode", "--k", "2", "--bits", "0x7"}).code == 2);
    const auto missing = moczsim({"decode", "--k", "4", "--in", "/nonexistent/y.csv"});
    CHECK(missing.code == 3);
    CHECK(!missing.err.empty());

    const auto dir = scratch_dir("codes");
    std::ofstream(dir / "bad.json") << R"({"modulation": {"K": 1}})";
    CHECK(moczsim({"ber", "--config", (dir / "bad.json").string()}).code == 2);
    std::ofstream(dir / "typo.json") << R"({"trails": 10})";
    CHECK(moczsim({"ber", "--config", (dir / "typo.json").string()}).code == 2);
    CHECK(moczsim({"ber", "--config", (dir / "absent.json").string()}).code == 3);
    std::ofstream(dir / "short.csv") << "1,0\n0,1\n";
    CHECK(moczsim({"decode", "--k", "4", "--in", (dir / "short.csv").string()}).code == 2);
}
