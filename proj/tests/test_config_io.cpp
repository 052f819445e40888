#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "pmsim/config.hpp"
#include "pmsim/io.hpp"

using namespace pmsim;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

constexpr const char* kMinimal = "[run]\nseed = 7\ncondition = day1\n";

}  // namespace

TEST_CASE("minimal config resolves the named weather preset") {
    const RunConfig cfg = parse_config(kMinimal);
    CHECK(cfg.scan.seed == 7);
    CHECK(cfg.condition_label == "day1");
    CHECK(cfg.scan.condition.n0_per_m3 == doctest::Approx(0.01));
    CHECK(cfg.scan.condition.cn2 == doctest::Approx(1.64e-16));
    CHECK(cfg.scan.condition.extinction == doctest::Approx(0.9));
    CHECK(cfg.scan.zenith_deg.size() == 16);
    CHECK(cfg.scan.zenith_deg.front() == 0.0);
    CHECK(cfg.scan.zenith_deg.back() == 75.0);
    CHECK(cfg.scan.scenario == Scenario::loss_only);
    CHECK(cfg.scan.samples_per_point == 1000);
    CHECK_FALSE(cfg.scan.direct_moments.has_value());
}

TEST_CASE("the six shipped weather rows carry their catalog values") {
    const auto cat = builtin_conditions();
    REQUIRE(cat.size() == 6);
    CHECK(cat.at("night1").n0_per_m3 == doctest::Approx(0.61));
    CHECK(cat.at("night1").cn2 == doctest::Approx(1.12e-16));
    CHECK(cat.at("night2").n0_per_m3 == doctest::Approx(3.00));
    CHECK(cat.at("night2").cn2 == doctest::Approx(5.50e-16));
    CHECK(cat.at("night3").n0_per_m3 == doctest::Approx(6.10));
    CHECK(cat.at("night3").cn2 == doctest::Approx(1.10e-15));
    CHECK(cat.at("day2").n0_per_m3 == doctest::Approx(0.05));
    CHECK(cat.at("day2").cn2 == doctest::Approx(8.00e-16));
    CHECK(cat.at("day3").n0_per_m3 == doctest::Approx(0.10));
    CHECK(cat.at("day3").cn2 == doctest::Approx(1.60e-15));
}

TEST_CASE("an empty document names the missing required keys") {
    try {
        parse_config("");
        FAIL("expected a parse error");
    } catch (const ConfigError& ex) {
        const std::string msg = ex.what();
        CHECK(msg.find("seed") != std::string::npos);
        CHECK(msg.find("condition") != std::string::npos);
    }
}

TEST_CASE("unknown keys and sections are rejected with their line") {
    try {
        parse_config("[run]\nseed = 1\ncondition = day1\nbogus = 3\n");
        FAIL("expected a parse error");
    } catch (const ConfigError& ex) {
        const std::string msg = ex.what();
        CHECK(msg.find("line 4") != std::string::npos);
        CHECK(msg.find("bogus") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config(std::string(kMinimal) + "[mystery]\nx = 1\n"), ConfigError);
}

TEST_CASE("unknown presets and bad values are rejected") {
    CHECK_THROWS_AS(parse_config("[run]\nseed = 1\ncondition = fog9\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[run]\nseed = -1\ncondition = day1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[run]\nseed = 1\ncondition = day1\nscenario = maybe\n"),
                    ConfigError);
    CHECK_THROWS_AS(
        parse_config(std::string(kMinimal) + "[scan]\nsamples_per_point = 0\n"), ConfigError);
    CHECK_THROWS_AS(
        parse_config(std::string(kMinimal) + "[scan]\nzenith_deg = 0:80:4\n"), ConfigError);
    CHECK_THROWS_AS(parse_config(std::string(kMinimal) + "[scan]\nw0_m = nope\n"), ConfigError);
}

TEST_CASE("duplicate keys are rejected") {
    CHECK_THROWS_AS(parse_config("[run]\nseed = 1\nseed = 2\ncondition = day1\n"), ConfigError);
}

TEST_CASE("survival override passes through to the scan settings") {
    const RunConfig cfg = parse_config(std::string(kMinimal) +
                                       "[scan]\nzenith_deg = 0, 20, 40\nchi_ext = 0.9, 0.8, 0.7\n");
    REQUIRE(cfg.scan.chi_ext_override.size() == 3);
    CHECK(cfg.scan.chi_ext_override[1] == doctest::Approx(0.8));
    CHECK_THROWS_AS(
        parse_config(std::string(kMinimal) + "[scan]\nzenith_deg = 0, 20\nchi_ext = 0.9\n"),
        ConfigError);
}

TEST_CASE("zenith grids accept range and list syntax") {
    const RunConfig a =
        parse_config(std::string(kMinimal) + "[scan]\nzenith_deg = 0:75:4\n");
    REQUIRE(a.scan.zenith_deg.size() == 4);
    CHECK(a.scan.zenith_deg[1] == doctest::Approx(25.0));
    CHECK(a.scan.zenith_deg[3] == 75.0);
    const RunConfig b = parse_config(std::string(kMinimal) + "[scan]\nzenith_deg = 10\n");
    REQUIRE(b.scan.zenith_deg.size() == 1);
    CHECK(b.scan.zenith_deg[0] == 10.0);
}

TEST_CASE("direct moments require and honor the provider switch") {
    const std::string doc = std::string(kMinimal) +
                            "[provider]\ntype = direct\n"
                            "[moments]\nmean = 0.1, -0.2, 0.5, 0.6\n"
                            "cov = 1e-2,0,0,0, 0,1e-2,0,0, 0,0,1e-3,0, 0,0,0,1e-3\n"
                            "w0_m = 0.2\n";
    const RunConfig cfg = parse_config(doc);
    REQUIRE(cfg.scan.direct_moments.has_value());
    CHECK(cfg.scan.direct_moments->mean[3] == doctest::Approx(0.6));
    CHECK(cfg.scan.direct_moments->cov[0] == doctest::Approx(1e-2));
    CHECK(cfg.scan.direct_moments->w0_m == doctest::Approx(0.2));

    CHECK_THROWS_AS(parse_config(std::string(kMinimal) + "[provider]\ntype = direct\n"),
                    ConfigError);
    CHECK_THROWS_AS(
        parse_config(std::string(kMinimal) + "[moments]\nmean = 0,0,0,0\ncov = 1\n"),
        ConfigError);
}

TEST_CASE("user conditions extend the catalog but cannot shadow shipped rows") {
    const RunConfig cfg = parse_config(
        "[run]\nseed = 3\ncondition = hazy\n"
        "[condition.hazy]\nn0_per_m3 = 1.5\ncn2 = 3e-16\nextinction = 0.85\n");
    CHECK(cfg.scan.condition.n0_per_m3 == doctest::Approx(1.5));
    CHECK(cfg.scan.condition.extinction == doctest::Approx(0.85));
    CHECK_THROWS_AS(
        parse_config(std::string(kMinimal) + "[condition.day1]\nn0_per_m3 = 1\ncn2 = 1e-16\n"),
        ConfigError);
}

TEST_CASE("imperfection and section overrides land in the scan settings") {
    const RunConfig cfg = parse_config(std::string(kMinimal) +
                                       "[imperfections]\nmode_match = 0.97\ndark_count = 1e-7\n"
                                       "[optimizer]\nmu_max = 1.5\n"
                                       "[scan]\nmatch_statistic = median\n"
                                       "[pdr]\nzenith_deg = 30\nn_samples = 5000\n"
                                       "[point]\neta = 0.02\nmu = 0.07\n");
    CHECK(cfg.scan.imperfections.mode_match == doctest::Approx(0.97));
    CHECK(cfg.scan.imperfections.dark_count == doctest::Approx(1e-7));
    CHECK(cfg.scan.optimizer.mu_max == doctest::Approx(1.5));
    CHECK(cfg.scan.match_statistic == MatchStatistic::median);
    CHECK(cfg.pdr.zenith_deg == doctest::Approx(30.0));
    CHECK(cfg.pdr.n_samples == 5000);
    CHECK(cfg.point.eta == doctest::Approx(0.02));
    CHECK(cfg.point.mu == doctest::Approx(0.07));
}

TEST_CASE("the shipped reference configuration parses cleanly") {
    const RunConfig cfg = load_config(CONFIG_DIR "/default.ini");
    CHECK(cfg.condition_label == "day1");
    CHECK(cfg.scan.zenith_deg.size() == 16);
    CHECK(cfg.beamwidth.w0_grid.size() == 7);
    CHECK(cfg.beamwidth.conditions.size() == 6);
    CHECK(cfg.pdr.fiber_km == doctest::Approx(115.0));
}

TEST_CASE("missing config files surface as configuration errors") {
    CHECK_THROWS_AS(load_config("/nonexistent/path.ini"), ConfigError);
}

TEST_CASE("numeric formatting keeps twelve significant digits") {
    CHECK(format_value(0.1234567890123456) == "0.123456789012");
    CHECK(format_value(1.0) == "1");
    CHECK(format_value(5.011872336272722e-3) == "0.00501187233627");
    CHECK(format_value(0.0) == "0");
}

TEST_CASE("scan table writer emits header and newline-terminated rows") {
    const std::string path = "test_akr_out.csv";
    write_akr_csv(path, {{0.0, 500.0, 115.25, 0.1, 0.00612}, {5.0, 501.9, 114.0, 0.11, 0.006}});
    const std::string text = slurp(path);
    CHECK(text.rfind("zenith_deg,slant_km,fiber_km,mu_star,akr\n", 0) == 0);
    CHECK(text.find('\r') == std::string::npos);
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);
    CHECK(text.find("115.25") != std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("distribution and beamwidth writers match their schemas") {
    const std::string pdr_path = "test_pdr_out.csv";
    PdrResult r;
    r.rate_values = {0.001, 0.002};
    r.probabilities = {0.25, 0.75};
    write_pdr_csv(pdr_path, r);
    const std::string pdr_text = slurp(pdr_path);
    CHECK(pdr_text.rfind("rate_value,probability\n", 0) == 0);
    CHECK(std::count(pdr_text.begin(), pdr_text.end(), '\n') == 3);
    std::remove(pdr_path.c_str());

    const std::string bw_path = "test_bw_out.csv";
    write_beamwidth_csv(bw_path, {{0.15, "day1", 0.71}});
    const std::string bw_text = slurp(bw_path);
    CHECK(bw_text.rfind("w0_m,condition,mean_transmittance\n", 0) == 0);
    CHECK(bw_text.find("day1") != std::string::npos);
    std::remove(bw_path.c_str());

    const std::string samples_path = "test_samples_out.csv";
    write_samples_csv(samples_path, {{0.1, -0.2, 1.0, 0.9, 0.3}}, {0.55});
    const std::string sample_text = slurp(samples_path);
    CHECK(sample_text.rfind("sample_index,x0,y0,w1,w2,orient,eta\n", 0) == 0);
    CHECK(sample_text.find("0.55") != std::string::npos);
    std::remove(samples_path.c_str());
}

TEST_CASE("single point report is valid JSON with the computed rate") {
    const std::string text =
        rate_point_json(0.01, 0.05, Scenario::loss_only, ImperfectionParams{}, 0.00572);
    const nlohmann::json j = nlohmann::json::parse(text);
    CHECK(j.at("eta").get<double>() == doctest::Approx(0.01));
    CHECK(j.at("mu").get<double>() == doctest::Approx(0.05));
    CHECK(j.at("scenario").get<std::string>() == "loss-only");
    CHECK(j.at("rate").get<double>() == doctest::Approx(0.00572));
    CHECK_FALSE(j.contains("imperfections"));

    const std::string noisy =
        rate_point_json(0.01, 0.05, Scenario::noisy, ImperfectionParams{}, 0.0017);
    const nlohmann::json jn = nlohmann::json::parse(noisy);
    CHECK(jn.at("imperfections").at("mode_match").get<double>() == doctest::Approx(0.99));
}

TEST_CASE("operator debug dump carries the four elements and the statistics") {
    const std::string text =
        povm_debug_json(0.3, 0.25, Scenario::noisy, ImperfectionParams{});
    const nlohmann::json j = nlohmann::json::parse(text);
    CHECK(j.at("povm").contains("plus"));
    CHECK(j.at("povm").contains("dustbin"));
    CHECK(j.at("povm").at("plus").size() == 4);
    CHECK(j.at("povm").at("plus").at(0).size() == 4);
    CHECK(j.at("announcements").at("p_plus").get<double>() ==
          doctest::Approx(j.at("announcements").at("p_minus").get<double>()));
}
