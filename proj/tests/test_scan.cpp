#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "pmsim/scan.hpp"

using namespace pmsim;

namespace {

const AtmosphereCondition kDay1{0.01, 1.64e-16, 0.9};

PdtHistogram point_mass(double eta) {
    return PdtHistogram{{eta}, {1.0}};
}

ScanSpec small_spec() {
    ScanSpec spec;
    spec.condition = kDay1;
    spec.zenith_deg = {0.0, 30.0, 60.0};
    spec.samples_per_point = 120;
    spec.seed = 4242;
    return spec;
}

}  // namespace

TEST_CASE("histogram average reduces to the rate at a point mass") {
    const PdtHistogram h = point_mass(0.37);
    CHECK(average_keyrate(h, [](double eta) { return eta * eta; }) ==
          doctest::Approx(0.37 * 0.37).epsilon(1e-14));
    CHECK(average_keyrate(h, [](double) { return 1.0; }) == doctest::Approx(1.0));
}

TEST_CASE("histogram average is linear over the bins") {
    const PdtHistogram h{{0.2, 0.4}, {0.5, 0.5}};
    CHECK(average_keyrate(h, [](double eta) { return eta; }) ==
          doctest::Approx(0.3).epsilon(1e-14));
    CHECK(average_keyrate(h, [](double) { return 1.0; }) == doctest::Approx(1.0));
}

TEST_CASE("matched fiber reproduces the reference lengths") {
    CHECK(matched_fiber_length(point_mass(0.1), MatchStatistic::mean, 0.2) ==
          doctest::Approx(50.0).epsilon(1e-12));
    CHECK(matched_fiber_length(point_mass(5.011872336272722e-3), MatchStatistic::mean, 0.2) ==
          doctest::Approx(115.0).epsilon(1e-9));
}

TEST_CASE("matched fiber statistics agree on a symmetric two-bin histogram") {
    const PdtHistogram h{{0.1, 0.3}, {0.5, 0.5}};
    CHECK(matched_fiber_length(h, MatchStatistic::mean, 0.2) ==
          doctest::Approx(fiber_length_for_transmittance(0.2)).epsilon(1e-12));
    CHECK(matched_fiber_length(h, MatchStatistic::median, 0.2) ==
          doctest::Approx(fiber_length_for_transmittance(0.1)).epsilon(1e-12));
    const PdtHistogram skew{{0.1, 0.3}, {0.25, 0.75}};
    CHECK(matched_fiber_length(skew, MatchStatistic::mode, 0.2) ==
          doctest::Approx(fiber_length_for_transmittance(0.3)).epsilon(1e-12));
}

TEST_CASE("matched fiber rejects a dark link") {
    CHECK_THROWS_AS(matched_fiber_length(point_mass(0.0), MatchStatistic::mean, 0.2),
                    std::runtime_error);
}

TEST_CASE("scan settings validate their ranges") {
    CHECK_NOTHROW(small_spec().validate());
    ScanSpec bad = small_spec();
    bad.samples_per_point = 0;
    CHECK_THROWS_AS(bad.validate(), std::domain_error);
    bad = small_spec();
    bad.zenith_deg = {80.0};
    CHECK_THROWS_AS(bad.validate(), std::domain_error);
    bad = small_spec();
    bad.zenith_deg.clear();
    CHECK_THROWS_AS(bad.validate(), std::domain_error);
    bad = small_spec();
    bad.chi_ext_override = {0.9};
    CHECK_THROWS_AS(bad.validate(), std::domain_error);
    bad = small_spec();
    bad.workers = 0;
    CHECK_THROWS_AS(bad.validate(), std::domain_error);
}

TEST_CASE("zenith scan emits one finite record per grid point") {
    const ScanSpec spec = small_spec();
    const auto points = akr_scan(spec);
    REQUIRE(points.size() == 3);
    for (std::size_t i = 0; i < points.size(); ++i) {
        CHECK(points[i].zenith_deg == spec.zenith_deg[i]);
        CHECK(points[i].akr >= 0.0);
        CHECK(std::isfinite(points[i].akr));
        CHECK(points[i].fiber_km > 0.0);
        CHECK(points[i].mu_star > 0.0);
    }
    CHECK(points[0].slant_km == doctest::Approx(500.0).epsilon(1e-12));
    CHECK(points[2].slant_km == doctest::Approx(1000.0).epsilon(1e-12));
    CHECK(points[0].akr >= points[2].akr);
}

TEST_CASE("scan results do not depend on the worker count") {
    ScanSpec spec = small_spec();
    spec.workers = 1;
    const auto serial = akr_scan(spec);
    spec.workers = 4;
    const auto parallel = akr_scan(spec);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].fiber_km == parallel[i].fiber_km);
        CHECK(serial[i].mu_star == parallel[i].mu_star);
        CHECK(serial[i].akr == parallel[i].akr);
    }
}

TEST_CASE("noisy scan rates never beat loss-only ones on the same channel draws") {
    ScanSpec spec = small_spec();
    spec.zenith_deg = {0.0, 45.0};
    const auto loss = akr_scan(spec);
    spec.scenario = Scenario::noisy;
    const auto noisy = akr_scan(spec);
    for (std::size_t i = 0; i < loss.size(); ++i) {
        CHECK(noisy[i].akr <= loss[i].akr + 1e-12);
        CHECK(noisy[i].fiber_km == loss[i].fiber_km);
    }
}

TEST_CASE("survival override replaces the modeled value per point") {
    ScanSpec spec = small_spec();
    const auto base = akr_scan(spec);
    spec.chi_ext_override = {1.0, 1.0, 1.0};
    const auto boosted = akr_scan(spec);
    for (std::size_t i = 0; i < base.size(); ++i) CHECK(boosted[i].akr >= base[i].akr);
}

TEST_CASE("direct moments bypass the down-link model") {
    ScanSpec spec = small_spec();
    spec.zenith_deg = {0.0, 50.0};
    BeamStatistics stats;
    stats.w0_m = 0.4;
    stats.mean = {0.0, 0.0, 0.0, 0.0};
    stats.cov.fill(0.0);
    spec.direct_moments = stats;
    spec.chi_ext_override = {1.0, 1.0};
    const auto points = akr_scan(spec);
    const double eta_s = circular_beam_transmittance(0.4, spec.aperture_radius_m, 1.0);
    const std::vector<double> flat(static_cast<std::size_t>(spec.samples_per_point), eta_s);
    const double expected =
        matched_fiber_length(pdt_histogram(flat, spec.n_bins), spec.match_statistic,
                             spec.fiber_attenuation_db_per_km);
    CHECK(points[0].fiber_km == doctest::Approx(expected).epsilon(1e-9));
    CHECK(points[1].fiber_km == doctest::Approx(points[0].fiber_km).epsilon(1e-12));
}

TEST_CASE("observer sees every sampled beam") {
    const ScanSpec spec = small_spec();
    int calls = 0;
    std::size_t total = 0;
    akr_scan(spec, [&](int, const std::vector<BeamParams>& beams,
                       const std::vector<double>& etas) {
        ++calls;
        CHECK(beams.size() == etas.size());
        total += etas.size();
    });
    CHECK(calls == 3);
    CHECK(total == 3u * 120u);
}

TEST_CASE("beamwidth table covers the requested grid in order") {
    ScanSpec spec = small_spec();
    spec.samples_per_point = 60;
    const std::vector<std::pair<std::string, AtmosphereCondition>> conds{
        {"day1", kDay1}, {"night3", {6.10, 1.10e-15, 0.9}}};
    const auto rows = transmittance_vs_beamwidth(spec, conds, {0.15, 0.35});
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].w0_m == 0.15);
    CHECK(rows[0].condition == "day1");
    CHECK(rows[1].condition == "night3");
    CHECK(rows[2].w0_m == 0.35);
    for (const BeamwidthRow& r : rows) {
        CHECK(r.mean_transmittance >= 0.0);
        CHECK(r.mean_transmittance <= 1.0);
    }
    CHECK(rows[0].mean_transmittance > rows[1].mean_transmittance);
}

TEST_CASE("rate distribution over a degenerate channel collapses to one value") {
    ScanSpec spec = small_spec();
    BeamStatistics stats;
    stats.w0_m = 0.3;
    stats.mean = {0.0, 0.0, 0.0, 0.0};
    stats.cov.fill(0.0);
    spec.direct_moments = stats;
    const PdrResult r = pdr(spec, 20.0, 115.0, 400, 100);
    REQUIRE(r.rate_values.size() == 1);
    CHECK(r.probabilities[0] == doctest::Approx(1.0));
    CHECK(r.spread() == 0.0);
    CHECK(r.peak_probability() == doctest::Approx(1.0));
}

TEST_CASE("rate distribution probabilities sum to one") {
    ScanSpec spec = small_spec();
    const PdrResult r = pdr(spec, 20.0, 115.0, 1200, 100);
    double total = 0.0;
    for (double p : r.probabilities) total += p;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t i = 1; i < r.rate_values.size(); ++i)
        CHECK(r.rate_values[i] > r.rate_values[i - 1]);
}

TEST_CASE("rate distribution rejects ragged batching") {
    const ScanSpec spec = small_spec();
    CHECK_THROWS_AS(pdr(spec, 20.0, 115.0, 250, 100), std::domain_error);
    CHECK_THROWS_AS(pdr(spec, 80.0, 115.0, 200, 100), std::domain_error);
}
