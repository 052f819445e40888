#include <cmath>
#include <numbers>
#include <stdexcept>

#include "doctest.h"
#include "pmsim/geometry.hpp"
#include "pmsim/rng.hpp"

using namespace pmsim;

namespace {
constexpr double kDeg = std::numbers::pi / 180.0;
}

TEST_CASE("slant range grows with the secant of the zenith angle") {
    CHECK(slant_range_km({500.0, 20.0, 0.0}) == doctest::Approx(500.0).epsilon(1e-15));
    CHECK(slant_range_km({500.0, 20.0, 60.0 * kDeg}) == doctest::Approx(1000.0).epsilon(1e-12));
    CHECK(slant_range_km({500.0, 20.0, 75.0 * kDeg}) ==
          doctest::Approx(1931.8516525781366).epsilon(1e-12));
}

TEST_CASE("atmospheric path uses the same secant") {
    CHECK(atmospheric_path_km({500.0, 20.0, 0.0}) == doctest::Approx(20.0).epsilon(1e-15));
    CHECK(atmospheric_path_km({500.0, 20.0, 60.0 * kDeg}) == doctest::Approx(40.0).epsilon(1e-12));
    CHECK(atmospheric_path_km({500.0, 20.0, 45.0 * kDeg}) ==
          doctest::Approx(20.0 * std::numbers::sqrt2).epsilon(1e-12));
}

TEST_CASE("horizontal and negative zenith angles are rejected") {
    CHECK_THROWS_AS(slant_range_km({500.0, 20.0, std::numbers::pi / 2}), std::domain_error);
    CHECK_THROWS_AS(slant_range_km({500.0, 20.0, -0.1}), std::domain_error);
    CHECK_THROWS_AS(atmospheric_path_km({500.0, 20.0, 1.6}), std::domain_error);
}

TEST_CASE("fiber transmittance follows the attenuation exponent") {
    CHECK(fiber_transmittance({0.0, 0.2}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(fiber_transmittance({50.0, 0.2}) == doctest::Approx(0.1).epsilon(1e-13));
    CHECK(fiber_transmittance({115.0, 0.2}) ==
          doctest::Approx(5.011872336272722e-3).epsilon(1e-12));
}

TEST_CASE("fiber length recovers a target transmittance") {
    CHECK(fiber_length_for_transmittance(1.0) == doctest::Approx(0.0));
    CHECK(fiber_length_for_transmittance(0.1) == doctest::Approx(50.0).epsilon(1e-12));
    CHECK(fiber_length_for_transmittance(5.011872336272722e-3) ==
          doctest::Approx(115.0).epsilon(1e-12));
}

TEST_CASE("fiber length rejects transmittance outside (0, 1]") {
    CHECK_THROWS_AS(fiber_length_for_transmittance(0.0), std::domain_error);
    CHECK_THROWS_AS(fiber_length_for_transmittance(-0.5), std::domain_error);
    CHECK_THROWS_AS(fiber_length_for_transmittance(1.5), std::domain_error);
}

TEST_CASE("length to transmittance round trip is tight over [0, 500] km") {
    CounterRng rng(11, 0);
    for (int i = 0; i < 50; ++i) {
        const double len = 500.0 * rng.uniform();
        const double eta = fiber_transmittance({len, 0.2});
        CHECK(fiber_length_for_transmittance(eta) == doctest::Approx(len).epsilon(1e-9));
    }
}
