#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "pmsim/keyrate.hpp"
#include "pmsim/optimize.hpp"

using namespace pmsim;

TEST_CASE("optimizer finds the peak of a smooth parabola") {
    const OptimizationSpec spec{1e-4, 2.0, 64, 1e-6};
    const IntensityOptimum opt = optimize_intensity(
        [](double mu) { return 1.0 - (mu - 0.3) * (mu - 0.3); }, spec);
    CHECK(opt.mu_star == doctest::Approx(0.3).epsilon(1e-4));
    CHECK(opt.rate_star == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("optimizer handles a flat objective") {
    const OptimizationSpec spec;
    const IntensityOptimum opt = optimize_intensity([](double) { return 0.42; }, spec);
    CHECK(opt.rate_star == doctest::Approx(0.42));
    CHECK(opt.mu_star >= spec.mu_min);
    CHECK(opt.mu_star <= spec.mu_max);
}

TEST_CASE("optimizer at least matches a dense grid on the loss-only rate") {
    const OptimizationSpec spec;
    const double eta = 0.01;
    const IntensityOptimum opt =
        optimize_intensity([eta](double mu) { return lossonly_keyrate(eta, mu); }, spec);
    double brute = 0.0;
    const double lo = std::log(spec.mu_min), hi = std::log(spec.mu_max);
    for (int i = 0; i < 100000; ++i) {
        const double mu = std::exp(lo + (hi - lo) * i / 99999.0);
        brute = std::max(brute, lossonly_keyrate(eta, mu));
    }
    CHECK(opt.rate_star >= brute - 2.0 * spec.tolerance * brute);
    CHECK(opt.mu_star == doctest::Approx(0.1190083).epsilon(1e-4));
    CHECK(opt.rate_star == doctest::Approx(0.0074276160305833).epsilon(1e-10));
}

TEST_CASE("optimizer propagates non-finite objective values") {
    const OptimizationSpec spec;
    CHECK_THROWS_AS(
        optimize_intensity([](double mu) { return mu > 0.5 ? std::nan("") : mu; }, spec),
        std::runtime_error);
}

TEST_CASE("optimizer settings validate their ranges") {
    CHECK_NOTHROW(OptimizationSpec{}.validate());
    OptimizationSpec bad;
    bad.mu_min = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::domain_error);
    bad = OptimizationSpec{};
    bad.mu_max = bad.mu_min;
    CHECK_THROWS_AS(bad.validate(), std::domain_error);
    bad = OptimizationSpec{};
    bad.coarse_points = 4;
    CHECK_THROWS_AS(bad.validate(), std::domain_error);
    bad = OptimizationSpec{};
    bad.tolerance = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::domain_error);
}
