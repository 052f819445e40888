#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pmsim/beam.hpp"
#include "pmsim/geometry.hpp"
#include "pmsim/keyrate.hpp"
#include "pmsim/optimize.hpp"

namespace pmsim {

enum class Scenario { loss_only, noisy };
enum class MatchStatistic { mean, median, mode };

struct ScanSpec {
    AtmosphereCondition condition;
    SatelliteGeometry geometry;            // zenith field ignored; set per grid point
    std::vector<double> zenith_deg;
    int samples_per_point = 1000;
    int n_bins = 100;
    double aperture_radius_m = 0.5;
    double w0_m = 0.15;
    double wavelength_m = 1.55e-6;
    Scenario scenario = Scenario::loss_only;
    ImperfectionParams imperfections;
    DownlinkModel provider_model;
    std::optional<BeamStatistics> direct_moments;  // bypasses the down-link model
    double scatter_cross_section_m2 = 5e-6;
    std::vector<double> chi_ext_override;          // empty, or one value per zenith point
    MatchStatistic match_statistic = MatchStatistic::mean;
    OptimizationSpec optimizer;
    QuadratureSpec quadrature;
    double fiber_attenuation_db_per_km = 0.2;
    std::uint64_t seed = 0;
    int workers = 1;

    void validate() const;  // throws std::domain_error / std::invalid_argument
};

struct AkrPoint {
    double zenith_deg;
    double slant_km;
    double fiber_km;
    double mu_star;
    double akr;
};

// Expectation of rate_fn over the histogram bin centers.
double average_keyrate(const PdtHistogram& pdt, const std::function<double(double)>& rate_fn);

// Fiber length whose transmittance equals the chosen PDT statistic. Throws
// std::runtime_error when the statistic vanishes (dark link).
double matched_fiber_length(const PdtHistogram& pdt, MatchStatistic statistic = MatchStatistic::mean,
                            double attenuation_db_per_km = 0.2);

// Observer invoked once per grid point with the drawn beams and their
// transmittances; used for optional per-sample dumps.
using SampleObserver =
    std::function<void(int point_index, const std::vector<BeamParams>&,
                       const std::vector<double>&)>;

// One AkrPoint per zenith angle: sample the channel, match the fiber, optimize
// the intensity, average the keyrate over the PDT.
std::vector<AkrPoint> akr_scan(const ScanSpec& spec, const SampleObserver& observer = nullptr);

struct BeamwidthRow {
    double w0_m;
    std::string condition;
    double mean_transmittance;
};

// Mean sampled transmittance per initial width per condition at zenith.
std::vector<BeamwidthRow> transmittance_vs_beamwidth(
    const ScanSpec& spec, const std::vector<std::pair<std::string, AtmosphereCondition>>& conds,
    const std::vector<double>& w0_grid);

struct PdrResult {
    std::vector<double> rate_values;    // ascending, distinct rounded AKR draws
    std::vector<double> probabilities;  // parallel to rate_values, sums to one

    double spread() const;              // max - min of rate_values
    double peak_probability() const;
};

// Distribution of per-batch AKR draws at one (zenith, fiber) point. n_samples
// must divide evenly into batches; each batch yields one AKR rounded half-even
// to round_digits decimals (default 6 loss-only, 7 noisy).
PdrResult pdr(const ScanSpec& spec, double zenith_deg, double fiber_km, int n_samples,
              int batch_size = 1000, std::optional<int> round_digits = std::nullopt);

}  // namespace pmsim
