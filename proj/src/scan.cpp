#include "pmsim/scan.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace pmsim {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

void parallel_for(int n, int workers, const std::function<void(int)>& body) {
    workers = std::min(std::max(workers, 1), n > 0 ? n : 1);
    if (workers == 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::exception_ptr first_error = nullptr;
    std::mutex error_mutex;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (int i = t; i < n; i += workers) body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

struct PointChannel {
    std::vector<BeamParams> beams;
    std::vector<double> etas;
    double chi;
};

// Beam statistics for one grid point: the down-link model, or verbatim moments.
BeamStatistics point_statistics(const ScanSpec& spec, const SatelliteGeometry& geom) {
    if (spec.direct_moments) return *spec.direct_moments;
    return beam_statistics(spec.condition, geom, spec.w0_m, spec.wavelength_m,
                           LinkDirection::downlink, spec.provider_model);
}

PointChannel sample_channel(const ScanSpec& spec, const SatelliteGeometry& geom,
                            double chi_override, int n_samples) {
    PointChannel ch;
    ch.chi = chi_override > 0.0
                 ? chi_override
                 : effective_extinction(spec.condition, geom, spec.scatter_cross_section_m2);
    ch.beams = sample_beam_params(point_statistics(spec, geom), n_samples, spec.seed);
    ch.etas.resize(ch.beams.size());
    parallel_for(n_samples, spec.workers, [&](int i) {
        ch.etas[static_cast<std::size_t>(i)] =
            aperture_transmittance(ch.beams[static_cast<std::size_t>(i)], spec.aperture_radius_m,
                                   ch.chi, spec.quadrature);
    });
    return ch;
}

std::function<double(double)> bin_rate_fn(const ScanSpec& spec, double eta_t, double mu) {
    if (spec.scenario == Scenario::loss_only) {
        return [eta_t, mu](double eta_s) { return lossonly_keyrate(eta_s * eta_t, mu); };
    }
    const ImperfectionParams imp = spec.imperfections;
    return [eta_t, mu, imp](double eta_s) {
        return noisy_keyrate(total_transmittance(eta_s, eta_t, imp.detector_eff), mu, imp);
    };
}

IntensityOptimum optimize_point(const ScanSpec& spec, const PdtHistogram& hist, double eta_t) {
    return optimize_intensity(
        [&](double mu) { return average_keyrate(hist, bin_rate_fn(spec, eta_t, mu)); },
        spec.optimizer);
}

double round_half_even(double v, int digits) {
    const double scale = std::pow(10.0, digits);
    return std::nearbyint(v * scale) / scale;  // FE_TONEAREST: ties go to even
}

}  // namespace

void ScanSpec::validate() const {
    if (samples_per_point < 1) throw std::domain_error("scan: samples_per_point must be >= 1");
    if (n_bins < 1) throw std::domain_error("scan: n_bins must be >= 1");
    if (zenith_deg.empty()) throw std::domain_error("scan: zenith grid is empty");
    for (double z : zenith_deg)
        if (!(z >= 0.0) || z > 75.0)
            throw std::domain_error("scan: zenith angles must lie in [0, 75] degrees");
    if (!chi_ext_override.empty() && chi_ext_override.size() != zenith_deg.size())
        throw std::domain_error("scan: chi_ext override must list one value per zenith point");
    for (double chi : chi_ext_override)
        if (!(chi > 0.0) || chi > 1.0)
            throw std::domain_error("scan: chi_ext override values must lie in (0, 1]");
    if (workers < 1) throw std::domain_error("scan: workers must be >= 1");
    if (!(aperture_radius_m > 0.0)) throw std::domain_error("scan: aperture radius must be > 0");
    if (!(w0_m > 0.0)) throw std::domain_error("scan: initial beam width must be > 0");
    if (scenario == Scenario::noisy) imperfections.validate();
    optimizer.validate();
}

double average_keyrate(const PdtHistogram& pdt, const std::function<double(double)>& rate_fn) {
    double acc = 0.0;
    for (std::size_t i = 0; i < pdt.centers.size(); ++i) {
        if (pdt.probs[i] == 0.0) continue;
        acc += pdt.probs[i] * rate_fn(pdt.centers[i]);
    }
    return acc;
}

double matched_fiber_length(const PdtHistogram& pdt, MatchStatistic statistic,
                            double attenuation_db_per_km) {
    double stat = 0.0;
    switch (statistic) {
        case MatchStatistic::mean: {
            for (std::size_t i = 0; i < pdt.centers.size(); ++i)
                stat += pdt.probs[i] * pdt.centers[i];
            break;
        }
        case MatchStatistic::median: {
            double cum = 0.0;
            for (std::size_t i = 0; i < pdt.centers.size(); ++i) {
                cum += pdt.probs[i];
                if (cum >= 0.5) {
                    stat = pdt.centers[i];
                    break;
                }
            }
            break;
        }
        case MatchStatistic::mode: {
            std::size_t best = 0;
            for (std::size_t i = 1; i < pdt.probs.size(); ++i)
                if (pdt.probs[i] > pdt.probs[best]) best = i;
            stat = pdt.centers[best];
            break;
        }
    }
    if (!(stat > 0.0)) {
        throw std::runtime_error("matched_fiber_length: satellite transmittance statistic is "
                                 "zero; the link is dark");
    }
    return fiber_length_for_transmittance(std::min(stat, 1.0), attenuation_db_per_km);
}

std::vector<AkrPoint> akr_scan(const ScanSpec& spec, const SampleObserver& observer) {
    spec.validate();
    std::vector<AkrPoint> points;
    points.reserve(spec.zenith_deg.size());
    for (std::size_t pi = 0; pi < spec.zenith_deg.size(); ++pi) {
        SatelliteGeometry geom = spec.geometry;
        geom.zenith_rad = spec.zenith_deg[pi] * kDegToRad;
        const double chi_override =
            spec.chi_ext_override.empty() ? -1.0 : spec.chi_ext_override[pi];
        const PointChannel ch = sample_channel(spec, geom, chi_override, spec.samples_per_point);
        if (observer) observer(static_cast<int>(pi), ch.beams, ch.etas);

        const PdtHistogram hist = pdt_histogram(ch.etas, spec.n_bins);
        const double fiber_km =
            matched_fiber_length(hist, spec.match_statistic, spec.fiber_attenuation_db_per_km);
        const double eta_t =
            fiber_transmittance({fiber_km, spec.fiber_attenuation_db_per_km});
        const IntensityOptimum opt = optimize_point(spec, hist, eta_t);
        points.push_back({spec.zenith_deg[pi], slant_range_km(geom), fiber_km, opt.mu_star,
                          opt.rate_star});
    }
    return points;
}

std::vector<BeamwidthRow> transmittance_vs_beamwidth(
    const ScanSpec& spec, const std::vector<std::pair<std::string, AtmosphereCondition>>& conds,
    const std::vector<double>& w0_grid) {
    if (w0_grid.empty()) throw std::domain_error("beamwidth scan: empty width grid");
    for (double w0 : w0_grid)
        if (!(w0 > 0.0) || w0 > 0.35)
            throw std::domain_error("beamwidth scan: widths must lie in (0, 0.35] m");

    std::vector<BeamwidthRow> rows;
    rows.reserve(w0_grid.size() * conds.size());
    SatelliteGeometry geom = spec.geometry;
    geom.zenith_rad = 0.0;
    for (double w0 : w0_grid) {
        for (const auto& [label, cond] : conds) {
            ScanSpec local = spec;
            local.condition = cond;
            local.w0_m = w0;
            const PointChannel ch =
                sample_channel(local, geom, -1.0, spec.samples_per_point);
            double mean = 0.0;
            for (double e : ch.etas) mean += e;
            mean /= static_cast<double>(ch.etas.size());
            rows.push_back({w0, label, mean});
        }
    }
    return rows;
}

double PdrResult::spread() const {
    if (rate_values.empty()) return 0.0;
    return rate_values.back() - rate_values.front();
}

double PdrResult::peak_probability() const {
    double peak = 0.0;
    for (double p : probabilities) peak = std::max(peak, p);
    return peak;
}

PdrResult pdr(const ScanSpec& spec, double zenith_deg, double fiber_km, int n_samples,
              int batch_size, std::optional<int> round_digits) {
    spec.validate();
    if (batch_size < 1) throw std::domain_error("pdr: batch size must be >= 1");
    if (n_samples < batch_size || n_samples % batch_size != 0)
        throw std::domain_error("pdr: sample count must be a positive multiple of batch size");
    if (!(zenith_deg >= 0.0) || zenith_deg > 75.0)
        throw std::domain_error("pdr: zenith angle must lie in [0, 75] degrees");

    SatelliteGeometry geom = spec.geometry;
    geom.zenith_rad = zenith_deg * kDegToRad;
    const PointChannel ch = sample_channel(spec, geom, -1.0, n_samples);
    const double eta_t = fiber_transmittance({fiber_km, spec.fiber_attenuation_db_per_km});
    const int digits = round_digits.value_or(spec.scenario == Scenario::loss_only ? 6 : 7);

    const int n_batches = n_samples / batch_size;
    std::vector<double> draws(static_cast<std::size_t>(n_batches));
    parallel_for(n_batches, spec.workers, [&](int b) {
        const auto first = ch.etas.begin() + static_cast<std::ptrdiff_t>(b) * batch_size;
        const std::vector<double> batch(first, first + batch_size);
        const PdtHistogram hist = pdt_histogram(batch, spec.n_bins);
        const IntensityOptimum opt = optimize_point(spec, hist, eta_t);
        draws[static_cast<std::size_t>(b)] = round_half_even(opt.rate_star, digits);
    });

    std::map<double, int> tally;
    for (double d : draws) ++tally[d];
    PdrResult out;
    out.rate_values.reserve(tally.size());
    out.probabilities.reserve(tally.size());
    for (const auto& [value, count] : tally) {
        out.rate_values.push_back(value);
        out.probabilities.push_back(static_cast<double>(count) / n_batches);
    }
    return out;
}

}  // namespace pmsim
