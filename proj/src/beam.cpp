#include "pmsim/beam.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "pmsim/linalg4.hpp"
#include "pmsim/rng.hpp"

namespace pmsim {

namespace {

constexpr double kPi = std::numbers::pi;

struct QuadRule {
    std::vector<double> nodes;    // on (-1, 1)
    std::vector<double> weights;
};

// Newton iteration on the Legendre recurrence; nodes symmetric about zero.
QuadRule compute_gauss_legendre(int n) {
    QuadRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) < 1e-14) break;
        }
        rule.nodes[i] = -z;
        rule.nodes[n - 1 - i] = z;
        rule.weights[i] = rule.weights[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
    return rule;
}

const QuadRule& gauss_legendre(int n) {
    static std::map<int, QuadRule> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
    return it->second;
}

// Disk integral of exp(-2(A1 dx^2 + A2 dy^2 + A3 dx dy)), dx = rho cos t - rho0,
// dy = rho sin t, over rho in [0, r], t in [0, 2pi].
double beam_capture_integral(double a1, double a2, double a3, double rho0, double r,
                             int n_radial, int n_angular) {
    const QuadRule& radial = gauss_legendre(n_radial);   // map nodes are reference-stable
    const QuadRule& angular = gauss_legendre(n_angular);
    std::vector<double> cos_t(n_angular), sin_t(n_angular);
    for (int j = 0; j < n_angular; ++j) {
        const double t = kPi * (angular.nodes[j] + 1.0);
        cos_t[j] = std::cos(t);
        sin_t[j] = std::sin(t);
    }
    double acc = 0.0;
    for (int i = 0; i < n_radial; ++i) {
        const double rho = r * (radial.nodes[i] + 1.0) / 2.0;
        double inner = 0.0;
        for (int j = 0; j < n_angular; ++j) {
            const double dx = rho * cos_t[j] - rho0;
            const double dy = rho * sin_t[j];
            inner += angular.weights[j] *
                     std::exp(-2.0 * (a1 * dx * dx + a2 * dy * dy + a3 * dx * dy));
        }
        acc += radial.weights[i] * rho * inner;
    }
    return acc * (r / 2.0) * kPi;
}

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw std::domain_error(std::string(what) + " must be positive and finite: got " +
                                std::to_string(v));
    }
}

}  // namespace

double width_from_log(double theta, double w0_m) {
    require_positive(w0_m, "initial beam width");
    return w0_m * std::exp(theta / 2.0);
}

BeamStatistics beam_statistics(const AtmosphereCondition& cond, const SatelliteGeometry& geom,
                               double w0_m, double wavelength_m, LinkDirection direction,
                               const DownlinkModel& model) {
    if (direction != LinkDirection::downlink) {
        throw std::invalid_argument(
            "beam_statistics: only the down-link direction is modeled; supply a [moments] "
            "section for other geometries");
    }
    require_positive(w0_m, "initial beam width");
    require_positive(wavelength_m, "wavelength");
    if (!(cond.cn2 >= 0.0) || !(cond.n0_per_m3 >= 0.0))
        throw std::domain_error("beam_statistics: negative atmosphere parameters");

    const double h_m = atmospheric_path_km(geom) * 1000.0;
    const double L_m = slant_range_km(geom) * 1000.0;
    const double k = 2.0 * kPi / wavelength_m;

    const double rayleigh = kPi * w0_m * w0_m / wavelength_m;
    const double diff2 = w0_m * w0_m * (1.0 + (L_m / rayleigh) * (L_m / rayleigh));
    // Plane-wave coherence length over the turbulent segment; infinite when
    // cn2 = 0, which zeroes every turbulence term below.
    const double rho0 = std::pow(0.423 * k * k * cond.cn2 * h_m, -0.6);
    const double spread = wavelength_m * (h_m / 2.0) / (kPi * rho0);
    const double broaden = model.turb_broaden_coeff * spread;
    const double long_term2 = diff2 + broaden * broaden;

    const double var_theta =
        model.scint_coeff * 1.23 * cond.cn2 * std::pow(k, 7.0 / 6.0) * std::pow(h_m, 11.0 / 6.0);
    const double wander = model.wander_coeff * spread;
    const double var_centroid =
        model.pointing_error_rad * L_m * model.pointing_error_rad * L_m + wander * wander;

    BeamStatistics stats;
    stats.w0_m = w0_m;
    stats.mean = {0.0, 0.0, std::log(long_term2 / (w0_m * w0_m)),
                  std::log(long_term2 / (w0_m * w0_m))};
    stats.cov.fill(0.0);
    stats.cov[0] = stats.cov[5] = var_centroid;
    stats.cov[10] = stats.cov[15] = var_theta;
    return stats;
}

double effective_extinction(const AtmosphereCondition& cond, const SatelliteGeometry& geom,
                            double scatter_cross_section_m2) {
    if (!(cond.extinction > 0.0) || cond.extinction > 1.0)
        throw std::domain_error("extinction must lie in (0, 1]");
    const double airmass = atmospheric_path_km(geom) / geom.atmosphere_km;
    const double column_m = atmospheric_path_km(geom) * 1000.0;
    return std::pow(cond.extinction, airmass) *
           std::exp(-scatter_cross_section_m2 * cond.n0_per_m3 * column_m);
}

std::vector<BeamParams> sample_beam_params(const BeamStatistics& stats, int n,
                                           std::uint64_t seed) {
    if (n < 0) throw std::invalid_argument("sample count must be >= 0");
    require_positive(stats.w0_m, "initial beam width");

    Mat4 cov;
    double scale = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            cov(i, j) = stats.cov[i * 4 + j];
            scale = std::max(scale, std::abs(stats.cov[i * 4 + j]));
        }
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (std::abs(stats.cov[i * 4 + j] - stats.cov[j * 4 + i]) > 1e-12 * std::max(1.0, scale))
                throw std::invalid_argument("beam covariance must be symmetric");

    // factor = V sqrt(diag); eigenvalues may carry roundoff down to -1e-12*trace
    const double tr = trace(cov).real();
    const EigenSystem4 eig = eigen_hermitian(cov);
    std::array<std::array<double, 4>, 4> factor{};
    for (int k = 0; k < 4; ++k) {
        double lam = eig.values[k];
        if (lam < -1e-12 * std::max(tr, 1e-30))
            throw std::invalid_argument(
                "beam covariance is not positive semidefinite (eigenvalue " +
                std::to_string(lam) + ")");
        const double root = std::sqrt(std::max(lam, 0.0));
        for (int i = 0; i < 4; ++i) factor[i][k] = eig.vectors(i, k).real() * root;
    }

    std::vector<BeamParams> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        CounterRng rng(seed, static_cast<std::uint64_t>(i));
        const auto [z0, z1] = rng.normal_pair();
        const auto [z2, z3] = rng.normal_pair();
        const double u = rng.uniform();
        const std::array<double, 4> z{z0, z1, z2, z3};
        std::array<double, 4> x = stats.mean;
        for (int row = 0; row < 4; ++row)
            for (int col = 0; col < 4; ++col) x[row] += factor[row][col] * z[col];
        BeamParams& v = out[static_cast<std::size_t>(i)];
        v.x0_m = x[0];
        v.y0_m = x[1];
        v.w1_m = width_from_log(x[2], stats.w0_m);
        v.w2_m = width_from_log(x[3], stats.w0_m);
        v.orient_rad = u * kPi / 2.0;
    }
    return out;
}

double aperture_transmittance(const BeamParams& v, double r_m, double chi_ext,
                              const QuadratureSpec& quad) {
    require_positive(v.w1_m, "beam semi-axis w1");
    require_positive(v.w2_m, "beam semi-axis w2");
    if (!(chi_ext > 0.0) || chi_ext > 1.0)
        throw std::domain_error("extinction must lie in (0, 1]");
    if (!(r_m >= 0.0)) throw std::domain_error("aperture radius must be >= 0");
    if (r_m == 0.0) return 0.0;

    const double rho0 = std::hypot(v.x0_m, v.y0_m);
    const double theta0 = rho0 > 0.0 ? std::atan2(v.y0_m, v.x0_m) : 0.0;
    const double psi = v.orient_rad - theta0;
    const double c = std::cos(psi), s = std::sin(psi);
    const double iw1 = 1.0 / (v.w1_m * v.w1_m);
    const double iw2 = 1.0 / (v.w2_m * v.w2_m);
    const double a1 = c * c * iw1 + s * s * iw2;
    const double a2 = s * s * iw1 + c * c * iw2;
    const double a3 = (iw1 - iw2) * std::sin(2.0 * psi);

    const double prefactor = 2.0 * chi_ext / (kPi * v.w1_m * v.w2_m);
    const double coarse =
        prefactor * beam_capture_integral(a1, a2, a3, rho0, r_m, quad.n_radial, quad.n_angular);
    const double fine = prefactor * beam_capture_integral(a1, a2, a3, rho0, r_m,
                                                          2 * quad.n_radial, 2 * quad.n_angular);
    const double estimate = std::abs(fine - coarse);
    if (!(estimate <= quad.tolerance) || !std::isfinite(fine)) {
        throw std::runtime_error(
            "aperture_transmittance: quadrature error estimate " + std::to_string(estimate) +
            " exceeds tolerance " + std::to_string(quad.tolerance) + " at " +
            std::to_string(quad.n_radial) + "x" + std::to_string(quad.n_angular) +
            " nodes (beam " + std::to_string(v.w1_m) + "x" + std::to_string(v.w2_m) +
            " m, offset " + std::to_string(rho0) + " m)");
    }
    return std::clamp(fine, 0.0, chi_ext);
}

double circular_beam_transmittance(double w_m, double r_m, double chi_ext) {
    require_positive(w_m, "beam width");
    if (!(chi_ext > 0.0) || chi_ext > 1.0)
        throw std::domain_error("extinction must lie in (0, 1]");
    if (!(r_m >= 0.0)) throw std::domain_error("aperture radius must be >= 0");
    return chi_ext * -std::expm1(-2.0 * r_m * r_m / (w_m * w_m));
}

PdtHistogram pdt_histogram(const std::vector<double>& etas, int n_bins) {
    if (etas.empty()) throw std::invalid_argument("pdt_histogram: no samples");
    if (n_bins < 1) throw std::invalid_argument("pdt_histogram: need at least one bin");
    double top = 0.0;
    for (double e : etas) {
        if (!(e >= 0.0) || !std::isfinite(e))
            throw std::invalid_argument("pdt_histogram: transmittance samples must be >= 0");
        top = std::max(top, e);
    }

    PdtHistogram hist;
    hist.centers.resize(static_cast<std::size_t>(n_bins));
    hist.probs.assign(static_cast<std::size_t>(n_bins), 0.0);
    if (top == 0.0) {
        // all samples exactly dark: single zero-width bin at the origin
        hist.probs[0] = 1.0;
        return hist;
    }
    const double width = top / n_bins;
    for (int i = 0; i < n_bins; ++i) hist.centers[static_cast<std::size_t>(i)] = (i + 0.5) * width;
    const double inv = 1.0 / static_cast<double>(etas.size());
    for (double e : etas) {
        int bin = static_cast<int>(e / width);
        if (bin >= n_bins) bin = n_bins - 1;  // top edge inclusive
        hist.probs[static_cast<std::size_t>(bin)] += inv;
    }
    return hist;
}

}  // namespace pmsim
