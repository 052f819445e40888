#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "pmsim/geometry.hpp"

namespace pmsim {

// Received-beam footprint: centroid offset, semi-axes, orientation.
struct BeamParams {
    double x0_m = 0.0;
    double y0_m = 0.0;
    double w1_m = 0.0;   // > 0
    double w2_m = 0.0;   // > 0
    double orient_rad = 0.0;
};

struct AtmosphereCondition {
    double n0_per_m3 = 0.0;    // scattering particle density, >= 0
    double cn2 = 0.0;          // refractive-index structure constant, > 0
    double extinction = 0.9;   // zenith absorption/back-scatter survival, (0, 1]
};

// Gaussian moments of (x0, y0, Theta1, Theta2) with Theta_i = ln(W_i^2 / w0^2);
// orientation is uniform on [0, pi/2).
struct BeamStatistics {
    std::array<double, 4> mean{};
    std::array<double, 16> cov{};  // row-major, symmetric PSD
    double w0_m = 0.15;
};

enum class LinkDirection { downlink, uplink };

// Tuning constants for the shipped down-link moment model; runtime values come
// from configuration.
struct DownlinkModel {
    double pointing_error_rad = 1e-6;
    double turb_broaden_coeff = 2.0;
    double wander_coeff = 2.5;
    double scint_coeff = 0.02;
};

struct QuadratureSpec {
    int n_radial = 64;
    int n_angular = 64;
    double tolerance = 1e-8;  // absolute, on the node-doubling estimate
};

// W = w0 * exp(theta / 2)
double width_from_log(double theta, double w0_m);

// Vacuum diffraction over the full slant path, turbulence accumulated over the
// final atmospheric segment. Throws std::invalid_argument for uplink.
BeamStatistics beam_statistics(const AtmosphereCondition& cond, const SatelliteGeometry& geom,
                               double w0_m, double wavelength_m, LinkDirection direction,
                               const DownlinkModel& model = {});

// Survival factor outside the beam integral: extinction raised to the airmass
// times scattering over the slant atmospheric column.
double effective_extinction(const AtmosphereCondition& cond, const SatelliteGeometry& geom,
                            double scatter_cross_section_m2);

// Draw n beam vectors; sample i is fully determined by (seed, i). Throws
// std::invalid_argument when cov is not symmetric PSD.
std::vector<BeamParams> sample_beam_params(const BeamStatistics& stats, int n,
                                           std::uint64_t seed);

// Fraction of a displaced rotated elliptic Gaussian beam collected by a
// circular aperture of radius r, scaled by chi_ext. Gauss-Legendre product
// rule evaluated at the requested node count and at doubled counts; the
// difference is the error estimate. Result clamped to [0, chi_ext].
double aperture_transmittance(const BeamParams& v, double r_m, double chi_ext,
                              const QuadratureSpec& quad = {});

// chi_ext * (1 - e^(-2 r^2 / w^2)): closed form for the centered circular case.
double circular_beam_transmittance(double w_m, double r_m, double chi_ext);

struct PdtHistogram {
    std::vector<double> centers;
    std::vector<double> probs;  // sum to one
};

// Uniform bins spanning [0, max(etas)]; the top edge is inclusive. Empty input
// throws std::invalid_argument.
PdtHistogram pdt_histogram(const std::vector<double>& etas, int n_bins);

}  // namespace pmsim
