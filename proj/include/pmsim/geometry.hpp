#pragma once

namespace pmsim {

// Static link geometry. Angles in radians internally; zenith in [0, pi/2).
struct SatelliteGeometry {
    double altitude_km = 500.0;    // vertical distance to satellite
    double atmosphere_km = 20.0;   // vertical thickness of the turbulent layer
    double zenith_rad = 0.0;
};

struct FiberLink {
    double length_km = 0.0;
    double attenuation_db_per_km = 0.2;
};

// L = altitude * sec(zenith). Throws std::domain_error for zenith outside [0, pi/2).
double slant_range_km(const SatelliteGeometry& geom);

// h = atmosphere * sec(zenith). Same domain as slant_range_km.
double atmospheric_path_km(const SatelliteGeometry& geom);

// eta = 10^(-alpha*L/10)
double fiber_transmittance(const FiberLink& link);

// Inverse of fiber_transmittance at fixed attenuation. Throws std::domain_error
// unless eta in (0, 1].
double fiber_length_for_transmittance(double eta, double attenuation_db_per_km = 0.2);

}  // namespace pmsim
