#include "pmsim/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pmsim {

namespace {

double secant_of_zenith(double zenith_rad) {
    if (!(zenith_rad >= 0.0) || zenith_rad >= std::numbers::pi / 2) {
        throw std::domain_error("zenith angle must lie in [0, pi/2): got " +
                                std::to_string(zenith_rad) + " rad");
    }
    return 1.0 / std::cos(zenith_rad);
}

}  // namespace

double slant_range_km(const SatelliteGeometry& geom) {
    return geom.altitude_km * secant_of_zenith(geom.zenith_rad);
}

double atmospheric_path_km(const SatelliteGeometry& geom) {
    return geom.atmosphere_km * secant_of_zenith(geom.zenith_rad);
}

double fiber_transmittance(const FiberLink& link) {
    return std::pow(10.0, -link.attenuation_db_per_km * link.length_km / 10.0);
}

double fiber_length_for_transmittance(double eta, double attenuation_db_per_km) {
    if (!(eta > 0.0) || eta > 1.0) {
        throw std::domain_error("transmittance must lie in (0, 1]: got " + std::to_string(eta));
    }
    return -10.0 * std::log10(eta) / attenuation_db_per_km;
}

}  // namespace pmsim
