#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pmsim/scan.hpp"

namespace pmsim {

// Parse or validation failure; the message carries a line reference when the
// offending text is known.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct PointSettings {
    double eta = 0.01;
    double mu = 0.05;
};

struct PdrSettings {
    double zenith_deg = 20.0;
    double fiber_km = 115.0;
    int n_samples = 100000;
    int batch_size = 1000;
    std::optional<int> round_digits;
};

struct BeamwidthSettings {
    std::vector<double> w0_grid;          // defaults to 0.05 .. 0.35
    std::vector<std::string> conditions;  // defaults to the full catalog
    std::optional<int> samples_per_point;
};

struct RunConfig {
    ScanSpec scan;
    std::string condition_label;
    bool dump_samples = false;
    PointSettings point;
    PdrSettings pdr;
    BeamwidthSettings beamwidth;
    std::map<std::string, AtmosphereCondition> conditions;

    // Throws ConfigError when label is not in the catalog.
    const AtmosphereCondition& condition(const std::string& label) const;
};

// The six shipped weather rows: (n0 per m^3, Cn^2).
std::map<std::string, AtmosphereCondition> builtin_conditions();

// Sectioned key-value text: `[section]` headers, `key = value` lines, `#` or
// `;` comments. Unknown sections and keys are rejected with a line reference;
// `seed` and `condition` under [run] are required.
RunConfig parse_config(const std::string& text);

// parse_config over the file contents; errors are prefixed with the path.
RunConfig load_config(const std::string& path);

}  // namespace pmsim
