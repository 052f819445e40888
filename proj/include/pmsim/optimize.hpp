#pragma once

#include <functional>

namespace pmsim {

struct OptimizationSpec {
    double mu_min = 1e-4;
    double mu_max = 2.0;
    int coarse_points = 64;   // >= 8, log-spaced
    double tolerance = 1e-5;  // bracket width stop, relative

    void validate() const;    // throws std::domain_error
};

struct IntensityOptimum {
    double mu_star;
    double rate_star;
};

// Log-spaced coarse sweep followed by golden-section refinement around the
// best coarse point. rate_star never falls below the best coarse value.
// Throws std::runtime_error naming mu when rate_fn returns a non-finite value.
IntensityOptimum optimize_intensity(const std::function<double(double)>& rate_fn,
                                    const OptimizationSpec& spec);

}  // namespace pmsim
