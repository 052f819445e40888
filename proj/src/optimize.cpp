#include "pmsim/optimize.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace pmsim {

void OptimizationSpec::validate() const {
    if (!(mu_min > 0.0) || !(mu_max > mu_min))
        throw std::domain_error("optimizer: need 0 < mu_min < mu_max");
    if (coarse_points < 8) throw std::domain_error("optimizer: need at least 8 coarse points");
    if (!(tolerance > 0.0)) throw std::domain_error("optimizer: tolerance must be positive");
}

namespace {

double checked_eval(const std::function<double(double)>& rate_fn, double mu) {
    const double r = rate_fn(mu);
    if (!std::isfinite(r)) {
        throw std::runtime_error("optimize_intensity: rate function returned a non-finite value "
                                 "at mu = " + std::to_string(mu));
    }
    return r;
}

}  // namespace

IntensityOptimum optimize_intensity(const std::function<double(double)>& rate_fn,
                                    const OptimizationSpec& spec) {
    spec.validate();

    const int n = spec.coarse_points;
    const double log_lo = std::log(spec.mu_min);
    const double log_hi = std::log(spec.mu_max);
    std::vector<double> mus(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        mus[static_cast<std::size_t>(i)] = std::exp(log_lo + (log_hi - log_lo) * i / (n - 1.0));

    int best = 0;
    double best_rate = checked_eval(rate_fn, mus[0]);
    for (int i = 1; i < n; ++i) {
        const double r = checked_eval(rate_fn, mus[static_cast<std::size_t>(i)]);
        if (r > best_rate) {
            best_rate = r;
            best = i;
        }
    }

    // Golden-section refinement on the bracket around the best coarse point.
    double a = mus[static_cast<std::size_t>(best > 0 ? best - 1 : 0)];
    double b = mus[static_cast<std::size_t>(best < n - 1 ? best + 1 : n - 1)];
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    double fc = checked_eval(rate_fn, c);
    double fd = checked_eval(rate_fn, d);
    while (b - a > spec.tolerance * (std::abs(c) + std::abs(d))) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = checked_eval(rate_fn, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = checked_eval(rate_fn, d);
        }
    }

    IntensityOptimum out{mus[static_cast<std::size_t>(best)], best_rate};
    if (fc > out.rate_star) out = {c, fc};
    if (fd > out.rate_star) out = {d, fd};
    return out;
}

}  // namespace pmsim
