#pragma once

#include <array>
#include <optional>

#include "pmsim/linalg4.hpp"

namespace pmsim {

// Two-mode parity basis coefficients for intensity mu:
//   c0^2 = (1 + e^(-2mu))/2, c1^2 = (1 - e^(-2mu))/2.
struct SignalBasis {
    double mu;
    double c0;
    double c1;
};

SignalBasis make_signal_basis(double mu);

// Joint coherent signal |(-1)^a sqrt(mu), (-1)^b sqrt(mu)> expanded in the
// four-dimensional even/odd product basis. Components are real.
Vec4 signal_vector(const SignalBasis& basis, int a, int b);

enum class Announcement { plus = 0, minus = 1, inconclusive = 2, dustbin = 3 };

// Measurement operators for the relay's four announcements.
struct Povm4 {
    Mat4 plus, minus, inconclusive, dustbin;

    const Mat4& element(Announcement g) const;
};

struct ImperfectionParams {
    double mode_match = 0.99;        // M in [0, 1]
    double phase_mismatch_rad = 0.35;
    double dark_count = 1e-6;        // p_d in [0, 1)
    double detector_eff = 0.6;       // eta_d in (0, 1]
    double ec_inefficiency = 1.15;   // f_EC >= 1

    void validate() const;           // throws std::domain_error on bad ranges
};

// Announcement probabilities in closed form. x, y, z are survival amplitudes
//   x = e^(-sqrt(eta) mu (1 + sqrt(M) cos d)),
//   y = e^(-sqrt(eta) mu (1 - sqrt(M) cos d)),
//   z = e^(-2 sqrt(eta) mu) = x*y.
struct AnnouncementStats {
    double x, y, z;
    double joint[2][2][2];   // [a][b][gamma], gamma 0 = plus, 1 = minus
    double p_plus, p_minus;  // marginal announcement probabilities
    double eps_plus, eps_minus;

    // p(a, b | gamma) for gamma in {plus, minus}
    double conditional(int a, int b, int gamma) const;
};

AnnouncementStats announcement_stats(double eta, double mu, const ImperfectionParams& imp);

Povm4 lossonly_povm(double eta, double mu);
Povm4 mismatch_povm(double eta, double mu, double mode_match, double phase_mismatch_rad);

// Folds dark counts into a click/no-click POVM; completeness is preserved
// exactly: plus/minus gain pd-weighted inconclusive mass, the dustbin absorbs
// pd-weighted click mass.
Povm4 model_povm(const Povm4& mismatch, double pd);

double binary_entropy(double x);  // bits; domain error outside [0, 1]

// eta = eta_s * eta_t * eta_d^2
double total_transmittance(double eta_s, double eta_t, double eta_d);

// R = (1 - e^(-2 mu sqrt(eta))) * [1 - h((1 - e^(-4mu(1-sqrt(eta))) e^(-2mu sqrt(eta)))/2)],
// clamped at zero.
double lossonly_keyrate(double eta, double mu);

// Post-measurement relay state sqrt(E) |phi_ab><phi_ab| sqrt(E) / tr, always
// rank one. Throws std::runtime_error when the announcement probability for
// this signal vanishes.
Mat4 eve_conditional_state(const Mat4& povm_element, int a, int b, const SignalBasis& basis);

// S(rho) = -tr(rho log2 rho). Requires trace within 1e-8 of one; eigenvalues
// at or below 1e-15 contribute zero.
double von_neumann_entropy(const Mat4& rho);

// chi(A:E) = S(sum_ab w_ab rho_ab) - sum_a w_a S(rho_a) for one announcement.
// states indexed by (a<<1)|b; entries may be absent only where the
// conditional weight is negligible (< 1e-15).
double holevo_information(Announcement gamma, const AnnouncementStats& stats,
                          const std::array<std::optional<Mat4>, 4>& states);

double ec_leakage(double eps, double f_ec);              // f_ec * h(eps)
double devetak_winter_rate(double delta_ec, double chi); // max(1 - delta_ec - chi, 0)

// Weighted Devetak-Winter rate over the conclusive announcements with the full
// imperfection model. eta is the total transmittance.
double noisy_keyrate(double eta, double mu, const ImperfectionParams& imp);

// -log2(1 - eta); throws std::domain_error at eta = 1 (divergent).
double plob_bound(double eta);

}  // namespace pmsim
