#include "pmsim/keyrate.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pmsim {

namespace {

void require_transmittance(double eta, const char* who) {
    if (!(eta >= 0.0) || eta > 1.0) {
        throw std::domain_error(std::string(who) + ": transmittance must lie in [0, 1]: got " +
                                std::to_string(eta));
    }
}

void require_intensity(double mu, const char* who) {
    if (!(mu >= 0.0) || !std::isfinite(mu)) {
        throw std::domain_error(std::string(who) + ": intensity must be finite and >= 0: got " +
                                std::to_string(mu));
    }
}

constexpr double kWeightFloor = 1e-15;  // conditional weights below this carry no entropy

}  // namespace

SignalBasis make_signal_basis(double mu) {
    require_intensity(mu, "make_signal_basis");
    SignalBasis b;
    b.mu = mu;
    b.c0 = std::sqrt((1.0 + std::exp(-2.0 * mu)) / 2.0);
    b.c1 = std::sqrt(-std::expm1(-2.0 * mu) / 2.0);
    return b;
}

Vec4 signal_vector(const SignalBasis& basis, int a, int b) {
    const double sa = a ? -1.0 : 1.0;
    const double sb = b ? -1.0 : 1.0;
    const double c0 = basis.c0, c1 = basis.c1;
    return {c0 * c0, sa * sb * c1 * c1, sb * c0 * c1, sa * c0 * c1};
}

const Mat4& Povm4::element(Announcement g) const {
    switch (g) {
        case Announcement::plus: return plus;
        case Announcement::minus: return minus;
        case Announcement::inconclusive: return inconclusive;
        case Announcement::dustbin: return dustbin;
    }
    throw std::invalid_argument("Povm4::element: bad announcement");
}

void ImperfectionParams::validate() const {
    if (!(mode_match >= 0.0) || mode_match > 1.0)
        throw std::domain_error("mode_match must lie in [0, 1]");
    if (!std::isfinite(phase_mismatch_rad))
        throw std::domain_error("phase_mismatch_rad must be finite");
    if (!(dark_count >= 0.0) || dark_count >= 1.0)
        throw std::domain_error("dark_count must lie in [0, 1)");
    if (!(detector_eff > 0.0) || detector_eff > 1.0)
        throw std::domain_error("detector_eff must lie in (0, 1]");
    if (!(ec_inefficiency >= 1.0))
        throw std::domain_error("ec_inefficiency must be >= 1");
}

Povm4 mismatch_povm(double eta, double mu, double mode_match, double phase_mismatch_rad) {
    require_transmittance(eta, "mismatch_povm");
    require_intensity(mu, "mismatch_povm");
    const double sq = std::sqrt(eta);
    const double g = sq * mu;
    const double cm = std::sqrt(mode_match) * std::cos(phase_mismatch_rad);
    const double sm = std::sqrt(mode_match) * std::sin(phase_mismatch_rad);

    const double ell2 = std::exp(-2.0 * g);              // survival of both-arm overlap
    const double zeta = std::exp(-2.0 * (1.0 - sq) * mu);
    const double X = std::exp(-g * (1.0 + cm));
    const double Y = std::exp(-g * (1.0 - cm));
    const double one_m_X = -std::expm1(-g * (1.0 + cm));
    const double one_m_Y = -std::expm1(-g * (1.0 - cm));
    const double one_m_Xz2 = -std::expm1(-g * (1.0 + cm) - 4.0 * (1.0 - sq) * mu);
    const double one_m_Yz2 = -std::expm1(-g * (1.0 - cm) - 4.0 * (1.0 - sq) * mu);

    // Factored click/interference terms; each product keeps relative accuracy
    // when the exponents are small.
    const double pq_sum = one_m_X * Y * one_m_Xz2;   // p + q
    const double pq_dif = one_m_X * Y * (1.0 + X * zeta * zeta);
    const double ab_sum = one_m_Y * X * one_m_Yz2;   // a + b
    const double ab_dif = one_m_Y * X * (1.0 + Y * zeta * zeta);
    const double theta_s = g * sm;
    const double s_half = std::sin(theta_s / 2.0);
    const double re_r = -2.0 * ell2 * zeta * s_half * s_half;
    const double im_r = -ell2 * zeta * std::sin(theta_s);

    const SignalBasis basis = make_signal_basis(mu);
    const double c00 = basis.c0 * basis.c0;
    const double c11 = basis.c1 * basis.c1;
    const double d00 = 8.0 * c00 * c00;
    const double d11 = 8.0 * c11 * c11;
    const double d01 = 8.0 * c00 * c11;

    Povm4 povm;
    Mat4& ep = povm.plus;
    ep(0, 0) = (pq_sum + 4.0 * re_r + ab_sum) / d00;
    ep(1, 1) = (pq_sum - 4.0 * re_r + ab_sum) / d11;
    ep(0, 1) = ep(1, 0) = (pq_sum - ab_sum) / d01;
    ep(2, 2) = ep(3, 3) = (pq_dif + ab_dif) / d01;
    ep(2, 3) = cplx{pq_dif - ab_dif, 4.0 * im_r} / d01;
    ep(3, 2) = std::conj(ep(2, 3));

    Mat4& em = povm.minus;
    em = ep;
    em(0, 1) = -ep(0, 1);
    em(1, 0) = -ep(1, 0);
    em(2, 3) = -ep(2, 3);
    em(3, 2) = -ep(3, 2);

    Mat4& eq = povm.inconclusive;
    const double one_m_z = -std::expm1(-2.0 * (1.0 - sq) * mu);
    const double one_m_z2 = -std::expm1(-4.0 * (1.0 - sq) * mu);
    eq(0, 0) = ell2 * (1.0 + zeta) * (1.0 + zeta) / (4.0 * c00 * c00);
    eq(1, 1) = ell2 * one_m_z * one_m_z / (4.0 * c11 * c11);
    eq(2, 2) = eq(3, 3) = ell2 * one_m_z2 / (4.0 * c00 * c11);

    // Dustbin closes the resolution of identity; its printed closed form is
    // replaced by the exact complement, which is diagonal here.
    povm.dustbin = Mat4::identity() - ep - em - eq;
    return povm;
}

Povm4 lossonly_povm(double eta, double mu) { return mismatch_povm(eta, mu, 1.0, 0.0); }

Povm4 model_povm(const Povm4& mismatch, double pd) {
    if (!(pd >= 0.0) || pd >= 1.0)
        throw std::domain_error("model_povm: dark count must lie in [0, 1)");
    Povm4 out;
    out.plus = (1.0 - pd) * mismatch.plus + (1.0 - pd) * pd * mismatch.inconclusive;
    out.minus = (1.0 - pd) * mismatch.minus + (1.0 - pd) * pd * mismatch.inconclusive;
    out.inconclusive = (1.0 - pd) * (1.0 - pd) * mismatch.inconclusive;
    out.dustbin = pd * mismatch.plus + pd * mismatch.minus +
                  pd * pd * mismatch.inconclusive + mismatch.dustbin;
    return out;
}

double AnnouncementStats::conditional(int a, int b, int gamma) const {
    const double pg = gamma == 0 ? p_plus : p_minus;
    return joint[a][b][gamma] / pg;
}

AnnouncementStats announcement_stats(double eta, double mu, const ImperfectionParams& imp) {
    require_transmittance(eta, "announcement_stats");
    require_intensity(mu, "announcement_stats");
    imp.validate();
    const double g = std::sqrt(eta) * mu;
    const double cm = std::sqrt(imp.mode_match) * std::cos(imp.phase_mismatch_rad);
    const double pd = imp.dark_count;

    AnnouncementStats st;
    st.x = std::exp(-g * (1.0 + cm));
    st.y = std::exp(-g * (1.0 - cm));
    st.z = st.x * st.y;
    const double one_m_x = -std::expm1(-g * (1.0 + cm));
    const double one_m_y = -std::expm1(-g * (1.0 - cm));

    // Conclusive click weights; "same" covers (0,0)/(1,1) under +, "diff" the
    // phase-flipped pairings.
    const double same = (1.0 - pd) * (one_m_x * st.y + pd * st.z) / 4.0;
    const double diff = (1.0 - pd) * (one_m_y * st.x + pd * st.z) / 4.0;
    st.joint[0][0][0] = st.joint[1][1][0] = same;
    st.joint[0][1][0] = st.joint[1][0][0] = diff;
    st.joint[0][1][1] = st.joint[1][0][1] = same;
    st.joint[0][0][1] = st.joint[1][1][1] = diff;
    st.p_plus = 2.0 * (same + diff);
    st.p_minus = st.p_plus;

    const double denom = st.x * one_m_y + st.y * one_m_x + 2.0 * pd * st.z;
    if (!(denom > 0.0)) {
        throw std::runtime_error(
            "announcement_stats: conclusive announcement probability vanished "
            "(eta*mu and dark count both zero)");
    }
    st.eps_plus = st.x * (one_m_y + pd * st.y) / denom;
    st.eps_minus = st.eps_plus;
    return st;
}

double binary_entropy(double x) {
    if (!(x >= 0.0) || x > 1.0)
        throw std::domain_error("binary_entropy: argument must lie in [0, 1]: got " +
                                std::to_string(x));
    if (x == 0.0 || x == 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double total_transmittance(double eta_s, double eta_t, double eta_d) {
    require_transmittance(eta_s, "total_transmittance");
    require_transmittance(eta_t, "total_transmittance");
    if (!(eta_d > 0.0) || eta_d > 1.0)
        throw std::domain_error("total_transmittance: detector efficiency must lie in (0, 1]");
    return eta_s * eta_t * eta_d * eta_d;
}

double lossonly_keyrate(double eta, double mu) {
    require_transmittance(eta, "lossonly_keyrate");
    require_intensity(mu, "lossonly_keyrate");
    const double sq = std::sqrt(eta);
    const double gain = -std::expm1(-2.0 * mu * sq);
    const double arg = -std::expm1(-4.0 * mu * (1.0 - sq) - 2.0 * mu * sq) / 2.0;
    const double rate = gain * (1.0 - binary_entropy(arg));
    return rate > 0.0 ? rate : 0.0;
}

Mat4 eve_conditional_state(const Mat4& povm_element, int a, int b, const SignalBasis& basis) {
    const Mat4 root = matrix_sqrt_psd(povm_element);
    const Vec4 phi = signal_vector(basis, a, b);
    Vec4 v = mat_vec(root, phi);
    double t = 0.0;
    for (const cplx& c : v) t += std::norm(c);
    if (!(t > 1e-300)) {
        throw std::runtime_error("eve_conditional_state: announcement probability vanishes for "
                                 "signal (" + std::to_string(a) + "," + std::to_string(b) + ")");
    }
    const double inv = 1.0 / t;
    Mat4 rho = outer(v);
    for (auto& c : rho.m) c *= inv;
    return rho;
}

double von_neumann_entropy(const Mat4& rho) {
    const double tr = trace(rho).real();
    if (std::abs(tr - 1.0) > 1e-8)
        throw std::invalid_argument("von_neumann_entropy: trace deviates from one by " +
                                    std::to_string(tr - 1.0));
    const EigenSystem4 eig = eigen_hermitian(rho);
    double s = 0.0;
    for (double lam : eig.values) {
        if (lam > 1e-15) s -= lam * std::log2(lam);
    }
    return s;
}

double holevo_information(Announcement gamma, const AnnouncementStats& stats,
                          const std::array<std::optional<Mat4>, 4>& states) {
    if (gamma != Announcement::plus && gamma != Announcement::minus)
        throw std::invalid_argument("holevo_information: only conclusive announcements carry key");
    const int gi = gamma == Announcement::plus ? 0 : 1;

    Mat4 mix_all = Mat4::zero();
    Mat4 mix_bit[2] = {Mat4::zero(), Mat4::zero()};
    double w_bit[2] = {0.0, 0.0};
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            const double w = stats.conditional(a, b, gi);
            if (w < kWeightFloor) continue;
            const auto& rho = states[(a << 1) | b];
            if (!rho) {
                throw std::invalid_argument(
                    "holevo_information: missing conditional state with weight " +
                    std::to_string(w));
            }
            mix_all = mix_all + w * (*rho);
            mix_bit[a] = mix_bit[a] + w * (*rho);
            w_bit[a] += w;
        }
    }

    double chi = von_neumann_entropy(mix_all);
    for (int a = 0; a < 2; ++a) {
        if (w_bit[a] < kWeightFloor) continue;
        Mat4 rho_a = (1.0 / w_bit[a]) * mix_bit[a];
        chi -= w_bit[a] * von_neumann_entropy(rho_a);
    }
    if (chi < 0.0) chi = 0.0;
    if (chi > 2.0) chi = 2.0;
    return chi;
}

double ec_leakage(double eps, double f_ec) {
    if (!(f_ec >= 1.0)) throw std::domain_error("ec_leakage: inefficiency must be >= 1");
    return f_ec * binary_entropy(eps);
}

double devetak_winter_rate(double delta_ec, double chi) {
    const double r = 1.0 - delta_ec - chi;
    return r > 0.0 ? r : 0.0;
}

double noisy_keyrate(double eta, double mu, const ImperfectionParams& imp) {
    require_transmittance(eta, "noisy_keyrate");
    require_intensity(mu, "noisy_keyrate");
    imp.validate();
    if (mu == 0.0) return 0.0;

    AnnouncementStats stats;
    Povm4 povm;
    try {
        stats = announcement_stats(eta, mu, imp);
        povm = model_povm(mismatch_povm(eta, mu, imp.mode_match, imp.phase_mismatch_rad),
                          imp.dark_count);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("noisy_keyrate: measurement model: ") + e.what());
    }

    const SignalBasis basis = make_signal_basis(mu);
    double rate = 0.0;
    for (const Announcement gamma : {Announcement::plus, Announcement::minus}) {
        const int gi = gamma == Announcement::plus ? 0 : 1;
        const double pg = gi == 0 ? stats.p_plus : stats.p_minus;
        if (!(pg > 0.0)) continue;

        Mat4 root;
        try {
            root = matrix_sqrt_psd(povm.element(gamma));
        } catch (const std::exception& e) {
            throw std::runtime_error(std::string("noisy_keyrate: povm square root: ") + e.what());
        }

        std::array<std::optional<Mat4>, 4> states;
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                // Gate on the closed-form weight: at exact-zero announcement
                // probability the matrix quadratic form is pure roundoff.
                if (stats.conditional(a, b, gi) < kWeightFloor) continue;
                Vec4 v = mat_vec(root, signal_vector(basis, a, b));
                double t = 0.0;
                for (const cplx& c : v) t += std::norm(c);
                if (!(t > 0.0)) continue;
                const double inv = 1.0 / t;
                Mat4 rho = outer(v);
                for (auto& c : rho.m) c *= inv;
                states[(a << 1) | b] = rho;
            }
        }

        double chi;
        try {
            chi = holevo_information(gamma, stats, states);
        } catch (const std::exception& e) {
            throw std::runtime_error(std::string("noisy_keyrate: eavesdropper information: ") +
                                     e.what());
        }
        const double eps = gi == 0 ? stats.eps_plus : stats.eps_minus;
        rate += pg * devetak_winter_rate(ec_leakage(eps, imp.ec_inefficiency), chi);
    }
    return rate;
}

double plob_bound(double eta) {
    require_transmittance(eta, "plob_bound");
    if (eta == 1.0) throw std::domain_error("plob_bound: diverges at unit transmittance");
    return -std::log1p(-eta) / std::numbers::ln2;
}

}  // namespace pmsim
