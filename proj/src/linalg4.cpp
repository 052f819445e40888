#include "pmsim/linalg4.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pmsim {

Mat4 Mat4::identity() {
    Mat4 r;
    for (int i = 0; i < 4; ++i) r(i, i) = 1.0;
    return r;
}

Mat4 Mat4::zero() { return Mat4{}; }

Mat4 operator+(const Mat4& a, const Mat4& b) {
    Mat4 r;
    for (int i = 0; i < 16; ++i) r.m[i] = a.m[i] + b.m[i];
    return r;
}

Mat4 operator-(const Mat4& a, const Mat4& b) {
    Mat4 r;
    for (int i = 0; i < 16; ++i) r.m[i] = a.m[i] - b.m[i];
    return r;
}

Mat4 operator*(const Mat4& a, const Mat4& b) {
    Mat4 r;
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k) {
            const cplx aik = a(i, k);
            if (aik == cplx{}) continue;
            for (int j = 0; j < 4; ++j) r(i, j) += aik * b(k, j);
        }
    return r;
}

Mat4 operator*(double s, const Mat4& a) {
    Mat4 r;
    for (int i = 0; i < 16; ++i) r.m[i] = s * a.m[i];
    return r;
}

Mat4 adjoint(const Mat4& a) {
    Mat4 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r(i, j) = std::conj(a(j, i));
    return r;
}

Vec4 mat_vec(const Mat4& a, const Vec4& v) {
    Vec4 r{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r[i] += a(i, j) * v[j];
    return r;
}

cplx quadratic_form(const Vec4& v, const Mat4& a) {
    cplx r = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r += std::conj(v[i]) * a(i, j) * v[j];
    return r;
}

Mat4 outer(const Vec4& v) {
    Mat4 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r(i, j) = v[i] * std::conj(v[j]);
    return r;
}

cplx trace(const Mat4& a) { return a(0, 0) + a(1, 1) + a(2, 2) + a(3, 3); }

double max_abs(const Mat4& a) {
    double r = 0.0;
    for (const auto& v : a.m) r = std::max(r, std::abs(v));
    return r;
}

double frobenius_norm(const Mat4& a) {
    double r = 0.0;
    for (const auto& v : a.m) r += std::norm(v);
    return std::sqrt(r);
}

double hermiticity_defect(const Mat4& a) {
    double r = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r = std::max(r, std::abs(a(i, j) - std::conj(a(j, i))));
    return r;
}

namespace {

double off_diagonal_norm(const Mat4& a) {
    double r = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (i != j) r += std::norm(a(i, j));
    return std::sqrt(r);
}

// One unitary plane rotation annihilating a(p, q). a <- u† a u, v <- v u.
void jacobi_rotate(Mat4& a, Mat4& v, int p, int q) {
    const cplx apq = a(p, q);
    const double mag = std::abs(apq);
    if (mag == 0.0) return;
    const cplx w = apq / mag;  // phase so that conj(w)*apq is real
    const double app = a(p, p).real();
    const double aqq = a(q, q).real();
    const double tau = (aqq - app) / (2.0 * mag);
    double t;
    if (tau >= 0.0)
        t = 1.0 / (tau + std::sqrt(1.0 + tau * tau));
    else
        t = -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;

    Mat4 u = Mat4::identity();
    u(p, p) = c;
    u(p, q) = s;
    u(q, p) = -s * std::conj(w);
    u(q, q) = c * std::conj(w);

    a = adjoint(u) * a * u;
    a(p, q) = a(q, p) = 0.0;  // annihilated by construction
    v = v * u;
}

}  // namespace

EigenSystem4 eigen_hermitian(const Mat4& a) {
    if (hermiticity_defect(a) > 1e-12 * std::max(1.0, max_abs(a))) {
        throw std::invalid_argument("eigen_hermitian: matrix is not Hermitian");
    }
    // Symmetrize so roundoff from the caller cannot accumulate through sweeps.
    Mat4 work = 0.5 * (a + adjoint(a));
    Mat4 vecs = Mat4::identity();
    const double target = 1e-13 * std::max(frobenius_norm(work), 1e-300);
    for (int sweep = 0; sweep < 60 && off_diagonal_norm(work) > target; ++sweep) {
        for (int p = 0; p < 4; ++p)
            for (int q = p + 1; q < 4; ++q) jacobi_rotate(work, vecs, p, q);
    }

    EigenSystem4 out;
    std::array<int, 4> idx{0, 1, 2, 3};
    std::array<double, 4> vals;
    for (int i = 0; i < 4; ++i) vals[i] = work(i, i).real();
    std::sort(idx.begin(), idx.end(), [&](int i, int j) { return vals[i] < vals[j]; });
    for (int i = 0; i < 4; ++i) {
        out.values[i] = vals[idx[i]];
        for (int r = 0; r < 4; ++r) out.vectors(r, i) = vecs(r, idx[i]);
    }
    return out;
}

Mat4 matrix_sqrt_psd(const Mat4& a) {
    const EigenSystem4 eig = eigen_hermitian(a);
    Mat4 root = Mat4::zero();
    for (int k = 0; k < 4; ++k) {
        double lam = eig.values[k];
        if (lam < -1e-9) {
            throw std::invalid_argument(
                "matrix_sqrt_psd: matrix is not positive semidefinite (eigenvalue " +
                std::to_string(lam) + ")");
        }
        lam = std::max(lam, 0.0);
        const double r = std::sqrt(lam);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                root(i, j) += r * eig.vectors(i, k) * std::conj(eig.vectors(j, k));
    }
    return root;
}

}  // namespace pmsim
