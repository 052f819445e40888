#pragma once

#include <array>
#include <complex>

namespace pmsim {

using cplx = std::complex<double>;

// Dense 4x4 complex matrix, row-major.
struct Mat4 {
    std::array<cplx, 16> m{};

    cplx& operator()(int i, int j) { return m[i * 4 + j]; }
    const cplx& operator()(int i, int j) const { return m[i * 4 + j]; }

    static Mat4 identity();
    static Mat4 zero();
};

using Vec4 = std::array<cplx, 4>;

Mat4 operator+(const Mat4& a, const Mat4& b);
Mat4 operator-(const Mat4& a, const Mat4& b);
Mat4 operator*(const Mat4& a, const Mat4& b);
Mat4 operator*(double s, const Mat4& a);
Mat4 adjoint(const Mat4& a);
Vec4 mat_vec(const Mat4& a, const Vec4& v);
cplx quadratic_form(const Vec4& v, const Mat4& a);  // v† A v
Mat4 outer(const Vec4& v);                          // v v†
cplx trace(const Mat4& a);
double max_abs(const Mat4& a);
double frobenius_norm(const Mat4& a);
double hermiticity_defect(const Mat4& a);           // max |A - A†| entrywise

struct EigenSystem4 {
    std::array<double, 4> values;  // ascending
    Mat4 vectors;                  // columns, orthonormal
};

// Cyclic Jacobi for Hermitian input; off-diagonal norm driven below
// 1e-13 * ||A||_F. Input asserted Hermitian within 1e-12 entrywise.
EigenSystem4 eigen_hermitian(const Mat4& a);

// V sqrt(diag) V†. Eigenvalues in [-1e-9, 0] clamp to zero; below -1e-9 throws
// std::invalid_argument.
Mat4 matrix_sqrt_psd(const Mat4& a);

}  // namespace pmsim
